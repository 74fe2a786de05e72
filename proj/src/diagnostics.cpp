#include "propest/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "propest/errors.hpp"
#include "propest/estimators.hpp"

namespace propest {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double checked_exp(double arg, const char* what) {
    if (arg > 700.0) {
        throw RangeError(std::string(what) + ": exponent " + std::to_string(arg) + " exceeds 700");
    }
    return std::exp(arg);
}

bool is_gaussian(const FamilyModel& family) {
    return family.is_location_shift() && family.kind() == LocationKind::Gaussian;
}

const std::vector<double>& require_thetas(const BoundExtras& extras) {
    if (extras.thetas.empty()) {
        throw ConfigError("Gamma trend expressions need the natural parameter vector");
    }
    for (double th : extras.thetas) {
        if (!(th < 1.0)) throw DomainError("Gamma natural parameter must satisfy theta < 1");
    }
    return extras.thetas;
}

double min_one_minus(const std::vector<double>& thetas) {
    double u = kInf;
    for (double th : thetas) u = std::min(u, 1.0 - th);
    return u;
}

double max_one_minus(const std::vector<double>& thetas) {
    double u = 0.0;
    for (double th : thetas) u = std::max(u, 1.0 - th);
    return u;
}

// C-free expression (1 + t^2) m^-2 exp(4 t max(sigma,1) / u3) sum (t / (1 - theta_i))^(3/4 - sigma).
double gamma_bounded_trend(double t, double sigma, const std::vector<double>& thetas) {
    const double u3 = min_one_minus(thetas);
    const double m = static_cast<double>(thetas.size());
    double sum = 0.0;
    for (double th : thetas) sum += std::pow(t / (1.0 - th), 0.75 - sigma);
    return (1.0 + t * t) / (m * m) *
           checked_exp(4.0 * t * std::max(sigma, 1.0) / u3, "Gamma variance trend") * sum;
}

double gamma_l_tilde(double sigma, const std::vector<double>& thetas) {
    if (sigma >= 2.75) {
        const double sup = max_one_minus(thetas);
        return std::max(std::pow(sup, sigma - 2.75), std::pow(sup, sigma - 0.75));
    }
    if (sigma <= std::numbers::sqrt2 / 2.0) {
        const double u3 = min_one_minus(thetas);
        return std::max(std::pow(u3, sigma - 0.75), std::pow(u3, sigma - 2.75));
    }
    throw UnsupportedOperation("one-sided Gamma bound is stated only for sigma >= 11/4 or sigma <= sqrt(2)/2");
}

double require_extra(const std::optional<double>& v, const char* name) {
    if (!v) throw ConfigError(std::string("class membership needs '") + name + "'");
    return *v;
}

Predicate make_predicate(std::string name, double lhs, double rhs, bool satisfied, bool heuristic) {
    return Predicate{std::move(name), lhs, rhs, satisfied, heuristic};
}

Predicate little_o(std::string name, double lhs, double rhs, double eps) {
    return make_predicate(std::move(name), lhs, rhs, lhs <= eps * rhs, true);
}

double mean_abs_param(const std::vector<double>& params) {
    double s = 0.0;
    for (double v : params) s += std::abs(v);
    return params.empty() ? 0.0 : s / static_cast<double>(params.size());
}

// Var|X| for X ~ F_mu.
double abs_variance(const FamilyModel& family, double mu) {
    const double e = mean_abs(family, mu);
    return variance(family, mu) + mu * mu - e * e;
}

void add_location_common(MembershipReport& rep, const FamilyModel& family, double t,
                         std::size_t m, double gamma, double a, double b,
                         const ClassExtras& extras, const QuadratureConfig& cfg, bool with_q) {
    const double vt = require_extra(extras.vartheta, "vartheta");
    const double vtp = require_extra(extras.vartheta_prime, "vartheta_prime");
    const double rho = require_extra(extras.rho, "rho");
    const double md = static_cast<double>(m);
    const double gamma_m = gamma * std::log(md);
    rep.gamma_m = gamma_m;

    double r_rho = 2.0 * rho + 2.0 * std::max(std::abs(a), std::abs(b));
    double e_max = 0.0;
    for (double tau : {0.0, a, b}) e_max = std::max(e_max, mean_abs(family, tau));
    r_rho += 2.0 * e_max;
    rep.r_rho = r_rho;

    if (with_q) {
        const double q = require_extra(extras.q, "q");
        rep.predicates.push_back(make_predicate("q*gamma > vartheta", q * gamma, vt, q * gamma > vt, false));
        rep.predicates.push_back(make_predicate("gamma > 0", gamma, 0.0, gamma > 0.0, false));
        const double upsilon = 2.0 / std::sqrt(md) * std::sqrt(2.0 * q * gamma_m) * g_factor(family, t, cfg);
        rep.upsilon = upsilon;
        double p_max = 0.0;
        for (double tau : {0.0, a, b}) {
            const double p = 2.0 * std::pow(md, vt) * gamma_m * gamma_m * std::exp(-q * gamma_m) +
                             4.0 * abs_variance(family, tau) * q * gamma_m * std::pow(md, -2.0 * vt) /
                                 std::pow(std::log(gamma_m), 2.0);
            p_max = std::max(p_max, p);
        }
        rep.p_star = 3.0 * p_max;
        rep.predicates.push_back(
            make_predicate("tau_m <= gamma_m", t, gamma_m, t <= gamma_m, false));
    } else {
        rep.predicates.push_back(make_predicate("0 < gamma < 0.5", gamma, 0.5, gamma > 0.0 && gamma < 0.5, false));
    }
    rep.predicates.push_back(make_predicate("vartheta > 1/2", vt, 0.5, vt > 0.5, false));
    rep.predicates.push_back(
        make_predicate("0 <= vartheta' < vartheta - 1/2", vtp, vt - 0.5, vtp >= 0.0 && vtp < vt - 0.5, false));
    rep.predicates.push_back(make_predicate("R(rho) = O(m^vartheta')", r_rho, std::pow(md, vtp),
                                            r_rho <= std::pow(md, vtp), true));
    if (!extras.params.empty()) {
        const double mean_abs_mu = mean_abs_param(extras.params);
        rep.predicates.push_back(
            make_predicate("m^-1 sum |mu_i| <= rho", mean_abs_mu, rho, mean_abs_mu <= rho, false));
    }
}

}  // namespace

double boundary_gap(const std::vector<double>& params, const std::vector<double>& boundary) {
    double gap = kInf;
    for (double v : params) {
        if (std::find(boundary.begin(), boundary.end(), v) != boundary.end()) continue;
        for (double tau : boundary) gap = std::min(gap, std::abs(v - tau));
    }
    return gap;
}

bool MembershipReport::all_satisfied() const {
    return std::all_of(predicates.begin(), predicates.end(), [](const Predicate& p) { return p.satisfied; });
}

BoundReport variance_bound(const FamilyModel& family, const NullSpec& null, double t,
                           std::size_t m, const WeightFunction& omega, const BoundExtras& extras,
                           const QuadratureConfig& cfg) {
    if (m == 0) throw DomainError("variance bound needs m >= 1");
    const double md = static_cast<double>(m);
    const double w = omega.sup_norm();
    BoundReport rep;

    if (family.is_gamma()) {
        const auto& thetas = require_thetas(extras);
        const double sigma = family.sigma();
        rep.trend_only = true;
        if (null.is_one_sided()) {
            const double u3 = min_one_minus(thetas);
            rep.branch = "gamma one-sided (trend only)";
            rep.trend = std::pow(t, 2.75 - sigma) * gamma_l_tilde(sigma, thetas) / md *
                        checked_exp(4.0 * t * std::max(std::numbers::sqrt2 * sigma, 1.0) / u3,
                                    "Gamma variance trend");
        } else {
            rep.branch = extras.phi ? "gamma weighted (trend only)" : "gamma bounded (trend only)";
            rep.trend = gamma_bounded_trend(t, sigma, thetas);
            if (extras.phi) rep.trend *= extras.phi->sup_norm * extras.phi->sup_norm;
        }
        return rep;
    }

    const double g = g_factor(family, t, cfg);
    if (extras.phi) {
        const auto& phi = *extras.phi;
        rep.branch = "location weighted";
        rep.value = g * g / md *
                    (4.0 * w * w + 2.0 * t * t / (kPi * kPi) * (phi.b - phi.a) * (phi.b - phi.a) * phi.sup_norm);
    } else if (const auto* bd = std::get_if<NullSpec::Bounded>(&null.value)) {
        const double len = bd->b - bd->a;
        rep.branch = "location bounded";
        rep.value = g * g / md * (4.0 * w * w + 2.0 / (kPi * kPi) * len * len * t * t);
    } else if (null.is_one_sided() && is_gaussian(family)) {
        if (!extras.d_m) throw ConfigError("Gaussian one-sided variance bound needs D_m");
        const double s2 = family.sigma() * family.sigma();
        rep.branch = "gaussian one-sided";
        rep.value = 2.0 * t * t * checked_exp(t * t * s2, "variance bound") / (kPi * kPi * md) *
                        (4.0 * t * t * s2 + *extras.d_m) +
                    2.0 * w * g * g / md;
    } else {
        throw UnsupportedOperation("no explicit variance bound for the " + family.name() + " family with a " +
                                   null.to_string() + " null");
    }
    rep.trend = *rep.value;
    return rep;
}

ConcentrationReport concentration_halfwidth(const FamilyModel& family, const NullSpec& null,
                                            double t, std::size_t m, double lambda,
                                            const WeightFunction& omega,
                                            const BoundExtras& extras, const QuadratureConfig& cfg) {
    if (m == 0) throw DomainError("concentration bound needs m >= 1");
    if (lambda < 0.0) throw DomainError("lambda must be nonnegative");
    const double md = static_cast<double>(m);
    const double w = omega.sup_norm();
    ConcentrationReport rep;
    if (family.is_gamma()) {
        rep.trend_only = true;
        rep.branch = "gamma (no explicit constant)";
        return rep;
    }
    const double hoeffding_floor = 1.0 - 4.0 * std::exp(-0.5 * lambda * lambda);
    if (extras.phi) {
        const auto& phi = *extras.phi;
        const double g = g_factor(family, t, cfg);
        rep.branch = "location weighted";
        rep.halfwidth = lambda / std::sqrt(md) * g / (2.0 * kPi) *
                        (std::abs(t) * (phi.b - phi.a) * phi.sup_norm + w);
        rep.prob_floor = hoeffding_floor;
    } else if (const auto* bd = std::get_if<NullSpec::Bounded>(&null.value)) {
        const double g = g_factor(family, t, cfg);
        rep.branch = "location bounded";
        rep.halfwidth = lambda / (2.0 * kPi) / std::sqrt(md) * (std::abs(t) * (bd->b - bd->a) + 2.0 * w) * g;
        rep.prob_floor = hoeffding_floor;
    } else if (null.is_one_sided() && is_gaussian(family)) {
        if (!(t > 0.0)) throw DomainError("Gaussian one-sided concentration bound needs t > 0");
        if (!extras.d_m) throw ConfigError("Gaussian one-sided concentration bound needs D_m");
        const double s2 = family.sigma() * family.sigma();
        rep.branch = "gaussian one-sided";
        rep.halfwidth = 2.0 * lambda * (checked_exp(0.5 * t * t * s2, "concentration bound") - 1.0) *
                        (1.0 / (2.0 * kPi) + 1.0 / (2.0 * kPi * t * s2) + w / (t * t * s2));
        const double tail = lambda > 0.0 ? *extras.d_m / (md * lambda * lambda) : kInf;
        rep.prob_floor = 1.0 - 4.0 * std::exp(-0.5 * lambda * lambda * md) - tail;
    } else {
        throw UnsupportedOperation("no explicit concentration bound for the " + family.name() +
                                   " family with a " + null.to_string() + " null");
    }
    return rep;
}

MembershipReport class_membership(const SpeedSchedule& schedule, const FamilyModel& family,
                                  const NullSpec& null, std::size_t m, double pi1_hypothesis,
                                  const ClassExtras& extras, const QuadratureConfig& cfg) {
    schedule.validate();
    const ScheduleTag tag = schedule.tag.value_or(default_schedule_tag(family, null));
    const double gamma = schedule.gamma_for(tag);
    const double t = speed_t(schedule, m, family);
    const double md = static_cast<double>(m);
    const double eps = extras.epsilon;
    MembershipReport rep;

    switch (tag) {
        case ScheduleTag::LsBounded: {
            const auto* bd = std::get_if<NullSpec::Bounded>(&null.value);
            if (!bd || !family.is_location_shift()) {
                throw ConfigError("LS_BOUNDED class needs a location-shift family and a bounded null");
            }
            rep.class_name = "location-shift bounded";
            add_location_common(rep, family, t, m, gamma, bd->a, bd->b, extras, cfg, true);
            const double u = boundary_gap(extras.params, {bd->a, bd->b});
            rep.predicates.push_back(little_o("t^-1 (1 + u_m^-1) = o(pi1)", (1.0 + 1.0 / u) / t, pi1_hypothesis, eps));
            rep.predicates.push_back(little_o("t Upsilon = o(pi1)", t * *rep.upsilon, pi1_hypothesis, eps));
            break;
        }
        case ScheduleTag::LsOnesidedGauss: {
            const auto* os = std::get_if<NullSpec::OneSided>(&null.value);
            if (!os || !is_gaussian(family)) {
                throw ConfigError("LS_ONESIDED_GAUSS class needs the Gaussian family and a one-sided null");
            }
            const double gp = require_extra(extras.gamma_prime, "gamma_prime");
            rep.class_name = "gaussian one-sided";
            rep.gamma_m = gamma * std::log(md);
            rep.predicates.push_back(make_predicate("0 < gamma < gamma' < 0.5", gamma, gp,
                                                    gamma > 0.0 && gamma < gp && gp < 0.5, false));
            const double u = boundary_gap(extras.params, {os->b});
            rep.predicates.push_back(little_o("t^-1 (1 + u~_m^-1) = o(pi1)", (1.0 + 1.0 / u) / t, pi1_hypothesis, eps));
            double sq = 0.0;
            for (double mu : extras.params) sq += (mu - os->b) * (mu - os->b);
            if (!extras.params.empty()) sq /= static_cast<double>(extras.params.size());
            rep.predicates.push_back(little_o("m^-1 sum mu_i^2 = o(m^(1-2 gamma'))", sq, std::pow(md, 1.0 - 2.0 * gp), eps));
            break;
        }
        case ScheduleTag::WeightedGauss: {
            const auto* bd = std::get_if<NullSpec::Bounded>(&null.value);
            if (!bd || !is_gaussian(family)) {
                throw ConfigError("WEIGHTED_GAUSS class needs the Gaussian family and the interval [a, b]");
            }
            rep.class_name = extras.corrected ? "gaussian weighted (corrected)" : "gaussian weighted (K_1 only)";
            add_location_common(rep, family, t, m, gamma, bd->a, bd->b, extras, cfg, false);
            if (extras.corrected) {
                const double u = boundary_gap(extras.params, {bd->a, bd->b});
                rep.predicates.push_back(little_o("t^-1 (1 + u_m^-1) = o(pi0)", (1.0 + 1.0 / u) / t, pi1_hypothesis, eps));
            } else {
                rep.predicates.push_back(little_o("t^-1 = o(pi0~)", 1.0 / t, pi1_hypothesis, eps));
            }
            break;
        }
        case ScheduleTag::GammaBounded: {
            const auto* bd = std::get_if<NullSpec::Bounded>(&null.value);
            if (!bd || !family.is_gamma()) {
                throw ConfigError("GAMMA_BOUNDED class needs the Gamma family and a bounded null");
            }
            if (extras.params.empty()) throw ConfigError("class membership needs the natural parameters");
            const double sigma = family.sigma();
            rep.gamma_m = gamma * std::log(md);
            const double xa = 1.0 / (1.0 - family.gamma_theta(bd->a));
            const double xb = 1.0 / (1.0 - family.gamma_theta(bd->b));
            std::vector<double> xis;
            for (double th : extras.params) xis.push_back(1.0 / (1.0 - th));
            const double u3t = boundary_gap(xis, {xa, xb});
            const double u3 = min_one_minus(extras.params);
            const double rhs = std::pow(md, 1.0 - gamma) * pi1_hypothesis * pi1_hypothesis;
            if (sigma >= 2.75) {
                rep.class_name = "gamma bounded, sigma >= 11/4";
                rep.predicates.push_back(make_predicate("gamma in (0, 1]", gamma, 1.0, gamma > 0.0 && gamma <= 1.0, false));
                rep.predicates.push_back(little_o("t^-1 (1 + u~3^-1) = o(pi1)", (1.0 + 1.0 / u3t) / t, pi1_hypothesis, eps));
                rep.predicates.push_back(make_predicate("t -> infinity", t, 1.0, t >= 1.0, true));
                const double lhs = std::pow(max_one_minus(extras.params), sigma - 0.75) * std::pow(t, 2.75 - sigma);
                rep.predicates.push_back(little_o("|1-theta|^(s-3/4) t^(11/4-s) = o(m^(1-gamma) pi1^2)", lhs, rhs, eps));
            } else if (sigma <= 0.75) {
                rep.class_name = "gamma bounded, sigma <= 3/4";
                rep.predicates.push_back(make_predicate("gamma in (0, 1)", gamma, 1.0, gamma > 0.0 && gamma < 1.0, false));
                rep.predicates.push_back(little_o("t^-1 (1 + u~3^-1) = o(pi1)", (1.0 + 1.0 / u3t) / t, pi1_hypothesis, eps));
                rep.predicates.push_back(make_predicate("t -> infinity", t, 1.0, t >= 1.0, true));
                const double lhs = std::pow(gamma * std::log(md), 2.75 - sigma) * u3 * u3;
                rep.predicates.push_back(little_o("(gamma ln m)^(11/4-s) u3^2 = o(m^(1-gamma) pi1^2)", lhs, rhs, eps));
            } else {
                rep.class_name = "none";
            }
            break;
        }
        case ScheduleTag::GammaOnesided: {
            const auto* os = std::get_if<NullSpec::OneSided>(&null.value);
            if (!os || !family.is_gamma()) {
                throw ConfigError("GAMMA_ONESIDED class needs the Gamma family and a one-sided null");
            }
            if (extras.params.empty()) throw ConfigError("class membership needs the natural parameters");
            const double sigma = family.sigma();
            rep.gamma_m = gamma * std::log(md);
            const bool upper = sigma >= 2.75;
            const bool lower = sigma <= std::numbers::sqrt2 / 2.0;
            if (!upper && !lower) {
                rep.class_name = "none";
                break;
            }
            rep.class_name = upper ? "gamma one-sided, sigma >= 11/4" : "gamma one-sided, sigma <= sqrt(2)/2";
            const bool gamma_ok = upper ? (gamma > 0.0 && gamma <= 1.0) : (gamma > 0.0 && gamma < 1.0);
            rep.predicates.push_back(make_predicate(upper ? "gamma in (0, 1]" : "gamma in (0, 1)", gamma, 1.0, gamma_ok, false));
            const double xb = 1.0 / (1.0 - family.gamma_theta(os->b));
            std::vector<double> xis;
            for (double th : extras.params) xis.push_back(1.0 / (1.0 - th));
            const double uc = boundary_gap(xis, {xb});
            rep.predicates.push_back(little_o("t^-1 (1 + u^3^-1) = o(pi1)", (1.0 + 1.0 / uc) / t, pi1_hypothesis, eps));
            rep.predicates.push_back(make_predicate("t -> infinity", t, 1.0, t >= 1.0, true));
            const double u3 = min_one_minus(extras.params);
            const double lhs = std::pow(u3 * gamma * std::log(md), 2.75 - sigma) * gamma_l_tilde(sigma, extras.params);
            const double rhs = pi1_hypothesis * pi1_hypothesis * std::pow(md, 1.0 - gamma);
            rep.predicates.push_back(little_o("(u3 gamma ln m)^(11/4-s) l~ = o(pi1^2 m^(1-gamma))", lhs, rhs, eps));
            break;
        }
    }
    return rep;
}

}  // namespace propest
