#include "propest/families.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "propest/errors.hpp"

namespace propest {

namespace {

constexpr double kMaxExponent = 700.0;

void check_exponent(double arg, const char* what) {
    if (arg > kMaxExponent) {
        throw RangeError(std::string(what) + ": exponent " + std::to_string(arg) +
                         " exceeds 700");
    }
}

const LocationShift& as_location(const std::variant<LocationShift, GammaNef>& v, const char* op) {
    if (const auto* ls = std::get_if<LocationShift>(&v)) {
        return *ls;
    }
    throw UnsupportedOperation(std::string(op) + " is defined for location-shift families only");
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

std::string to_string(LocationKind kind) {
    switch (kind) {
        case LocationKind::Gaussian: return "gaussian";
        case LocationKind::Laplace: return "laplace";
        case LocationKind::Logistic: return "logistic";
        case LocationKind::Cauchy: return "cauchy";
        case LocationKind::HyperbolicSecant: return "hsecant";
    }
    return "unknown";
}

FamilyModel FamilyModel::location(LocationKind kind, double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw DomainError("location family scale must be positive");
    }
    return FamilyModel(LocationShift{kind, scale});
}

FamilyModel FamilyModel::gamma(double shape) {
    if (!(shape > 0.0) || !std::isfinite(shape)) {
        throw DomainError("Gamma shape must be positive");
    }
    return FamilyModel(GammaNef{shape});
}

FamilyModel FamilyModel::parse(std::string_view kind, double sigma) {
    if (kind == "gaussian" || kind == "normal") return gaussian(sigma);
    if (kind == "laplace") return laplace(sigma);
    if (kind == "logistic") return logistic(sigma);
    if (kind == "cauchy") return cauchy(sigma);
    if (kind == "hsecant") return hyperbolic_secant(sigma);
    if (kind == "gamma") return gamma(sigma);
    throw ConfigError("unknown family '" + std::string(kind) + "'");
}

LocationKind FamilyModel::kind() const { return as_location(v_, "kind()").kind; }

double FamilyModel::sigma() const {
    if (const auto* ls = std::get_if<LocationShift>(&v_)) {
        return ls->scale;
    }
    return std::get<GammaNef>(v_).shape;
}

std::string FamilyModel::name() const {
    if (const auto* ls = std::get_if<LocationShift>(&v_)) {
        return to_string(ls->kind);
    }
    return "gamma";
}

double FamilyModel::gamma_mean(double theta) const {
    if (!is_gamma()) {
        throw UnsupportedOperation("gamma_mean requires the Gamma family");
    }
    if (!(theta < 1.0)) {
        throw DomainError("Gamma natural parameter must satisfy theta < 1");
    }
    return sigma() / (1.0 - theta);
}

double FamilyModel::gamma_theta(double mean) const {
    if (!is_gamma()) {
        throw UnsupportedOperation("gamma_theta requires the Gamma family");
    }
    if (!(mean > 0.0)) {
        throw DomainError("Gamma mean must be positive");
    }
    return 1.0 - sigma() / mean;
}

double modulus_recip(const FamilyModel& family, double t) {
    const double sigma = family.sigma();
    switch (family.kind()) {
        case LocationKind::Gaussian: {
            const double arg = 0.5 * t * t * sigma * sigma;
            check_exponent(arg, "gaussian 1/r0");
            return std::exp(arg);
        }
        case LocationKind::Laplace:
            return 1.0 + sigma * sigma * t * t;
        case LocationKind::Logistic: {
            const double c = std::numbers::pi * sigma * std::abs(t);
            check_exponent(c, "logistic 1/r0");
            if (c < 1e-4) {
                return 1.0 + c * c / 6.0;
            }
            return std::sinh(c) / c;
        }
        case LocationKind::Cauchy: {
            const double arg = sigma * std::abs(t);
            check_exponent(arg, "cauchy 1/r0");
            return std::exp(arg);
        }
        case LocationKind::HyperbolicSecant: {
            // Printed form sigma*cosh(t/sigma); equals 1 at t = 0 only when sigma = 1.
            const double arg = std::abs(t) / sigma;
            check_exponent(arg, "hsecant 1/r0");
            return sigma * std::cosh(arg);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double modulus_recip_deriv(const FamilyModel& family, double u) {
    const double sigma = family.sigma();
    switch (family.kind()) {
        case LocationKind::Gaussian: {
            const double arg = 0.5 * u * u * sigma * sigma;
            check_exponent(arg, "gaussian d(1/r0)");
            return sigma * sigma * u * std::exp(arg);
        }
        case LocationKind::Laplace:
            return 2.0 * sigma * sigma * u;
        case LocationKind::Logistic: {
            const double c = std::numbers::pi * sigma;
            const double z = c * u;
            check_exponent(std::abs(z), "logistic d(1/r0)");
            if (std::abs(z) < 1e-3) {
                return c * (z / 3.0 + z * z * z / 30.0);
            }
            return (z * std::cosh(z) - std::sinh(z)) / (c * u * u);
        }
        case LocationKind::Cauchy:
            throw UnsupportedConstruction(
                "Cauchy family has no finite first absolute moment; the one-sided kernel cannot be "
                "built");
        case LocationKind::HyperbolicSecant: {
            const double arg = u / sigma;
            check_exponent(std::abs(arg), "hsecant d(1/r0)");
            return std::sinh(arg);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double modulus_recip_s_deriv(const FamilyModel& family, double t, double y, double s) {
    return t * modulus_recip_deriv(family, t * y * s);
}

double g_factor(const FamilyModel& family, double t, const QuadratureConfig& cfg) {
    if (!family.is_location_shift()) {
        throw UnsupportedOperation("g_factor is defined for location-shift families only");
    }
    return integrate_1d([&](double s) { return modulus_recip(family, t * s); }, -1.0, 1.0, cfg);
}

bool modulus_dominates(const FamilyModel& first, const FamilyModel& second, double t) {
    return modulus_recip(first, t) <= modulus_recip(second, t);
}

double sample(const FamilyModel& family, double param, SeededStream& rng) {
    const double sigma = family.sigma();
    if (family.is_gamma()) {
        if (!(param < 1.0)) {
            throw DomainError("Gamma natural parameter must satisfy theta < 1");
        }
        std::gamma_distribution<double> base(sigma, 1.0);
        return base(rng) / (1.0 - param);
    }
    switch (family.kind()) {
        case LocationKind::Gaussian: {
            std::normal_distribution<double> normal(param, sigma);
            return normal(rng);
        }
        case LocationKind::Laplace: {
            double u = rng.uniform() - 0.5;
            while (u == -0.5) u = rng.uniform() - 0.5;
            const double mag = -std::log1p(-2.0 * std::abs(u));
            return param + (u < 0.0 ? -sigma * mag : sigma * mag);
        }
        case LocationKind::Logistic: {
            double u = rng.uniform();
            while (u == 0.0) u = rng.uniform();
            return param + sigma * std::log(u / (1.0 - u));
        }
        case LocationKind::Cauchy: {
            const double u = rng.uniform();
            return param + sigma * std::tan(std::numbers::pi * (u - 0.5));
        }
        case LocationKind::HyperbolicSecant: {
            // X = param + Y/sigma with Y of density sech(pi y / 2)/2, whose CF
            // modulus is sech(t/sigma).
            double u = rng.uniform();
            while (u == 0.0) u = rng.uniform();
            const double y = 2.0 / std::numbers::pi * std::log(std::tan(0.5 * std::numbers::pi * u));
            return param + y / sigma;
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double cdf(const FamilyModel& family, double param, double x) {
    const double sigma = family.sigma();
    if (family.is_gamma()) {
        if (!(param < 1.0)) {
            throw DomainError("Gamma natural parameter must satisfy theta < 1");
        }
        if (x <= 0.0) return 0.0;
        if (std::isinf(x)) return 1.0;
        return boost::math::gamma_p(sigma, (1.0 - param) * x);
    }
    const double z = (x - param) / sigma;
    switch (family.kind()) {
        case LocationKind::Gaussian:
            return normal_cdf(z);
        case LocationKind::Laplace:
            return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
        case LocationKind::Logistic:
            return 1.0 / (1.0 + std::exp(-z));
        case LocationKind::Cauchy:
            return 0.5 + std::atan(z) / std::numbers::pi;
        case LocationKind::HyperbolicSecant: {
            const double y = (x - param) * sigma;
            return 2.0 / std::numbers::pi * std::atan(std::exp(0.5 * std::numbers::pi * y));
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double mean_abs(const FamilyModel& family, double param) {
    const double sigma = family.sigma();
    if (family.is_gamma()) {
        return family.gamma_mean(param);
    }
    switch (family.kind()) {
        case LocationKind::Gaussian:
            return sigma * std::sqrt(2.0 / std::numbers::pi) *
                       std::exp(-0.5 * param * param / (sigma * sigma)) +
                   param * (1.0 - 2.0 * normal_cdf(-param / sigma));
        case LocationKind::Laplace:
            return std::abs(param) + sigma * std::exp(-std::abs(param) / sigma);
        case LocationKind::Cauchy:
            return std::numeric_limits<double>::infinity();
        case LocationKind::Logistic:
        case LocationKind::HyperbolicSecant: {
            // E|X| = int_0^inf [1 - F(x) + F(-x)] dx; both tails are exponential.
            const double spread = family.kind() == LocationKind::Logistic ? sigma : 1.0 / sigma;
            const double upper = std::abs(param) + 80.0 * spread;
            QuadratureConfig cfg;
            cfg.partition_norm = upper / 200000.0;
            return integrate_1d(
                [&](double x) { return 1.0 - cdf(family, param, x) + cdf(family, param, -x); },
                0.0, upper, cfg);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double variance(const FamilyModel& family, double param) {
    const double sigma = family.sigma();
    if (family.is_gamma()) {
        const double rate = 1.0 - param;
        return sigma / (rate * rate);
    }
    switch (family.kind()) {
        case LocationKind::Gaussian: return sigma * sigma;
        case LocationKind::Laplace: return 2.0 * sigma * sigma;
        case LocationKind::Logistic: return std::numbers::pi * std::numbers::pi * sigma * sigma / 3.0;
        case LocationKind::Cauchy: return std::numeric_limits<double>::infinity();
        case LocationKind::HyperbolicSecant: return 1.0 / (sigma * sigma);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double gamma_log_a_tilde(double shape, int n) {
    return std::lgamma(static_cast<double>(n) + shape) - std::lgamma(shape);
}

GammaMomentData gamma_moment_data(const FamilyModel& family, int n, double theta) {
    if (!family.is_gamma()) {
        throw UnsupportedOperation("gamma_moment_data requires the Gamma family");
    }
    if (!(theta < 1.0)) {
        throw DomainError("Gamma natural parameter must satisfy theta < 1");
    }
    if (n < 0) {
        throw DomainError("moment index must be nonnegative");
    }
    GammaMomentData data;
    data.xi = 1.0 / (1.0 - theta);
    data.log_a_tilde = gamma_log_a_tilde(family.sigma(), n);
    data.a_tilde = std::exp(data.log_a_tilde);
    return data;
}

}  // namespace propest
