#include "propest/estimators.hpp"

#include <cmath>
#include <numbers>

#include "propest/errors.hpp"
#include "propest/parallel.hpp"

namespace propest {

namespace {

bool is_gamma_tag(ScheduleTag tag) {
    return tag == ScheduleTag::GammaBounded || tag == ScheduleTag::GammaOnesided;
}

double checked_t(double t) {
    if (!std::isfinite(t) || t < 0.0) {
        throw DomainError("t must be finite and nonnegative");
    }
    return t;
}

// Runs the kernel build, converting overflow into a message naming t.
template <class F>
auto with_t_context(double t, F&& f) {
    try {
        return f();
    } catch (const RangeError& e) {
        throw RangeError(std::string(e.what()) + " (t = " + std::to_string(t) + ")");
    }
}

double mean_of(const std::vector<double>& v) {
    return pairwise_sum(v) / static_cast<double>(v.size());
}

void attach_diagnostics(EstimateReport& rep, std::span<const double> data, const FamilyModel& family,
                        const NullSpec& null, const std::optional<FunctionalSpec>& phi,
                        const EstimatorConfig& cfg) {
    BoundExtras extras;
    extras.phi = phi;
    if (family.is_location_shift() && null.is_one_sided()) {
        // E (z - b)^2 = sigma^2 + (mu - b)^2, so the sample mean estimates D_m.
        const double b = std::get<NullSpec::OneSided>(null.value).b;
        double s = 0.0;
        for (double z : data) s += (z - b) * (z - b);
        extras.d_m = s / static_cast<double>(data.size());
        rep.notes.push_back("D_m estimated from the data");
    }
    if (family.is_gamma()) {
        rep.notes.push_back("Gamma bounds are trend-only and need the natural parameters");
        return;
    }
    try {
        rep.variance = variance_bound(family, null, rep.t_used, rep.m, cfg.omega, extras, cfg.quadrature);
        rep.concentration = concentration_halfwidth(family, null, rep.t_used, rep.m, cfg.lambda, cfg.omega,
                                                    extras, cfg.quadrature);
    } catch (const UnsupportedOperation& e) {
        rep.notes.push_back(e.what());
    } catch (const DomainError& e) {
        rep.notes.push_back(e.what());
    }
}

}  // namespace

std::string to_string(ScheduleTag tag) {
    switch (tag) {
        case ScheduleTag::LsBounded: return "LS_BOUNDED";
        case ScheduleTag::LsOnesidedGauss: return "LS_ONESIDED_GAUSS";
        case ScheduleTag::GammaBounded: return "GAMMA_BOUNDED";
        case ScheduleTag::GammaOnesided: return "GAMMA_ONESIDED";
        case ScheduleTag::WeightedGauss: return "WEIGHTED_GAUSS";
    }
    return "UNKNOWN";
}

ScheduleTag parse_schedule_tag(const std::string& text) {
    for (auto tag : {ScheduleTag::LsBounded, ScheduleTag::LsOnesidedGauss, ScheduleTag::GammaBounded,
                     ScheduleTag::GammaOnesided, ScheduleTag::WeightedGauss}) {
        if (text == to_string(tag)) return tag;
    }
    throw ConfigError("unknown schedule tag '" + text + "'");
}

double SpeedSchedule::gamma_for(ScheduleTag resolved) const {
    if (gamma) return *gamma;
    return is_gamma_tag(resolved) ? 1.0 : 0.495;
}

void SpeedSchedule::validate() const {
    if (gamma && !(*gamma > 0.0)) throw ConfigError("schedule gamma must be positive");
    if (u3 && !(*u3 > 0.0)) throw ConfigError("schedule u3 must be positive");
}

ScheduleTag default_schedule_tag(const FamilyModel& family, const NullSpec& null) {
    if (family.is_gamma()) {
        return null.is_one_sided() ? ScheduleTag::GammaOnesided : ScheduleTag::GammaBounded;
    }
    return null.is_one_sided() ? ScheduleTag::LsOnesidedGauss : ScheduleTag::LsBounded;
}

double speed_t(const SpeedSchedule& schedule, std::size_t m, const FamilyModel& family) {
    schedule.validate();
    if (m < 2) throw DomainError("speed schedule needs m >= 2");
    const ScheduleTag tag =
        schedule.tag.value_or(family.is_gamma() ? ScheduleTag::GammaBounded : ScheduleTag::LsBounded);
    const double gamma = schedule.gamma_for(tag);
    const double log_m = std::log(static_cast<double>(m));
    const double sigma = family.sigma();
    if (!is_gamma_tag(tag)) {
        if (!family.is_location_shift()) {
            throw ConfigError(to_string(tag) + " schedule needs a location-shift family");
        }
        return std::sqrt(2.0 * gamma * log_m) / sigma;
    }
    if (!family.is_gamma()) {
        throw ConfigError(to_string(tag) + " schedule needs the Gamma family");
    }
    const double loglog = std::log(log_m);
    if (!(loglog > 0.0)) throw DomainError("Gamma schedule needs ln ln m > 0");
    const double u3 = schedule.u3.value_or(0.2 / loglog);
    double linear = 0.0;
    if (tag == ScheduleTag::GammaBounded) {
        linear = sigma <= 0.75 ? 0.25 * gamma * u3 * log_m : 0.25 / sigma * gamma * u3 * log_m;
    } else {
        linear = gamma * u3 * log_m / (4.0 * std::numbers::sqrt2 * sigma);
    }
    return schedule.protocol_sqrt ? std::sqrt(linear) : linear;
}

void EstimatorConfig::validate() const {
    quadrature.validate();
    series.validate();
    schedule.validate();
    if (t_override) checked_t(*t_override);
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be nonnegative");
}

double resolve_t(const EstimatorConfig& cfg, std::size_t m, const FamilyModel& family,
                 const NullSpec& null) {
    if (cfg.t_override) return checked_t(*cfg.t_override);
    SpeedSchedule schedule = cfg.schedule;
    if (!schedule.tag) schedule.tag = default_schedule_tag(family, null);
    return checked_t(speed_t(schedule, m, family));
}

EstimateReport estimate_pi1(std::span<const double> data, const FamilyModel& family,
                            const NullSpec& null, const EstimatorConfig& cfg) {
    cfg.validate();
    if (data.empty()) throw DomainError("estimate_pi1 needs at least one observation");
    const ComposedKernel pair = compose_full_kernel(null, family, cfg.omega, cfg.series, cfg.quadrature);
    EstimateReport rep;
    rep.m = data.size();
    rep.t_used = resolve_t(cfg, rep.m, family, null);
    rep.kernel = pair.description();
    const auto values = with_t_context(rep.t_used, [&] {
        return pair.at(rep.t_used).evaluate(data, cfg.threads);
    });
    rep.estimate = 1.0 - mean_of(values);
    rep.null_estimate = 1.0 - rep.estimate;
    attach_diagnostics(rep, data, family, null, std::nullopt, cfg);
    return rep;
}

double oracle_pi1(std::span<const double> params, const FamilyModel& family, const NullSpec& null,
                  const EstimatorConfig& cfg, std::optional<double> t) {
    cfg.validate();
    if (params.empty()) throw DomainError("oracle_pi1 needs at least one parameter");
    const ComposedKernel pair = compose_full_kernel(null, family, cfg.omega, cfg.series, cfg.quadrature);
    const double tt = t ? checked_t(*t) : resolve_t(cfg, params.size(), family, null);
    std::vector<double> terms(params.size());
    parallel_for(params.size(), cfg.threads, [&](std::size_t i) { terms[i] = 1.0 - pair.psi(tt, params[i]); });
    return mean_of(terms);
}

EstimateReport estimate_functional(std::span<const double> data, const FamilyModel& family,
                                   const FunctionalSpec& spec, bool corrected,
                                   const EstimatorConfig& cfg) {
    cfg.validate();
    if (data.empty()) throw DomainError("estimate_functional needs at least one observation");
    const ComposedKernel pair =
        compose_functional_kernel(spec, family, cfg.omega, corrected, cfg.series, cfg.quadrature);
    const NullSpec interval = NullSpec::bounded(spec.a, spec.b);
    EstimatorConfig local = cfg;
    if (!local.schedule.tag) {
        local.schedule.tag = family.is_gamma() ? ScheduleTag::GammaBounded : ScheduleTag::WeightedGauss;
    }
    EstimateReport rep;
    rep.m = data.size();
    rep.t_used = resolve_t(local, rep.m, family, interval);
    rep.kernel = pair.description();
    const auto values = with_t_context(rep.t_used, [&] {
        return pair.at(rep.t_used).evaluate(data, cfg.threads);
    });
    rep.estimate = mean_of(values);
    attach_diagnostics(rep, data, family, interval, spec, cfg);
    return rep;
}

double oracle_functional(std::span<const double> params, const FamilyModel& family,
                         const FunctionalSpec& spec, bool corrected, const EstimatorConfig& cfg,
                         std::optional<double> t) {
    cfg.validate();
    if (params.empty()) throw DomainError("oracle_functional needs at least one parameter");
    const ComposedKernel pair =
        compose_functional_kernel(spec, family, cfg.omega, corrected, cfg.series, cfg.quadrature);
    EstimatorConfig local = cfg;
    if (!local.schedule.tag) {
        local.schedule.tag = family.is_gamma() ? ScheduleTag::GammaBounded : ScheduleTag::WeightedGauss;
    }
    const double tt = t ? checked_t(*t) : resolve_t(local, params.size(), family, NullSpec::bounded(spec.a, spec.b));
    std::vector<double> terms(params.size());
    parallel_for(params.size(), cfg.threads, [&](std::size_t i) { terms[i] = pair.psi(tt, params[i]); });
    return mean_of(terms);
}

double functional_truth(std::span<const double> means, const FunctionalSpec& spec) {
    if (means.empty()) throw DomainError("functional_truth needs at least one mean");
    double s = 0.0;
    for (double mu : means) {
        if (mu > spec.a && mu < spec.b) {
            s += spec.phi(mu);
        } else if (mu == spec.a || mu == spec.b) {
            s += 0.5 * spec.phi(mu);
        }
    }
    return s / static_cast<double>(means.size());
}

}  // namespace propest
