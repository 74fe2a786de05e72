#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "propest/diagnostics.hpp"
#include "propest/families.hpp"
#include "propest/kernels.hpp"
#include "propest/numerics.hpp"

namespace propest {

enum class ScheduleTag { LsBounded, LsOnesidedGauss, GammaBounded, GammaOnesided, WeightedGauss };

std::string to_string(ScheduleTag tag);
ScheduleTag parse_schedule_tag(const std::string& text);

/// Speed-of-convergence schedule t_m.
///
///   LsBounded, LsOnesidedGauss, WeightedGauss:  t = sqrt(2 gamma ln m) / sigma
///   GammaBounded:   T = gamma u3 ln m / (4 sigma)          (sigma > 3/4)
///                   T = gamma u3 ln m / 4                  (sigma <= 3/4)
///   GammaOnesided:  T = gamma u3 ln m / (4 sqrt(2) sigma)
///
/// For the Gamma tags t = sqrt(T) when protocol_sqrt is set (the simulation
/// protocol) and t = T otherwise. u3 defaults to 0.2 / ln ln m.
struct SpeedSchedule {
    std::optional<ScheduleTag> tag;
    std::optional<double> gamma;
    bool protocol_sqrt = true;
    std::optional<double> u3;

    /// 0.495 for location-shift tags, 1 for Gamma tags.
    double gamma_for(ScheduleTag resolved) const;
    void validate() const;
};

/// Tag implied by a (family, null) pair when the schedule does not fix one.
ScheduleTag default_schedule_tag(const FamilyModel& family, const NullSpec& null);

/// t_m for m hypotheses. DomainError when m < 2 (or ln ln m <= 0 for the
/// Gamma tags); ConfigError when the tag does not fit the family.
double speed_t(const SpeedSchedule& schedule, std::size_t m, const FamilyModel& family);

struct EstimatorConfig {
    WeightFunction omega = WeightFunction::triangular();
    QuadratureConfig quadrature;
    SeriesConfig series;
    SpeedSchedule schedule;
    unsigned threads = 1;
    /// Fixed t in place of the schedule.
    std::optional<double> t_override;
    /// Lambda used for the reported concentration half-width.
    double lambda = 3.0;

    void validate() const;
};

struct EstimateReport {
    /// Alternative proportion (or the functional target for estimate_functional).
    double estimate = 0.0;
    /// 1 - estimate for the alternative-proportion estimator.
    std::optional<double> null_estimate;
    double t_used = 0.0;
    std::size_t m = 0;
    /// Oracle at t_used and e_m = estimate - oracle (simulation only).
    std::optional<double> oracle;
    std::optional<double> e_m;
    std::optional<BoundReport> variance;
    std::optional<ConcentrationReport> concentration;
    std::string kernel;
    std::vector<std::string> notes;
};

/// t used by the estimators: the override when set, the schedule otherwise.
double resolve_t(const EstimatorConfig& cfg, std::size_t m, const FamilyModel& family,
                 const NullSpec& null);

/// m^{-1} sum (1 - K(t, z_i)) with the fully corrected kernel for the null.
EstimateReport estimate_pi1(std::span<const double> data, const FamilyModel& family,
                            const NullSpec& null, const EstimatorConfig& cfg);

/// m^{-1} sum (1 - psi(t, param_i)); params are means (location) or natural
/// parameters (Gamma). t defaults to the schedule at m = params.size().
double oracle_pi1(std::span<const double> params, const FamilyModel& family, const NullSpec& null,
                  const EstimatorConfig& cfg, std::optional<double> t = std::nullopt);

/// m^{-1} sum K(t, z_i) for the phi-weighted kernel. corrected = true targets
/// the induced null proportion (boundary means excluded); false keeps K_1
/// alone and targets the version counting boundary means with weight 1/2.
EstimateReport estimate_functional(std::span<const double> data, const FamilyModel& family,
                                   const FunctionalSpec& spec, bool corrected,
                                   const EstimatorConfig& cfg);

/// m^{-1} sum psi(t, param_i) for the weighted pair.
double oracle_functional(std::span<const double> params, const FamilyModel& family,
                         const FunctionalSpec& spec, bool corrected, const EstimatorConfig& cfg,
                         std::optional<double> t = std::nullopt);

/// Target value of the uncorrected functional: phi averaged over interior
/// means plus half-weight at the endpoints.
double functional_truth(std::span<const double> means, const FunctionalSpec& spec);

}  // namespace propest
