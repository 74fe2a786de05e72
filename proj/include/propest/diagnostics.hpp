#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "propest/families.hpp"
#include "propest/kernels.hpp"
#include "propest/numerics.hpp"

namespace propest {

struct SpeedSchedule;

/// A closed-form bound. Branches whose constant is unspecified leave value
/// empty and report the constant-free expression in trend.
struct BoundReport {
    std::optional<double> value;
    double trend = 0.0;
    bool trend_only = false;
    std::string branch;
};

struct ConcentrationReport {
    std::optional<double> halfwidth;
    std::optional<double> prob_floor;
    bool trend_only = false;
    std::string branch;
};

struct BoundExtras {
    /// sigma^2 + m^{-1} sum mu_i^2 (Gaussian one-sided).
    std::optional<double> d_m;
    /// Weight function for the functional branches.
    std::optional<FunctionalSpec> phi;
    /// Natural parameters (Gamma trend expressions).
    std::vector<double> thetas;
};

/// Upper bound on Var{e_m(t)}:
///   location bounded:   m^{-1} g^2 {4 |w|^2 + 2 pi^-2 (b-a)^2 t^2}
///   Gaussian one-sided: 2 t^2 e^{t^2 s^2} (4 t^2 s^2 + D_m) / (pi^2 m) + 2 |w| g^2 / m
///   location weighted:  m^{-1} g^2 {4 |w|^2 + 2 t^2 pi^-2 (b-a)^2 |phi|}
/// Gamma branches are trend-only.
BoundReport variance_bound(const FamilyModel& family, const NullSpec& null, double t,
                           std::size_t m, const WeightFunction& omega, const BoundExtras& extras,
                           const QuadratureConfig& cfg = {});

/// Half-width h and probability floor p with P(|e_m(t)| <= h) >= p.
ConcentrationReport concentration_halfwidth(const FamilyModel& family, const NullSpec& null,
                                            double t, std::size_t m, double lambda,
                                            const WeightFunction& omega,
                                            const BoundExtras& extras,
                                            const QuadratureConfig& cfg = {});

struct Predicate {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool satisfied = false;
    /// Asymptotic condition evaluated at finite m.
    bool heuristic = false;
};

struct MembershipReport {
    std::string class_name;
    std::vector<Predicate> predicates;
    std::optional<double> upsilon;
    std::optional<double> gamma_m;
    std::optional<double> r_rho;
    std::optional<double> p_star;
    bool all_satisfied() const;
};

struct ClassExtras {
    std::optional<double> q;
    std::optional<double> vartheta;
    std::optional<double> vartheta_prime;
    std::optional<double> rho;
    std::optional<double> gamma_prime;
    /// Means (location) or natural parameters (Gamma).
    std::vector<double> params;
    /// Weighted class: corrected or plain K_1 target.
    bool corrected = true;
    /// lhs <= epsilon * rhs stands in for lhs = o(rhs).
    double epsilon = 0.5;
};

/// Evaluates the predicates of the consistency class selected by the
/// schedule tag at finite m. Missing constants raise ConfigError.
MembershipReport class_membership(const SpeedSchedule& schedule, const FamilyModel& family,
                                  const NullSpec& null, std::size_t m, double pi1_hypothesis,
                                  const ClassExtras& extras, const QuadratureConfig& cfg = {});

/// Minimal distance from the means to the boundary points, over means that
/// are not on the boundary; +inf when there are none.
double boundary_gap(const std::vector<double>& params, const std::vector<double>& boundary);

}  // namespace propest
