#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "propest/numerics.hpp"
#include "propest/rng.hpp"

namespace propest {

enum class LocationKind { Gaussian, Laplace, Logistic, Cauchy, HyperbolicSecant };

/// Type I location-shift family F_mu with a fixed scale; the characteristic
/// function of F_0 is real, positive and zero-free.
struct LocationShift {
    LocationKind kind = LocationKind::Gaussian;
    double scale = 1.0;
};

/// Gamma natural exponential family: basis x^(shape-1) e^(-x) / Gamma(shape)
/// tilted by e^(theta x), theta < 1. Mean sigma/(1-theta), xi(theta) =
/// 1/(1-theta), zeta = 1, a_n = Gamma(n+shape)/Gamma(shape).
struct GammaNef {
    double shape = 1.0;
};

class FamilyModel {
public:
    FamilyModel() = default;

    static FamilyModel location(LocationKind kind, double scale);
    static FamilyModel gaussian(double sigma = 1.0) { return location(LocationKind::Gaussian, sigma); }
    static FamilyModel laplace(double sigma = 1.0) { return location(LocationKind::Laplace, sigma); }
    static FamilyModel logistic(double sigma = 1.0) { return location(LocationKind::Logistic, sigma); }
    static FamilyModel cauchy(double sigma = 1.0) { return location(LocationKind::Cauchy, sigma); }
    static FamilyModel hyperbolic_secant(double sigma = 1.0) {
        return location(LocationKind::HyperbolicSecant, sigma);
    }
    static FamilyModel gamma(double shape);

    /// Parses "gaussian", "laplace", "logistic", "cauchy", "hsecant" or
    /// "gamma"; sigma is the scale (location families) or shape (Gamma).
    static FamilyModel parse(std::string_view kind, double sigma);

    bool is_location_shift() const { return std::holds_alternative<LocationShift>(v_); }
    bool is_gamma() const { return std::holds_alternative<GammaNef>(v_); }

    /// Location families only; UnsupportedOperation otherwise.
    LocationKind kind() const;
    /// Scale for location families, shape for Gamma.
    double sigma() const;

    std::string name() const;

    /// Gamma only: mean mu(theta) = shape / (1 - theta), theta < 1.
    double gamma_mean(double theta) const;
    /// Gamma only: theta(mu) = 1 - shape / mu, mu > 0.
    double gamma_theta(double mean) const;

private:
    explicit FamilyModel(std::variant<LocationShift, GammaNef> v) : v_(v) {}
    std::variant<LocationShift, GammaNef> v_{LocationShift{}};
};

std::string to_string(LocationKind kind);

/// 1 / r_0(t), the reciprocal CF modulus of F_0. RangeError when the
/// exponent exceeds 700.
double modulus_recip(const FamilyModel& family, double t);

/// d/du of u -> 1/r_0(u).
double modulus_recip_deriv(const FamilyModel& family, double u);

/// (1/y) d/ds [1/r_0(t y s)] = t * (1/r_0)'(t y s); continuous at y = 0.
/// Cauchy: UnsupportedConstruction (no finite first absolute moment).
double modulus_recip_s_deriv(const FamilyModel& family, double t, double y, double s);

/// g(t) = integral over [-1, 1] of 1/r_0(ts) ds; does not depend on mu.
double g_factor(const FamilyModel& family, double t, const QuadratureConfig& cfg = {});

/// Ordering predicate at a single t: r_1(t) >= r_2(t).
bool modulus_dominates(const FamilyModel& first, const FamilyModel& second, double t);

/// Draw from F_param (location) or G_theta (Gamma, param = theta < 1).
double sample(const FamilyModel& family, double param, SeededStream& rng);

/// CDF of F_param or G_theta at x.
double cdf(const FamilyModel& family, double param, double x);

/// E|X| for X ~ F_param / G_theta.
double mean_abs(const FamilyModel& family, double param);

/// Var(X) (infinite for Cauchy).
double variance(const FamilyModel& family, double param);

struct GammaMomentData {
    double xi = 0.0;
    double a_tilde = 0.0;
    double log_a_tilde = 0.0;
};

/// xi(theta) = 1/(1-theta) and a_n = Gamma(n+shape)/Gamma(shape) (log-space).
GammaMomentData gamma_moment_data(const FamilyModel& family, int n, double theta);

/// log a_n = lgamma(n + shape) - lgamma(shape).
double gamma_log_a_tilde(double shape, int n);

}  // namespace propest
