#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>

#include "propest/errors.hpp"

namespace propest {

/// Composite-midpoint quadrature settings shared by every integral in the
/// library. The default partition norm of 0.01 is the simulation protocol
/// value; tests use finer partitions where they need tighter tolerances.
struct QuadratureConfig {
    double partition_norm = 0.01;
    std::size_t max_panels = 50'000'000;

    void validate() const;

    /// Number of equally spaced panels used on [a, b]; throws ResourceError
    /// when the cap would be exceeded.
    std::size_t panels(double a, double b) const;
};

/// Equally spaced midpoint nodes on [lo, lo + n*step].
struct MidpointGrid {
    double lo = 0.0;
    double step = 0.0;
    std::size_t n = 0;

    double node(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * step; }
};

MidpointGrid midpoint_grid(double a, double b, const QuadratureConfig& cfg);

/// Composite midpoint rule for the integral of f over [a, b].
template <class F>
double integrate_1d(F&& f, double a, double b, const QuadratureConfig& cfg) {
    if (!(a <= b)) {
        throw InvalidInterval("integrate_1d: lower limit exceeds upper limit");
    }
    if (a == b) {
        return 0.0;
    }
    const MidpointGrid grid = midpoint_grid(a, b, cfg);
    double sum = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) {
        sum += f(grid.node(i));
    }
    return sum * grid.step;
}

/// Averaging density on [-1, 1]: even, bounded, of bounded variation and
/// integrating to one.
class WeightFunction {
public:
    /// omega(s) = 1 - |s|; sup norm 1, total variation 2.
    static WeightFunction triangular();
    /// omega(s) = 1/2; sup norm 1/2, total variation 0.
    static WeightFunction uniform();
    /// "triangular" or "uniform"; ConfigError otherwise.
    static WeightFunction by_name(std::string_view name);

    double operator()(double s) const;
    double sup_norm() const { return sup_norm_; }
    double total_variation() const { return total_variation_; }
    const std::string& name() const { return name_; }

private:
    WeightFunction(std::string name, double (*eval)(double), double sup, double tv)
        : name_(std::move(name)), eval_(eval), sup_norm_(sup), total_variation_(tv) {}

    std::string name_;
    double (*eval_)(double);
    double sup_norm_;
    double total_variation_;
};

/// Si(t) = integral of sin(x)/x over [0, t], by midpoint quadrature.
/// Negative arguments use Si(-t) = -Si(t).
double sine_integral(double t, const QuadratureConfig& cfg = {});

/// (1/pi) * integral of sin(y)/y over [(mu-b)t, (mu-a)t].
double dirichlet_window(double t, double mu, double a, double b, const QuadratureConfig& cfg = {});

/// (1/pi) * integral of sin((mu-b)y)/y over [0, t].
double dirichlet_halfline(double t, double mu, double b, const QuadratureConfig& cfg = {});

/// (1/pi) * integral over [a, b] of sin((mu-y)t)/(mu-y) * phi(y) dy.
double weighted_dirichlet(double t, double mu, double a, double b,
                          const std::function<double(double)>& phi,
                          const QuadratureConfig& cfg = {});

/// 2 (b1 - a1)(tv + sup) / |t|: upper bound on |integral of f(s) cos(ts)|
/// over [a1, b1] for f of bounded variation.
double fourier_decay_bound(double tv, double sup, double a1, double b1, double t);

}  // namespace propest
