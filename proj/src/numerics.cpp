#include "propest/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace propest {

void QuadratureConfig::validate() const {
    if (!(partition_norm > 0.0) || !std::isfinite(partition_norm)) {
        throw ConfigError("quadrature partition norm must be positive and finite");
    }
    if (max_panels < 1) {
        throw ConfigError("quadrature max_panels must be at least 1");
    }
}

std::size_t QuadratureConfig::panels(double a, double b) const {
    validate();
    const double ratio = (b - a) / partition_norm;
    // 2/0.01 evaluates to 200.00000000000003; do not round that up to 201.
    const double n = std::max(1.0, std::ceil(ratio - 1e-9));
    if (!std::isfinite(n) || n > static_cast<double>(max_panels)) {
        throw ResourceError("quadrature on [" + std::to_string(a) + ", " + std::to_string(b) +
                            "] needs more than " + std::to_string(max_panels) + " panels");
    }
    return static_cast<std::size_t>(n);
}

MidpointGrid midpoint_grid(double a, double b, const QuadratureConfig& cfg) {
    MidpointGrid grid;
    grid.n = cfg.panels(a, b);
    grid.lo = a;
    grid.step = (b - a) / static_cast<double>(grid.n);
    return grid;
}

namespace {

double triangular_eval(double s) {
    const double r = 1.0 - std::abs(s);
    return r > 0.0 ? r : 0.0;
}

double uniform_eval(double s) { return std::abs(s) <= 1.0 ? 0.5 : 0.0; }

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

}  // namespace

WeightFunction WeightFunction::triangular() { return {"triangular", &triangular_eval, 1.0, 2.0}; }

WeightFunction WeightFunction::uniform() { return {"uniform", &uniform_eval, 0.5, 0.0}; }

WeightFunction WeightFunction::by_name(std::string_view name) {
    if (name == "triangular") {
        return triangular();
    }
    if (name == "uniform") {
        return uniform();
    }
    throw ConfigError("unknown weight function '" + std::string(name) +
                      "' (expected triangular or uniform)");
}

double WeightFunction::operator()(double s) const { return eval_(s); }

double sine_integral(double t, const QuadratureConfig& cfg) {
    if (t < 0.0) {
        return -sine_integral(-t, cfg);
    }
    return integrate_1d(sinc, 0.0, t, cfg);
}

double dirichlet_window(double t, double mu, double a, double b, const QuadratureConfig& cfg) {
    if (!(a < b)) {
        throw InvalidInterval("dirichlet_window: need a < b");
    }
    return (sine_integral((mu - a) * t, cfg) - sine_integral((mu - b) * t, cfg)) /
           std::numbers::pi;
}

double dirichlet_halfline(double t, double mu, double b, const QuadratureConfig& cfg) {
    const double d = mu - b;
    if (d == 0.0) {
        return 0.0;
    }
    const double sign = d > 0.0 ? 1.0 : -1.0;
    return sign * sine_integral(std::abs(d) * t, cfg) / std::numbers::pi;
}

double weighted_dirichlet(double t, double mu, double a, double b,
                          const std::function<double(double)>& phi,
                          const QuadratureConfig& cfg) {
    if (!(a < b)) {
        throw InvalidInterval("weighted_dirichlet: need a < b");
    }
    auto integrand = [&](double y) {
        const double d = mu - y;
        const double core = d == 0.0 ? t : std::sin(d * t) / d;
        return core * phi(y);
    };
    return integrate_1d(integrand, a, b, cfg) / std::numbers::pi;
}

double fourier_decay_bound(double tv, double sup, double a1, double b1, double t) {
    if (!(a1 < b1)) {
        throw InvalidInterval("fourier_decay_bound: need a1 < b1");
    }
    if (t == 0.0) {
        throw DomainError("fourier_decay_bound: bound undefined at t = 0");
    }
    if (tv < 0.0 || sup < 0.0) {
        throw DomainError("fourier_decay_bound: norms must be nonnegative");
    }
    return 2.0 * (b1 - a1) * (tv + sup) / std::abs(t);
}

}  // namespace propest
