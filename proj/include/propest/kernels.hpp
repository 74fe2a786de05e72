#pragma once

#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "propest/families.hpp"
#include "propest/numerics.hpp"

namespace propest {

/// Null parameter set. For the Gamma family a, b, mu0 are on the mean scale;
/// the matching natural parameters are theta = 1 - shape/mean.
struct NullSpec {
    struct Point {
        double mu0;
    };
    struct Bounded {
        double a;
        double b;
    };
    struct OneSided {
        double b;
    };

    std::variant<Point, Bounded, OneSided> value{OneSided{0.0}};

    static NullSpec point(double mu0) { return {Point{mu0}}; }
    static NullSpec bounded(double a, double b) { return {Bounded{a, b}}; }
    static NullSpec one_sided(double b) { return {OneSided{b}}; }

    bool is_point() const { return std::holds_alternative<Point>(value); }
    bool is_bounded() const { return std::holds_alternative<Bounded>(value); }
    bool is_one_sided() const { return std::holds_alternative<OneSided>(value); }

    /// InvalidInterval when a >= b or a bound is not finite.
    void validate() const;

    /// True when the parameter lies in the (open) null set.
    bool contains(double mu) const;

    /// "point:0", "bounded:-1,2", "onesided:0".
    std::string to_string() const;
    static NullSpec parse(const std::string& text);
};

/// Weighting function phi on [a, b] for the functional targets.
struct FunctionalSpec {
    std::function<double(double)> phi;
    double sup_norm = 0.0;
    double total_variation = 0.0;
    double a = -1.0;
    double b = 1.0;
    std::string name;

    void validate() const;

    /// phi = c on [a, b].
    static FunctionalSpec constant(double c, double a, double b);
    /// phi(y) = y^2 1{|y| <= bound} on [-bound, bound].
    static FunctionalSpec truncated_square(double bound);
};

struct SeriesConfig {
    int truncation = 25;
    void validate() const;
};

/// A matching function frozen at one value of t.
///
/// Every kernel in this library is a Riemann sum over a fixed grid, so at a
/// given t it can be rewritten as
///   c0 + sum_rows sum_k [P_k cos(w_k x') + Q_k sin(w_k x') + x' R_k cos(w_k x')]
///      + sum_components sum_n coef_n * (kappa x)^(n + offset) / exp(log_den_n)
/// with x' = x - shift and frequencies w_k = w0 + k dw. The location-shift
/// kernels use the trigonometric rows, the Gamma kernels the power series.
/// Building this form costs one pass over the quadrature grid; evaluating it
/// per observation is linear in the row/series length.
class PreparedKernel {
public:
    struct TrigRow {
        double shift = 0.0;
        double w0 = 0.0;
        double dw = 0.0;
        std::vector<double> cos_coef;
        std::vector<double> sin_coef;
        std::vector<double> xcos_coef;
    };

    struct MomentComponent {
        int power_offset = 0;
        double log_kappa = 0.0;
        bool alternating = false;
        std::vector<double> log_den;
        std::vector<double> coef;
    };

    double operator()(double x) const;

    void add_constant(double c) { constant_ += c; }
    void add_row(TrigRow row) { rows_.push_back(std::move(row)); }
    void add_component(MomentComponent comp) { components_.push_back(std::move(comp)); }

    /// this += factor * other.
    PreparedKernel& add(const PreparedKernel& other, double factor = 1.0);
    PreparedKernel& scale(double factor);

    /// K at every observation (parallel over observations).
    std::vector<double> evaluate(std::span<const double> xs, unsigned threads = 1) const;

    double constant() const { return constant_; }
    const std::vector<TrigRow>& rows() const { return rows_; }
    const std::vector<MomentComponent>& components() const { return components_; }

private:
    double constant_ = 0.0;
    std::vector<TrigRow> rows_;
    std::vector<MomentComponent> components_;
};

// ---- point-null kernels ---------------------------------------------------

PreparedKernel prepare_point_ls(double t, double mu_ref, const FamilyModel& family,
                                const WeightFunction& omega, const QuadratureConfig& cfg);

/// K_{1,0}(t, x; mu'): integral of omega(s) cos{ts(x - mu')} / r_0(ts) over [-1, 1].
double k_point_ls(double t, double x, double mu_ref, const FamilyModel& family,
                  const WeightFunction& omega, const QuadratureConfig& cfg = {});

/// psi_{1,0}(t, mu; mu') = integral of omega(s) cos{ts(mu - mu')} over [-1, 1].
double psi_point_ls(double t, double mu, double mu_ref, const WeightFunction& omega,
                    const QuadratureConfig& cfg = {});

PreparedKernel prepare_point_gamma(double t, double theta_ref, const FamilyModel& family,
                                   const WeightFunction& omega, const SeriesConfig& series,
                                   const QuadratureConfig& cfg);

/// K_{3,0}(t, x; theta') for the Gamma family (zeta = 1).
double k_point_gamma(double t, double x, double theta_ref, const FamilyModel& family,
                     const WeightFunction& omega, const SeriesConfig& series = {},
                     const QuadratureConfig& cfg = {});

/// psi_{3,0}(t, theta; theta') = integral of omega(s) cos[ts{xi(theta') - xi(theta)}].
double psi_point_gamma(double t, double theta, double theta_ref, const WeightFunction& omega,
                       const QuadratureConfig& cfg = {});

// ---- bounded null ---------------------------------------------------------

PreparedKernel prepare_bounded_ls(double t, double a, double b, const FamilyModel& family,
                                  const QuadratureConfig& cfg);

/// K_1(t, x) = t/(2 pi) int_a^b dy int_{-1}^{1} cos{ts(x - y)} / r_0(ts) ds.
double k_bounded_ls(double t, double x, const NullSpec::Bounded& null, const FamilyModel& family,
                    const QuadratureConfig& cfg = {});

PreparedKernel prepare_bounded_gamma(double t, double a, double b, const FamilyModel& family,
                                     const SeriesConfig& series, const QuadratureConfig& cfg);

/// Gamma bounded-null K_1 with the power series truncated at series.truncation.
double k_bounded_gamma(double t, double x, const NullSpec::Bounded& null,
                       const FamilyModel& family, const SeriesConfig& series = {},
                       const QuadratureConfig& cfg = {});

// ---- one-sided null -------------------------------------------------------

PreparedKernel prepare_onesided_ls(double t, double b, const FamilyModel& family,
                                   const QuadratureConfig& cfg);

/// Real part of K_1^dagger evaluated at x - b (odd-derivative branch).
double k_onesided_ls(double t, double x, const NullSpec::OneSided& null,
                     const FamilyModel& family, const QuadratureConfig& cfg = {});

PreparedKernel prepare_onesided_gamma(double t, double b, const FamilyModel& family,
                                      const SeriesConfig& series, const QuadratureConfig& cfg);

/// Gamma one-sided-null K_1 (b on the mean scale).
double k_onesided_gamma(double t, double x, const NullSpec::OneSided& null,
                        const FamilyModel& family, const SeriesConfig& series = {},
                        const QuadratureConfig& cfg = {});

// ---- phi-weighted ---------------------------------------------------------

PreparedKernel prepare_weighted(double t, const FunctionalSpec& spec, const FamilyModel& family,
                                const SeriesConfig& series, const QuadratureConfig& cfg);

/// K_1 with phi(y) in the outer integral; location-shift or Gamma.
double k_weighted(double t, double x, const FunctionalSpec& spec, const FamilyModel& family,
                  const SeriesConfig& series = {}, const QuadratureConfig& cfg = {});

// ---- composed pairs -------------------------------------------------------

/// (K, psi) with E K(t, Z) = psi(t, param) for Z ~ F_param (param = mu for
/// location families, theta for Gamma).
class ComposedKernel {
public:
    using Builder = std::function<PreparedKernel(double)>;
    using Psi = std::function<double(double, double)>;

    ComposedKernel(Builder builder, Psi psi, std::string description)
        : builder_(std::move(builder)), psi_(std::move(psi)), description_(std::move(description)) {}

    PreparedKernel at(double t) const { return builder_(t); }
    double K(double t, double x) const { return at(t)(x); }
    double psi(double t, double param) const { return psi_(t, param); }
    const std::string& description() const { return description_; }

private:
    Builder builder_;
    Psi psi_;
    std::string description_;
};

/// Fully corrected pair for estimating the null proportion: point null
/// (K_{1,0} / K_{3,0}), bounded null (K_1 minus half the boundary point
/// kernels) or one-sided null (1/2 - K_1 - half the boundary point kernel).
ComposedKernel compose_full_kernel(const NullSpec& null, const FamilyModel& family,
                                   const WeightFunction& omega, const SeriesConfig& series = {},
                                   const QuadratureConfig& cfg = {});

/// Pair for the phi-weighted null functional. corrected = true subtracts
/// phi(a)/2 K_{.,0}(.; a) and phi(b)/2 K_{.,0}(.; b) so boundary means are
/// excluded; corrected = false keeps K_1 alone (boundary means count half).
ComposedKernel compose_functional_kernel(const FunctionalSpec& spec, const FamilyModel& family,
                                         const WeightFunction& omega, bool corrected,
                                         const SeriesConfig& series = {},
                                         const QuadratureConfig& cfg = {});

}  // namespace propest
