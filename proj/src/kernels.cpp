#include "propest/kernels.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "propest/errors.hpp"
#include "propest/parallel.hpp"

namespace propest {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kLogGuard = 700.0;

// Nonnegative half of the midpoint grid on [-1, 1]. Every s-integrand used
// here is even in s, so the full sum equals the half sum with doubled weights
// (the s = 0 node, present when the panel count is odd, keeps weight h).
struct HalfGrid {
    double s0 = 0.0;
    double h = 0.0;
    std::size_t count = 0;
    bool has_zero = false;

    double node(std::size_t k) const { return s0 + static_cast<double>(k) * h; }
    double weight(std::size_t k) const { return has_zero && k == 0 ? h : 2.0 * h; }
};

HalfGrid half_grid(const QuadratureConfig& cfg) {
    const MidpointGrid full = midpoint_grid(-1.0, 1.0, cfg);
    HalfGrid g;
    g.h = full.step;
    g.has_zero = full.n % 2 == 1;
    g.count = (full.n + 1) / 2;
    g.s0 = g.has_zero ? 0.0 : 0.5 * g.h;
    return g;
}

void require_location(const FamilyModel& family, const char* what) {
    if (!family.is_location_shift()) {
        throw UnsupportedOperation(std::string(what) + " requires a location-shift family");
    }
}

void require_gamma(const FamilyModel& family, const char* what) {
    if (!family.is_gamma()) {
        throw UnsupportedOperation(std::string(what) + " requires the Gamma family");
    }
}

void require_interval(double a, double b, const char* what) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
        throw InvalidInterval(std::string(what) + ": need finite a < b");
    }
}

void require_onesided_family(const FamilyModel& family) {
    if (family.is_location_shift() && family.kind() == LocationKind::Cauchy) {
        throw UnsupportedConstruction(
            "Cauchy family has no finite first absolute moment; the one-sided kernel cannot be "
            "built");
    }
}

double theta_of_mean(const FamilyModel& family, double mean, const char* what) {
    if (!(mean > 0.0)) {
        throw ConfigError(std::string(what) + ": Gamma null bounds must be positive means");
    }
    return family.gamma_theta(mean);
}

// cos(n pi / 2 - v) and cos(n pi / 2 + v) from (cos v, sin v).
double phase_minus(int n, double c, double s) {
    switch (n & 3) {
        case 0: return c;
        case 1: return s;
        case 2: return -c;
        default: return -s;
    }
}

double phase_plus(int n, double c, double s) {
    switch (n & 3) {
        case 0: return c;
        case 1: return -s;
        case 2: return -c;
        default: return s;
    }
}

// Weighted cosine/sine transforms of the outer y-integral on [a, b].
struct OuterSums {
    std::vector<double> c;
    std::vector<double> s;
};

OuterSums outer_sums(const std::vector<double>& freqs, double a, double b, double center,
                     const std::function<double(double)>* phi, const QuadratureConfig& cfg) {
    const MidpointGrid yg = midpoint_grid(a, b, cfg);
    std::vector<double> ys(yg.n);
    std::vector<double> wy(yg.n);
    for (std::size_t j = 0; j < yg.n; ++j) {
        const double y = yg.node(j);
        ys[j] = y - center;
        wy[j] = yg.step * (phi ? (*phi)(y) : 1.0);
    }
    OuterSums out;
    out.c.resize(freqs.size());
    out.s.resize(freqs.size());
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        double c = 0.0;
        double s = 0.0;
        for (std::size_t j = 0; j < ys.size(); ++j) {
            const double v = freqs[i] * ys[j];
            c += wy[j] * std::cos(v);
            s += wy[j] * std::sin(v);
        }
        out.c[i] = c;
        out.s[i] = s;
    }
    return out;
}

PreparedKernel::MomentComponent make_component(int truncation, int power_offset, double log_kappa,
                                               bool alternating) {
    PreparedKernel::MomentComponent comp;
    comp.power_offset = power_offset;
    comp.log_kappa = log_kappa;
    comp.alternating = alternating;
    comp.coef.assign(static_cast<std::size_t>(truncation) + 1, 0.0);
    comp.log_den.assign(static_cast<std::size_t>(truncation) + 1, 0.0);
    return comp;
}

// Location-shift K_1 with optional phi weights in the outer integral.
PreparedKernel prepare_window_ls(double t, double a, double b,
                                 const std::function<double(double)>* phi,
                                 const FamilyModel& family, const QuadratureConfig& cfg) {
    const HalfGrid sg = half_grid(cfg);
    std::vector<double> freqs(sg.count);
    for (std::size_t k = 0; k < sg.count; ++k) {
        freqs[k] = t * sg.node(k);
    }
    const double center = 0.5 * (a + b);
    const OuterSums sums = outer_sums(freqs, a, b, center, phi, cfg);
    PreparedKernel::TrigRow row;
    row.shift = center;
    row.w0 = t * sg.s0;
    row.dw = t * sg.h;
    row.cos_coef.resize(sg.count);
    row.sin_coef.resize(sg.count);
    for (std::size_t k = 0; k < sg.count; ++k) {
        const double base = t / kTwoPi * sg.weight(k) * modulus_recip(family, freqs[k]);
        row.cos_coef[k] = base * sums.c[k];
        row.sin_coef[k] = base * sums.s[k];
    }
    PreparedKernel kernel;
    kernel.add_row(std::move(row));
    return kernel;
}

// Gamma K_1 with optional phi weights in the outer integral.
PreparedKernel prepare_window_gamma(double t, double a, double b,
                                    const std::function<double(double)>* phi,
                                    const FamilyModel& family, const SeriesConfig& series,
                                    const QuadratureConfig& cfg) {
    series.validate();
    const int n_max = series.truncation;
    const MidpointGrid sg = midpoint_grid(-1.0, 1.0, cfg);
    std::vector<double> freqs(sg.n);
    for (std::size_t i = 0; i < sg.n; ++i) {
        freqs[i] = t * sg.node(i);
    }
    const OuterSums sums = outer_sums(freqs, a, b, 0.0, phi, cfg);
    const double sigma = family.sigma();
    auto comp = make_component(n_max, 0, std::log(sigma), false);
    for (std::size_t i = 0; i < sg.n; ++i) {
        double power = 1.0;
        for (int n = 0; n <= n_max; ++n) {
            comp.coef[n] += sg.step * power * phase_minus(n, sums.c[i], sums.s[i]);
            power *= freqs[i];
        }
    }
    for (int n = 0; n <= n_max; ++n) {
        comp.coef[n] *= t / kTwoPi;
        comp.log_den[n] = std::lgamma(n + 1.0) + gamma_log_a_tilde(sigma, n);
    }
    PreparedKernel kernel;
    kernel.add_component(std::move(comp));
    return kernel;
}

}  // namespace

// ---- NullSpec / FunctionalSpec / SeriesConfig ------------------------------

void NullSpec::validate() const {
    if (const auto* p = std::get_if<Point>(&value)) {
        if (!std::isfinite(p->mu0)) throw DomainError("point null must be finite");
    } else if (const auto* bd = std::get_if<Bounded>(&value)) {
        require_interval(bd->a, bd->b, "bounded null");
    } else if (!std::isfinite(std::get<OneSided>(value).b)) {
        throw DomainError("one-sided null bound must be finite");
    }
}

bool NullSpec::contains(double mu) const {
    if (const auto* p = std::get_if<Point>(&value)) return mu == p->mu0;
    if (const auto* bd = std::get_if<Bounded>(&value)) return bd->a < mu && mu < bd->b;
    return mu < std::get<OneSided>(value).b;
}

std::string NullSpec::to_string() const {
    std::ostringstream os;
    os.precision(12);
    if (const auto* p = std::get_if<Point>(&value)) {
        os << "point:" << p->mu0;
    } else if (const auto* bd = std::get_if<Bounded>(&value)) {
        os << "bounded:" << bd->a << ',' << bd->b;
    } else {
        os << "onesided:" << std::get<OneSided>(value).b;
    }
    return os.str();
}

namespace {

double parse_number(const std::string& text, const std::string& whole) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ParseError("cannot parse null spec '" + whole + "'");
    }
    if (used != text.size()) {
        throw ParseError("cannot parse null spec '" + whole + "'");
    }
    return v;
}

}  // namespace

NullSpec NullSpec::parse(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw ParseError("null spec '" + text + "' must look like point:m, bounded:a,b or onesided:b");
    }
    const std::string kind = text.substr(0, colon);
    const std::string rest = text.substr(colon + 1);
    NullSpec out;
    if (kind == "point") {
        out = point(parse_number(rest, text));
    } else if (kind == "onesided") {
        out = one_sided(parse_number(rest, text));
    } else if (kind == "bounded") {
        const auto comma = rest.find(',');
        if (comma == std::string::npos) {
            throw ParseError("bounded null needs two values: '" + text + "'");
        }
        out = bounded(parse_number(rest.substr(0, comma), text),
                      parse_number(rest.substr(comma + 1), text));
    } else {
        throw ParseError("unknown null kind '" + kind + "'");
    }
    out.validate();
    return out;
}

void FunctionalSpec::validate() const {
    if (!phi) throw ConfigError("functional spec has no phi");
    require_interval(a, b, "functional spec");
    if (!(sup_norm >= 0.0) || !(total_variation >= 0.0) || !std::isfinite(sup_norm) ||
        !std::isfinite(total_variation)) {
        throw ConfigError("functional spec norms must be finite and nonnegative");
    }
}

FunctionalSpec FunctionalSpec::constant(double c, double a, double b) {
    FunctionalSpec spec{[c](double) { return c; }, std::abs(c), 0.0, a, b, "constant"};
    spec.validate();
    return spec;
}

FunctionalSpec FunctionalSpec::truncated_square(double bound) {
    if (!(bound > 0.0)) throw DomainError("truncated_square needs a positive bound");
    FunctionalSpec spec{[bound](double y) { return std::abs(y) <= bound ? y * y : 0.0; },
                        bound * bound, 2.0 * bound * bound, -bound, bound, "truncated_square"};
    return spec;
}

void SeriesConfig::validate() const {
    if (truncation < 1) throw ConfigError("series truncation must be at least 1");
}

// ---- PreparedKernel --------------------------------------------------------

double PreparedKernel::operator()(double x) const {
    double total = constant_;
    for (const auto& row : rows_) {
        const double xs = x - row.shift;
        std::complex<double> z = std::polar(1.0, row.w0 * xs);
        const std::complex<double> step = std::polar(1.0, row.dw * xs);
        double acc = 0.0;
        double xacc = 0.0;
        const std::size_t n = std::max({row.cos_coef.size(), row.sin_coef.size(), row.xcos_coef.size()});
        const bool has_c = !row.cos_coef.empty();
        const bool has_s = !row.sin_coef.empty();
        const bool has_x = !row.xcos_coef.empty();
        for (std::size_t k = 0; k < n; ++k) {
            if (has_c) acc += row.cos_coef[k] * z.real();
            if (has_s) acc += row.sin_coef[k] * z.imag();
            if (has_x) xacc += row.xcos_coef[k] * z.real();
            z *= step;
        }
        total += acc + xs * xacc;
    }
    for (const auto& comp : components_) {
        const bool negative = comp.alternating ? x > 0.0 : x < 0.0;
        const double lx = x == 0.0 ? -INFINITY : comp.log_kappa + std::log(std::abs(x));
        double acc = 0.0;
        for (std::size_t n = 0; n < comp.coef.size(); ++n) {
            const double c = comp.coef[n];
            if (c == 0.0) continue;
            const int p = static_cast<int>(n) + comp.power_offset;
            double log_pow = 0.0;
            if (p > 0) {
                if (x == 0.0) continue;
                log_pow = p * lx;
            }
            const double log_mag = std::log(std::abs(c)) + log_pow - comp.log_den[n];
            if (log_mag > kLogGuard) {
                throw RangeError("series term " + std::to_string(n) + " overflows (log magnitude " +
                                 std::to_string(log_mag) + ")");
            }
            double term = std::exp(log_mag);
            if (c < 0.0) term = -term;
            if (negative && (p & 1)) term = -term;
            acc += term;
        }
        total += acc;
    }
    return total;
}

PreparedKernel& PreparedKernel::add(const PreparedKernel& other, double factor) {
    constant_ += factor * other.constant_;
    for (TrigRow row : other.rows_) {
        for (auto& c : row.cos_coef) c *= factor;
        for (auto& c : row.sin_coef) c *= factor;
        for (auto& c : row.xcos_coef) c *= factor;
        rows_.push_back(std::move(row));
    }
    for (MomentComponent comp : other.components_) {
        for (auto& c : comp.coef) c *= factor;
        components_.push_back(std::move(comp));
    }
    return *this;
}

PreparedKernel& PreparedKernel::scale(double factor) {
    PreparedKernel scaled;
    scaled.add(*this, factor);
    *this = std::move(scaled);
    return *this;
}

std::vector<double> PreparedKernel::evaluate(std::span<const double> xs, unsigned threads) const {
    std::vector<double> out(xs.size());
    parallel_for(xs.size(), threads, [&](std::size_t i) { out[i] = (*this)(xs[i]); });
    return out;
}

// ---- point nulls -----------------------------------------------------------

PreparedKernel prepare_point_ls(double t, double mu_ref, const FamilyModel& family,
                                const WeightFunction& omega, const QuadratureConfig& cfg) {
    require_location(family, "point-null kernel");
    const HalfGrid sg = half_grid(cfg);
    PreparedKernel::TrigRow row;
    row.shift = mu_ref;
    row.w0 = t * sg.s0;
    row.dw = t * sg.h;
    row.cos_coef.resize(sg.count);
    for (std::size_t k = 0; k < sg.count; ++k) {
        const double s = sg.node(k);
        row.cos_coef[k] = sg.weight(k) * omega(s) * modulus_recip(family, t * s);
    }
    PreparedKernel kernel;
    kernel.add_row(std::move(row));
    return kernel;
}

double k_point_ls(double t, double x, double mu_ref, const FamilyModel& family,
                  const WeightFunction& omega, const QuadratureConfig& cfg) {
    require_location(family, "k_point_ls");
    return integrate_1d(
        [&](double s) { return omega(s) * std::cos(t * s * (x - mu_ref)) * modulus_recip(family, t * s); },
        -1.0, 1.0, cfg);
}

double psi_point_ls(double t, double mu, double mu_ref, const WeightFunction& omega,
                    const QuadratureConfig& cfg) {
    return integrate_1d([&](double s) { return omega(s) * std::cos(t * s * (mu - mu_ref)); }, -1.0,
                        1.0, cfg);
}

PreparedKernel prepare_point_gamma(double t, double theta_ref, const FamilyModel& family,
                                   const WeightFunction& omega, const SeriesConfig& series,
                                   const QuadratureConfig& cfg) {
    require_gamma(family, "K_{3,0}");
    series.validate();
    const double xi_ref = gamma_moment_data(family, 0, theta_ref).xi;
    const int n_max = series.truncation;
    const MidpointGrid sg = midpoint_grid(-1.0, 1.0, cfg);
    auto comp = make_component(n_max, 0, 0.0, true);
    for (std::size_t i = 0; i < sg.n; ++i) {
        const double s = sg.node(i);
        const double u = t * s;
        const double c = std::cos(u * xi_ref);
        const double sn = std::sin(u * xi_ref);
        const double w = sg.step * omega(s);
        double power = 1.0;
        for (int n = 0; n <= n_max; ++n) {
            comp.coef[n] += w * power * phase_plus(n, c, sn);
            power *= u;
        }
    }
    const double sigma = family.sigma();
    for (int n = 0; n <= n_max; ++n) {
        comp.log_den[n] = std::lgamma(n + 1.0) + gamma_log_a_tilde(sigma, n);
    }
    PreparedKernel kernel;
    kernel.add_component(std::move(comp));
    return kernel;
}

double k_point_gamma(double t, double x, double theta_ref, const FamilyModel& family,
                     const WeightFunction& omega, const SeriesConfig& series,
                     const QuadratureConfig& cfg) {
    return prepare_point_gamma(t, theta_ref, family, omega, series, cfg)(x);
}

double psi_point_gamma(double t, double theta, double theta_ref, const WeightFunction& omega,
                       const QuadratureConfig& cfg) {
    if (!(theta < 1.0) || !(theta_ref < 1.0)) {
        throw DomainError("Gamma natural parameter must satisfy theta < 1");
    }
    const double d = 1.0 / (1.0 - theta_ref) - 1.0 / (1.0 - theta);
    return integrate_1d([&](double s) { return omega(s) * std::cos(t * s * d); }, -1.0, 1.0, cfg);
}

// ---- bounded null ----------------------------------------------------------

PreparedKernel prepare_bounded_ls(double t, double a, double b, const FamilyModel& family,
                                  const QuadratureConfig& cfg) {
    require_location(family, "bounded-null kernel");
    require_interval(a, b, "bounded-null kernel");
    return prepare_window_ls(t, a, b, nullptr, family, cfg);
}

double k_bounded_ls(double t, double x, const NullSpec::Bounded& null, const FamilyModel& family,
                    const QuadratureConfig& cfg) {
    return prepare_bounded_ls(t, null.a, null.b, family, cfg)(x);
}

PreparedKernel prepare_bounded_gamma(double t, double a, double b, const FamilyModel& family,
                                     const SeriesConfig& series, const QuadratureConfig& cfg) {
    require_gamma(family, "Gamma bounded-null kernel");
    require_interval(a, b, "Gamma bounded-null kernel");
    theta_of_mean(family, a, "Gamma bounded-null kernel");
    return prepare_window_gamma(t, a, b, nullptr, family, series, cfg);
}

double k_bounded_gamma(double t, double x, const NullSpec::Bounded& null,
                       const FamilyModel& family, const SeriesConfig& series,
                       const QuadratureConfig& cfg) {
    return prepare_bounded_gamma(t, null.a, null.b, family, series, cfg)(x);
}

// ---- one-sided null --------------------------------------------------------

PreparedKernel prepare_onesided_ls(double t, double b, const FamilyModel& family,
                                   const QuadratureConfig& cfg) {
    require_location(family, "one-sided kernel");
    require_onesided_family(family);
    const HalfGrid sg = half_grid(cfg);
    const MidpointGrid yg = midpoint_grid(0.0, 1.0, cfg);
    PreparedKernel kernel;
    for (std::size_t j = 0; j < yg.n; ++j) {
        const double y = yg.node(j);
        PreparedKernel::TrigRow row;
        row.shift = b;
        row.w0 = t * y * sg.s0;
        row.dw = t * y * sg.h;
        row.sin_coef.resize(sg.count);
        row.xcos_coef.resize(sg.count);
        for (std::size_t k = 0; k < sg.count; ++k) {
            const double s = sg.node(k);
            const double base = yg.step * sg.weight(k) / kTwoPi;
            row.sin_coef[k] = base * modulus_recip_s_deriv(family, t, y, s);
            row.xcos_coef[k] = base * t * modulus_recip(family, t * y * s);
        }
        kernel.add_row(std::move(row));
    }
    return kernel;
}

double k_onesided_ls(double t, double x, const NullSpec::OneSided& null,
                     const FamilyModel& family, const QuadratureConfig& cfg) {
    return prepare_onesided_ls(t, null.b, family, cfg)(x);
}

PreparedKernel prepare_onesided_gamma(double t, double b, const FamilyModel& family,
                                      const SeriesConfig& series, const QuadratureConfig& cfg) {
    require_gamma(family, "Gamma one-sided kernel");
    series.validate();
    theta_of_mean(family, b, "Gamma one-sided kernel");
    const int n_max = series.truncation;
    const double sigma = family.sigma();
    const MidpointGrid sg = midpoint_grid(-1.0, 1.0, cfg);
    const MidpointGrid yg = midpoint_grid(0.0, 1.0, cfg);
    std::vector<double> moments(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (std::size_t j = 0; j < yg.n; ++j) {
        const double y = yg.node(j);
        for (std::size_t i = 0; i < sg.n; ++i) {
            const double u = t * y * sg.node(i);
            const double c = std::cos(u * b);
            const double sn = std::sin(u * b);
            const double w = yg.step * sg.step;
            double power = 1.0;
            for (int n = 0; n <= n_max; ++n) {
                moments[n] += w * power * phase_minus(n, c, sn);
                power *= u;
            }
        }
    }
    auto upper = make_component(n_max, 1, std::log(sigma), false);
    auto lower = make_component(n_max, 0, std::log(sigma), false);
    for (int n = 0; n <= n_max; ++n) {
        const double mn = t / kTwoPi * moments[n];
        const double log_fact = std::lgamma(n + 1.0);
        upper.coef[n] = mn;
        upper.log_den[n] = log_fact + gamma_log_a_tilde(sigma, n + 1);
        lower.coef[n] = -b * mn;
        lower.log_den[n] = log_fact + gamma_log_a_tilde(sigma, n);
    }
    PreparedKernel kernel;
    kernel.add_component(std::move(upper));
    kernel.add_component(std::move(lower));
    return kernel;
}

double k_onesided_gamma(double t, double x, const NullSpec::OneSided& null,
                        const FamilyModel& family, const SeriesConfig& series,
                        const QuadratureConfig& cfg) {
    return prepare_onesided_gamma(t, null.b, family, series, cfg)(x);
}

// ---- phi-weighted ----------------------------------------------------------

PreparedKernel prepare_weighted(double t, const FunctionalSpec& spec, const FamilyModel& family,
                                const SeriesConfig& series, const QuadratureConfig& cfg) {
    spec.validate();
    if (family.is_gamma()) {
        theta_of_mean(family, spec.a, "weighted Gamma kernel");
        return prepare_window_gamma(t, spec.a, spec.b, &spec.phi, family, series, cfg);
    }
    return prepare_window_ls(t, spec.a, spec.b, &spec.phi, family, cfg);
}

double k_weighted(double t, double x, const FunctionalSpec& spec, const FamilyModel& family,
                  const SeriesConfig& series, const QuadratureConfig& cfg) {
    return prepare_weighted(t, spec, family, series, cfg)(x);
}

// ---- composition -----------------------------------------------------------

ComposedKernel compose_full_kernel(const NullSpec& null, const FamilyModel& family,
                                   const WeightFunction& omega, const SeriesConfig& series,
                                   const QuadratureConfig& cfg) {
    null.validate();
    series.validate();
    cfg.validate();

    if (family.is_location_shift()) {
        if (const auto* p = std::get_if<NullSpec::Point>(&null.value)) {
            const double mu0 = p->mu0;
            return ComposedKernel(
                [=](double t) { return prepare_point_ls(t, mu0, family, omega, cfg); },
                [=](double t, double mu) { return psi_point_ls(t, mu, mu0, omega, cfg); },
                "point K_{1,0}");
        }
        if (const auto* bd = std::get_if<NullSpec::Bounded>(&null.value)) {
            const double a = bd->a;
            const double b = bd->b;
            return ComposedKernel(
                [=](double t) {
                    PreparedKernel k = prepare_bounded_ls(t, a, b, family, cfg);
                    k.add(prepare_point_ls(t, a, family, omega, cfg), -0.5);
                    k.add(prepare_point_ls(t, b, family, omega, cfg), -0.5);
                    return k;
                },
                [=](double t, double mu) {
                    return dirichlet_window(t, mu, a, b, cfg) -
                           0.5 * (psi_point_ls(t, mu, a, omega, cfg) + psi_point_ls(t, mu, b, omega, cfg));
                },
                "bounded K_1 - (K_{1,0}(a) + K_{1,0}(b))/2");
        }
        require_onesided_family(family);
        const double b = std::get<NullSpec::OneSided>(null.value).b;
        return ComposedKernel(
            [=](double t) {
                PreparedKernel k;
                k.add_constant(0.5);
                k.add(prepare_onesided_ls(t, b, family, cfg), -1.0);
                k.add(prepare_point_ls(t, b, family, omega, cfg), -0.5);
                return k;
            },
            [=](double t, double mu) {
                return 0.5 - dirichlet_halfline(t, mu, b, cfg) - 0.5 * psi_point_ls(t, mu, b, omega, cfg);
            },
            "one-sided 1/2 - Re K_1 - K_{1,0}(b)/2");
    }

    if (const auto* p = std::get_if<NullSpec::Point>(&null.value)) {
        if (!(p->mu0 > 0.0)) {
            throw ConfigError("Gamma point null needs a positive mean mu0");
        }
        const double theta0 = family.gamma_theta(p->mu0);
        return ComposedKernel(
            [=](double t) { return prepare_point_gamma(t, theta0, family, omega, series, cfg); },
            [=](double t, double theta) { return psi_point_gamma(t, theta, theta0, omega, cfg); },
            "point K_{3,0}");
    }
    if (const auto* bd = std::get_if<NullSpec::Bounded>(&null.value)) {
        const double a = bd->a;
        const double b = bd->b;
        const double theta_a = theta_of_mean(family, a, "Gamma bounded null");
        const double theta_b = theta_of_mean(family, b, "Gamma bounded null");
        return ComposedKernel(
            [=](double t) {
                PreparedKernel k = prepare_bounded_gamma(t, a, b, family, series, cfg);
                k.add(prepare_point_gamma(t, theta_a, family, omega, series, cfg), -0.5);
                k.add(prepare_point_gamma(t, theta_b, family, omega, series, cfg), -0.5);
                return k;
            },
            [=](double t, double theta) {
                return dirichlet_window(t, family.gamma_mean(theta), a, b, cfg) -
                       0.5 * (psi_point_gamma(t, theta, theta_a, omega, cfg) +
                              psi_point_gamma(t, theta, theta_b, omega, cfg));
            },
            "Gamma bounded K_1 - (K_{3,0}(a) + K_{3,0}(b))/2");
    }
    const double b = std::get<NullSpec::OneSided>(null.value).b;
    const double theta_b = theta_of_mean(family, b, "Gamma one-sided null");
    return ComposedKernel(
        [=](double t) {
            PreparedKernel k;
            k.add_constant(0.5);
            k.add(prepare_onesided_gamma(t, b, family, series, cfg), -1.0);
            k.add(prepare_point_gamma(t, theta_b, family, omega, series, cfg), -0.5);
            return k;
        },
        [=](double t, double theta) {
            return 0.5 - dirichlet_halfline(t, family.gamma_mean(theta), b, cfg) -
                   0.5 * psi_point_gamma(t, theta, theta_b, omega, cfg);
        },
        "Gamma one-sided 1/2 - K_1 - K_{3,0}(b)/2");
}

ComposedKernel compose_functional_kernel(const FunctionalSpec& spec, const FamilyModel& family,
                                         const WeightFunction& omega, bool corrected,
                                         const SeriesConfig& series, const QuadratureConfig& cfg) {
    spec.validate();
    series.validate();
    cfg.validate();
    const double a = spec.a;
    const double b = spec.b;
    const double phi_a = corrected ? spec.phi(a) : 0.0;
    const double phi_b = corrected ? spec.phi(b) : 0.0;

    if (family.is_location_shift()) {
        return ComposedKernel(
            [=](double t) {
                PreparedKernel k = prepare_weighted(t, spec, family, series, cfg);
                if (phi_a != 0.0) k.add(prepare_point_ls(t, a, family, omega, cfg), -0.5 * phi_a);
                if (phi_b != 0.0) k.add(prepare_point_ls(t, b, family, omega, cfg), -0.5 * phi_b);
                return k;
            },
            [=](double t, double mu) {
                double v = weighted_dirichlet(t, mu, a, b, spec.phi, cfg);
                if (phi_a != 0.0) v -= 0.5 * phi_a * psi_point_ls(t, mu, a, omega, cfg);
                if (phi_b != 0.0) v -= 0.5 * phi_b * psi_point_ls(t, mu, b, omega, cfg);
                return v;
            },
            corrected ? "weighted K_1 with boundary correction" : "weighted K_1");
    }

    const double theta_a = theta_of_mean(family, a, "weighted Gamma kernel");
    const double theta_b = theta_of_mean(family, b, "weighted Gamma kernel");
    return ComposedKernel(
        [=](double t) {
            PreparedKernel k = prepare_weighted(t, spec, family, series, cfg);
            if (phi_a != 0.0) {
                k.add(prepare_point_gamma(t, theta_a, family, omega, series, cfg), -0.5 * phi_a);
            }
            if (phi_b != 0.0) {
                k.add(prepare_point_gamma(t, theta_b, family, omega, series, cfg), -0.5 * phi_b);
            }
            return k;
        },
        [=](double t, double theta) {
            double v = weighted_dirichlet(t, family.gamma_mean(theta), a, b, spec.phi, cfg);
            if (phi_a != 0.0) v -= 0.5 * phi_a * psi_point_gamma(t, theta, theta_a, omega, cfg);
            if (phi_b != 0.0) v -= 0.5 * phi_b * psi_point_gamma(t, theta, theta_b, omega, cfg);
            return v;
        },
        corrected ? "weighted Gamma K_1 with boundary correction" : "weighted Gamma K_1");
}

}  // namespace propest
