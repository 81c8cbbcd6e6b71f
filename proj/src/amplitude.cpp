#include "tpa/amplitude.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tpa/errors.hpp"

namespace tpa {
namespace {

constexpr double kSupportSigmas = 8.0;
constexpr cplx I{0.0, 1.0};

bool finite_all(std::initializer_list<double> xs) {
    return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

struct Profile {
    double a;
    cplx beta;
    cplx gamma;
    cplx log_at(double t) const { return -a * t * t + beta * t + gamma; }
};

Profile gaussian_profile(double width, double center, double carrier) {
    const double a = 0.25 * width * width;
    return {a, cplx(2.0 * a * center, -carrier),
            cplx(-a * center * center + 0.25 * std::log(width * width / (2.0 * std::numbers::pi)), 0.0)};
}

std::pair<Profile, Profile> product_profiles(const GaussianProductParams& p) {
    const double wa = 0.5 * (p.carrier_sum_detuning - p.delta_f);
    const double wb = 0.5 * (p.carrier_sum_detuning + p.delta_f);
    return {gaussian_profile(p.omega_a_width, 0.0, wa), gaussian_profile(p.omega_b_width, p.mu, wb)};
}

double correlated_time_width(const CorrelatedGaussianParams& p) {
    const double P = p.omega_plus * p.omega_plus;
    const double M = p.omega_minus * p.omega_minus;
    return std::sqrt(P * M / (P + M));
}

// Bilinear interpolation on a square grid, zero outside.
cplx bilinear(const CustomGrid& g, double x, double y) {
    const auto& ax = g.t1;
    const std::size_t n = ax.size();
    if (x < ax.front() || x > ax.back() || y < ax.front() || y > ax.back()) return 0.0;
    auto cell = [&](double v) {
        auto it = std::upper_bound(ax.begin(), ax.end(), v);
        std::size_t i = static_cast<std::size_t>(it - ax.begin());
        return std::min(i == 0 ? 0 : i - 1, n - 2);
    };
    const std::size_t i = cell(x), j = cell(y);
    const double u = (x - ax[i]) / (ax[i + 1] - ax[i]);
    const double v = (y - ax[j]) / (ax[j + 1] - ax[j]);
    auto at = [&](std::size_t a, std::size_t b) { return g.values[a * n + b]; };
    return (1 - u) * (1 - v) * at(i, j) + u * (1 - v) * at(i + 1, j) + (1 - u) * v * at(i, j + 1) +
           u * v * at(i + 1, j + 1);
}

// Raw interpolant on a possibly non-square grid.
cplx bilinear_raw(const CustomGrid& g, double x, double y) {
    const auto& a1 = g.t1;
    const auto& a2 = g.t2;
    if (x < a1.front() || x > a1.back() || y < a2.front() || y > a2.back()) return 0.0;
    auto cell = [](const std::vector<double>& ax, double v) {
        auto it = std::upper_bound(ax.begin(), ax.end(), v);
        std::size_t i = static_cast<std::size_t>(it - ax.begin());
        return std::min(i == 0 ? 0 : i - 1, ax.size() - 2);
    };
    const std::size_t i = cell(a1, x), j = cell(a2, y);
    const double u = (x - a1[i]) / (a1[i + 1] - a1[i]);
    const double v = (y - a2[j]) / (a2[j + 1] - a2[j]);
    const std::size_t n2 = a2.size();
    auto at = [&](std::size_t a, std::size_t b) { return g.values[a * n2 + b]; };
    return (1 - u) * (1 - v) * at(i, j) + u * (1 - v) * at(i + 1, j) + (1 - u) * v * at(i, j + 1) +
           u * v * at(i + 1, j + 1);
}

// 2 * integral |f|^2 for a bilinear f on a square grid; exact with 2-point Gauss-Legendre.
double bilinear_norm(const CustomGrid& g) {
    const auto& ax = g.t1;
    const std::size_t n = ax.size();
    const double r = 0.5 / std::sqrt(3.0);
    const double nodes[2] = {0.5 - r, 0.5 + r};
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double hx = ax[i + 1] - ax[i];
        for (std::size_t j = 0; j + 1 < n; ++j) {
            const double hy = ax[j + 1] - ax[j];
            const cplx f00 = g.values[i * n + j], f10 = g.values[(i + 1) * n + j];
            const cplx f01 = g.values[i * n + j + 1], f11 = g.values[(i + 1) * n + j + 1];
            double cell = 0.0;
            for (double u : nodes)
                for (double v : nodes) {
                    const cplx f = (1 - u) * (1 - v) * f00 + u * (1 - v) * f10 + (1 - u) * v * f01 + u * v * f11;
                    cell += std::norm(f);
                }
            total += 0.25 * cell * hx * hy;
        }
    }
    return 2.0 * total;
}

void check_axis(const std::vector<double>& ax, const char* name) {
    if (ax.size() < 2) throw DomainError(std::string("custom grid axis ") + name + " needs at least 2 points");
    for (std::size_t i = 0; i < ax.size(); ++i) {
        if (!std::isfinite(ax[i])) throw DomainError(std::string("custom grid axis ") + name + " is not finite");
        if (i > 0 && !(ax[i] > ax[i - 1]))
            throw DomainError(std::string("custom grid axis ") + name + " must be strictly increasing");
    }
}

} // namespace

std::string to_string(Family f) {
    switch (f) {
    case Family::Optimal: return "optimal";
    case Family::GaussianProduct: return "gaussian_product";
    case Family::CorrelatedGaussian: return "correlated_gaussian";
    case Family::Custom: return "custom";
    }
    return "unknown";
}

Family family_from_string(const std::string& name) {
    if (name == "optimal") return Family::Optimal;
    if (name == "gaussian_product") return Family::GaussianProduct;
    if (name == "correlated_gaussian") return Family::CorrelatedGaussian;
    if (name == "custom") return Family::Custom;
    throw DomainError("unknown amplitude family '" + name + "'");
}

void validate(const OptimalStateParams& p) {
    p.atom.validate();
    if (!std::isfinite(p.t_star)) throw DomainError("t_star must be finite");
    if (p.t0) {
        if (!std::isfinite(*p.t0)) throw DomainError("t0 must be finite when given");
        if (!(*p.t0 < p.t_star)) throw DomainError("t0 must precede t_star");
    }
}

void validate(const GaussianProductParams& p) {
    if (!(p.omega_a_width > 0.0) || !(p.omega_b_width > 0.0))
        throw DomainError("gaussian product widths must be positive");
    if (!finite_all({p.omega_a_width, p.omega_b_width, p.mu, p.delta_f, p.carrier_sum_detuning}))
        throw DomainError("gaussian product parameters must be finite");
}

void validate(const CorrelatedGaussianParams& p) {
    if (!(p.omega_plus > 0.0) || !(p.omega_minus > 0.0))
        throw DomainError("correlated gaussian widths must be positive");
    if (!finite_all({p.omega_plus, p.omega_minus, p.mu, p.delta_f, p.carrier_sum_detuning}))
        throw DomainError("correlated gaussian parameters must be finite");
}

void validate(const CoherentPulseParams& p) {
    if (!(p.width > 0.0) || !std::isfinite(p.width)) throw DomainError("coherent pulse width must be positive");
    if (!(p.n_bar >= 0.0) || !std::isfinite(p.n_bar)) throw DomainError("n_bar must be non-negative");
    if (!finite_all({p.detuning, p.t_center})) throw DomainError("coherent pulse parameters must be finite");
}

double max_excitation_in_window(const AtomParams& atom, double tau) {
    if (!(tau >= 0.0)) throw DomainError("interaction window must be non-negative");
    if (std::isinf(tau)) return 1.0;
    const double ge = atom.gamma_e, gf = atom.gamma_f;
    const double eps = ge - gf;
    const double decay_f = std::exp(-gf * tau);
    double cross;
    if (std::abs(eps) < kDegenerateRates * gf)
        cross = gf * decay_f * expm1_ratio(eps, tau, kDegenerateRates * gf);
    else
        cross = gf * (std::exp(-ge * tau) - decay_f) / eps;
    return -std::expm1(-gf * tau) + cross;
}

double normalization_constant(const OptimalStateParams& p) {
    validate(p);
    const double tau = p.t0 ? p.t_star - *p.t0 : std::numeric_limits<double>::infinity();
    return std::exp(p.atom.gamma_f * p.t_star) / (p.atom.gamma_e * p.atom.gamma_f) *
           max_excitation_in_window(p.atom, tau);
}

double normalization_constant(const GaussianProductParams& p) {
    validate(p);
    const double a2 = p.omega_a_width * p.omega_a_width, b2 = p.omega_b_width * p.omega_b_width;
    const double s = a2 + b2;
    return 1.0 + 2.0 * p.omega_a_width * p.omega_b_width / s *
                     std::exp(-(p.mu * p.mu * a2 * b2 + 4.0 * p.delta_f * p.delta_f) / (2.0 * s));
}

double normalization_constant(const CorrelatedGaussianParams& p) {
    validate(p);
    const double m2 = p.omega_minus * p.omega_minus;
    return 1.0 + std::exp(-m2 * p.mu * p.mu / 4.0 - p.delta_f * p.delta_f / m2);
}

cplx gaussian_product_overlap(const GaussianProductParams& p) {
    validate(p);
    const double a2 = p.omega_a_width * p.omega_a_width, b2 = p.omega_b_width * p.omega_b_width;
    const double s = a2 + b2;
    const double mag = std::sqrt(2.0 * p.omega_a_width * p.omega_b_width / s) *
                       std::exp(-(a2 * b2 * p.mu * p.mu + 4.0 * p.delta_f * p.delta_f) / (4.0 * s));
    return mag * std::exp(cplx(0.0, -b2 * p.mu * p.delta_f / s));
}

double coherent_real_envelope(const CoherentPulseParams& p, double t) {
    const double w2 = p.width * p.width;
    const double dt = t - p.t_center;
    return std::sqrt(p.n_bar) * std::pow(w2 / (2.0 * std::numbers::pi), 0.25) * std::exp(-0.25 * w2 * dt * dt);
}

cplx coherent_envelope(const CoherentPulseParams& p, double t) {
    return coherent_real_envelope(p, t) * std::exp(cplx(0.0, -p.detuning * t));
}

TwoPhotonAmplitude TwoPhotonAmplitude::optimal(const OptimalStateParams& p) {
    validate(p);
    TwoPhotonAmplitude amp;
    amp.family_ = Family::Optimal;
    amp.params_ = p;
    const double tau = p.t0 ? p.t_star - *p.t0 : std::numeric_limits<double>::infinity();
    const double pm = max_excitation_in_window(p.atom, tau);
    amp.prefactor_ = std::sqrt(p.atom.gamma_e * p.atom.gamma_f / pm);
    amp.norm_ = normalization_constant(p);
    return amp;
}

TwoPhotonAmplitude TwoPhotonAmplitude::gaussian_product(const GaussianProductParams& p) {
    validate(p);
    TwoPhotonAmplitude amp;
    amp.family_ = Family::GaussianProduct;
    amp.params_ = p;
    amp.norm_ = normalization_constant(p);
    return amp;
}

TwoPhotonAmplitude TwoPhotonAmplitude::correlated_gaussian(const CorrelatedGaussianParams& p) {
    validate(p);
    TwoPhotonAmplitude amp;
    amp.family_ = Family::CorrelatedGaussian;
    amp.params_ = p;
    amp.norm_ = normalization_constant(p);
    return amp;
}

TwoPhotonAmplitude TwoPhotonAmplitude::custom(const CustomGrid& raw) {
    check_axis(raw.t1, "t1");
    check_axis(raw.t2, "t2");
    if (raw.values.size() != raw.t1.size() * raw.t2.size())
        throw DomainError("custom grid value count does not match its axes");
    for (const auto& v : raw.values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw DomainError("custom grid values must be finite");

    CustomGrid sq;
    sq.t1 = raw.t1;
    sq.t1.insert(sq.t1.end(), raw.t2.begin(), raw.t2.end());
    std::sort(sq.t1.begin(), sq.t1.end());
    sq.t1.erase(std::unique(sq.t1.begin(), sq.t1.end()), sq.t1.end());
    sq.t2 = sq.t1;
    const std::size_t n = sq.t1.size();
    sq.values.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            sq.values[i * n + j] = 0.5 * (bilinear_raw(raw, sq.t1[i], sq.t1[j]) + bilinear_raw(raw, sq.t1[j], sq.t1[i]));

    const double norm = bilinear_norm(sq);
    if (!(norm > 0.0)) throw DomainError("custom amplitude has no symmetric part");
    const double scale = 1.0 / std::sqrt(norm);
    for (auto& v : sq.values) v *= scale;

    TwoPhotonAmplitude amp;
    amp.family_ = Family::Custom;
    amp.params_ = CustomData{std::move(sq)};
    amp.norm_ = norm;
    return amp;
}

const CustomGrid* TwoPhotonAmplitude::custom_grid() const {
    const auto* d = std::get_if<CustomData>(&params_);
    return d ? &d->grid : nullptr;
}

double TwoPhotonAmplitude::normalization() const { return norm_; }

cplx TwoPhotonAmplitude::base(double t1, double t2) const {
    switch (family_) {
    case Family::Optimal: {
        const auto& p = std::get<OptimalStateParams>(params_);
        const double lo = std::min(t1, t2), hi = std::max(t1, t2);
        if (hi > p.t_star) return 0.0;
        if (p.t0 && lo < *p.t0) return 0.0;
        const double ge = p.atom.gamma_e, gf = p.atom.gamma_f;
        const double mag = 0.5 * prefactor_ * std::exp(0.5 * gf * (hi - p.t_star) - 0.5 * ge * (hi - lo));
        return mag * std::exp(cplx(0.0, -(p.atom.omega_fe() * hi + p.atom.omega_eg() * lo)));
    }
    case Family::GaussianProduct: {
        const auto [A, B] = product_profiles(std::get<GaussianProductParams>(params_));
        const cplx lnorm = -std::log(2.0 * std::sqrt(norm_));
        return std::exp(A.log_at(t1) + B.log_at(t2) + lnorm) + std::exp(B.log_at(t1) + A.log_at(t2) + lnorm);
    }
    case Family::CorrelatedGaussian: {
        const auto& p = std::get<CorrelatedGaussianParams>(params_);
        const double P = p.omega_plus * p.omega_plus, M = p.omega_minus * p.omega_minus;
        const double w1 = 0.5 * (p.carrier_sum_detuning - p.delta_f);
        const double w2 = 0.5 * (p.carrier_sum_detuning + p.delta_f);
        const double lpre = 0.5 * std::log(p.omega_plus * p.omega_minus / (2.0 * std::numbers::pi)) -
                            std::log(2.0 * std::sqrt(norm_));
        auto term = [&](double x, double y) {
            const double s = x + y - p.mu, d = x - y + p.mu;
            return std::exp(cplx(lpre - P * s * s / 8.0 - M * d * d / 8.0, -(w1 * x + w2 * y)));
        };
        return term(t1, t2) + term(t2, t1);
    }
    case Family::Custom:
        return bilinear(std::get<CustomData>(params_).grid, t1, t2);
    }
    return 0.0;
}

cplx TwoPhotonAmplitude::operator()(double t1, double t2) const {
    cplx v = base(t1 - shift_, t2 - shift_);
    if (carrier_ != 0.0 || phase_ != 0.0) v *= std::exp(cplx(0.0, phase_ - carrier_ * (t1 + t2)));
    return v;
}

cplx evaluate_symmetric(const TwoPhotonAmplitude& amp, double t1, double t2) { return amp(t1, t2); }

cplx optimal_amplitude(const OptimalStateParams& p, double t1, double t2) {
    return TwoPhotonAmplitude::optimal(p)(t1, t2);
}

int TwoPhotonAmplitude::base_slices(double t2, std::span<GaussianSlice, 2> out) const {
    if (family_ == Family::GaussianProduct) {
        const auto [A, B] = product_profiles(std::get<GaussianProductParams>(params_));
        const cplx lnorm = -std::log(2.0 * std::sqrt(norm_));
        out[0] = {A.a, A.beta, A.gamma + B.log_at(t2) + lnorm};
        out[1] = {B.a, B.beta, B.gamma + A.log_at(t2) + lnorm};
        return 2;
    }
    if (family_ == Family::CorrelatedGaussian) {
        const auto& p = std::get<CorrelatedGaussianParams>(params_);
        const double P = p.omega_plus * p.omega_plus, M = p.omega_minus * p.omega_minus;
        const double w1 = 0.5 * (p.carrier_sum_detuning - p.delta_f);
        const double w2 = 0.5 * (p.carrier_sum_detuning + p.delta_f);
        const double lpre = 0.5 * std::log(p.omega_plus * p.omega_minus / (2.0 * std::numbers::pi)) -
                            std::log(2.0 * std::sqrt(norm_));
        const double a = (P + M) / 8.0;
        // phi(t1, t2) as a function of t1
        const double u = t2 - p.mu;
        out[0] = {a, cplx(-(P - M) * u / 4.0, -w1), cplx(lpre - a * u * u, -w2 * t2)};
        // phi(t2, t1) as a function of t1
        const double v = t2 - p.mu, w = t2 + p.mu;
        out[1] = {a, cplx(-P * v / 4.0 + M * w / 4.0, -w2), cplx(lpre - P * v * v / 8.0 - M * w * w / 8.0, -w1 * t2)};
        return 2;
    }
    return 0;
}

int TwoPhotonAmplitude::gaussian_slices(double t2, std::span<GaussianSlice, 2> out) const {
    const int n = base_slices(t2 - shift_, out);
    for (int k = 0; k < n; ++k) {
        auto& s = out[k];
        const double d = shift_;
        const cplx beta = s.beta + 2.0 * s.a * d;
        const cplx gamma = s.gamma - s.a * d * d - s.beta * d;
        s.beta = beta - I * carrier_;
        s.gamma = gamma + I * (phase_ - carrier_ * t2);
    }
    return n;
}

std::vector<TimeComponent> TwoPhotonAmplitude::components() const {
    std::vector<TimeComponent> out;
    switch (family_) {
    case Family::Optimal: {
        const auto& p = std::get<OptimalStateParams>(params_);
        const double lo = p.t0 ? *p.t0 : p.t_star - 40.0 / std::min(p.atom.gamma_e, p.atom.gamma_f);
        out.push_back({0.5 * (lo + p.t_star), (p.t_star - lo) / (2.0 * kSupportSigmas)});
        break;
    }
    case Family::GaussianProduct: {
        const auto& p = std::get<GaussianProductParams>(params_);
        out.push_back({0.0, std::numbers::sqrt2 / p.omega_a_width});
        out.push_back({p.mu, std::numbers::sqrt2 / p.omega_b_width});
        break;
    }
    case Family::CorrelatedGaussian: {
        const auto& p = std::get<CorrelatedGaussianParams>(params_);
        const double sigma = 1.0 / correlated_time_width(p);
        out.push_back({0.0, sigma});
        out.push_back({p.mu, sigma});
        break;
    }
    case Family::Custom: {
        const auto& ax = std::get<CustomData>(params_).grid.t1;
        out.push_back({0.5 * (ax.front() + ax.back()), (ax.back() - ax.front()) / (2.0 * kSupportSigmas)});
        break;
    }
    }
    for (auto& c : out) c.center += shift_;
    return out;
}

std::pair<double, double> TwoPhotonAmplitude::support() const {
    if (family_ == Family::Custom) {
        const auto& ax = std::get<CustomData>(params_).grid.t1;
        return {ax.front() + shift_, ax.back() + shift_};
    }
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& c : components()) {
        lo = std::min(lo, c.center - kSupportSigmas * c.sigma);
        hi = std::max(hi, c.center + kSupportSigmas * c.sigma);
    }
    return {lo, hi};
}

std::vector<double> TwoPhotonAmplitude::breakpoints() const {
    std::vector<double> out;
    const auto [lo, hi] = support();
    out.push_back(lo);
    if (family_ == Family::Custom) {
        for (double t : std::get<CustomData>(params_).grid.t1) out.push_back(t + shift_);
    } else if (family_ != Family::Optimal) {
        for (const auto& c : components()) {
            for (double k : {-2.0, 0.0, 2.0}) out.push_back(c.center + k * c.sigma);
        }
    }
    out.push_back(hi);
    std::sort(out.begin(), out.end());
    out.erase(std::remove_if(out.begin(), out.end(), [&](double t) { return t < lo || t > hi; }), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

TwoPhotonAmplitude TwoPhotonAmplitude::with_phase(double theta) const {
    TwoPhotonAmplitude c = *this;
    c.phase_ += theta;
    return c;
}

TwoPhotonAmplitude TwoPhotonAmplitude::time_shifted(double dt) const {
    TwoPhotonAmplitude c = *this;
    // the carrier phase factor is taken at the shifted time so the whole field translates
    c.phase_ += c.carrier_ * 2.0 * dt;
    c.shift_ += dt;
    return c;
}

TwoPhotonAmplitude TwoPhotonAmplitude::with_carrier_shift(double dw) const {
    TwoPhotonAmplitude c = *this;
    c.carrier_ += dw;
    return c;
}

} // namespace tpa
