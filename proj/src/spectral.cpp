#include "tpa/spectral.hpp"

#include <algorithm>
#include <array>
#include <span>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "tpa/errors.hpp"
#include "tpa/quadrature.hpp"

namespace tpa {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};

// int_0^1 exp(i th u) du and int_0^1 u exp(i th u) du
cplx j0(double th) {
    if (std::abs(th) < 1e-3) {
        const cplx z = I * th;
        return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
    }
    return (std::exp(I * th) - 1.0) / (I * th);
}

cplx j1(double th) {
    if (std::abs(th) < 1e-3) {
        const cplx z = I * th;
        return 0.5 + z / 3.0 + z * z / 8.0 + z * z * z / 30.0;
    }
    const cplx e = std::exp(I * th);
    return e / (I * th) + (e - 1.0) / (th * th);
}

// Fourier integrals int hat_i(t) exp(i w t) dt of the piecewise-linear basis on `ax`.
std::vector<cplx> hat_transforms(const std::vector<double>& ax, double w) {
    const std::size_t n = ax.size();
    std::vector<cplx> h(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double a = ax[k], len = ax[k + 1] - a;
        const cplx base = len * std::exp(I * (w * a));
        const cplx up = base * j1(w * len);
        h[k] += base * j0(w * len) - up;
        h[k + 1] += up;
    }
    return h;
}

// (1 - exp(-z tau)) / z, tau may be infinite (requires Re z > 0 then)
cplx window_integral(cplx z, double tau) {
    if (std::isinf(tau)) return 1.0 / z;
    const cplx x = z * tau;
    if (std::abs(x) < 1e-4) return tau * (1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0);
    return (1.0 - std::exp(-x)) / z;
}

// Unsymmetrized triangle transform of the optimal-state amplitude, t_star at 0.
cplx optimal_triangle(const AtomParams& atom, double pref, double tau, double wa, double wb) {
    const cplx P(0.5 * atom.gamma_e, wa - atom.omega_eg());
    const cplx Q(0.5 * (atom.gamma_f - atom.gamma_e), wb - atom.omega_fe());
    cplx val = window_integral(P + Q, tau);
    if (!std::isinf(tau)) val -= std::exp(-P * tau) * window_integral(Q, tau);
    return pref * val / P;
}

struct OptimalInfo {
    double pref;
    double tau;
};

OptimalInfo optimal_info(const OptimalStateParams& p) {
    const double tau = p.t0 ? p.t_star - *p.t0 : std::numeric_limits<double>::infinity();
    return {std::sqrt(p.atom.gamma_e * p.atom.gamma_f / max_excitation_in_window(p.atom, tau)), tau};
}

cplx product_profile_ft(double width, double center, double carrier, double w) {
    const double d = w - carrier;
    return std::pow(2.0 / (kPi * width * width), 0.25) * std::exp(cplx(-d * d / (width * width), center * d));
}

// Spectral amplitude without the time-shift, carrier and phase modifiers.
cplx base_spectral(const TwoPhotonAmplitude& amp, double w1, double w2) {
    switch (amp.family()) {
    case Family::Optimal: {
        const auto& p = *amp.optimal_params();
        const auto info = optimal_info(p);
        const cplx ph = std::exp(I * ((w1 + w2 - p.atom.omega_fg()) * p.t_star));
        return ph * 0.25 / kPi *
               (optimal_triangle(p.atom, info.pref, info.tau, w1, w2) + optimal_triangle(p.atom, info.pref, info.tau, w2, w1));
    }
    case Family::GaussianProduct: {
        const auto& p = *amp.gaussian_product_params();
        const double wa = 0.5 * (p.carrier_sum_detuning - p.delta_f);
        const double wb = 0.5 * (p.carrier_sum_detuning + p.delta_f);
        auto a = [&](double w) { return product_profile_ft(p.omega_a_width, 0.0, wa, w); };
        auto b = [&](double w) { return product_profile_ft(p.omega_b_width, p.mu, wb, w); };
        return (a(w1) * b(w2) + b(w1) * a(w2)) / (2.0 * std::sqrt(amp.normalization()));
    }
    case Family::CorrelatedGaussian: {
        const auto& p = *amp.correlated_params();
        const double P = p.omega_plus * p.omega_plus, M = p.omega_minus * p.omega_minus;
        const double w02 = 0.5 * (p.carrier_sum_detuning + p.delta_f);
        const double pre = std::sqrt(2.0 / (kPi * p.omega_plus * p.omega_minus));
        auto f = [&](double x, double y) {
            const double s = x + y - p.carrier_sum_detuning, d = y - x - p.delta_f;
            return pre * std::exp(cplx(-s * s / (2.0 * P) - d * d / (2.0 * M), p.mu * (y - w02)));
        };
        return (f(w1, w2) + f(w2, w1)) / (2.0 * std::sqrt(amp.normalization()));
    }
    case Family::Custom: {
        const auto& g = *amp.custom_grid();
        const std::size_t n = g.t1.size();
        const auto h1 = hat_transforms(g.t1, w1);
        const auto h2 = hat_transforms(g.t1, w2);
        cplx sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cplx row = 0.0;
            for (std::size_t j = 0; j < n; ++j) row += g.values[i * n + j] * h2[j];
            sum += h1[i] * row;
        }
        return sum / (2.0 * kPi);
    }
    }
    return 0.0;
}

// int |sum_j c_j hat_j|^2 over the grid, exact for piecewise-linear functions.
double piecewise_linear_power(const std::vector<double>& ax, const std::vector<cplx>& c) {
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < ax.size(); ++k)
        total += (ax[k + 1] - ax[k]) / 3.0 *
                 (std::norm(c[k]) + std::norm(c[k + 1]) + (c[k] * std::conj(c[k + 1])).real());
    return total;
}

// Integral over the real line through w = center + scale * tan(theta).
template <class F>
double integrate_line(F&& f, double center, double scale) {
    auto g = [&](double th) {
        const double c = std::cos(th);
        return f(center + scale * std::tan(th)) * scale / (c * c);
    };
    const double h = 0.5 * kPi;
    const std::vector<double> br{-h, -0.25 * kPi, 0.0, 0.25 * kPi, h};
    QuadOptions opt;
    opt.rel_tol = 1e-9;
    opt.abs_tol = 1e-13;
    opt.max_depth = 40;
    return integrate<double>(g, br, opt).value;
}

double spectral_scale(const TwoPhotonAmplitude& amp) {
    switch (amp.family()) {
    case Family::Optimal: {
        const auto& a = amp.optimal_params()->atom;
        return 0.5 * std::max(a.gamma_e, a.gamma_f) + 0.5 * std::abs(a.delta_a);
    }
    case Family::GaussianProduct: {
        const auto& p = *amp.gaussian_product_params();
        return std::max(p.omega_a_width, p.omega_b_width);
    }
    case Family::CorrelatedGaussian: {
        const auto& p = *amp.correlated_params();
        return std::max(p.omega_plus, p.omega_minus);
    }
    case Family::Custom: {
        const auto& ax = amp.custom_grid()->t1;
        return (ax.size() - 1) / (ax.back() - ax.front());
    }
    }
    return 1.0;
}

// Finite-window optimal state: the spectrum oscillates with a slowly decaying tail, so the
// line integral over the second frequency is done in time instead. Offsets are absolute.
double windowed_marginal_frequency(const TwoPhotonAmplitude& amp, double w1) {
    const auto& p = *amp.optimal_params();
    const double lo = *p.t0, hi = p.t_star;
    QuadOptions opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-14;
    auto g = [&](double t2) {
        auto h = [&](double t1) { return amp(t1, t2) * std::exp(I * (w1 * t1)); };
        const std::array<double, 3> br{lo, t2, hi};
        return std::norm(integrate<cplx>(h, std::span<const double>(br), opt).value);
    };
    return integrate<double>(g, lo, hi, opt).value / kPi;
}

double windowed_frequency_sum(const TwoPhotonAmplitude& amp, double s) {
    const auto& p = *amp.optimal_params();
    const double lo = *p.t0, hi = p.t_star, span = hi - lo;
    QuadOptions opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-14;
    // u = t1 - t2, v = t2
    auto g = [&](double u) {
        auto h = [&](double v) { return amp(v + u, v) * std::exp(I * (s * v)); };
        const double a = std::max(lo, lo - u), b = std::min(hi, hi - u);
        if (b <= a) return 0.0;
        return std::norm(integrate<cplx>(h, a, b, opt).value);
    };
    const std::array<double, 3> br{-span, 0.0, span};
    return integrate<double>(g, std::span<const double>(br), opt).value / kPi;
}

double correlated_marginal_frequency(const CorrelatedGaussianParams& p, double N, double w) {
    const double P = p.omega_plus * p.omega_plus, M = p.omega_minus * p.omega_minus;
    const double S = P + M;
    const double w01 = 0.5 * (p.carrier_sum_detuning - p.delta_f);
    const double w02 = 0.5 * (p.carrier_sum_detuning + p.delta_f);
    const double wbar = 0.5 * (w01 + w02);
    const double Om2 = P * M / S;
    const double g1 = std::exp(-4.0 * (w - w01) * (w - w01) / S);
    const double g2 = std::exp(-4.0 * (w - w02) * (w - w02) / S);
    const double cross = 2.0 *
                         std::exp(-4.0 * (w - wbar) * (w - wbar) / S - Om2 * p.mu * p.mu / 4.0 -
                                  p.delta_f * p.delta_f / M) *
                         std::cos(2.0 * M * p.mu * (w - wbar) / S);
    return (g1 + g2 + cross) / (N * std::sqrt(kPi * S));
}

double correlated_marginal_time(const CorrelatedGaussianParams& p, double N, double t) {
    const double P = p.omega_plus * p.omega_plus, M = p.omega_minus * p.omega_minus;
    const double S = P + M;
    const double Om2 = P * M / S;
    const double Om = std::sqrt(Om2);
    const double c = t - 0.5 * p.mu;
    const double cross = 2.0 * std::exp(-Om2 * c * c - M * p.mu * p.mu / 4.0 - p.delta_f * p.delta_f / S) *
                         std::cos(2.0 * P * p.delta_f / S * c);
    return Om / (2.0 * std::sqrt(kPi) * N) *
           (std::exp(-Om2 * (t - p.mu) * (t - p.mu)) + std::exp(-Om2 * t * t) + cross);
}

// (exp(-ge x) - exp(-gf x)) / (gf - ge), x >= 0
double decay_difference(double ge, double gf, double x) {
    const double eps = ge - gf;
    if (std::abs(eps) < kDegenerateRates * gf) return -std::exp(-gf * x) * expm1_ratio(eps, x, kDegenerateRates * gf);
    return (std::exp(-ge * x) - std::exp(-gf * x)) / (gf - ge);
}

double optimal_marginal_time(const OptimalStateParams& p, double t) {
    if (t > p.t_star) return 0.0;
    if (p.t0 && t < *p.t0) return 0.0;
    const double ge = p.atom.gamma_e, gf = p.atom.gamma_f;
    const double tau = p.t0 ? p.t_star - *p.t0 : std::numeric_limits<double>::infinity();
    const double pm = max_excitation_in_window(p.atom, tau);
    const double x = p.t_star - t;
    const double first = ge * gf / pm * decay_difference(ge, gf, x);
    const double started = p.t0 ? -std::expm1(-ge * (t - *p.t0)) : 1.0;
    const double second = gf / pm * std::exp(-gf * x) * started;
    return 0.5 * (first + second);
}

double custom_marginal_time(const CustomGrid& g, double t) {
    const auto& ax = g.t1;
    const std::size_t n = ax.size();
    if (t < ax.front() || t > ax.back()) return 0.0;
    auto it = std::upper_bound(ax.begin(), ax.end(), t);
    std::size_t i = std::min<std::size_t>(it == ax.begin() ? 0 : (it - ax.begin()) - 1, n - 2);
    const double u = (t - ax[i]) / (ax[i + 1] - ax[i]);
    std::vector<cplx> col(n);
    for (std::size_t j = 0; j < n; ++j) col[j] = (1 - u) * g.values[i * n + j] + u * g.values[(i + 1) * n + j];
    return 2.0 * piecewise_linear_power(ax, col);
}

double custom_marginal_frequency(const CustomGrid& g, double w) {
    const std::size_t n = g.t1.size();
    const auto h = hat_transforms(g.t1, w);
    std::vector<cplx> c(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) c[j] += g.values[i * n + j] * h[i];
    return piecewise_linear_power(g.t1, c) / kPi;
}

std::vector<double> real_roots(std::vector<double> coeffs, std::string& warning) {
    double cmax = 0.0;
    for (double c : coeffs) cmax = std::max(cmax, std::abs(c));
    while (coeffs.size() > 1 && std::abs(coeffs.back()) <= 1e-14 * cmax) coeffs.pop_back();
    const int deg = static_cast<int>(coeffs.size()) - 1;
    std::vector<double> out;
    if (deg < 1) return out;
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) C(i, deg - 1) = -coeffs[i] / coeffs[deg];
    Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
    auto eval = [&](double x, double& deriv, double& scale) {
        double p = 0.0;
        deriv = 0.0;
        scale = 0.0;
        for (int k = deg; k >= 0; --k) {
            deriv = deriv * x + p;
            p = p * x + coeffs[k];
            scale = scale * std::abs(x) + std::abs(coeffs[k]);
        }
        return p;
    };
    for (int k = 0; k < deg; ++k) {
        const auto ev = es.eigenvalues()[k];
        if (std::abs(ev.imag()) > 1e-6 * (1.0 + std::abs(ev.real()))) continue;
        double x = ev.real(), d, s;
        double p = eval(x, d, s);
        if (d != 0.0) {
            const double polished = x - p / d;
            double d2, s2;
            const double p2 = eval(polished, d2, s2);
            if (std::abs(p2) <= std::abs(p)) {
                x = polished;
                p = p2;
                s = s2;
            }
        }
        if (s > 0.0 && std::abs(p) > 1e-8 * s) warning = "root residual above 1e-8 relative";
        out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

std::string to_string(DensityKind k) {
    switch (k) {
    case DensityKind::JointTime: return "joint_time";
    case DensityKind::JointFreq: return "joint_freq";
    case DensityKind::MarginalTime: return "marginal_time";
    case DensityKind::MarginalFreq: return "marginal_freq";
    case DensityKind::FreqSum: return "freq_sum";
    }
    return "unknown";
}

std::string to_string(PeakClass c) {
    switch (c) {
    case PeakClass::SinglePeak: return "single_peak";
    case PeakClass::DoublePeak: return "double_peak";
    case PeakClass::Other: return "other";
    }
    return "unknown";
}

std::vector<double> AxisSpec::points() const {
    if (n < 2 || !(hi > lo)) throw DomainError("axis needs n >= 2 and hi > lo");
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    return out;
}

cplx spectral_amplitude(const TwoPhotonAmplitude& amp, double w1, double w2) {
    const double s = amp.carrier_shift(), d = amp.time_offset();
    const cplx mod = std::exp(I * (amp.phase() + (w1 + w2 - 2.0 * s) * d));
    return mod * base_spectral(amp, w1 - s, w2 - s);
}

double optimal_marginal_frequency(const AtomParams& atom, double x) {
    const double ge = atom.gamma_e, gf = atom.gamma_f, da = atom.delta_a;
    const double num = ge * (ge + gf) * (ge + 0.25 * gf) + ge * da * da + gf * x * x;
    const double den = 4.0 * kPi * (x * x + 0.25 * ge * ge) * ((x - da) * (x - da) + 0.25 * (ge + gf) * (ge + gf));
    return num / den;
}

OptimalTimeBranches optimal_time_branches(const AtomParams& atom, double t_star, double t) {
    if (t > t_star) return {0.0, 0.0};
    const double ge = atom.gamma_e, gf = atom.gamma_f, x = t_star - t;
    if (std::abs(ge - gf) < kDegenerateRates * gf) {
        return {ge * gf * decay_difference(ge, gf, x), gf * std::exp(-gf * x)};
    }
    const double first = ge / (1.0 - ge / gf) * std::exp(-ge * x) + gf / (1.0 - gf / ge) * std::exp(-gf * x);
    const double second = gf * std::exp(-gf * x);
    return {first, second};
}

double marginal_time(const TwoPhotonAmplitude& amp, double t) {
    const double u = t - amp.time_offset();
    switch (amp.family()) {
    case Family::Optimal: return optimal_marginal_time(*amp.optimal_params(), u);
    case Family::GaussianProduct: {
        const auto& p = *amp.gaussian_product_params();
        const double wa = 0.5 * (p.carrier_sum_detuning - p.delta_f);
        const double wb = 0.5 * (p.carrier_sum_detuning + p.delta_f);
        auto psi = [](double W, double m, double w, double x) {
            return std::pow(W * W / (2.0 * kPi), 0.25) * std::exp(cplx(-0.25 * W * W * (x - m) * (x - m), -w * x));
        };
        const cplx a = psi(p.omega_a_width, 0.0, wa, u), b = psi(p.omega_b_width, p.mu, wb, u);
        const cplx S = gaussian_product_overlap(p);
        return (std::norm(a) + std::norm(b) + 2.0 * (a * std::conj(b) * S).real()) / (2.0 * amp.normalization());
    }
    case Family::CorrelatedGaussian:
        return correlated_marginal_time(*amp.correlated_params(), amp.normalization(), u);
    case Family::Custom: return custom_marginal_time(*amp.custom_grid(), u);
    }
    return 0.0;
}

double marginal_frequency(const TwoPhotonAmplitude& amp, double omega_offset) {
    const double w = omega_offset - amp.carrier_shift();
    switch (amp.family()) {
    case Family::Optimal: {
        const auto& p = *amp.optimal_params();
        if (!p.t0) return optimal_marginal_frequency(p.atom, w);
        return windowed_marginal_frequency(amp, p.atom.omega_eg() + omega_offset);
    }
    case Family::GaussianProduct: {
        const auto& p = *amp.gaussian_product_params();
        const double wa = 0.5 * (p.carrier_sum_detuning - p.delta_f);
        const double wb = 0.5 * (p.carrier_sum_detuning + p.delta_f);
        const cplx a = product_profile_ft(p.omega_a_width, 0.0, wa, w);
        const cplx b = product_profile_ft(p.omega_b_width, p.mu, wb, w);
        const cplx S = gaussian_product_overlap(p);
        return (std::norm(a) + std::norm(b) + 2.0 * (a * std::conj(b) * S).real()) / (2.0 * amp.normalization());
    }
    case Family::CorrelatedGaussian:
        return correlated_marginal_frequency(*amp.correlated_params(), amp.normalization(), w);
    case Family::Custom: return custom_marginal_frequency(*amp.custom_grid(), w);
    }
    return 0.0;
}

double frequency_sum_density(const TwoPhotonAmplitude& amp, double s) {
    const double x = s - 2.0 * amp.carrier_shift();
    if (const auto* p = amp.optimal_params(); p && !p->t0) {
        const double gf = p->atom.gamma_f;
        return 0.5 * gf / (kPi * (x * x + 0.25 * gf * gf));
    }
    if (const auto* p = amp.correlated_params()) {
        const double d = x - p->carrier_sum_detuning;
        return std::exp(-d * d / (p->omega_plus * p->omega_plus)) / (std::sqrt(kPi) * p->omega_plus);
    }
    double ref = 0.0;
    if (const auto* p = amp.optimal_params()) {
        ref = p->atom.omega_fg();
        return windowed_frequency_sum(amp, s + ref);
    }
    auto f = [&](double w) { return 2.0 * std::norm(base_spectral(amp, w, x + ref - w)); };
    return integrate_line(f, 0.5 * (x + ref), spectral_scale(amp));
}

std::vector<double> stationary_polynomial(const AtomParams& atom, bool scaled_by_ge) {
    if (!scaled_by_ge) {
        const double r = atom.gamma_e / atom.gamma_f, d = atom.delta_a / atom.gamma_f;
        const double k = r * d * d + r * (r + 1.0) * (r + 0.25);
        return {
            0.5 * d * r * r * k,
            0.5 * r * r * ((r + 1.0) * (r + 1.0) / 4.0 + d * d) - k * ((r + 1.0) * (r + 1.0) / 2.0 + 2.0 * d * d + r * r / 2.0),
            6.0 * d * k - d * r * r / 2.0,
            -4.0 * r * d * d - 4.0 * r * (r + 1.0) * (r + 0.25),
            2.0 * d,
            -2.0,
        };
    }
    const double R = atom.gamma_f / atom.gamma_e, D = atom.delta_a / atom.gamma_e;
    const double k = D * D + (R / 4.0 + 1.0) * (R + 1.0);
    return {
        0.5 * D * k,
        0.5 * R * ((R + 1.0) * (R + 1.0) / 4.0 + D * D) - k * ((R + 1.0) * (R + 1.0) / 2.0 + 2.0 * D * D + 0.5),
        0.5 * D * (12.0 * D * D + 3.0 * R * R + 14.0 * R + 12.0),
        -(R * R + 5.0 * R + 4.0 * D * D + 4.0),
        2.0 * D * R,
        -2.0 * R,
    };
}

SpectralMaxima optimal_spectral_maxima(const AtomParams& atom) {
    atom.validate();
    SpectralMaxima out;
    out.atom = atom;
    const bool by_ge = atom.gamma_e > atom.gamma_f;
    const double unit = by_ge ? atom.gamma_e : atom.gamma_f;
    const auto roots = real_roots(stationary_polynomial(atom, by_ge), out.warning);
    const double h = 1e-3 * std::max(atom.gamma_e, atom.gamma_f);
    for (double r : roots) {
        const double x = r * unit;
        out.polynomial_roots.push_back(x);
        const double p0 = optimal_marginal_frequency(atom, x);
        if (p0 > optimal_marginal_frequency(atom, x - h) && p0 > optimal_marginal_frequency(atom, x + h))
            out.maxima.push_back(x);
    }
    out.classification = out.maxima.size() == 1   ? PeakClass::SinglePeak
                         : out.maxima.size() == 2 ? PeakClass::DoublePeak
                                                  : PeakClass::Other;
    return out;
}

DensityGrid joint_density(const TwoPhotonAmplitude& amp, Domain domain, const AxisSpec& a1, const AxisSpec& a2,
                          std::size_t max_samples) {
    if (a1.n == 0 || a2.n == 0 || a1.n > max_samples / a2.n)
        throw SizeError("joint density grid of " + std::to_string(a1.n) + " x " + std::to_string(a2.n) +
                        " exceeds the sample budget");
    DensityGrid g;
    g.axis1 = a1.points();
    g.axis2 = a2.points();
    g.kind = domain == Domain::Time ? DensityKind::JointTime : DensityKind::JointFreq;
    g.values.resize(a1.n * a2.n);
    if (domain == Domain::Time) {
        for (std::size_t i = 0; i < a1.n; ++i)
            for (std::size_t j = 0; j < a2.n; ++j) g.values[i * a2.n + j] = 2.0 * std::norm(amp(g.axis1[i], g.axis2[j]));
        return g;
    }
    if (amp.family() == Family::Custom) {
        // transform of the bilinear interpolant, one basis projection per axis point
        const auto& cg = *amp.custom_grid();
        const std::size_t n = cg.t1.size();
        const double s = amp.carrier_shift();
        std::vector<std::vector<cplx>> right(a2.n);
        for (std::size_t j = 0; j < a2.n; ++j) {
            const auto h = hat_transforms(cg.t1, g.axis2[j] - s);
            right[j].assign(n, 0.0);
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < n; ++c) right[j][r] += cg.values[r * n + c] * h[c];
        }
        for (std::size_t i = 0; i < a1.n; ++i) {
            const auto h = hat_transforms(cg.t1, g.axis1[i] - s);
            for (std::size_t j = 0; j < a2.n; ++j) {
                cplx v = 0.0;
                for (std::size_t r = 0; r < n; ++r) v += h[r] * right[j][r];
                g.values[i * a2.n + j] = 2.0 * std::norm(v / (2.0 * kPi));
            }
        }
        return g;
    }
    for (std::size_t i = 0; i < a1.n; ++i)
        for (std::size_t j = 0; j < a2.n; ++j)
            g.values[i * a2.n + j] = 2.0 * std::norm(spectral_amplitude(amp, g.axis1[i], g.axis2[j]));
    return g;
}

DensityGrid marginal_grid(const TwoPhotonAmplitude& amp, Domain domain, const AxisSpec& axis) {
    DensityGrid g;
    g.axis1 = axis.points();
    g.kind = domain == Domain::Time ? DensityKind::MarginalTime : DensityKind::MarginalFreq;
    g.values.reserve(g.axis1.size());
    for (double x : g.axis1)
        g.values.push_back(domain == Domain::Time ? marginal_time(amp, x) : marginal_frequency(amp, x));
    return g;
}

DensityGrid frequency_sum_grid(const TwoPhotonAmplitude& amp, const AxisSpec& axis) {
    DensityGrid g;
    g.axis1 = axis.points();
    g.kind = DensityKind::FreqSum;
    for (double x : g.axis1) g.values.push_back(frequency_sum_density(amp, x));
    return g;
}

double grid_mass(const DensityGrid& g) {
    auto trap = [](const std::vector<double>& ax, auto&& val) {
        double s = 0.0;
        for (std::size_t k = 0; k + 1 < ax.size(); ++k) s += 0.5 * (ax[k + 1] - ax[k]) * (val(k) + val(k + 1));
        return s;
    };
    if (g.axis2.empty()) return trap(g.axis1, [&](std::size_t k) { return g.values[k]; });
    return trap(g.axis1, [&](std::size_t i) { return trap(g.axis2, [&](std::size_t j) { return g.at(i, j); }); });
}

} // namespace tpa
