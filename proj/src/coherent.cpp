#include "tpa/coherent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tpa/errors.hpp"
#include "tpa/ode.hpp"
#include "tpa/quadrature.hpp"

namespace tpa {
namespace {

constexpr double kPulseSigmas = 8.0;
using State9 = OdeState<9>;

State9 pack(const DensityState& r) {
    return {r.gg, r.ee, r.ff, r.ge.real(), r.ge.imag(), r.gf.real(), r.gf.imag(), r.ef.real(), r.ef.imag()};
}

DensityState unpack(const State9& y) {
    return {y[0], y[1], y[2], {y[3], y[4]}, {y[5], y[6]}, {y[7], y[8]}};
}

// (exp(-a x) - exp(-b x)) / (b - a)
double decay_difference(double a, double b, double x) {
    const double eps = a - b;
    if (std::abs(eps) < kDegenerateRates * std::max(a, b)) return std::exp(-b * x) * x * (1.0 - 0.5 * eps * x);
    return (std::exp(-a * x) - std::exp(-b * x)) / (b - a);
}

DensityState free_decay(const AtomParams& atom, double d1, double d2, const DensityState& r, double tau) {
    const double ge = atom.gamma_e, gf = atom.gamma_f;
    DensityState out;
    out.ff = r.ff * std::exp(-gf * tau);
    out.ee = r.ee * std::exp(-ge * tau) + gf * r.ff * decay_difference(gf, ge, tau);
    out.gg = 1.0 - out.ee - out.ff;
    const cplx l1(-0.5 * ge, d1), l2(-0.5 * (ge + gf), d2), l3(-0.5 * gf, d1 + d2);
    out.ef = r.ef * std::exp(l2 * tau);
    out.gf = r.gf * std::exp(l3 * tau);
    out.ge = r.ge * std::exp(l1 * tau) + std::sqrt(ge * gf) * r.ef * (std::exp(l2 * tau) - std::exp(l1 * tau)) / (l2 - l1);
    return out;
}

struct Solved {
    DenseSolution<9> sol;
    double t_begin, t_end;
    double d1, d2;
};

Solved solve(const AtomParams& atom, const CoherentPulseParams& pulse, const OdeConfig& cfg) {
    atom.validate();
    validate(pulse);
    cfg.validate();
    const auto [a, b] = pulse_window(pulse);
    const auto [d1, d2] = coherent_detunings(atom, pulse);
    OdeOptions opt;
    opt.rel_tol = cfg.rel_tol;
    opt.abs_tol = cfg.abs_tol;
    opt.max_step = cfg.max_step_fraction * std::min({1.0 / pulse.width, 1.0 / atom.gamma_f, 1.0 / atom.gamma_e});
    auto rhs = [&](double t, const State9& y, State9& dy) {
        lindblad_rhs(atom, d1, d2, coherent_real_envelope(pulse, t), y.data(), dy.data());
    };
    Solved s{dopri5<9>(rhs, a, pack(DensityState{}), b, opt), a, b, d1, d2};
    return s;
}

DensityState state_at(const AtomParams& atom, const Solved& s, double t) {
    if (t <= s.t_begin) return DensityState{};
    if (t <= s.t_end) return unpack(s.sol(t));
    return free_decay(atom, s.d1, s.d2, unpack(s.sol.y_end), t - s.t_end);
}

void check_integrity(const DensityState& r, double t) {
    if (!(std::abs(r.trace() - 1.0) <= 1e-6))
        throw IntegrityError("density-matrix trace drifted to " + std::to_string(r.trace()) + " at t = " +
                             std::to_string(t));
}

} // namespace

void OdeConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw DomainError("ode tolerances must be positive");
    if (!(max_step_fraction > 0.0)) throw DomainError("max_step_fraction must be positive");
}

Eigen::Matrix3cd DensityState::matrix() const {
    Eigen::Matrix3cd m;
    m << gg, ge, gf, std::conj(ge), ee, ef, std::conj(gf), std::conj(ef), ff;
    return m;
}

std::pair<double, double> pulse_window(const CoherentPulseParams& pulse) {
    return {pulse.t_center - kPulseSigmas / pulse.width, pulse.t_center + kPulseSigmas / pulse.width};
}

std::pair<double, double> coherent_detunings(const AtomParams& atom, const CoherentPulseParams& pulse) {
    const double w0 = 0.5 * atom.omega_fg() + pulse.detuning;
    return {atom.omega_eg() - w0, atom.omega_fe() - w0};
}

void lindblad_rhs(const AtomParams& atom, double delta1, double delta2, double drive, const double* y, double* dy) {
    using M3 = Eigen::Matrix3cd;
    const cplx i(0.0, 1.0);
    M3 rho;
    rho << y[0], cplx(y[3], y[4]), cplx(y[5], y[6]), cplx(y[3], -y[4]), y[1], cplx(y[7], y[8]), cplx(y[5], -y[6]),
        cplx(y[7], -y[8]), y[2];
    M3 L = M3::Zero();
    L(0, 1) = std::sqrt(atom.gamma_e);
    L(1, 2) = std::sqrt(atom.gamma_f);
    M3 H = M3::Zero();
    H(0, 0) = -delta1;
    H(2, 2) = delta2;
    H += i * drive * (L - L.adjoint());
    const M3 LdL = L.adjoint() * L;
    const M3 d = -i * (H * rho - rho * H) + L * rho * L.adjoint() - 0.5 * (LdL * rho + rho * LdL);
    dy[0] = d(0, 0).real();
    dy[1] = d(1, 1).real();
    dy[2] = d(2, 2).real();
    dy[3] = d(0, 1).real();
    dy[4] = d(0, 1).imag();
    dy[5] = d(0, 2).real();
    dy[6] = d(0, 2).imag();
    dy[7] = d(1, 2).real();
    dy[8] = d(1, 2).imag();
}

DensityMatrixTrajectory integrate(const AtomParams& atom, const CoherentPulseParams& pulse,
                                  const std::vector<double>& sample_times, const OdeConfig& cfg) {
    const Solved s = solve(atom, pulse, cfg);
    DensityMatrixTrajectory out;
    out.t_grid = sample_times;
    out.rho.reserve(sample_times.size());
    for (double t : sample_times) {
        out.rho.push_back(state_at(atom, s, t));
        check_integrity(out.rho.back(), t);
    }
    check_integrity(unpack(s.sol.y_end), s.t_end);
    return out;
}

RhoPeak rho_ff_peak(const AtomParams& atom, const CoherentPulseParams& pulse, const OdeConfig& cfg) {
    RhoPeak out;
    if (pulse.n_bar == 0.0) {
        validate(pulse);
        out.t_peak = pulse.t_center;
        out.undefined = true;
        return out;
    }
    const Solved s = solve(atom, pulse, cfg);
    check_integrity(unpack(s.sol.y_end), s.t_end);
    // after the window rho_ff only decays, so the maximum lies inside it
    auto ff = [&](double t) { return s.sol(t)[2]; };
    const int n = 400;
    std::vector<double> ts(n), vs(n);
    for (int k = 0; k < n; ++k) {
        ts[k] = s.t_begin + (s.t_end - s.t_begin) * k / (n - 1);
        vs[k] = ff(ts[k]);
    }
    const auto k = static_cast<std::size_t>(std::max_element(vs.begin(), vs.end()) - vs.begin());
    const double lo = ts[k == 0 ? 0 : k - 1], hi = ts[std::min<std::size_t>(k + 1, n - 1)];
    const auto m = golden_section_maximize(ff, lo, hi, 1e-6 / pulse.width);
    out.t_peak = m.value >= vs[k] ? m.x : ts[k];
    out.value = std::max(m.value, vs[k]);
    return out;
}

} // namespace tpa
