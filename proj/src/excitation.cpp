#include "tpa/excitation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "tpa/errors.hpp"
#include "tpa/quadrature.hpp"

namespace tpa {
namespace {

constexpr cplx I{0.0, 1.0};

class Engine {
public:
    Engine(const AtomParams& atom, const TwoPhotonAmplitude& amp, const QuadratureConfig& cfg)
        : atom_(atom), amp_(amp), cfg_(cfg) {
        atom_.validate();
        cfg_.validate();
        std::tie(lo_, hi_) = amp_.support();
        breaks_ = amp_.breakpoints();
        semi_ = cfg_.use_semi_analytic && amp_.has_gaussian_slices();
        outer_.rel_tol = cfg_.rel_tol;
        outer_.abs_tol = 0.05 * cfg_.rel_tol / std::sqrt(atom_.gamma_e * atom_.gamma_f);
        outer_.max_depth = cfg_.max_depth;
        inner_ = outer_;
        inner_.abs_tol = outer_.abs_tol * atom_.gamma_f / 4.0;
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }

    double probability(cplx a) const { return 4.0 * atom_.gamma_e * atom_.gamma_f * std::norm(a); }

    cplx inner(double t2) const {
        const double ge = atom_.gamma_e, weg = atom_.omega_eg();
        if (semi_) {
            std::array<GaussianSlice, 2> sl;
            const int n = amp_.gaussian_slices(t2, sl);
            cplx sum = 0.0;
            for (int k = 0; k < n; ++k)
                sum += truncated_gaussian_integral(sl[k].a, sl[k].beta + I * weg + 0.5 * ge,
                                                   sl[k].gamma - 0.5 * ge * t2, t2);
            return sum;
        }
        if (t2 <= lo_) return 0.0;
        auto f = [&](double t1) { return std::exp(cplx(-0.5 * ge * (t2 - t1), weg * t1)) * amp_(t1, t2); };
        return integrate<cplx>(f, breaks_between(lo_, t2), inner_).value;
    }

    // int_a^b exp(-gf (t_end - t2)/2 + i w_fe t2) I(t2) dt2
    cplx segment(double a, double b, double t_end) const {
        if (!(b > a)) return 0.0;
        const double gf = atom_.gamma_f, wfe = atom_.omega_fe();
        auto f = [&](double t2) { return std::exp(cplx(-0.5 * gf * (t_end - t2), wfe * t2)) * inner(t2); };
        return integrate<cplx>(f, breaks_between(a, b), outer_).value;
    }

    // Propagates the amplitude known at t_from to a later time t.
    cplx advance(double t_from, cplx a_from, double t) const {
        if (t <= lo_) return 0.0;
        if (t_from < lo_) {
            t_from = lo_;
            a_from = 0.0;
        }
        const double a = std::clamp(t_from, lo_, hi_);
        const double b = std::clamp(t, lo_, hi_);
        return a_from * std::exp(-0.5 * atom_.gamma_f * (t - t_from)) + segment(a, b, t);
    }

    cplx amplitude_at(double t) const {
        if (t <= lo_) return 0.0;
        return advance(lo_, 0.0, t);
    }

private:
    std::vector<double> breaks_between(double a, double b) const {
        std::vector<double> out{a};
        for (double t : breaks_)
            if (t > a && t < b) out.push_back(t);
        out.push_back(b);
        return out;
    }

    AtomParams atom_;
    const TwoPhotonAmplitude& amp_;
    QuadratureConfig cfg_;
    double lo_ = 0.0, hi_ = 0.0;
    std::vector<double> breaks_;
    bool semi_ = false;
    QuadOptions outer_, inner_;
};

// Cumulative amplitudes on an increasing grid.
std::vector<cplx> cumulative(const Engine& e, const std::vector<double>& ts) {
    std::vector<cplx> out(ts.size());
    double prev_t = -std::numeric_limits<double>::infinity();
    cplx prev = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double t = ts[k];
        if (t <= e.lo()) {
            out[k] = 0.0;
        } else if (prev_t <= e.lo()) {
            out[k] = e.amplitude_at(t);
        } else {
            out[k] = e.advance(prev_t, prev, t);
        }
        prev_t = t;
        prev = out[k];
    }
    return out;
}

} // namespace

void QuadratureConfig::validate() const {
    if (!(rel_tol > 0.0 && rel_tol <= 1e-3)) throw DomainError("rel_tol must lie in (0, 1e-3]");
    if (max_depth < 1) throw DomainError("max_depth must be positive");
    if (peak_scan_points < 3) throw DomainError("peak_scan_points must be at least 3");
}

double pf_at(const AtomParams& atom, const TwoPhotonAmplitude& amp, double t, const QuadratureConfig& cfg) {
    if (!std::isfinite(t)) throw DomainError("evaluation time must be finite");
    Engine e(atom, amp, cfg);
    return e.probability(e.amplitude_at(t));
}

std::vector<double> pf_curve(const AtomParams& atom, const TwoPhotonAmplitude& amp, const std::vector<double>& t_grid,
                             const QuadratureConfig& cfg) {
    for (double t : t_grid)
        if (!std::isfinite(t)) throw DomainError("evaluation time must be finite");
    Engine e(atom, amp, cfg);
    std::vector<std::size_t> order(t_grid.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return t_grid[a] < t_grid[b]; });
    std::vector<double> sorted(t_grid.size());
    for (std::size_t k = 0; k < order.size(); ++k) sorted[k] = t_grid[order[k]];
    const auto amps = cumulative(e, sorted);
    std::vector<double> out(t_grid.size());
    for (std::size_t k = 0; k < order.size(); ++k) out[order[k]] = e.probability(amps[k]);
    return out;
}

double pf_closed_form_optimal(const AtomParams& atom, double t_star, double t) {
    atom.validate();
    return std::exp(-atom.gamma_f * std::abs(t_star - t));
}

double pf_upper_bound(const AtomParams& atom, double t_star, double t0) {
    atom.validate();
    if (std::isnan(t_star) || std::isnan(t0)) throw DomainError("bound arguments must not be NaN");
    if (t_star < t0) throw DomainError("t_star must not precede t0");
    if (std::isinf(t0)) return 1.0;
    return max_excitation_in_window(atom, t_star - t0);
}

double bound_for_amplitude(const AtomParams& atom, const TwoPhotonAmplitude& amp, double t) {
    if (const auto* p = amp.optimal_params(); p && !p->t0) return 1.0;
    const double start = amp.interaction_start();
    if (t <= start) return 0.0;
    return pf_upper_bound(atom, t, start);
}

PeakResult pf_peak(const AtomParams& atom, const TwoPhotonAmplitude& amp, const QuadratureConfig& cfg) {
    Engine e(atom, amp, cfg);
    const int n = cfg.peak_scan_points;
    std::vector<double> ts;
    for (const auto& c : amp.components()) {
        const double a = std::max(e.lo(), c.center - 8.0 * c.sigma);
        const double b = c.center + 8.0 * c.sigma + 12.0 / atom.gamma_f;
        for (int k = 0; k < n; ++k) ts.push_back(a + (b - a) * k / (n - 1));
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    const auto amps = cumulative(e, ts);
    std::vector<double> pf(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k) pf[k] = e.probability(amps[k]);

    // local maxima of the sampled curve, best first
    std::vector<std::size_t> cand;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const bool left = k == 0 || pf[k] >= pf[k - 1];
        const bool right = k + 1 == ts.size() || pf[k] >= pf[k + 1];
        if (left && right) cand.push_back(k);
    }
    std::sort(cand.begin(), cand.end(), [&](auto a, auto b) { return pf[a] > pf[b]; });
    if (cand.size() > 3) cand.resize(3);

    PeakResult best;
    if (cand.empty() || pf[cand.front()] < 1e-12) {
        const auto [lo, hi] = amp.support();
        best.t_peak = 0.5 * (lo + hi);
        best.pf_peak = cand.empty() ? 0.0 : pf[cand.front()];
        best.degenerate = true;
        return best;
    }
    best.t_peak = ts[cand.front()];
    best.pf_peak = pf[cand.front()];
    const double x_tol = 1e-4 / atom.gamma_f;
    for (std::size_t k : cand) {
        const std::size_t l = k == 0 ? 0 : k - 1;
        const std::size_t r = std::min(k + 1, ts.size() - 1);
        if (l == r) continue;
        const double t_left = ts[l];
        const cplx a_left = amps[l];
        auto f = [&](double t) { return e.probability(e.advance(t_left, a_left, t)); };
        const auto m = golden_section_maximize(f, ts[l], ts[r], x_tol);
        if (m.value > best.pf_peak) {
            best.pf_peak = m.value;
            best.t_peak = m.x;
        }
    }
    return best;
}

double mean_residence_time(const AtomParams& atom, const TwoPhotonAmplitude& amp, const QuadratureConfig& cfg) {
    Engine e(atom, amp, cfg);
    const double lo = e.lo(), hi = e.hi();
    std::vector<double> br = amp.breakpoints();
    br.erase(std::remove_if(br.begin(), br.end(), [&](double t) { return t <= lo || t >= hi; }), br.end());
    br.insert(br.begin(), lo);
    br.push_back(hi);
    QuadOptions opt;
    opt.rel_tol = std::max(cfg.rel_tol, 1e-6);
    opt.abs_tol = 1e-9 / atom.gamma_f;
    opt.max_depth = cfg.max_depth;
    auto f = [&](double t) { return e.probability(e.amplitude_at(t)); };
    const double body = integrate<double>(f, br, opt).value;
    // beyond the support the amplitude only decays: P(t) = P(hi) exp(-gf (t - hi))
    const double tail = f(hi) * -std::expm1(-40.0) / atom.gamma_f;
    return body + tail;
}

ExcitationResult compute_excitation(const AtomParams& atom, const TwoPhotonAmplitude& amp,
                                    const std::vector<double>& t_grid, const QuadratureConfig& cfg) {
    ExcitationResult r;
    r.t_grid = t_grid;
    r.pf = pf_curve(atom, amp, t_grid, cfg);
    const auto peak = pf_peak(atom, amp, cfg);
    r.t_peak = peak.t_peak;
    r.pf_peak = peak.pf_peak;
    r.degenerate_peak = peak.degenerate;
    r.bound_at_peak = bound_for_amplitude(atom, amp, peak.t_peak);
    return r;
}

} // namespace tpa
