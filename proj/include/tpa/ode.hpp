#pragma once

// Dormand-Prince 5(4) with step-size control and continuous (dense) output.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "tpa/errors.hpp"

namespace tpa {

struct OdeOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double max_step = 0.0;     // 0 means unbounded
    double initial_step = 0.0; // 0 means automatic
    long max_steps = 10000000;
};

template <std::size_t N>
using OdeState = std::array<double, N>;

template <std::size_t N>
struct DenseStep {
    double t0, h;
    OdeState<N> r1, r2, r3, r4, r5;

    OdeState<N> operator()(double t) const {
        const double th = (t - t0) / h, th1 = 1.0 - th;
        OdeState<N> y;
        for (std::size_t i = 0; i < N; ++i) y[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
        return y;
    }
};

template <std::size_t N>
class DenseSolution {
public:
    std::vector<DenseStep<N>> steps;
    OdeState<N> y_end{};
    double t_begin = 0.0, t_end = 0.0;
    long rhs_evals = 0;
    long rejected = 0;

    OdeState<N> operator()(double t) const {
        t = std::clamp(t, t_begin, t_end);
        auto it = std::upper_bound(steps.begin(), steps.end(), t, [](double v, const DenseStep<N>& s) { return v < s.t0; });
        if (it != steps.begin()) --it;
        return (*it)(t);
    }
};

template <std::size_t N, class F>
DenseSolution<N> dopri5(F&& rhs, double t0, OdeState<N> y, double t1, const OdeOptions& opt = {}) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;
    constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                     d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                     d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

    DenseSolution<N> sol;
    sol.t_begin = t0;
    sol.t_end = t1;
    if (!(t1 > t0)) {
        sol.y_end = y;
        sol.steps.push_back({t0, 1.0, y, {}, {}, {}, {}});
        return sol;
    }
    OdeState<N> k1, k2, k3, k4, k5, k6, k7, tmp, ynew;
    auto axpy = [&](const OdeState<N>& base, double h, std::initializer_list<std::pair<double, const OdeState<N>*>> terms) {
        for (std::size_t i = 0; i < N; ++i) {
            double s = 0.0;
            for (const auto& [c, k] : terms) s += c * (*k)[i];
            tmp[i] = base[i] + h * s;
        }
        return tmp;
    };
    rhs(t0, y, k1);
    sol.rhs_evals = 1;
    const double span = t1 - t0;
    double hmax = opt.max_step > 0.0 ? std::min(opt.max_step, span) : span;
    double h = opt.initial_step > 0.0 ? opt.initial_step : std::min(hmax, 1e-3 * span);
    double t = t0;
    long count = 0;
    while (t < t1) {
        if (++count > opt.max_steps) throw StiffnessError("ode step budget exhausted", t, h);
        h = std::min(h, t1 - t);
        if (h < 1e-14 * std::max(1.0, std::abs(t))) throw StiffnessError("ode step size underflow", t, h);
        rhs(t + c2 * h, axpy(y, h, {{a21, &k1}}), k2);
        rhs(t + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}), k3);
        rhs(t + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}), k4);
        rhs(t + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}), k5);
        rhs(t + h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}), k6);
        ynew = axpy(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
        rhs(t + h, ynew, k7);
        sol.rhs_evals += 6;
        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / N);
        if (err <= 1.0) {
            DenseStep<N> s;
            s.t0 = t;
            s.h = h;
            for (std::size_t i = 0; i < N; ++i) {
                const double dy = ynew[i] - y[i];
                const double bspl = h * k1[i] - dy;
                s.r1[i] = y[i];
                s.r2[i] = dy;
                s.r3[i] = bspl;
                s.r4[i] = dy - h * k7[i] - bspl;
                s.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
            }
            sol.steps.push_back(s);
            t = (t1 - (t + h) < 1e-15 * std::abs(t1)) ? t1 : t + h;
            y = ynew;
            k1 = k7;
        } else {
            ++sol.rejected;
        }
        const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h = std::min(hmax, h * (err <= 1.0 ? fac : std::min(1.0, fac)));
    }
    sol.y_end = y;
    return sol;
}

} // namespace tpa
