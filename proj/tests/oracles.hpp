#pragma once

// Brute-force reference computations shared by the test suites.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "tpa/amplitude.hpp"
#include "tpa/atom.hpp"

namespace oracle {

using cplx = std::complex<double>;

// Composite Simpson rule with n (even) panels.
template <class T, class F>
T simpson(F&& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    T s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * (h / 3.0);
}

template <class T, class F>
T trapezoid(F&& f, double a, double b, int n) {
    const double h = (b - a) / n;
    T s = 0.5 * (f(a) + f(b));
    for (int i = 1; i < n; ++i) s += f(a + i * h);
    return s * h;
}

// 2 * double integral of |phi|^2 on a square, Simpson in both directions.
inline double norm_simpson(const tpa::TwoPhotonAmplitude& amp, double lo, double hi, int n) {
    return 2.0 * simpson<double>([&](double t1) {
        return simpson<double>([&](double t2) { return std::norm(amp(t1, t2)); }, lo, hi, n);
    }, lo, hi, n);
}

// P_f(t) from the nested time-ordered integrals, evaluated with plain Simpson panels on
// a uniform grid over [lo, t]: I(t2) is accumulated panel by panel in t1.
inline double pf_nested(const tpa::AtomParams& atom, const tpa::TwoPhotonAmplitude& amp, double lo, double t, int n) {
    const double ge = atom.gamma_e, gf = atom.gamma_f;
    const double weg = atom.omega_eg(), wfe = atom.omega_fe();
    if (n % 2) ++n;
    const double h = (t - lo) / n;
    std::vector<cplx> inner(n + 1);
    for (int j = 0; j <= n; ++j) {
        const double t2 = lo + j * h;
        auto f = [&](double t1) {
            return std::exp(cplx(-0.5 * ge * (t2 - t1), weg * t1)) * amp(t1, t2);
        };
        inner[j] = j == 0 ? cplx(0.0) : simpson<cplx>(f, lo, t2, std::max(2, 2 * j));
    }
    cplx outer = 0.0;
    for (int j = 0; j <= n; ++j) {
        const double t2 = lo + j * h;
        const double w = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
        outer += w * std::exp(cplx(-0.5 * gf * (t - t2), wfe * t2)) * inner[j];
    }
    outer *= h / 3.0;
    return 4.0 * ge * gf * std::norm(outer);
}

// Classic fixed-step RK4 on a complex state.
template <class Rhs>
std::vector<cplx> rk4(Rhs&& rhs, std::vector<cplx> y, double t0, double t1, int steps) {
    const double h = (t1 - t0) / steps;
    const std::size_t n = y.size();
    std::vector<cplx> k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (int s = 0; s < steps; ++s) {
        const double t = t0 + s * h;
        rhs(t, y, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        rhs(t + 0.5 * h, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        rhs(t + 0.5 * h, tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
        rhs(t + h, tmp, k4);
        for (std::size_t i = 0; i < n; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return y;
}

} // namespace oracle
