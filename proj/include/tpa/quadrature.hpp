#pragma once

// Globally adaptive Gauss-Kronrod (7/15) integration and golden-section search.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "tpa/errors.hpp"

namespace tpa {

struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-7;
    int max_depth = 30;        // bisection depth limit of any single interval
    int max_intervals = 4000;  // total panel budget
};

template <class T>
struct QuadResult {
    T value{};
    double error = 0.0;
    int evaluations = 0;
};

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <class T>
struct Panel {
    double a, b;
    T value;
    double error;
    int depth;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class T, class F>
Panel<T> gk15(F& f, double a, double b, int depth) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const T fc = f(c);
    T kron = fc * kWgk[7];
    T gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const T s = f(c - dx) + f(c + dx);
        kron += s * kWgk[j];
        if (j % 2 == 1) gauss += s * kWg[j / 2];
    }
    kron *= h;
    gauss *= h;
    return {a, b, kron, magnitude(kron - gauss), depth};
}

} // namespace detail

// Integrates f over [breaks.front(), breaks.back()], starting from one panel per
// break interval. Throws ConvergenceError with the partial estimate when the
// panel with the largest error cannot be split further.
template <class T, class F>
QuadResult<T> integrate(F&& f, std::span<const double> breaks, const QuadOptions& opt = {}) {
    std::priority_queue<detail::Panel<T>> heap;
    QuadResult<T> out;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) continue;
        auto p = detail::gk15<T>(f, breaks[i], breaks[i + 1], 0);
        out.value += p.value;
        out.error += p.error;
        out.evaluations += 15;
        heap.push(p);
    }
    auto tolerance = [&] { return std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(out.value)); };
    while (!heap.empty() && out.error > tolerance()) {
        auto worst = heap.top();
        if (worst.depth >= opt.max_depth || static_cast<int>(heap.size()) >= opt.max_intervals)
            throw ConvergenceError("adaptive quadrature exceeded its subdivision limit",
                                   detail::magnitude(out.value), out.error);
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        auto left = detail::gk15<T>(f, worst.a, mid, worst.depth + 1);
        auto right = detail::gk15<T>(f, mid, worst.b, worst.depth + 1);
        out.evaluations += 30;
        out.value += left.value + right.value - worst.value;
        out.error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // re-sum to shed the rounding accumulated by incremental updates
    T total{};
    double err = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    out.value = total;
    out.error = err;
    return out;
}

template <class T, class F>
QuadResult<T> integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
    const std::array<double, 2> br{a, b};
    return integrate<T>(std::forward<F>(f), std::span<const double>(br), opt);
}

struct ScalarMax {
    double x;
    double value;
};

// Golden-section search for a maximum of a unimodal f on [a, b].
template <class F>
ScalarMax golden_section_maximize(F&& f, double a, double b, double x_tol) {
    constexpr double invphi = 0.6180339887498949;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > x_tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return fc >= fd ? ScalarMax{c, fc} : ScalarMax{d, fd};
}

} // namespace tpa
