#include "tpa/faddeeva.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace tpa {
namespace {

constexpr int kTerms = 40;

struct WeidemanTable {
    double L;
    std::array<double, kTerms> coef; // coefficients of Z^0..Z^(N-1)
};

WeidemanTable build_table() {
    const int N = kTerms;
    const int M = 2 * N;
    const double L = std::sqrt(N / std::numbers::sqrt2);
    std::array<double, 2 * M> g{};
    for (int k = -M + 1; k < M; ++k) {
        const double t = L * std::tan(k * std::numbers::pi / (2.0 * M));
        g[k + M] = std::exp(-t * t) * (L * L + t * t);
    }
    g[0] = 0.0; // k = -M, the point at infinity
    WeidemanTable tab{L, {}};
    for (int n = 1; n <= N; ++n) {
        double acc = 0.0;
        for (int k = -M; k < M; ++k)
            acc += g[k + M] * std::cos(std::numbers::pi * n * k / M);
        tab.coef[n - 1] = acc / (2.0 * M);
    }
    return tab;
}

const WeidemanTable& table() {
    static const WeidemanTable tab = build_table();
    return tab;
}

cplx w_upper(cplx z) {
    const auto& tab = table();
    const cplx iz(-z.imag(), z.real());
    const cplx den = tab.L - iz;
    const cplx Z = (tab.L + iz) / den;
    cplx p = tab.coef[kTerms - 1];
    for (int n = kTerms - 2; n >= 0; --n) p = p * Z + tab.coef[n];
    return 2.0 * p / (den * den) + 1.0 / (std::sqrt(std::numbers::pi) * den);
}

} // namespace

cplx faddeeva_w(cplx z) {
    if (z.imag() >= 0.0) return w_upper(z);
    // reflection into the upper half plane
    return 2.0 * std::exp(-z * z) - w_upper(-z);
}

cplx truncated_gaussian_integral(double a, cplx beta, cplx gamma, double upper) {
    const double sa = std::sqrt(a);
    const cplx z = -sa * (upper - beta / (2.0 * a));
    const double c = std::sqrt(std::numbers::pi) / (2.0 * sa);
    const cplx at_upper = std::exp(gamma + beta * upper - a * upper * upper);
    const cplx i(0.0, 1.0);
    if (z.real() >= 0.0) return at_upper * c * faddeeva_w(i * z);
    return 2.0 * c * std::exp(gamma + beta * beta / (4.0 * a)) - at_upper * c * faddeeva_w(-i * z);
}

} // namespace tpa
