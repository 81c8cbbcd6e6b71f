#pragma once

// Three-level ladder atom |g> -> |e> -> |f>.
//
// Every frequency is an offset from the reference w_ref = w_fg / 2, so in the
// working frame w_eg = -delta_a/2 and w_fe = +delta_a/2. `frame_offset` moves the
// reference; shifting it together with all field carriers must leave every
// probability unchanged. Numerics elsewhere assume gamma_f = 1 for reporting, but
// nothing in the engine depends on that choice.

namespace tpa {

struct AtomParams {
    double gamma_e = 1.0;      // decay rate of |e>
    double gamma_f = 1.0;      // decay rate of |f>
    double delta_a = 0.0;      // w_fe - w_eg, signed
    double frame_offset = 0.0; // common shift of both transition frequencies

    double omega_eg() const noexcept { return -0.5 * delta_a + frame_offset; }
    double omega_fe() const noexcept { return 0.5 * delta_a + frame_offset; }
    // Two-photon transition frequency in the working frame.
    double omega_fg() const noexcept { return omega_eg() + omega_fe(); }

    double ratio() const noexcept { return gamma_e / gamma_f; }
    double delta_a_over_gf() const noexcept { return delta_a / gamma_f; }

    // Throws DomainError unless both rates are positive and everything is finite.
    void validate() const;

    bool operator==(const AtomParams&) const = default;
};

// gamma_f = 1, gamma_e = ratio, delta_a = delta_a_over_gf.
AtomParams from_ratios(double ratio, double delta_a_over_gf);

// Validated construction from explicit rates.
AtomParams make_atom(double gamma_e, double gamma_f, double delta_a);

// Relative threshold |gamma_f - gamma_e| < kDegenerateRates * gamma_f below which
// closed forms containing 1/(gamma_f - gamma_e) switch to their series limit.
inline constexpr double kDegenerateRates = 1e-6;

// (exp(-eps*tau) - 1) / eps with the removable singularity at eps = 0 handled by a
// second-order series when |eps| is below `threshold`.
double expm1_ratio(double eps, double tau, double threshold);

} // namespace tpa
