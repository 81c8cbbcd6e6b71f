#pragma once

// Two-photon temporal amplitudes for indistinguishable photons.
//
// Every amplitude is stored in the rotating frame of the atom (carriers are
// detunings from half the two-photon transition frequency) and evaluated
// already symmetrized and normalized, i.e. 2 * integral |phi_sym|^2 = 1.

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tpa/atom.hpp"
#include "tpa/faddeeva.hpp"

namespace tpa {

enum class Family { Optimal, GaussianProduct, CorrelatedGaussian, Custom };

std::string to_string(Family f);
Family family_from_string(const std::string& name);

struct OptimalStateParams {
    double t_star = 0.0;
    std::optional<double> t0; // empty means the interaction starts at -infinity
    AtomParams atom;
};

struct GaussianProductParams {
    double omega_a_width = 1.0;
    double omega_b_width = 1.0;
    double mu = 0.0;                   // centre of profile b minus centre of profile a (a sits at t = 0)
    double delta_f = 0.0;              // carrier b minus carrier a
    double carrier_sum_detuning = 0.0; // (w_a + w_b) - w_fg
};

struct CorrelatedGaussianParams {
    double omega_plus = 1.0;  // sum-frequency width
    double omega_minus = 1.0; // difference-frequency width
    double mu = 0.0;
    double delta_f = 0.0;
    double carrier_sum_detuning = 0.0;
};

struct CoherentPulseParams {
    double width = 1.0;     // envelope bandwidth
    double n_bar = 2.0;     // mean photon number
    double detuning = 0.0;  // carrier minus w_fg/2
    double t_center = 0.0;
};

// Tabulated amplitude on a rectangular grid, row-major: values[i1 * t2.size() + i2].
struct CustomGrid {
    std::vector<double> t1;
    std::vector<double> t2;
    std::vector<cplx> values;
};

// Term exp(-a t1^2 + beta t1 + gamma) of phi_sym(., t2) for Gaussian families.
struct GaussianSlice {
    double a;
    cplx beta;
    cplx gamma;
};

// A region where the amplitude has weight; used for scan windows and breakpoints.
struct TimeComponent {
    double center;
    double sigma;
};

void validate(const OptimalStateParams& p);
void validate(const GaussianProductParams& p);
void validate(const CorrelatedGaussianParams& p);
void validate(const CoherentPulseParams& p);

// Closed-form normalization constants.
double normalization_constant(const OptimalStateParams& p);
double normalization_constant(const GaussianProductParams& p);
double normalization_constant(const CorrelatedGaussianParams& p);

// Largest attainable excitation probability for an interaction window of length tau
// (tau may be +infinity).
double max_excitation_in_window(const AtomParams& atom, double tau);

// Overlap <psi_a|psi_b> of the two single-photon profiles.
cplx gaussian_product_overlap(const GaussianProductParams& p);

// Coherent pulse amplitude sqrt(n_bar) * alpha0(t) * exp(-i detuning t).
cplx coherent_envelope(const CoherentPulseParams& p, double t);
// Real envelope sqrt(n_bar) * alpha0(t).
double coherent_real_envelope(const CoherentPulseParams& p, double t);

class TwoPhotonAmplitude {
public:
    static TwoPhotonAmplitude optimal(const OptimalStateParams& p);
    static TwoPhotonAmplitude gaussian_product(const GaussianProductParams& p);
    static TwoPhotonAmplitude correlated_gaussian(const CorrelatedGaussianParams& p);
    // Symmetrizes, resamples onto the merged axis and renormalizes. Throws DomainError
    // on a malformed or all-zero grid.
    static TwoPhotonAmplitude custom(const CustomGrid& grid);

    Family family() const noexcept { return family_; }

    // Symmetrized, normalized amplitude.
    cplx operator()(double t1, double t2) const;

    // Window outside of which the amplitude is negligible.
    std::pair<double, double> support() const;
    // Lower limit used by the excitation integrals.
    double interaction_start() const { return support().first; }
    // Points where the amplitude or its derivatives are not smooth.
    std::vector<double> breakpoints() const;
    std::vector<TimeComponent> components() const;

    // Normalization constant of the underlying family (before the shift/phase modifiers).
    double normalization() const;

    bool has_gaussian_slices() const noexcept {
        return family_ == Family::GaussianProduct || family_ == Family::CorrelatedGaussian;
    }
    // Fills at most two slices; returns the count.
    int gaussian_slices(double t2, std::span<GaussianSlice, 2> out) const;

    // Modified copies.
    TwoPhotonAmplitude with_phase(double theta) const;
    TwoPhotonAmplitude time_shifted(double dt) const;
    // Adds `dw` to the carrier of both photons.
    TwoPhotonAmplitude with_carrier_shift(double dw) const;

    const OptimalStateParams* optimal_params() const { return std::get_if<OptimalStateParams>(&params_); }
    const GaussianProductParams* gaussian_product_params() const {
        return std::get_if<GaussianProductParams>(&params_);
    }
    const CorrelatedGaussianParams* correlated_params() const {
        return std::get_if<CorrelatedGaussianParams>(&params_);
    }
    const CustomGrid* custom_grid() const;

    double time_offset() const noexcept { return shift_; }
    double carrier_shift() const noexcept { return carrier_; }
    double phase() const noexcept { return phase_; }

private:
    struct CustomData {
        CustomGrid grid; // square, symmetric, normalized
    };

    TwoPhotonAmplitude() = default;
    cplx base(double t1, double t2) const;
    int base_slices(double t2, std::span<GaussianSlice, 2> out) const;

    Family family_ = Family::Optimal;
    std::variant<OptimalStateParams, GaussianProductParams, CorrelatedGaussianParams, CustomData> params_;
    double norm_ = 1.0;
    double shift_ = 0.0;
    double carrier_ = 0.0;
    double phase_ = 0.0;
    double prefactor_ = 0.0; // optimal state: sqrt(ge gf / pmax)
};

cplx evaluate_symmetric(const TwoPhotonAmplitude& amp, double t1, double t2);
cplx optimal_amplitude(const OptimalStateParams& p, double t1, double t2);

} // namespace tpa
