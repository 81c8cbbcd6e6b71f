#pragma once

// Joint and marginal densities in time and frequency.
//
// Fourier convention: f~(w) = (2 pi)^(-1/2) int f(t) exp(i w t) dt.
// Frequency offsets are measured from w_fg/2 of the working frame, except for the
// optimal-state spectral marginal and its maxima, which are measured from w_eg.
// Sum-frequency offsets are measured from w_fg.

#include <cstddef>
#include <string>
#include <vector>

#include "tpa/amplitude.hpp"
#include "tpa/atom.hpp"

namespace tpa {

enum class DensityKind { JointTime, JointFreq, MarginalTime, MarginalFreq, FreqSum };
std::string to_string(DensityKind k);

struct DensityGrid {
    std::vector<double> axis1;
    std::vector<double> axis2; // empty for one-dimensional densities
    std::vector<double> values; // row-major over (axis1, axis2)
    DensityKind kind = DensityKind::MarginalTime;

    double at(std::size_t i, std::size_t j) const { return values[i * axis2.size() + j]; }
};

struct AxisSpec {
    double lo = -1.0;
    double hi = 1.0;
    std::size_t n = 101;
    std::vector<double> points() const;
};

enum class PeakClass { SinglePeak, DoublePeak, Other };
std::string to_string(PeakClass c);

struct SpectralMaxima {
    AtomParams atom;
    std::vector<double> maxima;            // offsets from w_eg, ascending
    PeakClass classification = PeakClass::SinglePeak;
    std::vector<double> polynomial_roots;  // every real root, offsets from w_eg
    std::string warning;                   // set when a root residual is large
};

// Symmetrized joint spectral amplitude.
cplx spectral_amplitude(const TwoPhotonAmplitude& amp, double w1, double w2);

double marginal_time(const TwoPhotonAmplitude& amp, double t);
double marginal_frequency(const TwoPhotonAmplitude& amp, double omega_offset);
double frequency_sum_density(const TwoPhotonAmplitude& amp, double s);

// Closed-form spectral marginal of the optimal state with an infinite window,
// as a function of the offset from w_eg.
double optimal_marginal_frequency(const AtomParams& atom, double offset_from_eg);

// Two branches whose arithmetic mean is the optimal-state time marginal (t0 = -inf):
// the ge-branch (first photon absorbed) and the gf-branch.
struct OptimalTimeBranches {
    double first;
    double second;
};
OptimalTimeBranches optimal_time_branches(const AtomParams& atom, double t_star, double t);

SpectralMaxima optimal_spectral_maxima(const AtomParams& atom);

// Quintic coefficients (constant term first) whose real roots are the stationary
// points of the optimal spectral marginal; `scaled_by_ge` picks the variable
// (w - w_eg)/gamma_e instead of (w - w_eg)/gamma_f.
std::vector<double> stationary_polynomial(const AtomParams& atom, bool scaled_by_ge);

enum class Domain { Time, Frequency };

// Grids beyond `max_samples` points raise SizeError.
DensityGrid joint_density(const TwoPhotonAmplitude& amp, Domain domain, const AxisSpec& a1, const AxisSpec& a2,
                          std::size_t max_samples = std::size_t(1) << 24);

DensityGrid marginal_grid(const TwoPhotonAmplitude& amp, Domain domain, const AxisSpec& axis);
DensityGrid frequency_sum_grid(const TwoPhotonAmplitude& amp, const AxisSpec& axis);

// Trapezoid mass of a density grid.
double grid_mass(const DensityGrid& g);

} // namespace tpa
