#pragma once

// Master-equation dynamics of the ladder atom driven by a coherent Gaussian pulse
// in the frame rotating at the pulse carrier.

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "tpa/amplitude.hpp"
#include "tpa/atom.hpp"

namespace tpa {

struct OdeConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    // step cap as a fraction of min(1/width, 1/gamma_f, 1/gamma_e)
    double max_step_fraction = 0.5;

    void validate() const;
};

// Independent components of the Hermitian density matrix over {g, e, f}.
struct DensityState {
    double gg = 1.0, ee = 0.0, ff = 0.0;
    cplx ge = 0.0, gf = 0.0, ef = 0.0;

    double trace() const { return gg + ee + ff; }
    Eigen::Matrix3cd matrix() const;
};

struct DensityMatrixTrajectory {
    std::vector<double> t_grid;
    std::vector<DensityState> rho;
};

struct RhoPeak {
    double t_peak = 0.0;
    double value = 0.0;
    bool undefined = false; // no drive: the population never leaves the ground state
};

// Interval on which the pulse is integrated numerically; outside it the state is the
// ground state (before) or follows analytic free decay (after).
std::pair<double, double> pulse_window(const CoherentPulseParams& pulse);

// Detunings of the two transitions from the pulse carrier.
std::pair<double, double> coherent_detunings(const AtomParams& atom, const CoherentPulseParams& pulse);

// Density matrix at every requested time (any order).
DensityMatrixTrajectory integrate(const AtomParams& atom, const CoherentPulseParams& pulse,
                                  const std::vector<double>& sample_times, const OdeConfig& cfg = {});

// Maximum of rho_ff; it lies inside the pulse window since rho_ff only decays afterwards.
RhoPeak rho_ff_peak(const AtomParams& atom, const CoherentPulseParams& pulse, const OdeConfig& cfg = {});

// Right-hand side of the master equation written with 3x3 operators; state layout
// {gg, ee, ff, Re ge, Im ge, Re gf, Im gf, Re ef, Im ef}.
void lindblad_rhs(const AtomParams& atom, double delta1, double delta2, double drive, const double* y, double* dy);

} // namespace tpa
