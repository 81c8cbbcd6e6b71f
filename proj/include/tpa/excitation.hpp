#pragma once

// Two-photon excitation probability of the upper level,
//   P_f(t) = 4 ge gf |A(t)|^2,
//   A(t)   = int_{lo}^{t} dt2 exp(i w_fe t2 - gf (t - t2)/2) I(t2),
//   I(t2)  = int_{lo}^{t2} dt1 exp(i w_eg t1 - ge (t2 - t1)/2) phi_sym(t1, t2).

#include <complex>
#include <utility>
#include <vector>

#include "tpa/amplitude.hpp"
#include "tpa/atom.hpp"

namespace tpa {

struct QuadratureConfig {
    double rel_tol = 1e-7;
    int max_depth = 30;
    int peak_scan_points = 200;
    bool use_semi_analytic = true; // closed-form inner integral for Gaussian families

    void validate() const;
};

struct PeakResult {
    double t_peak = 0.0;
    double pf_peak = 0.0;
    bool degenerate = false; // curve is numerically zero; t_peak is the support centre
};

struct ExcitationResult {
    std::vector<double> t_grid;
    std::vector<double> pf;
    double t_peak = 0.0;
    double pf_peak = 0.0;
    double bound_at_peak = 1.0;
    bool degenerate_peak = false;
};

double pf_at(const AtomParams& atom, const TwoPhotonAmplitude& amp, double t, const QuadratureConfig& cfg = {});

// Probability at every grid time (any order); integrates cumulatively.
std::vector<double> pf_curve(const AtomParams& atom, const TwoPhotonAmplitude& amp, const std::vector<double>& t_grid,
                             const QuadratureConfig& cfg = {});

// exp(-gf |t_star - t|), the curve produced by the optimal state with an infinite window.
double pf_closed_form_optimal(const AtomParams& atom, double t_star, double t);

// Upper bound on P_f(t_star) for any field that starts interacting at t0 (may be -inf).
double pf_upper_bound(const AtomParams& atom, double t_star, double t0);

PeakResult pf_peak(const AtomParams& atom, const TwoPhotonAmplitude& amp, const QuadratureConfig& cfg = {});

// Integral of P_f over [support start, support end + 40/gf].
double mean_residence_time(const AtomParams& atom, const TwoPhotonAmplitude& amp, const QuadratureConfig& cfg = {});

// Curve on the grid plus the peak and the bound at the peak time.
ExcitationResult compute_excitation(const AtomParams& atom, const TwoPhotonAmplitude& amp,
                                    const std::vector<double>& t_grid, const QuadratureConfig& cfg = {});

// Bound at time t for the amplitude's own interaction window.
double bound_for_amplitude(const AtomParams& atom, const TwoPhotonAmplitude& amp, double t);

} // namespace tpa
