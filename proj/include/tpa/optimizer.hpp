#pragma once

// Multistart simplex search for the pulse parameters that maximize the peak
// excitation of the upper level, and grid sweeps over atom parameters.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tpa/amplitude.hpp"
#include "tpa/atom.hpp"
#include "tpa/coherent.hpp"
#include "tpa/excitation.hpp"

namespace tpa {

enum class PulseFamily { GaussianProduct, CorrelatedGaussian, Coherent };

enum class ConstraintTag {
    DegenerateResonant, // equal carriers, carrier sum on w_fg
    TwoPhotonResonant,  // carrier sum on w_fg, carrier difference free
    FullyFree,
};

struct ConstraintMode {
    ConstraintTag tag = ConstraintTag::DegenerateResonant;
    bool mu_free = true; // delay between the two profiles is optimized, otherwise fixed at 0

    bool operator==(const ConstraintMode&) const = default;
};

std::string to_string(PulseFamily f);
std::string to_string(ConstraintTag t);
PulseFamily pulse_family_from_string(const std::string& s);
ConstraintTag constraint_tag_from_string(const std::string& s);

using FamilyParams = std::variant<GaussianProductParams, CorrelatedGaussianParams, CoherentPulseParams>;

struct Budget {
    int max_evals = 2000; // objective evaluations per optimization run
    int starts = 8;
    std::uint64_t seed = 1;
    int jobs = 1;
};

struct OptimizerSettings {
    QuadratureConfig quad;
    OdeConfig ode;
    double coherent_n_bar = 2.0;
};

struct OptimizationRecord {
    AtomParams atom;
    PulseFamily family = PulseFamily::GaussianProduct;
    ConstraintMode mode;
    FamilyParams best_params;
    double pf_max = 0.0;
    double t_peak = 0.0;
    int starts = 0;
    bool converged = false;
    int objective_evals = 0;
    std::string diagnostics;
};

struct ObjectiveValue {
    double pf = 0.0;
    double t_peak = 0.0;
};

// Peak excitation for one parameter set (rho_ff peak for the coherent family).
ObjectiveValue evaluate_objective(const AtomParams& atom, const FamilyParams& params,
                                  const OptimizerSettings& settings = {});

// Number of free coordinates for a family under a constraint mode.
int free_dimension(PulseFamily family, const ConstraintMode& mode);
std::vector<double> encode(const AtomParams& atom, PulseFamily family, const ConstraintMode& mode,
                           const FamilyParams& params);
FamilyParams decode(const AtomParams& atom, PulseFamily family, const ConstraintMode& mode,
                    const std::vector<double>& u, const OptimizerSettings& settings = {});

// `extra_seeds` are added to the physics-informed seeds (used for warm starts).
// Modes with a smaller nested feasible set are optimized first and their optimum seeds
// this run, so the result never falls below the constrained one.
OptimizationRecord optimize(const AtomParams& atom, PulseFamily family, const ConstraintMode& mode,
                            const Budget& budget, const OptimizerSettings& settings = {},
                            const std::vector<FamilyParams>& extra_seeds = {});

struct SweepCell {
    double ratio = 0.0;
    double delta_a = 0.0;
    std::optional<OptimizationRecord> record;
    std::string error;
    bool warm_started = false;
};

// Cells in row-major order (ratio outer, delta_a inner).
std::vector<SweepCell> sweep(PulseFamily family, const ConstraintMode& mode, const std::vector<double>& ratio_grid,
                             const std::vector<double>& delta_a_grid, const Budget& budget,
                             const OptimizerSettings& settings = {}, bool warm_start = false);

} // namespace tpa
