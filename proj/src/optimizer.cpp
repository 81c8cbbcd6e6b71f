#include "tpa/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "tpa/errors.hpp"
#include "tpa/nelder_mead.hpp"

namespace tpa {

std::string to_string(PulseFamily f) {
    switch (f) {
    case PulseFamily::GaussianProduct: return "gaussian_product";
    case PulseFamily::CorrelatedGaussian: return "correlated_gaussian";
    case PulseFamily::Coherent: return "coherent";
    }
    return "unknown";
}

std::string to_string(ConstraintTag t) {
    switch (t) {
    case ConstraintTag::DegenerateResonant: return "degenerate_resonant";
    case ConstraintTag::TwoPhotonResonant: return "two_photon_resonant";
    case ConstraintTag::FullyFree: return "fully_free";
    }
    return "unknown";
}

PulseFamily pulse_family_from_string(const std::string& s) {
    if (s == "gaussian_product") return PulseFamily::GaussianProduct;
    if (s == "correlated_gaussian") return PulseFamily::CorrelatedGaussian;
    if (s == "coherent") return PulseFamily::Coherent;
    throw DomainError(fmt::format("unknown pulse family '{}'", s));
}

ConstraintTag constraint_tag_from_string(const std::string& s) {
    if (s == "degenerate_resonant") return ConstraintTag::DegenerateResonant;
    if (s == "two_photon_resonant") return ConstraintTag::TwoPhotonResonant;
    if (s == "fully_free") return ConstraintTag::FullyFree;
    throw DomainError(fmt::format("unknown constraint mode '{}'", s));
}

namespace {

struct Layout {
    bool mu = false;
    bool delta_f = false;
    bool carrier = false;
    int widths = 2;
    int size() const { return widths + int(mu) + int(delta_f) + int(carrier); }
};

Layout layout(PulseFamily family, const ConstraintMode& mode) {
    Layout l;
    if (family == PulseFamily::Coherent) {
        l.widths = 1;
        l.carrier = mode.tag == ConstraintTag::FullyFree;
        return l;
    }
    l.mu = mode.mu_free;
    l.delta_f = mode.tag != ConstraintTag::DegenerateResonant;
    l.carrier = mode.tag == ConstraintTag::FullyFree;
    return l;
}

struct Scales {
    double width;   // log widths are measured from this
    double delay;   // mu / delay
    double detuning;
};

Scales scales(const AtomParams& atom) { return {atom.gamma_f, 1.0 / atom.gamma_e, atom.gamma_f}; }

std::optional<ConstraintMode> parent_mode(PulseFamily family, const ConstraintMode& mode) {
    if (family == PulseFamily::Coherent) {
        if (mode.tag == ConstraintTag::FullyFree) return ConstraintMode{ConstraintTag::DegenerateResonant, false};
        return std::nullopt;
    }
    switch (mode.tag) {
    case ConstraintTag::FullyFree: return ConstraintMode{ConstraintTag::TwoPhotonResonant, mode.mu_free};
    case ConstraintTag::TwoPhotonResonant: return ConstraintMode{ConstraintTag::DegenerateResonant, mode.mu_free};
    case ConstraintTag::DegenerateResonant:
        if (mode.mu_free) return ConstraintMode{ConstraintTag::DegenerateResonant, false};
        return std::nullopt;
    }
    return std::nullopt;
}

double uniform01(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

double norm2(const std::vector<double>& u) {
    double s = 0.0;
    for (double v : u) s += v * v;
    return s;
}

struct Candidate {
    std::vector<double> u;
    double pf = -1.0;
    double t_peak = 0.0;
    bool converged = false;
};

bool better(const Candidate& a, const Candidate& b) {
    if (a.pf != b.pf) return a.pf > b.pf;
    return norm2(a.u) < norm2(b.u);
}

// Seeds in free coordinates, most informative first.
std::vector<std::vector<double>> physics_seeds(const AtomParams& atom, PulseFamily family, const ConstraintMode& mode,
                                               const OptimizerSettings& settings) {
    const double ge = atom.gamma_e, gf = atom.gamma_f;
    const double da = atom.delta_a;
    std::vector<std::pair<double, double>> widths;
    if (family == PulseFamily::GaussianProduct)
        widths = {{1.46 * ge, 1.46 * (ge + gf)}, {ge, ge + gf}, {ge + gf, ge + gf}, {gf, gf}, {2 * ge + gf, gf},
                  {ge, gf}};
    else if (family == PulseFamily::CorrelatedGaussian)
        widths = {{gf, 2 * ge + gf}, {1.03 * gf, 0.54 * (2 * ge + gf)}, {ge + gf, ge + gf}, {gf, gf},
                  {2 * ge + gf, gf}, {ge, ge}};
    else
        widths = {{ge + gf, 0}, {ge, 0}, {gf, 0}, {2 * ge + gf, 0}};

    const std::vector<double> mus = mode.mu_free ? std::vector<double>{0.0, 1.0 / ge} : std::vector<double>{0.0};
    const bool df_free = family != PulseFamily::Coherent && mode.tag != ConstraintTag::DegenerateResonant;
    std::vector<double> dfs = {0.0};
    if (df_free && da != 0.0) dfs.push_back(da);

    std::vector<std::vector<double>> out;
    for (double df : dfs)
        for (double mu : mus)
            for (const auto& [wa, wb] : widths) {
                FamilyParams p;
                if (family == PulseFamily::GaussianProduct)
                    p = GaussianProductParams{wa, wb, mu, df, 0.0};
                else if (family == PulseFamily::CorrelatedGaussian)
                    p = CorrelatedGaussianParams{wa, wb, mu, df, 0.0};
                else
                    p = CoherentPulseParams{wa, settings.coherent_n_bar, 0.0, 0.0};
                out.push_back(encode(atom, family, mode, p));
            }
    return out;
}

class Objective {
public:
    Objective(const AtomParams& atom, PulseFamily family, const ConstraintMode& mode, const OptimizerSettings& s)
        : atom_(atom), family_(family), mode_(mode), settings_(s), layout_(layout(family, mode)) {
        const double lo = std::min(atom.gamma_e, atom.gamma_f), hi = std::max(atom.gamma_e, atom.gamma_f);
        const Scales sc = scales(atom);
        log_lo_ = std::log(1e-3 * lo / sc.width);
        log_hi_ = std::log(1e3 * hi / sc.width);
        mu_max_ = 40.0 / lo / sc.delay;
        det_max_ = (10.0 * (std::abs(atom.delta_a) + atom.gamma_e + atom.gamma_f)) / sc.detuning;
    }

    // Distance outside the admissible box in scaled coordinates (0 inside).
    double excess(const std::vector<double>& u) const {
        double e = 0.0;
        int k = 0;
        for (; k < layout_.widths; ++k) e += std::max(0.0, u[k] - log_hi_) + std::max(0.0, log_lo_ - u[k]);
        if (layout_.mu) e += std::max(0.0, std::abs(u[k++]) - mu_max_);
        for (; k < int(u.size()); ++k) e += std::max(0.0, std::abs(u[k]) - det_max_);
        return e;
    }

    Candidate operator()(const std::vector<double>& u) const {
        Candidate c;
        c.u = u;
        const double e = excess(u);
        if (e > 0.0) {
            c.pf = -1.0 - e;
            return c;
        }
        try {
            const auto v = evaluate_objective(atom_, decode(atom_, family_, mode_, u, settings_), settings_);
            c.pf = v.pf;
            c.t_peak = v.t_peak;
        } catch (const std::exception&) {
            c.pf = -1.0;
        }
        return c;
    }

private:
    AtomParams atom_;
    PulseFamily family_;
    ConstraintMode mode_;
    OptimizerSettings settings_;
    Layout layout_;
    double log_lo_, log_hi_, mu_max_, det_max_;
};

// Simplex run that remembers the best point it evaluated.
Candidate run_simplex(const Objective& obj, const std::vector<double>& x0, double step, int max_evals, int& evals,
                      bool& converged) {
    Candidate best;
    best.pf = -std::numeric_limits<double>::infinity();
    NelderMeadOptions opt;
    opt.max_evals = std::max(max_evals, int(x0.size()) + 2);
    opt.initial_step.assign(x0.size(), step);
    auto f = [&](const std::vector<double>& u) {
        Candidate c = obj(u);
        if (better(c, best)) best = c;
        return -c.pf;
    };
    const auto res = nelder_mead_minimize(f, x0, opt);
    evals += res.evals;
    converged = res.converged;
    best.converged = res.converged;
    return best;
}

template <class Fn>
void parallel_for(int n, int jobs, Fn&& fn) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) fn(i);
        });
    for (auto& t : pool) t.join();
}

} // namespace

ObjectiveValue evaluate_objective(const AtomParams& atom, const FamilyParams& params, const OptimizerSettings& s) {
    if (const auto* gp = std::get_if<GaussianProductParams>(&params)) {
        const auto r = pf_peak(atom, TwoPhotonAmplitude::gaussian_product(*gp), s.quad);
        return {r.pf_peak, r.t_peak};
    }
    if (const auto* cg = std::get_if<CorrelatedGaussianParams>(&params)) {
        const auto r = pf_peak(atom, TwoPhotonAmplitude::correlated_gaussian(*cg), s.quad);
        return {r.pf_peak, r.t_peak};
    }
    const auto r = rho_ff_peak(atom, std::get<CoherentPulseParams>(params), s.ode);
    return {r.undefined ? 0.0 : r.value, r.t_peak};
}

int free_dimension(PulseFamily family, const ConstraintMode& mode) { return layout(family, mode).size(); }

std::vector<double> encode(const AtomParams& atom, PulseFamily family, const ConstraintMode& mode,
                           const FamilyParams& params) {
    const Layout l = layout(family, mode);
    const Scales sc = scales(atom);
    std::vector<double> u;
    auto push_rest = [&](double mu, double df, double carrier) {
        if (l.mu) u.push_back(mu / sc.delay);
        if (l.delta_f) u.push_back(df / sc.detuning);
        if (l.carrier) u.push_back(carrier / sc.detuning);
    };
    if (family == PulseFamily::GaussianProduct) {
        const auto& p = std::get<GaussianProductParams>(params);
        u = {std::log(p.omega_a_width / sc.width), std::log(p.omega_b_width / sc.width)};
        push_rest(p.mu, p.delta_f, p.carrier_sum_detuning);
    } else if (family == PulseFamily::CorrelatedGaussian) {
        const auto& p = std::get<CorrelatedGaussianParams>(params);
        u = {std::log(p.omega_plus / sc.width), std::log(p.omega_minus / sc.width)};
        push_rest(p.mu, p.delta_f, p.carrier_sum_detuning);
    } else {
        const auto& p = std::get<CoherentPulseParams>(params);
        u = {std::log(p.width / sc.width)};
        if (l.carrier) u.push_back(p.detuning / sc.detuning);
    }
    return u;
}

FamilyParams decode(const AtomParams& atom, PulseFamily family, const ConstraintMode& mode,
                    const std::vector<double>& u, const OptimizerSettings& settings) {
    const Layout l = layout(family, mode);
    if (int(u.size()) != l.size()) throw DomainError("coordinate vector has the wrong length");
    const Scales sc = scales(atom);
    if (family == PulseFamily::Coherent) {
        CoherentPulseParams p;
        p.width = sc.width * std::exp(u[0]);
        p.n_bar = settings.coherent_n_bar;
        p.detuning = l.carrier ? u[1] * sc.detuning : 0.0;
        return p;
    }
    int k = 2;
    const double mu = l.mu ? u[k++] * sc.delay : 0.0;
    const double df = l.delta_f ? u[k++] * sc.detuning : 0.0;
    const double carrier = l.carrier ? u[k++] * sc.detuning : 0.0;
    const double w1 = sc.width * std::exp(u[0]), w2 = sc.width * std::exp(u[1]);
    if (family == PulseFamily::GaussianProduct) return GaussianProductParams{w1, w2, mu, df, carrier};
    return CorrelatedGaussianParams{w1, w2, mu, df, carrier};
}

OptimizationRecord optimize(const AtomParams& atom, PulseFamily family, const ConstraintMode& mode,
                            const Budget& budget, const OptimizerSettings& settings,
                            const std::vector<FamilyParams>& extra_seeds) {
    atom.validate();
    settings.quad.validate();
    settings.ode.validate();
    if (budget.max_evals < 200) throw DomainError("optimizer budget must allow at least 200 evaluations");
    if (budget.starts < 1) throw DomainError("optimizer needs at least one start");

    OptimizationRecord rec;
    rec.atom = atom;
    rec.family = family;
    rec.mode = mode;

    std::vector<std::vector<double>> seeds;
    int evals = 0;
    if (const auto pm = parent_mode(family, mode)) {
        const auto parent = optimize(atom, family, *pm, budget, settings, extra_seeds);
        evals += parent.objective_evals;
        seeds.push_back(encode(atom, family, mode, parent.best_params));
        rec.diagnostics = fmt::format("seeded from {}{} optimum {:.6f}", to_string(pm->tag),
                                      pm->mu_free ? "" : " (fixed delay)", parent.pf_max);
    }
    for (const auto& p : extra_seeds) {
        // Warm-start seeds may come from a wider mode; project them onto this one.
        seeds.push_back(encode(atom, family, mode, p));
    }
    for (auto& s : physics_seeds(atom, family, mode, settings)) seeds.push_back(std::move(s));

    const Objective obj(atom, family, mode, settings);
    const int dim = free_dimension(family, mode);
    const int budget_evals = budget.max_evals;

    // Rank seeds by their raw value.
    std::vector<Candidate> ranked(seeds.size());
    parallel_for(int(seeds.size()), budget.jobs, [&](int i) { ranked[i] = obj(seeds[i]); });
    int used = int(seeds.size());
    std::stable_sort(ranked.begin(), ranked.end(), better);

    // Starts: the best raw seeds, then Latin-hypercube perturbations around the ranked seeds.
    const int n_starts = budget.starts;
    const int n_raw = std::min<int>(int(ranked.size()), (n_starts + 1) / 2);
    std::mt19937_64 rng(budget.seed);
    std::vector<std::vector<int>> strata(dim, std::vector<int>(n_starts));
    for (auto& s : strata) {
        for (int i = 0; i < n_starts; ++i) s[i] = i;
        for (int i = n_starts - 1; i > 0; --i) std::swap(s[i], s[rng() % std::uint64_t(i + 1)]);
    }
    std::vector<std::vector<double>> starts;
    for (int k = 0; k < n_starts; ++k) {
        auto x = ranked[k % ranked.size()].u;
        if (k >= n_raw)
            for (int d = 0; d < dim; ++d) x[d] += (strata[d][k] + uniform01(rng)) / n_starts - 0.5;
        starts.push_back(std::move(x));
    }

    // Phase 1: short simplex runs from every start.
    const int phase1 = std::max(4 * (dim + 1), int(0.5 * (budget_evals - used)) / n_starts);
    std::vector<Candidate> local(n_starts);
    std::vector<int> local_evals(n_starts, 0);
    parallel_for(n_starts, budget.jobs, [&](int k) {
        bool conv = false;
        local[k] = run_simplex(obj, starts[k], 0.3, phase1, local_evals[k], conv);
    });
    for (int e : local_evals) used += e;
    std::vector<Candidate> pool = local;
    pool.insert(pool.end(), ranked.begin(), ranked.end());
    std::stable_sort(pool.begin(), pool.end(), better);

    // Phase 2: polish the two best distinct optima with the remaining budget.
    std::vector<Candidate> finalists;
    for (const auto& c : pool) {
        bool dup = false;
        for (const auto& f : finalists) {
            double d = 0.0;
            for (int i = 0; i < dim; ++i) d = std::max(d, std::abs(c.u[i] - f.u[i]));
            dup = dup || d < 1e-3;
        }
        if (!dup) finalists.push_back(c);
        if (finalists.size() == 2) break;
    }
    const int remaining = std::max(0, budget_evals - used);
    std::vector<Candidate> polished(finalists.size());
    std::vector<int> polish_evals(finalists.size(), 0);
    parallel_for(int(finalists.size()), budget.jobs, [&](int k) {
        bool conv = false;
        const int share = std::max(2 * (dim + 1), remaining / int(finalists.size()));
        polished[k] = run_simplex(obj, finalists[k].u, 0.05, share, polish_evals[k], conv);
        polished[k].converged = conv;
        if (better(finalists[k], polished[k])) {
            finalists[k].converged = conv;
            polished[k] = finalists[k];
        }
    });
    for (int e : polish_evals) used += e;

    Candidate best = polished.front();
    for (const auto& c : polished)
        if (better(c, best)) best = c;

    rec.best_params = decode(atom, family, mode, best.u, settings);
    rec.pf_max = std::clamp(best.pf, 0.0, 1.0);
    rec.t_peak = best.t_peak;
    rec.starts = n_starts;
    rec.converged = best.converged;
    rec.objective_evals = evals + used;
    if (!rec.converged) {
        if (!rec.diagnostics.empty()) rec.diagnostics += "; ";
        rec.diagnostics += "simplex did not reach the diameter tolerance within the budget";
    }
    return rec;
}

std::vector<SweepCell> sweep(PulseFamily family, const ConstraintMode& mode, const std::vector<double>& ratio_grid,
                             const std::vector<double>& delta_a_grid, const Budget& budget,
                             const OptimizerSettings& settings, bool warm_start) {
    for (double r : ratio_grid)
        if (!std::isfinite(r) || r <= 0.0) throw DomainError("ratio grid must be finite and positive");
    for (double d : delta_a_grid)
        if (!std::isfinite(d)) throw DomainError("detuning grid must be finite");

    const std::size_t nd = delta_a_grid.size();
    std::vector<SweepCell> cells(ratio_grid.size() * nd);
    Budget inner = budget;
    inner.jobs = 1;

    auto run_cell = [&](std::size_t i, const std::vector<FamilyParams>& warm) {
        SweepCell& c = cells[i];
        c.ratio = ratio_grid[i / nd];
        c.delta_a = delta_a_grid[i % nd];
        c.warm_started = !warm.empty();
        try {
            c.record = optimize(from_ratios(c.ratio, c.delta_a), family, mode, inner, settings, warm);
            if (c.warm_started) c.record->diagnostics += c.record->diagnostics.empty() ? "warm start" : "; warm start";
        } catch (const std::exception& e) {
            c.error = e.what();
        }
    };

    if (!warm_start) {
        parallel_for(int(cells.size()), budget.jobs, [&](int i) { run_cell(std::size_t(i), {}); });
    } else {
        // Each ratio row runs sequentially so a cell can start from its neighbour's optimum.
        parallel_for(int(ratio_grid.size()), budget.jobs, [&](int row) {
            std::vector<FamilyParams> warm;
            for (std::size_t j = 0; j < nd; ++j) {
                const std::size_t i = std::size_t(row) * nd + j;
                run_cell(i, warm);
                warm.clear();
                if (cells[i].record) warm.push_back(cells[i].record->best_params);
            }
        });
    }
    return cells;
}

} // namespace tpa
