#include "tpa/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "tpa/coherent.hpp"
#include "tpa/errors.hpp"
#include "tpa/excitation.hpp"
#include "tpa/optimizer.hpp"
#include "tpa/serialize.hpp"
#include "tpa/spectral.hpp"

namespace tpa {

namespace {

const char* const kUnits = "gamma_f = 1; times in 1/gamma_f; angular frequencies in gamma_f";

struct Common {
    std::string config_file;
    std::vector<std::string> overrides;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int jobs = 1;
    double rel_tol = 1e-7;
    std::size_t emit_amplitude = 0;
};

struct Context {
    std::string command;
    json config = json::object();
    Common common;
    std::filesystem::path out;

    std::string file(const std::string& name) const { return (out / name).string(); }

    const json& section(const std::string& key) const {
        static const json empty = json::object();
        const auto it = config.find(key);
        return it == config.end() ? empty : *it;
    }

    QuadratureConfig quad() const {
        QuadratureConfig q;
        q.rel_tol = common.rel_tol;
        try {
            q.validate();
        } catch (const DomainError& e) {
            throw ConfigError("rel_tol", e.what());
        }
        return q;
    }

    AtomParams atom() const {
        if (!config.contains("atom")) throw ConfigError("atom", "required table is missing");
        return atom_from_json(config["atom"], "atom");
    }

    void metadata(json extra = json::object()) const {
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&now, &tm);
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
        json j = {{"command", command},
                  {"config", config},
                  {"units", kUnits},
                  {"seed", common.seed},
                  {"rel_tol", common.rel_tol},
                  {"timestamp", stamp}};
        for (auto& [k, v] : extra.items()) j[k] = v;
        write_json(file("metadata.json"), j);
    }
};

// Labelled amplitudes: either one [amplitude] table or an [[amplitudes]] array.
std::vector<std::pair<std::string, TwoPhotonAmplitude>> amplitudes(const Context& ctx, const AtomParams& atom) {
    std::vector<std::pair<std::string, TwoPhotonAmplitude>> out;
    if (ctx.config.contains("amplitudes")) {
        const auto& arr = ctx.config["amplitudes"];
        if (!arr.is_array() || arr.empty()) throw ConfigError("amplitudes", "expected a non-empty array of tables");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string path = fmt::format("amplitudes[{}]", i);
            std::string label = arr[i].is_object() ? arr[i].value("label", "") : "";
            if (label.empty()) label = fmt::format("a{}", i);
            out.emplace_back(label, amplitude_from_json(arr[i], atom, path));
        }
        return out;
    }
    if (!ctx.config.contains("amplitude")) throw ConfigError("amplitude", "required table is missing");
    out.emplace_back("pf", amplitude_from_json(ctx.config["amplitude"], atom, "amplitude"));
    return out;
}

void cmd_pf(const Context& ctx) {
    const AtomParams atom = ctx.atom();
    const auto amps = amplitudes(ctx, atom);
    const auto t = axis_from_json(ctx.section("time_axis"), "time_axis", {-10.0, 10.0, 401}).points();
    const auto q = ctx.quad();

    std::vector<std::string> header{"t"};
    std::vector<std::vector<double>> curves;
    json peaks = json::array();
    for (const auto& [label, amp] : amps) {
        const auto res = compute_excitation(atom, amp, t, q);
        curves.push_back(res.pf);
        header.push_back(amps.size() == 1 ? "pf" : "pf_" + label);
        peaks.push_back({{"label", label},
                         {"t_peak", res.t_peak},
                         {"pf_peak", res.pf_peak},
                         {"bound_at_peak", res.bound_at_peak},
                         {"degenerate_peak", res.degenerate_peak}});
    }
    CsvWriter pf(ctx.file("pf_curve.csv"), {"upper-level excitation probability", "t in 1/gamma_f, pf dimensionless"},
                 header);
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::vector<double> row{t[i]};
        for (const auto& c : curves) row.push_back(c[i]);
        pf.row(row);
    }
    pf.close();

    header[0] = "t";
    for (std::size_t k = 1; k < header.size(); ++k)
        header[k] = amps.size() == 1 ? "p" : "p_" + amps[k - 1].first;
    CsvWriter mt(ctx.file("marginal_time.csv"), {"single-photon time marginal", "t in 1/gamma_f, p in gamma_f"},
                 header);
    for (double ti : t) {
        std::vector<double> row{ti};
        for (const auto& [label, amp] : amps) row.push_back(marginal_time(amp, ti));
        mt.row(row);
    }
    mt.close();

    if (ctx.common.emit_amplitude > 0) write_custom_csv(ctx.file("amplitude.csv"), amps.front().second, ctx.common.emit_amplitude);
    ctx.metadata({{"peaks", peaks}});
}

void cmd_marginals(const Context& ctx) {
    const AtomParams atom = ctx.atom();
    const auto amps = amplitudes(ctx, atom);
    const auto& amp = amps.front().second;
    const AxisSpec ta = axis_from_json(ctx.section("time_axis"), "time_axis", {-10.0, 10.0, 201});
    const AxisSpec fa = axis_from_json(ctx.section("frequency_axis"), "frequency_axis", {-10.0, 10.0, 201});
    const AxisSpec sa = axis_from_json(ctx.section("sum_axis"), "sum_axis", {-10.0, 10.0, 201});
    const std::string f_note = amp.family() == Family::Optimal ? "omega offset from w_eg in gamma_f"
                                                               : "omega offset from w_fg/2 in gamma_f";

    write_density_csv(ctx.file("joint_time.csv"), joint_density(amp, Domain::Time, ta, ta),
                      {"joint temporal density |phi(t1,t2)|^2", "t1, t2 in 1/gamma_f"}, {"t1", "t2", "density"});
    write_density_csv(ctx.file("joint_frequency.csv"), joint_density(amp, Domain::Frequency, fa, fa),
                      {"joint spectral density |phi~(w1,w2)|^2", "w1, w2 offsets from w_fg/2 in gamma_f"},
                      {"omega1", "omega2", "density"});
    write_density_csv(ctx.file("marginal_time.csv"), marginal_grid(amp, Domain::Time, ta),
                      {"single-photon time marginal", "t in 1/gamma_f"}, {"t", "p"});
    write_density_csv(ctx.file("marginal_frequency.csv"), marginal_grid(amp, Domain::Frequency, fa),
                      {"single-photon spectral marginal", f_note}, {"omega", "p"});
    write_density_csv(ctx.file("frequency_sum.csv"), frequency_sum_grid(amp, sa),
                      {"density of the frequency sum", "sum offset from w_fg in gamma_f"}, {"omega_sum", "density"});
    ctx.metadata();
}

void cmd_maxima(const Context& ctx) {
    const json& m = ctx.section("maxima");
    const auto ratios = grid_from_json(m.contains("ratios") ? m["ratios"] : json::array({1.0}), "maxima.ratios");
    const auto deltas = grid_from_json(m.contains("delta_a") ? m["delta_a"] : json::array({0.0}), "maxima.delta_a");
    json all = json::array();
    CsvWriter w(ctx.file("maxima.csv"),
                {"local maxima of the optimal-state spectral marginal", "offsets from w_eg in gamma_f"},
                {"ratio", "delta_a", "count", "maximum_1", "maximum_2", "classification"});
    for (double r : ratios)
        for (double d : deltas) {
            AtomParams atom;
            try {
                atom = from_ratios(r, d);
            } catch (const DomainError& e) {
                throw ConfigError("maxima.ratios", e.what());
            }
            const auto res = optimal_spectral_maxima(atom);
            all.push_back(to_json(res));
            const auto pick = [&](std::size_t i) {
                return i < res.maxima.size() ? format_number(res.maxima[i]) : std::string("nan");
            };
            w.raw_row({format_number(r), format_number(d), std::to_string(res.maxima.size()), pick(0), pick(1),
                       to_string(res.classification)});
        }
    w.close();
    write_json(ctx.file("maxima.json"), all);
    ctx.metadata();
}

struct OptimizerSetup {
    PulseFamily family;
    ConstraintMode mode;
    Budget budget;
    OptimizerSettings settings;
    bool warm_start;
};

OptimizerSetup optimizer_setup(const Context& ctx) {
    const json& o = ctx.section("optimizer");
    OptimizerSetup s;
    try {
        s.family = pulse_family_from_string(o.value("family", "gaussian_product"));
    } catch (const DomainError& e) {
        throw ConfigError("optimizer.family", e.what());
    }
    try {
        s.mode.tag = constraint_tag_from_string(o.value("mode", "degenerate_resonant"));
    } catch (const DomainError& e) {
        throw ConfigError("optimizer.mode", e.what());
    }
    s.mode.mu_free = o.value("mu_free", true);
    s.budget.max_evals = o.value("max_evals", 2000);
    s.budget.starts = o.value("starts", 8);
    if (s.budget.max_evals < 200) throw ConfigError("optimizer.max_evals", "budget must be at least 200");
    if (s.budget.starts < 1) throw ConfigError("optimizer.starts", "need at least one start");
    s.budget.seed = ctx.common.seed;
    s.budget.jobs = ctx.common.jobs;
    s.settings.quad = ctx.quad();
    s.settings.coherent_n_bar = o.value("n_bar", 2.0);
    s.warm_start = o.value("warm_start", false);
    return s;
}

void cmd_optimize(const Context& ctx) {
    const AtomParams atom = ctx.atom();
    const auto s = optimizer_setup(ctx);
    const auto rec = optimize(atom, s.family, s.mode, s.budget, s.settings);
    write_json(ctx.file("optimize.json"), to_json(rec));
    ctx.metadata();
    if (!rec.converged) std::cerr << "warning: " << rec.diagnostics << '\n';
}

std::vector<std::string> param_columns(PulseFamily f) {
    switch (f) {
    case PulseFamily::GaussianProduct:
        return {"omega_a_width", "omega_b_width", "mu", "delta_f", "carrier_sum_detuning"};
    case PulseFamily::CorrelatedGaussian:
        return {"omega_plus", "omega_minus", "mu", "delta_f", "carrier_sum_detuning"};
    case PulseFamily::Coherent: return {"width", "detuning"};
    }
    return {};
}

std::vector<double> param_values(const FamilyParams& p) {
    if (const auto* g = std::get_if<GaussianProductParams>(&p))
        return {g->omega_a_width, g->omega_b_width, g->mu, g->delta_f, g->carrier_sum_detuning};
    if (const auto* c = std::get_if<CorrelatedGaussianParams>(&p))
        return {c->omega_plus, c->omega_minus, c->mu, c->delta_f, c->carrier_sum_detuning};
    const auto& c = std::get<CoherentPulseParams>(p);
    return {c.width, c.detuning};
}

void cmd_sweep(const Context& ctx) {
    const auto s = optimizer_setup(ctx);
    const json& g = ctx.section("sweep");
    const json ratio_default = {{"lo", 1e-2}, {"hi", 1e2}, {"n", 13}, {"log", true}};
    const json delta_default = {{"lo", 0.0}, {"hi", 20.0}, {"n", 11}};
    const auto ratios = grid_from_json(g.contains("ratios") ? g["ratios"] : ratio_default, "sweep.ratios");
    const auto deltas = grid_from_json(g.contains("delta_a") ? g["delta_a"] : delta_default, "sweep.delta_a");
    const auto cells = sweep(s.family, s.mode, ratios, deltas, s.budget, s.settings, s.warm_start);

    std::vector<std::string> header{"ratio", "delta_a", "pf_max", "t_peak"};
    const auto pcols = param_columns(s.family);
    header.insert(header.end(), pcols.begin(), pcols.end());
    header.insert(header.end(), {"converged", "evals", "warm_started", "error"});
    CsvWriter w(ctx.file("sweep.csv"),
                {fmt::format("optimized peak excitation, family {}, mode {}{}", to_string(s.family),
                             to_string(s.mode.tag), s.mode.mu_free ? "" : ", fixed delay"),
                 "ratio = gamma_e/gamma_f; delta_a, widths and detunings in gamma_f; times in 1/gamma_f"},
                header);
    json all = json::array();
    for (const auto& c : cells) {
        std::vector<std::string> row{format_number(c.ratio), format_number(c.delta_a)};
        if (c.record) {
            row.push_back(format_number(c.record->pf_max));
            row.push_back(format_number(c.record->t_peak));
            for (double v : param_values(c.record->best_params)) row.push_back(format_number(v));
            row.push_back(c.record->converged ? "1" : "0");
            row.push_back(std::to_string(c.record->objective_evals));
            all.push_back(to_json(*c.record));
        } else {
            row.insert(row.end(), 2 + pcols.size(), "nan");
            row.push_back("0");
            row.push_back("0");
            all.push_back({{"ratio", c.ratio}, {"delta_a", c.delta_a}, {"error", c.error}});
        }
        row.push_back(c.warm_started ? "1" : "0");
        std::string err = c.error;
        std::replace(err.begin(), err.end(), ',', ';');
        row.push_back(err);
        w.raw_row(row);
    }
    w.close();
    write_json(ctx.file("sweep.json"), all);
    ctx.metadata();
}

void cmd_coherent(const Context& ctx) {
    const AtomParams atom = ctx.atom();
    if (!ctx.config.contains("coherent")) throw ConfigError("coherent", "required table is missing");
    CoherentPulseParams pulse = coherent_from_json(ctx.config["coherent"], "coherent");
    json extra = json::object();
    if (ctx.config["coherent"].value("optimize", false)) {
        auto s = optimizer_setup(ctx);
        s.settings.coherent_n_bar = pulse.n_bar;
        const auto rec = optimize(atom, PulseFamily::Coherent, s.mode, s.budget, s.settings);
        const auto& best = std::get<CoherentPulseParams>(rec.best_params);
        pulse.width = best.width;
        pulse.detuning = best.detuning;
        extra["optimization"] = to_json(rec);
    }
    const auto [w0, w1] = pulse_window(pulse);
    const AxisSpec fallback{w0, w1 + 10.0 / atom.gamma_f, 801};
    const auto t = axis_from_json(ctx.section("time_axis"), "time_axis", fallback).points();
    const auto traj = integrate(atom, pulse, t);
    write_trajectory_csv(ctx.file("trajectory.csv"), traj,
                         {"density matrix in the frame of the pulse carrier", "t in 1/gamma_f"});
    CsvWriter env(ctx.file("envelope.csv"), {"normalized squared pulse amplitude", "t in 1/gamma_f"},
                  {"t", "alpha_squared"});
    for (double ti : t) {
        const double a = coherent_real_envelope(pulse, ti);
        env.row({ti, a * a / pulse.n_bar});
    }
    env.close();
    const auto peak = rho_ff_peak(atom, pulse);
    extra["rho_ff_peak"] = {{"t_peak", peak.t_peak}, {"value", peak.value}, {"undefined", peak.undefined}};
    extra["pulse"] = to_json(FamilyParams{pulse});
    ctx.metadata(extra);
}

int report(const char* kind, const std::exception& e, int code) {
    std::cerr << kind << ": " << e.what() << '\n';
    return code;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Two-photon excitation of a ladder atom: probabilities, spectra, optimization"};
    app.require_subcommand(1);
    Common common;
    const std::vector<std::pair<std::string, void (*)(const Context&)>> commands = {
        {"pf", cmd_pf},           {"marginals", cmd_marginals}, {"maxima", cmd_maxima},
        {"optimize", cmd_optimize}, {"sweep", cmd_sweep},       {"coherent", cmd_coherent}};
    const std::map<std::string, std::string> help = {
        {"pf", "upper-level probability curve and time marginal"},
        {"marginals", "joint and marginal densities in time and frequency"},
        {"maxima", "spectral maxima of the optimal state over a grid"},
        {"optimize", "optimize one pulse family for one atom"},
        {"sweep", "optimize over a grid of atoms"},
        {"coherent", "density-matrix dynamics under a coherent pulse"}};
    for (const auto& [name, fn] : commands) {
        auto* sub = app.add_subcommand(name, help.at(name));
        sub->add_option("-c,--config", common.config_file, "TOML configuration file");
        sub->add_option("--set", common.overrides, "override a config value, key.path=value");
        sub->add_option("-o,--out", common.out_dir, "output directory");
        sub->add_option("--seed", common.seed, "random seed for optimizer starts");
        sub->add_option("-j,--jobs", common.jobs, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--rel-tol", common.rel_tol, "relative quadrature tolerance");
        if (name == "pf")
            sub->add_option("--emit-amplitude", common.emit_amplitude,
                            "also write the first amplitude as a CSV grid with this many points per axis");
    }

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        Context ctx;
        ctx.common = common;
        for (const auto& [name, fn] : commands) {
            if (!app.got_subcommand(name)) continue;
            ctx.command = name;
            if (!common.config_file.empty()) ctx.config = load_toml_file(common.config_file);
            for (const auto& o : common.overrides) apply_override(ctx.config, o);
            ctx.out = common.out_dir;
            std::error_code ec;
            std::filesystem::create_directories(ctx.out, ec);
            if (ec) throw IoError(fmt::format("cannot create output directory '{}': {}", common.out_dir, ec.message()));
            fn(ctx);
        }
    } catch (const ConfigError& e) {
        return report("config error", e, kExitConfig);
    } catch (const DomainError& e) {
        return report("config error", e, kExitConfig);
    } catch (const SizeError& e) {
        return report("config error", e, kExitConfig);
    } catch (const IoError& e) {
        return report("io error", e, kExitIo);
    } catch (const ConvergenceError& e) {
        return report("numerical failure", e, kExitNumeric);
    } catch (const StiffnessError& e) {
        return report("numerical failure", e, kExitNumeric);
    } catch (const IntegrityError& e) {
        return report("numerical failure", e, kExitNumeric);
    } catch (const json::exception& e) {
        return report("config error", e, kExitConfig);
    }
    return kExitOk;
}

} // namespace tpa
