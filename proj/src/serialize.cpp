#include "tpa/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <toml.hpp>

#include "tpa/errors.hpp"

namespace tpa {

namespace {

json node_to_json(const toml::node& n) {
    if (const auto* t = n.as_table()) {
        json j = json::object();
        for (const auto& [k, v] : *t) j[std::string(k.str())] = node_to_json(v);
        return j;
    }
    if (const auto* a = n.as_array()) {
        json j = json::array();
        for (const auto& v : *a) j.push_back(node_to_json(v));
        return j;
    }
    if (const auto* v = n.as_integer()) return v->get();
    if (const auto* v = n.as_floating_point()) return v->get();
    if (const auto* v = n.as_boolean()) return v->get();
    if (const auto* v = n.as_string()) return v->get();
    throw ConfigError("", "date and time values are not supported");
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

double number(const json& node, const std::string& key, const std::string& path, std::optional<double> fallback) {
    const auto it = node.find(key);
    if (it == node.end()) {
        if (fallback) return *fallback;
        throw ConfigError(join(path, key), "required field is missing");
    }
    if (it->is_string()) {
        const auto s = it->get<std::string>();
        if (s == "inf" || s == "+inf") return INFINITY;
        if (s == "-inf") return -INFINITY;
    }
    if (!it->is_number()) throw ConfigError(join(path, key), "expected a number");
    return it->get<double>();
}

void require_object(const json& node, const std::string& path) {
    if (!node.is_object()) throw ConfigError(path, "expected a table");
}

template <class F>
auto with_path(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const DomainError& e) {
        throw ConfigError(path, e.what());
    }
}

} // namespace

json parse_toml(const std::string& text) {
    try {
        const auto tbl = toml::parse(text);
        return node_to_json(tbl);
    } catch (const toml::parse_error& e) {
        throw ConfigError("", fmt::format("TOML parse error: {}", e.description()));
    }
}

json load_toml_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot open config file '{}'", path));
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_toml(ss.str());
}

void apply_override(json& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError(assignment, "override must look like key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = node_to_json(*toml::parse("v = " + text).get("v"));
    } catch (const toml::parse_error&) {
        value = text;
    }
    json* cur = &config;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError(key, "empty path component");
        if (!cur->is_object()) throw ConfigError(key, "cannot descend into a non-table value");
        if (dot == std::string::npos) {
            (*cur)[part] = value;
            return;
        }
        cur = &(*cur)[part];
        if (cur->is_null()) *cur = json::object();
        start = dot + 1;
    }
}

AtomParams atom_from_json(const json& node, const std::string& path) {
    require_object(node, path);
    AtomParams a;
    const bool has_ratio = node.contains("ratio");
    if (has_ratio && node.contains("gamma_e"))
        throw ConfigError(join(path, "ratio"), "give either ratio or gamma_e, not both");
    a.gamma_f = number(node, "gamma_f", path, 1.0);
    a.gamma_e = has_ratio ? number(node, "ratio", path, std::nullopt) * a.gamma_f
                          : number(node, "gamma_e", path, std::nullopt);
    a.delta_a = number(node, "delta_a", path, 0.0);
    a.frame_offset = number(node, "frame_offset", path, 0.0);
    with_path(path, [&] {
        a.validate();
        return 0;
    });
    return a;
}

OptimalStateParams optimal_from_json(const json& node, const AtomParams& atom, const std::string& path) {
    OptimalStateParams p;
    p.atom = atom;
    p.t_star = number(node, "t_star", path, 0.0);
    if (node.contains("t0")) {
        const double t0 = number(node, "t0", path, std::nullopt);
        if (std::isfinite(t0)) p.t0 = t0;
        else if (t0 > 0) throw ConfigError(join(path, "t0"), "window start must be finite or -inf");
    }
    with_path(path, [&] {
        validate(p);
        return 0;
    });
    return p;
}

GaussianProductParams gaussian_product_from_json(const json& node, const std::string& path) {
    GaussianProductParams p;
    p.omega_a_width = number(node, "omega_a_width", path, std::nullopt);
    p.omega_b_width = number(node, "omega_b_width", path, std::nullopt);
    p.mu = number(node, "mu", path, 0.0);
    p.delta_f = number(node, "delta_f", path, 0.0);
    p.carrier_sum_detuning = number(node, "carrier_sum_detuning", path, 0.0);
    with_path(path, [&] {
        validate(p);
        return 0;
    });
    return p;
}

CorrelatedGaussianParams correlated_from_json(const json& node, const std::string& path) {
    CorrelatedGaussianParams p;
    p.omega_plus = number(node, "omega_plus", path, std::nullopt);
    p.omega_minus = number(node, "omega_minus", path, std::nullopt);
    p.mu = number(node, "mu", path, 0.0);
    p.delta_f = number(node, "delta_f", path, 0.0);
    p.carrier_sum_detuning = number(node, "carrier_sum_detuning", path, 0.0);
    with_path(path, [&] {
        validate(p);
        return 0;
    });
    return p;
}

CoherentPulseParams coherent_from_json(const json& node, const std::string& path) {
    require_object(node, path);
    CoherentPulseParams p;
    p.width = number(node, "width", path, std::nullopt);
    p.n_bar = number(node, "n_bar", path, 2.0);
    p.detuning = number(node, "detuning", path, 0.0);
    p.t_center = number(node, "t_center", path, 0.0);
    with_path(path, [&] {
        validate(p);
        return 0;
    });
    return p;
}

TwoPhotonAmplitude amplitude_from_json(const json& node, const AtomParams& atom, const std::string& path) {
    require_object(node, path);
    const auto it = node.find("family");
    if (it == node.end() || !it->is_string()) throw ConfigError(join(path, "family"), "expected a family name");
    Family fam;
    try {
        fam = family_from_string(it->get<std::string>());
    } catch (const DomainError& e) {
        throw ConfigError(join(path, "family"), e.what());
    }
    auto amp = with_path(path, [&] {
        switch (fam) {
        case Family::Optimal: return TwoPhotonAmplitude::optimal(optimal_from_json(node, atom, path));
        case Family::GaussianProduct:
            return TwoPhotonAmplitude::gaussian_product(gaussian_product_from_json(node, path));
        case Family::CorrelatedGaussian:
            return TwoPhotonAmplitude::correlated_gaussian(correlated_from_json(node, path));
        case Family::Custom: {
            const auto f = node.find("file");
            if (f == node.end() || !f->is_string()) throw ConfigError(join(path, "file"), "expected a CSV path");
            return TwoPhotonAmplitude::custom(load_custom_csv(f->get<std::string>()));
        }
        }
        throw ConfigError(join(path, "family"), "unsupported family");
    });
    if (node.contains("time_shift")) amp = amp.time_shifted(number(node, "time_shift", path, 0.0));
    if (node.contains("phase")) amp = amp.with_phase(number(node, "phase", path, 0.0));
    return amp;
}

AxisSpec axis_from_json(const json& node, const std::string& path, const AxisSpec& fallback) {
    if (node.is_null()) return fallback;
    require_object(node, path);
    AxisSpec a;
    a.lo = number(node, "lo", path, fallback.lo);
    a.hi = number(node, "hi", path, fallback.hi);
    const double n = number(node, "n", path, double(fallback.n));
    if (!(a.hi > a.lo) || !std::isfinite(a.lo) || !std::isfinite(a.hi))
        throw ConfigError(path, "axis needs finite lo < hi");
    if (n < 2 || n != std::floor(n)) throw ConfigError(join(path, "n"), "axis needs an integer count of at least 2");
    a.n = std::size_t(n);
    return a;
}

std::vector<double> grid_from_json(const json& node, const std::string& path) {
    if (node.is_array()) {
        std::vector<double> v;
        for (std::size_t i = 0; i < node.size(); ++i) {
            if (!node[i].is_number()) throw ConfigError(fmt::format("{}[{}]", path, i), "expected a number");
            v.push_back(node[i].get<double>());
        }
        if (v.empty()) throw ConfigError(path, "grid is empty");
        return v;
    }
    require_object(node, path);
    const double lo = number(node, "lo", path, std::nullopt), hi = number(node, "hi", path, std::nullopt);
    const double n = number(node, "n", path, std::nullopt);
    const bool log = node.value("log", false);
    if (n < 1 || n != std::floor(n)) throw ConfigError(join(path, "n"), "expected a positive integer");
    if (log && !(lo > 0 && hi > 0)) throw ConfigError(path, "log grid needs positive bounds");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double f = v.size() == 1 ? 0.0 : double(i) / double(v.size() - 1);
        v[i] = log ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))) : lo + f * (hi - lo);
    }
    return v;
}

json to_json(const AtomParams& a) {
    return {{"gamma_e", a.gamma_e}, {"gamma_f", a.gamma_f}, {"delta_a", a.delta_a}, {"frame_offset", a.frame_offset}};
}

json to_json(const FamilyParams& params) {
    if (const auto* p = std::get_if<GaussianProductParams>(&params))
        return {{"family", "gaussian_product"},
                {"omega_a_width", p->omega_a_width},
                {"omega_b_width", p->omega_b_width},
                {"mu", p->mu},
                {"delta_f", p->delta_f},
                {"carrier_sum_detuning", p->carrier_sum_detuning}};
    if (const auto* p = std::get_if<CorrelatedGaussianParams>(&params))
        return {{"family", "correlated_gaussian"},
                {"omega_plus", p->omega_plus},
                {"omega_minus", p->omega_minus},
                {"mu", p->mu},
                {"delta_f", p->delta_f},
                {"carrier_sum_detuning", p->carrier_sum_detuning}};
    const auto& p = std::get<CoherentPulseParams>(params);
    return {{"family", "coherent"},
            {"width", p.width},
            {"n_bar", p.n_bar},
            {"detuning", p.detuning},
            {"t_center", p.t_center}};
}

json to_json(const ConstraintMode& m) { return {{"tag", to_string(m.tag)}, {"mu_free", m.mu_free}}; }

json to_json(const OptimizationRecord& r) {
    return {{"atom", to_json(r.atom)},
            {"family", to_string(r.family)},
            {"mode", to_json(r.mode)},
            {"best_params", to_json(r.best_params)},
            {"pf_max", r.pf_max},
            {"t_peak", r.t_peak},
            {"starts", r.starts},
            {"converged", r.converged},
            {"objective_evals", r.objective_evals},
            {"diagnostics", r.diagnostics}};
}

json to_json(const SpectralMaxima& m) {
    json j = {{"atom", to_json(m.atom)},
              {"maxima_offset_from_eg", m.maxima},
              {"classification", to_string(m.classification)},
              {"polynomial_roots_offset_from_eg", m.polynomial_roots}};
    if (!m.warning.empty()) j["warning"] = m.warning;
    return j;
}

CustomGrid load_custom_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot open amplitude file '{}'", path));
    std::map<std::pair<double, double>, cplx> cells;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double t1, t2, re, im;
        if (!(ls >> t1 >> t2 >> re >> im)) {
            if (cells.empty()) continue; // header row
            throw ConfigError(fmt::format("{}:{}", path, lineno), "expected four numeric columns t1,t2,re,im");
        }
        cells[{t1, t2}] = cplx(re, im);
    }
    CustomGrid g;
    for (const auto& [k, v] : cells) {
        if (g.t1.empty() || g.t1.back() != k.first) g.t1.push_back(k.first);
    }
    for (const auto& [k, v] : cells)
        if (k.first == g.t1.front()) g.t2.push_back(k.second);
    if (cells.size() != g.t1.size() * g.t2.size())
        throw ConfigError(path, "amplitude samples do not form a rectangular grid");
    g.values.reserve(cells.size());
    for (double a : g.t1)
        for (double b : g.t2) {
            const auto it = cells.find({a, b});
            if (it == cells.end()) throw ConfigError(path, "amplitude samples do not form a rectangular grid");
            g.values.push_back(it->second);
        }
    return g;
}

void write_custom_csv(const std::string& path, const TwoPhotonAmplitude& amp, std::size_t n) {
    std::vector<double> t1, t2;
    std::vector<cplx> vals;
    if (const auto* g = amp.custom_grid(); g && amp.time_offset() == 0.0 && amp.carrier_shift() == 0.0 &&
                                           amp.phase() == 0.0) {
        t1 = g->t1;
        t2 = g->t2;
        vals = g->values;
    } else {
        if (n < 2) throw DomainError("amplitude export needs at least two samples per axis");
        const auto [lo, hi] = amp.support();
        for (std::size_t i = 0; i < n; ++i) t1.push_back(lo + (hi - lo) * double(i) / double(n - 1));
        t2 = t1;
        for (double a : t1)
            for (double b : t2) vals.push_back(amp(a, b));
    }
    CsvWriter w(path, {"two-photon amplitude samples", "times in units of 1/gamma_f", "amplitude in units of gamma_f"},
                {"t1", "t2", "re", "im"});
    for (std::size_t i = 0; i < t1.size(); ++i)
        for (std::size_t j = 0; j < t2.size(); ++j) {
            const cplx v = vals[i * t2.size() + j];
            w.row({t1[i], t2[j], v.real(), v.imag()});
        }
    w.close();
}

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& comments,
                     const std::vector<std::string>& header)
    : path_(path), out_(path), columns_(header.size()) {
    if (!out_) throw IoError(fmt::format("cannot write '{}'", path));
    for (const auto& c : comments) out_ << "# " << c << '\n';
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_number(v));
    raw_row(cells);
}

void CsvWriter::raw_row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw DomainError("CSV row width does not match the header");
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
}

void CsvWriter::close() {
    out_.close();
    if (!out_) throw IoError(fmt::format("failed writing '{}'", path_));
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError(fmt::format("cannot write '{}'", path));
    out << j.dump(2) << '\n';
    if (!out) throw IoError(fmt::format("failed writing '{}'", path));
}

void write_density_csv(const std::string& path, const DensityGrid& grid, const std::vector<std::string>& comments,
                       const std::vector<std::string>& header) {
    CsvWriter w(path, comments, header);
    if (grid.axis2.empty()) {
        for (std::size_t i = 0; i < grid.axis1.size(); ++i) w.row({grid.axis1[i], grid.values[i]});
    } else {
        for (std::size_t i = 0; i < grid.axis1.size(); ++i)
            for (std::size_t j = 0; j < grid.axis2.size(); ++j) w.row({grid.axis1[i], grid.axis2[j], grid.at(i, j)});
    }
    w.close();
}

void write_trajectory_csv(const std::string& path, const DensityMatrixTrajectory& traj,
                          const std::vector<std::string>& comments) {
    CsvWriter w(path, comments,
                {"t", "rho_gg", "rho_ee", "rho_ff", "re_rho_ge", "im_rho_ge", "re_rho_gf", "im_rho_gf", "re_rho_ef",
                 "im_rho_ef"});
    for (std::size_t i = 0; i < traj.t_grid.size(); ++i) {
        const auto& r = traj.rho[i];
        w.row({traj.t_grid[i], r.gg, r.ee, r.ff, r.ge.real(), r.ge.imag(), r.gf.real(), r.gf.imag(), r.ef.real(),
               r.ef.imag()});
    }
    w.close();
}

} // namespace tpa
