#pragma once

// Configuration parsing and CSV/JSON output.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tpa/amplitude.hpp"
#include "tpa/atom.hpp"
#include "tpa/coherent.hpp"
#include "tpa/optimizer.hpp"
#include "tpa/spectral.hpp"

namespace tpa {

using json = nlohmann::json;

// TOML documents are converted to JSON trees so overrides and lookups share one path syntax.
json load_toml_file(const std::string& path);
json parse_toml(const std::string& text);

// Applies "a.b.c=value"; the value is read as a TOML value, falling back to a bare string.
void apply_override(json& config, const std::string& assignment);

// Typed readers; errors carry the dotted path of the offending field.
AtomParams atom_from_json(const json& node, const std::string& path);
OptimalStateParams optimal_from_json(const json& node, const AtomParams& atom, const std::string& path);
GaussianProductParams gaussian_product_from_json(const json& node, const std::string& path);
CorrelatedGaussianParams correlated_from_json(const json& node, const std::string& path);
CoherentPulseParams coherent_from_json(const json& node, const std::string& path);
TwoPhotonAmplitude amplitude_from_json(const json& node, const AtomParams& atom, const std::string& path);
AxisSpec axis_from_json(const json& node, const std::string& path, const AxisSpec& fallback);
std::vector<double> grid_from_json(const json& node, const std::string& path);

json to_json(const AtomParams& atom);
json to_json(const FamilyParams& params);
json to_json(const ConstraintMode& mode);
json to_json(const OptimizationRecord& rec);
json to_json(const SpectralMaxima& m);

// Custom amplitudes as CSV rows (t1, t2, re, im) on a rectangular grid.
CustomGrid load_custom_csv(const std::string& path);
void write_custom_csv(const std::string& path, const TwoPhotonAmplitude& amp, std::size_t n);

// CSV with '#' comment lines followed by a header row; numbers at full precision.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& comments,
              const std::vector<std::string>& header);
    void row(const std::vector<double>& values);
    void raw_row(const std::vector<std::string>& cells);
    void close();

private:
    std::string path_;
    std::ofstream out_;
    std::size_t columns_;
};

std::string format_number(double v);

void write_json(const std::string& path, const json& j);
void write_density_csv(const std::string& path, const DensityGrid& grid, const std::vector<std::string>& comments,
                       const std::vector<std::string>& header);
void write_trajectory_csv(const std::string& path, const DensityMatrixTrajectory& traj,
                          const std::vector<std::string>& comments);

} // namespace tpa
