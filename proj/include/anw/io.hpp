#pragma once

// JSON serialization, key=value configuration files and CSV helpers.

#include "anw/entanglement.hpp"
#include "anw/gaussian.hpp"
#include "anw/graphcalc.hpp"
#include "anw/lattice.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace anw {

using json = nlohmann::json;

/// Unit conventions written into every output file.
json units_json();
inline constexpr std::string_view kCsvUnitsLine =
    "# units: lengths in mm, rates in 1/mm, phases in rad; quadratures interleaved (x1,y1,x2,y2,...)";

json to_json(const ArrayConfig<double>& config);
ArrayConfig<double> array_config_from_json(const json& j);

json to_json(const SupermodeBasis<double>& basis);
SupermodeBasis<double> supermode_basis_from_json(const json& j);

/// {"N", "basis", "ordering": "interleaved", "entries": row-major 2N×2N}.
template <Basis B>
json to_json(const CovarianceMatrix<double, B>& v);
template <Basis B>
CovarianceMatrix<double, B> covariance_from_json(const json& j);

json to_json(const PhysicalityReport& rep);

json to_json(const EntanglementGraph& g);
EntanglementGraph entanglement_graph_from_json(const json& j);

/// VLF report; `graph` is the Duan graph at the same distance when given.
json to_json(const VlfReport<double>& rep, const EntanglementGraph* graph = nullptr);
VlfReport<double> vlf_report_from_json(const json& j);

json to_json(const AdjacencyPair<double>& pair);
AdjacencyPair<double> adjacency_pair_from_json(const json& j);

json to_json(const ClusterVerdict& verdict);
json to_json(const PhaseSearchResult& search);

/// Flat key=value file. Blank lines and lines starting with '#' are ignored;
/// keys carry a section prefix such as `array.N` or `sweep.z.start`.
class ConfigFile {
 public:
  static ConfigFile parse(std::string_view text);
  static ConfigFile load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;  // comma separated
  std::vector<std::string> get_strings(const std::string& key) const;
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

 private:
  std::map<std::string, std::string> values_;
};

/// Array parameters from `array.N`, `array.C0`, `array.eta`, `array.f`.
/// Defaults: N = 5, C0 = 0.70 mm⁻¹, η = 0.025 mm⁻¹, homogeneous profile.
ArrayConfig<double> array_config_from(const ConfigFile& cfg);

/// Evenly spaced z grid with `steps` points from start to stop inclusive.
std::vector<double> z_grid(double start, double stop, int steps);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

std::string csv_join(const std::vector<std::string>& fields, char sep = ',');

}  // namespace anw
