#pragma once

// Subcommand implementations behind the `anw` executable. Each returns the
// complete output text so that callers (and tests) decide where it goes.

#include "anw/io.hpp"

#include <optional>
#include <string>
#include <vector>

namespace anw {

enum class Format { csv, json };

Format parse_format(std::string_view s);

struct SweepSpec {
  enum class Mode { vlf, asymptotic };

  Mode mode = Mode::vlf;
  std::vector<double> c0{0.70};
  std::vector<double> eta{0.025};
  std::vector<int> n{5};
  std::vector<double> z{0.0};
  std::vector<Variant> variants{Variant::a};
  std::vector<int> l;  // asymptotic mode only
  bool optimized = true;
  Format format = Format::csv;
  std::string output_path;
  unsigned workers = 0;  // 0: one per hardware thread

  void validate() const;
  std::size_t points() const;
};

/// Reads `sweep.*` and `output.*` keys. Grids are comma-separated lists; the
/// z grid comes from sweep.z.start / sweep.z.stop / sweep.z.steps.
SweepSpec sweep_spec_from(const ConfigFile& cfg);

/// Input of the graph and nullifier commands: either a finite odd array (its
/// odd waveguides are probed) or the large-coupling state on l labels.
struct GraphRequest {
  std::optional<ArrayConfig<double>> config;
  int l = 6;
  double eta = 0.025;
  std::vector<double> z{10.0};
  Variant variant = Variant::a;

  int labels() const;
  double nonlinearity() const { return config ? config->eta : eta; }
};

std::string cmd_eigen(const ArrayConfig<double>& config, bool zero_supermode_query = false);
std::string cmd_propagate(const ArrayConfig<double>& config, double z, Basis basis, Format format);
std::string cmd_vlf(const ArrayConfig<double>& config, const std::vector<double>& z, Variant variant,
                    bool optimized, Format format);
std::string cmd_sweep(const SweepSpec& spec);
std::string cmd_graph(const GraphRequest& request, Format format);
std::string cmd_nullifiers(const GraphRequest& request, Format format);

/// {"error": {"kind": ..., "message": ...}} on a single line.
std::string error_json(std::string_view kind, std::string_view message);

/// Writes text to `path` byte for byte (no newline translation).
void write_text_file(const std::string& path, const std::string& text);

}  // namespace anw
