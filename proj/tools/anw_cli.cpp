// anw: command-line front end for waveguide-array simulations.
//
//   anw eigen --n 5
//   anw vlf --n 3 --z-start 0 --z-stop 60 --z-steps 601 --format csv
//   anw sweep --config sweep.cfg --out result.csv
//   anw graph --l 6 --z 10 --variant b

#include "anw/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string config_path;
  std::string out_path;
  std::string format;
  std::string variant;
  std::string basis = "individual";
  std::optional<bool> optimized;
  std::optional<double> z_start, z_stop, z;
  std::optional<int> z_steps;
  std::optional<int> n, l;
  std::optional<double> c0, eta;
  std::vector<double> profile;
  bool zero_supermode = false;
  unsigned workers = 0;
};

anw::ConfigFile load_config(const Options& o) {
  return o.config_path.empty() ? anw::ConfigFile{} : anw::ConfigFile::load(o.config_path);
}

anw::ArrayConfig<double> array_config(const Options& o, const anw::ConfigFile& cfg) {
  auto c = anw::array_config_from(cfg);
  if (o.n) {
    c.n = *o.n;
    c.profile = Eigen::VectorXd::Ones(std::max(c.n - 1, 0));
  }
  if (o.c0) c.c0 = *o.c0;
  if (o.eta) c.eta = *o.eta;
  if (!o.profile.empty())
    c.profile = Eigen::Map<const Eigen::VectorXd>(o.profile.data(), static_cast<Eigen::Index>(o.profile.size()));
  c.validate();
  return c;
}

// --z wins over a --z-start/--z-stop/--z-steps grid, which wins over the file.
std::vector<double> z_values(const Options& o, const anw::ConfigFile& cfg, double fallback) {
  if (o.z) return {*o.z};
  const double start = o.z_start.value_or(cfg.get_double("sweep.z.start", fallback));
  const double stop = o.z_stop.value_or(cfg.get_double("sweep.z.stop", start));
  const int steps = o.z_steps.value_or(cfg.get_int("sweep.z.steps", 1));
  return anw::z_grid(start, stop, steps);
}

anw::Format format_of(const Options& o, const anw::ConfigFile& cfg, anw::Format fallback) {
  if (!o.format.empty()) return anw::parse_format(o.format);
  if (const auto f = cfg.get("output.format")) return anw::parse_format(*f);
  return fallback;
}

anw::Variant variant_of(const Options& o, const anw::ConfigFile& cfg) {
  if (!o.variant.empty()) return anw::parse_variant(o.variant);
  const auto v = cfg.get_strings("sweep.variant");
  return v.empty() ? anw::Variant::a : anw::parse_variant(v.front());
}

anw::GraphRequest graph_request(const Options& o, const anw::ConfigFile& cfg) {
  anw::GraphRequest req;
  req.variant = variant_of(o, cfg);
  req.z = z_values(o, cfg, 10.0);
  // A finite array is used when N is given; otherwise the large-coupling state.
  if (o.n || cfg.has("array.N")) {
    req.config = array_config(o, cfg);
  } else {
    req.l = o.l.value_or(cfg.get_int("graph.l", 6));
    req.eta = o.eta.value_or(cfg.get_double("array.eta", 0.025));
  }
  return req;
}

void emit(const Options& o, const anw::ConfigFile& cfg, const std::string& text) {
  std::string path = o.out_path;
  if (path.empty()) path = cfg.get("output.path").value_or("");
  if (path.empty())
    std::cout << text;
  else
    anw::write_text_file(path, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-state propagation and entanglement analysis for nonlinear waveguide arrays"};
  app.require_subcommand(1);
  Options o;

  app.add_option("--config", o.config_path, "key=value configuration file");
  app.add_option("--out", o.out_path, "output file (default: stdout)");
  app.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--variant", o.variant, "LO profile variant")->check(CLI::IsMember({"a", "b"}));
  app.add_option("--optimized", o.optimized, "optimize auxiliary gains (true|false)");
  app.add_option("--z-start", o.z_start, "first distance [mm]");
  app.add_option("--z-stop", o.z_stop, "last distance [mm]");
  app.add_option("--z-steps", o.z_steps, "number of grid points");
  app.add_option("--z", o.z, "single distance [mm]");
  app.add_option("--n", o.n, "number of waveguides");
  app.add_option("--c0", o.c0, "coupling strength [1/mm]");
  app.add_option("--eta", o.eta, "effective nonlinearity [1/mm]");
  app.add_option("--f", o.profile, "coupling profile f_1..f_{N-1}")->delimiter(',');
  app.add_option("--l", o.l, "number of odd waveguides for the large-coupling state");
  app.add_option("--basis", o.basis, "covariance basis for propagate")
      ->check(CLI::IsMember({"individual", "supermode"}));
  app.add_flag("--zero-supermode", o.zero_supermode, "fail unless the array has a zero supermode");
  app.add_option("--workers", o.workers, "sweep worker threads (0: hardware threads)");

  auto* eigen = app.add_subcommand("eigen", "supermode basis and spectrum");
  auto* propagate = app.add_subcommand("propagate", "covariance matrix at distance z");
  auto* vlf = app.add_subcommand("vlf", "VLF inequality curves over a z grid");
  auto* sweep = app.add_subcommand("sweep", "parameter sweep from a configuration file");
  auto* graph = app.add_subcommand("graph", "Duan entanglement graph and adjacency matrices");
  auto* nullifiers = app.add_subcommand("nullifiers", "EPR variances for every label pair");
  for (auto* sub : {eigen, propagate, vlf, sweep, graph, nullifiers}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << anw::error_json("validation", e.what()) << "\n";
    return kExitValidation;
  }

  try {
    const auto cfg = load_config(o);
    std::string text;
    if (eigen->parsed()) {
      text = anw::cmd_eigen(array_config(o, cfg), o.zero_supermode);
    } else if (propagate->parsed()) {
      const auto z = z_values(o, cfg, 0.0);
      if (z.size() != 1) throw anw::ValidationError("propagate takes a single distance");
      text = anw::cmd_propagate(array_config(o, cfg), z.front(),
                                o.basis == "supermode" ? anw::Basis::supermode : anw::Basis::individual,
                                format_of(o, cfg, anw::Format::json));
    } else if (vlf->parsed()) {
      text = anw::cmd_vlf(array_config(o, cfg), z_values(o, cfg, 0.0), variant_of(o, cfg),
                          o.optimized.value_or(cfg.get_bool("sweep.optimized", true)),
                          format_of(o, cfg, anw::Format::csv));
    } else if (sweep->parsed()) {
      auto spec = anw::sweep_spec_from(cfg);
      if (!o.format.empty()) spec.format = anw::parse_format(o.format);
      if (o.optimized) spec.optimized = *o.optimized;
      if (o.z || o.z_start || o.z_stop || o.z_steps) spec.z = z_values(o, cfg, 0.0);
      if (o.workers) spec.workers = o.workers;
      if (!o.out_path.empty()) spec.output_path = o.out_path;
      text = anw::cmd_sweep(spec);
      if (!spec.output_path.empty()) {
        anw::write_text_file(spec.output_path, text);
        return 0;
      }
    } else if (graph->parsed()) {
      text = anw::cmd_graph(graph_request(o, cfg), format_of(o, cfg, anw::Format::json));
    } else if (nullifiers->parsed()) {
      text = anw::cmd_nullifiers(graph_request(o, cfg), format_of(o, cfg, anw::Format::json));
    }
    emit(o, cfg, text);
  } catch (const anw::ValidationError& e) {
    std::cerr << anw::error_json("validation", e.what()) << "\n";
    return kExitValidation;
  } catch (const anw::NumericalError& e) {
    std::cerr << anw::error_json("numerical", e.what()) << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << anw::error_json("numerical", e.what()) << "\n";
    return kExitNumerical;
  }
  return 0;
}
