#include "anw/commands.hpp"

#include "anw/propagation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

namespace anw {

namespace {

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::string out(kCsvUnitsLine);
  out += "\n" + csv_join(header) + "\n";
  for (const auto& r : rows) out += csv_join(r) + "\n";
  return out;
}

std::vector<std::string> vlf_header(std::size_t inequalities) {
  std::vector<std::string> h{"z"};
  for (std::size_t k = 1; k <= inequalities; ++k) h.push_back("vlf_" + std::to_string(k));
  h.push_back("asymptote");
  return h;
}

std::vector<std::string> vlf_row(const VlfReport<double>& rep) {
  std::vector<std::string> row{format_double(rep.z)};
  for (double v : rep.values) row.push_back(format_double(v));
  row.push_back(format_double(rep.asymptote));
  return row;
}

void check_z_grid(const std::vector<double>& z) {
  if (z.empty()) throw ValidationError("z grid is empty");
  for (double v : z)
    if (!std::isfinite(v) || v < 0) throw ValidationError("z grid values must be finite and >= 0");
}

// Covariance probed by the graph commands at distance z.
IndividualCovariance<double> probed_covariance(const GraphRequest& req, double z) {
  if (!req.config) return large_coupling_covariance<double>(req.l, req.eta, z);
  const int l = zero_supermode_index(req.config->n);
  const auto full = covariance_individual(*req.config, supermode_decomposition(*req.config), z);
  std::vector<int> odd(l);
  for (int j = 0; j < l; ++j) odd[j] = 2 * j;
  return restrict_modes(full, odd);
}

json components_json(const EntanglementGraph& g) {
  json out = json::array();
  for (const auto& comp : connected_components(g)) {
    json labels = json::array();
    for (int v : comp) labels.push_back(EntanglementGraph::label(v));
    out.push_back(std::move(labels));
  }
  return out;
}

std::string edge_list(const EntanglementGraph& g) {
  std::vector<std::string> parts;
  for (const auto& e : g.edges)
    parts.push_back(std::to_string(EntanglementGraph::label(e.i)) + "-" + std::to_string(EntanglementGraph::label(e.j)));
  return csv_join(parts, ';');
}

json request_json(const GraphRequest& req) {
  if (req.config) return {{"config", to_json(*req.config)}};
  return {{"large_coupling", {{"l", req.l}, {"eta", req.eta}}}};
}

struct SweepPoint {
  std::size_t index = 0;
  ArrayConfig<double> config;
  double z = 0;
  Variant variant = Variant::a;
  int l = 0;  // asymptotic mode
};

struct SweepResult {
  std::string status = "ok";
  std::string message;
  std::optional<VlfReport<double>> report;
  double unoptimized = 0;  // asymptotic mode
  double optimized = 0;
};

std::vector<SweepPoint> expand(const SweepSpec& spec) {
  std::vector<SweepPoint> pts;
  std::size_t idx = 0;
  if (spec.mode == SweepSpec::Mode::asymptotic) {
    for (int l : spec.l)
      for (double eta : spec.eta)
        for (double z : spec.z) {
          SweepPoint p;
          p.index = idx++;
          p.l = l;
          p.config.eta = eta;
          p.z = z;
          pts.push_back(std::move(p));
        }
    return pts;
  }
  for (double c0 : spec.c0)
    for (double eta : spec.eta)
      for (int n : spec.n)
        for (double z : spec.z)
          for (Variant v : spec.variants) {
            SweepPoint p;
            p.index = idx++;
            p.config.n = n;
            p.config.c0 = c0;
            p.config.eta = eta;
            p.config.profile = Eigen::VectorXd::Ones(std::max(n - 1, 0));
            p.z = z;
            p.variant = v;
            pts.push_back(std::move(p));
          }
  return pts;
}

SweepResult evaluate(const SweepSpec& spec, const SweepPoint& p) {
  SweepResult r;
  try {
    if (spec.mode == SweepSpec::Mode::asymptotic) {
      r.unoptimized = asymptotic_vlf<double>(p.l, p.config.eta, p.z, false);
      r.optimized = asymptotic_vlf<double>(p.l, p.config.eta, p.z, true);
    } else {
      r.report = vlf_suite(p.config, p.z, p.variant, spec.optimized);
    }
  } catch (const ValidationError& e) {
    r.status = "validation_error";
    r.message = e.what();
  } catch (const NumericalError& e) {
    r.status = "numerical_error";
    r.message = e.what();
  }
  return r;
}

// Bounded pool: workers claim point indices from an atomic counter and write
// into their own slot of the result vector, so output order is grid order.
std::vector<SweepResult> run_pool(const SweepSpec& spec, const std::vector<SweepPoint>& pts) {
  std::vector<SweepResult> results(pts.size());
  unsigned workers = spec.workers ? spec.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, pts.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < pts.size(); i = next++) results[i] = evaluate(spec, pts[i]);
  };
  if (workers <= 1) {
    work();
    return results;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  pool.clear();  // joins
  return results;
}

}  // namespace

Format parse_format(std::string_view s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw ValidationError("format must be csv or json, got '" + std::string(s) + "'");
}

void SweepSpec::validate() const {
  if (eta.empty() || z.empty()) throw ValidationError("sweep: eta and z grids must be non-empty");
  check_z_grid(z);
  for (double e : eta)
    if (!std::isfinite(e) || e < 0) throw ValidationError("sweep: eta values must be >= 0");
  if (mode == Mode::asymptotic) {
    if (l.empty()) throw ValidationError("sweep: asymptotic mode needs a non-empty l grid");
    for (int v : l)
      if (v < 2) throw ValidationError("sweep: l values must be >= 2");
    return;
  }
  if (c0.empty() || n.empty() || variants.empty())
    throw ValidationError("sweep: C0, N and variant grids must be non-empty");
}

std::size_t SweepSpec::points() const {
  if (mode == Mode::asymptotic) return l.size() * eta.size() * z.size();
  return c0.size() * eta.size() * n.size() * z.size() * variants.size();
}

SweepSpec sweep_spec_from(const ConfigFile& cfg) {
  SweepSpec s;
  if (const auto m = cfg.get("sweep.mode")) {
    if (*m == "vlf")
      s.mode = SweepSpec::Mode::vlf;
    else if (*m == "asymptotic")
      s.mode = SweepSpec::Mode::asymptotic;
    else
      throw ValidationError("sweep.mode must be vlf or asymptotic");
  }
  if (cfg.has("sweep.C0")) s.c0 = cfg.get_doubles("sweep.C0");
  if (cfg.has("sweep.eta")) s.eta = cfg.get_doubles("sweep.eta");
  if (cfg.has("sweep.N")) {
    s.n.clear();
    for (double v : cfg.get_doubles("sweep.N")) {
      if (v != std::floor(v)) throw ValidationError("sweep.N entries must be integers");
      s.n.push_back(static_cast<int>(v));
    }
  }
  if (cfg.has("sweep.l")) {
    for (double v : cfg.get_doubles("sweep.l")) {
      if (v != std::floor(v)) throw ValidationError("sweep.l entries must be integers");
      s.l.push_back(static_cast<int>(v));
    }
  }
  if (cfg.has("sweep.variant")) {
    s.variants.clear();
    for (const auto& v : cfg.get_strings("sweep.variant")) s.variants.push_back(parse_variant(v));
  }
  if (cfg.has("sweep.z.start") || cfg.has("sweep.z.stop") || cfg.has("sweep.z.steps")) {
    const double start = cfg.get_double("sweep.z.start", 0.0);
    s.z = z_grid(start, cfg.get_double("sweep.z.stop", start), cfg.get_int("sweep.z.steps", 1));
  }
  s.optimized = cfg.get_bool("sweep.optimized", true);
  s.workers = static_cast<unsigned>(std::max(0, cfg.get_int("sweep.workers", 0)));
  if (const auto f = cfg.get("output.format")) s.format = parse_format(*f);
  if (const auto p = cfg.get("output.path")) s.output_path = *p;
  return s;
}

int GraphRequest::labels() const { return config ? zero_supermode_index(config->n) : l; }

std::string cmd_eigen(const ArrayConfig<double>& config, bool zero_supermode_query) {
  config.validate();
  const auto basis = supermode_decomposition(config);
  json out = {{"units", units_json()}, {"config", to_json(config)}, {"basis", to_json(basis)}};
  if (config.n % 2 == 1)
    out["zero_supermode_index"] = zero_supermode_index(config.n);
  else if (zero_supermode_query)
    zero_supermode_index(config.n);  // throws the structured error
  else
    out["zero_supermode_index"] = nullptr;
  return dump(out);
}

std::string cmd_propagate(const ArrayConfig<double>& config, double z, Basis basis_kind, Format format) {
  config.validate();
  if (!std::isfinite(z) || z < 0) throw ValidationError("propagate: z must be finite and >= 0");
  const auto basis = supermode_decomposition(config);
  const auto vs = covariance_supermode(config, basis, z);
  const auto vi = change_basis(vs, basis);
  const Eigen::MatrixXd& m = basis_kind == Basis::individual ? vi.entries() : vs.entries();

  if (format == Format::csv) {
    std::vector<std::string> header{"row"};
    for (Eigen::Index j = 0; j < m.cols(); ++j) header.push_back("c" + std::to_string(j + 1));
    std::vector<std::vector<std::string>> rows;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      std::vector<std::string> row{std::to_string(i + 1)};
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(format_double(m(i, j)));
      rows.push_back(std::move(row));
    }
    return csv_text(header, rows);
  }
  json regimes = json::array();
  for (int k = 0; k < basis.size(); ++k)
    regimes.push_back(std::string(to_string(squeezing_params(basis.lambda(k), config.eta).regime)));
  json out = {{"units", units_json()}, {"config", to_json(config)}, {"z", z}, {"regimes", std::move(regimes)}};
  if (basis_kind == Basis::individual) {
    out["covariance"] = to_json(vi);
    out["physicality"] = to_json(check_physicality(vi));
  } else {
    out["covariance"] = to_json(vs);
    out["physicality"] = to_json(check_physicality(vs));
  }
  return dump(out);
}

std::string cmd_vlf(const ArrayConfig<double>& config, const std::vector<double>& z, Variant variant,
                    bool optimized, Format format) {
  config.validate();
  check_z_grid(z);
  zero_supermode_index(config.n);  // odd N only
  std::vector<VlfReport<double>> reports;
  for (double zi : z) reports.push_back(vlf_suite(config, zi, variant, optimized));

  if (format == Format::csv) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : reports) rows.push_back(vlf_row(r));
    return csv_text(vlf_header(reports.front().values.size()), rows);
  }
  json arr = json::array();
  for (const auto& r : reports) {
    const auto g = duan_nullifiers(probed_covariance(GraphRequest{config, 0, 0, {}, variant}, r.z), variant);
    arr.push_back(to_json(r, &g));
  }
  return dump({{"units", units_json()}, {"reports", std::move(arr)}});
}

std::string cmd_sweep(const SweepSpec& spec) {
  spec.validate();
  const auto pts = expand(spec);
  const auto results = run_pool(spec, pts);
  const bool asym = spec.mode == SweepSpec::Mode::asymptotic;

  if (spec.format == Format::csv) {
    std::vector<std::string> header;
    if (asym)
      header = {"index", "l", "eta", "z", "status", "unoptimized", "optimized", "message"};
    else
      header = {"index", "N", "C0", "eta", "variant", "z", "status", "fully_inseparable",
                "asymptote", "max_vlf", "vlf", "message"};
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto& p = pts[i];
      const auto& r = results[i];
      // Messages are quoted; embedded quotes doubled.
      std::string msg = "\"";
      for (char c : r.message) msg += (c == '"') ? std::string("\"\"") : std::string(1, c);
      msg += "\"";
      if (asym) {
        const bool ok = r.status == "ok";
        rows.push_back({std::to_string(p.index), std::to_string(p.l), format_double(p.config.eta),
                        format_double(p.z), r.status, ok ? format_double(r.unoptimized) : "",
                        ok ? format_double(r.optimized) : "", msg});
        continue;
      }
      std::vector<std::string> row{std::to_string(p.index), std::to_string(p.config.n), format_double(p.config.c0),
                                   format_double(p.config.eta), std::string(to_string(p.variant)),
                                   format_double(p.z), r.status};
      if (r.report) {
        std::vector<std::string> vals;
        double worst = -std::numeric_limits<double>::infinity();
        for (double v : r.report->values) {
          vals.push_back(format_double(v));
          worst = std::max(worst, v);
        }
        row.insert(row.end(), {r.report->fully_inseparable ? "true" : "false", format_double(r.report->asymptote),
                               vals.empty() ? "" : format_double(worst), csv_join(vals, ';')});
      } else {
        row.insert(row.end(), {"", "", "", ""});
      }
      row.push_back(msg);
      rows.push_back(std::move(row));
    }
    return csv_text(header, rows);
  }

  json arr = json::array();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    const auto& r = results[i];
    json item = {{"index", p.index}, {"z", p.z}, {"status", r.status}};
    if (asym) {
      item["l"] = p.l;
      item["eta"] = p.config.eta;
      if (r.status == "ok") {
        item["unoptimized"] = r.unoptimized;
        item["optimized"] = r.optimized;
      }
    } else {
      item["N"] = p.config.n;
      item["C0"] = p.config.c0;
      item["eta"] = p.config.eta;
      item["variant"] = std::string(to_string(p.variant));
      if (r.report) item["report"] = to_json(*r.report);
    }
    if (r.status != "ok") item["message"] = r.message;
    arr.push_back(std::move(item));
  }
  return dump({{"units", units_json()}, {"points", std::move(arr)}});
}

std::string cmd_graph(const GraphRequest& req, Format format) {
  check_z_grid(req.z);
  if (req.config) req.config->validate();
  const int l = req.labels();
  const double eta = req.nonlinearity();
  if (format == Format::csv) {
    std::vector<std::vector<std::string>> rows;
    for (double z : req.z) {
      const auto g = duan_nullifiers(probed_covariance(req, z), req.variant);
      const auto adj = adjacency_matrices<double>(l, eta, z);
      rows.push_back({format_double(z), std::to_string(l), std::string(to_string(req.variant)),
                      std::to_string(g.edges.size()), edge_list(g), std::to_string(connected_components(g).size()),
                      format_double(approximation_error(adj)), format_double(static_cast<double>(l - 1))});
    }
    return csv_text({"z", "l", "variant", "edges", "edge_list", "components", "trace_U", "trace_U_limit"}, rows);
  }
  json arr = json::array();
  for (double z : req.z) {
    const auto g = duan_nullifiers(probed_covariance(req, z), req.variant);
    arr.push_back({{"z", z},
                   {"graph", to_json(g)},
                   {"components", components_json(g)},
                   {"adjacency", to_json(adjacency_matrices<double>(l, eta, z))}});
  }
  json out = request_json(req);
  out["units"] = units_json();
  out["variant"] = std::string(to_string(req.variant));
  auto zs = req.z;
  std::sort(zs.begin(), zs.end());
  zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
  out["verdict"] = to_json(cluster_limit_verdict(l, eta, zs));
  out["results"] = std::move(arr);
  return dump(out);
}

std::string cmd_nullifiers(const GraphRequest& req, Format format) {
  check_z_grid(req.z);
  if (req.config) req.config->validate();
  if (format == Format::csv) {
    std::vector<std::vector<std::string>> rows;
    for (double z : req.z)
      for (const auto& n : nullifier_table(probed_covariance(req, z), req.variant))
        rows.push_back({format_double(z), std::to_string(EntanglementGraph::label(n.i)),
                        std::to_string(EntanglementGraph::label(n.j)), format_double(n.x_variance),
                        format_double(n.y_variance), n.below_shot_noise() ? "true" : "false"});
    return csv_text({"z", "i", "j", "x_variance", "y_variance", "entangled"}, rows);
  }
  json arr = json::array();
  for (double z : req.z) {
    json table = json::array();
    for (const auto& n : nullifier_table(probed_covariance(req, z), req.variant))
      table.push_back({{"i", EntanglementGraph::label(n.i)},
                       {"j", EntanglementGraph::label(n.j)},
                       {"x_variance", n.x_variance},
                       {"y_variance", n.y_variance},
                       {"entangled", n.below_shot_noise()}});
    arr.push_back({{"z", z}, {"nullifiers", std::move(table)}});
  }
  json out = request_json(req);
  out["units"] = units_json();
  out["variant"] = std::string(to_string(req.variant));
  out["results"] = std::move(arr);
  return dump(out);
}

std::string error_json(std::string_view kind, std::string_view message) {
  return json{{"error", {{"kind", kind}, {"message", message}}}}.dump();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open output file '" + path + "'");
  out << text;
  out.flush();
  if (!out) throw ValidationError("failed writing output file '" + path + "'");
}

}  // namespace anw
