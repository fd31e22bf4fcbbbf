#include "anw/io.hpp"

namespace anw {

namespace {

json matrix_rows(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_rows(const json& rows) {
  if (!rows.is_array()) throw ValidationError("json: expected an array of rows");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index m = n == 0 ? 0 : static_cast<Eigen::Index>(rows.at(0).size());
  Eigen::MatrixXd out(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows.at(i).size()) != m) throw ValidationError("json: ragged matrix");
    for (Eigen::Index j = 0; j < m; ++j) out(i, j) = rows.at(i).at(j).get<double>();
  }
  return out;
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j.at(i).get<double>();
  return v;
}

}  // namespace

json units_json() {
  return {{"length", "mm"}, {"rate", "1/mm"}, {"phase", "rad"}, {"ordering", "interleaved"}};
}

json to_json(const ArrayConfig<double>& config) {
  return {{"N", config.n}, {"C0", config.c0}, {"eta", config.eta}, {"f", vector_json(config.profile)}};
}

ArrayConfig<double> array_config_from_json(const json& j) {
  ArrayConfig<double> c;
  c.n = j.at("N").get<int>();
  c.c0 = j.at("C0").get<double>();
  c.eta = j.at("eta").get<double>();
  c.profile = vector_from_json(j.at("f"));
  c.validate();
  return c;
}

json to_json(const SupermodeBasis<double>& basis) {
  return {{"N", basis.size()}, {"lambda", vector_json(basis.lambda)}, {"modes", matrix_rows(basis.modes)}};
}

SupermodeBasis<double> supermode_basis_from_json(const json& j) {
  SupermodeBasis<double> b;
  b.lambda = vector_from_json(j.at("lambda"));
  b.modes = matrix_from_rows(j.at("modes"));
  if (b.modes.rows() != b.lambda.size() || b.modes.cols() != b.lambda.size())
    throw ValidationError("json: supermode basis dimension mismatch");
  return b;
}

template <Basis B>
json to_json(const CovarianceMatrix<double, B>& v) {
  json entries = json::array();
  const auto& m = v.entries();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) entries.push_back(m(i, j));
  return {{"N", v.modes()}, {"basis", std::string(to_string(B))}, {"ordering", "interleaved"},
          {"entries", std::move(entries)}};
}

template <Basis B>
CovarianceMatrix<double, B> covariance_from_json(const json& j) {
  const auto tag = j.at("basis").get<std::string>();
  if (tag != to_string(B))
    throw ValidationError("json: covariance basis is '" + tag + "', expected '" + std::string(to_string(B)) + "'");
  if (j.contains("ordering") && j.at("ordering").get<std::string>() != "interleaved")
    throw ValidationError("json: only interleaved quadrature ordering is supported");
  const int n = j.at("N").get<int>();
  const auto& entries = j.at("entries");
  if (static_cast<int>(entries.size()) != 4 * n * n) throw ValidationError("json: covariance needs 4N^2 entries");
  Eigen::MatrixXd m(2 * n, 2 * n);
  for (int i = 0; i < 2 * n; ++i)
    for (int k = 0; k < 2 * n; ++k) m(i, k) = entries.at(static_cast<std::size_t>(i * 2 * n + k)).get<double>();
  return CovarianceMatrix<double, B>(std::move(m));
}

template json to_json(const CovarianceMatrix<double, Basis::individual>&);
template json to_json(const CovarianceMatrix<double, Basis::supermode>&);
template CovarianceMatrix<double, Basis::individual> covariance_from_json<Basis::individual>(const json&);
template CovarianceMatrix<double, Basis::supermode> covariance_from_json<Basis::supermode>(const json&);

json to_json(const PhysicalityReport& rep) {
  return {{"symmetric", rep.symmetric},
          {"symmetry_residual", rep.symmetry_residual},
          {"positive", rep.positive},
          {"min_eigenvalue", rep.min_eigenvalue},
          {"uncertainty_ok", rep.uncertainty_ok},
          {"uncertainty_min_eigenvalue", rep.uncertainty_min_eigenvalue},
          {"purity", rep.purity},
          {"pure", rep.pure}};
}

json to_json(const EntanglementGraph& g) {
  json nodes = json::array();
  for (int v = 0; v < g.nodes; ++v)
    nodes.push_back({{"label", EntanglementGraph::label(v)}, {"waveguide", EntanglementGraph::waveguide(v)}});
  json edges = json::array();
  for (const auto& e : g.edges)
    edges.push_back({{"i", EntanglementGraph::label(e.i)}, {"j", EntanglementGraph::label(e.j)}, {"weight", e.weight}});
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

EntanglementGraph entanglement_graph_from_json(const json& j) {
  EntanglementGraph g;
  g.nodes = static_cast<int>(j.at("nodes").size());
  for (const auto& e : j.at("edges")) {
    GraphEdge edge{e.at("i").get<int>() - 1, e.at("j").get<int>() - 1, e.at("weight").get<double>()};
    if (edge.i < 0 || edge.j < 0 || edge.i >= g.nodes || edge.j >= g.nodes)
      throw ValidationError("json: graph edge label out of range");
    g.edges.push_back(edge);
  }
  return g;
}

json to_json(const VlfReport<double>& rep, const EntanglementGraph* graph) {
  json pairs = json::array();
  json waveguides = json::array();
  for (const auto& p : rep.pairs) {
    pairs.push_back({EntanglementGraph::label(p.first), EntanglementGraph::label(p.second)});
    waveguides.push_back({EntanglementGraph::waveguide(p.first), EntanglementGraph::waveguide(p.second)});
  }
  json gains = json::array();
  for (const auto& g : rep.gains) gains.push_back(vector_json(g));
  json out = {{"config", to_json(rep.config)},
              {"z", rep.z},
              {"variant", std::string(to_string(rep.variant))},
              {"optimized", rep.optimized},
              {"pairs", std::move(pairs)},
              {"waveguide_pairs", std::move(waveguides)},
              {"values", rep.values},
              {"gains", std::move(gains)},
              {"singular", rep.singular},
              {"theta", vector_json(rep.theta)},
              {"asymptote", rep.asymptote},
              {"fully_inseparable", rep.fully_inseparable},
              {"reduced_purity", rep.reduced_purity},
              {"genuine_multipartite", rep.genuine_multipartite},
              {"outside_model_scope", rep.outside_model_scope}};
  if (graph) out["graph"] = to_json(*graph);
  return out;
}

VlfReport<double> vlf_report_from_json(const json& j) {
  VlfReport<double> rep;
  rep.config = array_config_from_json(j.at("config"));
  rep.z = j.at("z").get<double>();
  rep.variant = parse_variant(j.at("variant").get<std::string>());
  rep.optimized = j.at("optimized").get<bool>();
  for (const auto& p : j.at("pairs")) rep.pairs.push_back({p.at(0).get<int>() - 1, p.at(1).get<int>() - 1});
  rep.values = j.at("values").get<std::vector<double>>();
  for (const auto& g : j.at("gains")) rep.gains.push_back(vector_from_json(g));
  rep.singular = j.at("singular").get<std::vector<bool>>();
  rep.theta = vector_from_json(j.at("theta"));
  rep.asymptote = j.at("asymptote").get<double>();
  rep.fully_inseparable = j.at("fully_inseparable").get<bool>();
  rep.reduced_purity = j.at("reduced_purity").get<double>();
  rep.genuine_multipartite = j.at("genuine_multipartite").get<bool>();
  rep.outside_model_scope = j.at("outside_model_scope").get<bool>();
  if (rep.values.size() != rep.pairs.size() || rep.gains.size() != rep.pairs.size())
    throw ValidationError("json: VLF report arrays disagree in length");
  return rep;
}

json to_json(const AdjacencyPair<double>& pair) {
  return {{"l", pair.l}, {"V", matrix_rows(pair.v)}, {"U", matrix_rows(pair.u)}, {"trace_U", approximation_error(pair)}};
}

AdjacencyPair<double> adjacency_pair_from_json(const json& j) {
  AdjacencyPair<double> p;
  p.l = j.at("l").get<int>();
  p.v = matrix_from_rows(j.at("V"));
  p.u = matrix_from_rows(j.at("U"));
  if (p.v.rows() != p.l || p.u.rows() != p.l) throw ValidationError("json: adjacency dimension mismatch");
  return p;
}

json to_json(const ClusterVerdict& verdict) {
  return {{"l", verdict.l},
          {"z", verdict.z},
          {"trace_U", verdict.trace},
          {"limit", verdict.limit},
          {"cluster_state", verdict.cluster_state}};
}

json to_json(const PhaseSearchResult& search) {
  return {{"min_trace_U", search.min_trace},
          {"phases", vector_json(search.phases)},
          {"exhaustive", search.exhaustive},
          {"evaluations", search.evaluations}};
}

}  // namespace anw
