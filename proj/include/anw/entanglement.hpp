#pragma once

// Van Loock-Furusawa (VLF) inequalities, their large-coupling closed forms,
// the two local-oscillator profiles that switch between entanglement
// structures, and Duan nullifier graphs.
//
// Labels: the l odd waveguides 1, 3, ..., N carry labels 1..l. Internally
// labels are 0-based (label j ↔ waveguide 2j+1 in 1-based waveguide counting).

#include "anw/gaussian.hpp"
#include "anw/lattice.hpp"
#include "anw/propagation.hpp"
#include "anw/types.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <string_view>
#include <vector>

namespace anw {

/// VLF threshold: all inequalities below it certify full inseparability.
inline constexpr double kVlfThreshold = 4.0;
/// Shot noise of a two-mode sum/difference variance.
inline constexpr double kPairShotNoise = 2.0;
/// Margin below shot noise required before a nullifier counts as squeezed.
inline constexpr double kNullifierMargin = 1e-9;

enum class Variant { a, b };

constexpr std::string_view to_string(Variant v) { return v == Variant::a ? "a" : "b"; }

inline Variant parse_variant(std::string_view s) {
  if (s == "a") return Variant::a;
  if (s == "b") return Variant::b;
  throw ValidationError("variant must be 'a' or 'b', got '" + std::string(s) + "'");
}

/// Local-oscillator phases over the l labels.
///
/// Variant a alternates (0, -π/2, 0, -π/2, ...) along the labels. Variant b
/// applies (0, π/2, 0, π/2, ...) separately along the two interleaved sets
/// {1, 3, 5, ...} and {2, 4, 6, ...}, which gives (0, 0, π/2, π/2, 0, 0, ...)
/// per label.
template <typename Scalar = double>
VectorX<Scalar> lo_profile(int l, Variant variant) {
  if (l < 2) throw ValidationError("lo_profile: need at least two modes, got l = " + std::to_string(l));
  const Scalar half_pi = pi<Scalar>() / Scalar(2);
  VectorX<Scalar> theta(l);
  for (int j = 0; j < l; ++j) {
    if (variant == Variant::a)
      theta(j) = (j % 2 == 0) ? Scalar(0) : Scalar(-half_pi);
    else
      theta(j) = ((j / 2) % 2 == 0) ? Scalar(0) : half_pi;
  }
  return theta;
}

template <typename Scalar = double>
struct MeasurementProfile {
  VectorX<Scalar> theta;
  VectorX<Scalar> gains;  // entries of the two probed modes are ignored

  static MeasurementProfile unweighted(VectorX<Scalar> theta) {
    MeasurementProfile p;
    p.gains = VectorX<Scalar>::Zero(theta.size());
    p.theta = std::move(theta);
    return p;
  }
};

/// Two modes probed by one inequality (0-based labels).
struct ModePair {
  int first = 0;
  int second = 1;

  friend bool operator==(const ModePair&, const ModePair&) = default;
};

/// Pairs probed by the suite: neighbouring labels for variant a; neighbours
/// inside each of the two interleaved sets for variant b.
inline std::vector<ModePair> vlf_pairs(int l, Variant variant) {
  std::vector<ModePair> pairs;
  if (variant == Variant::a) {
    if (l < 2) throw ValidationError("vlf_pairs: variant a needs l >= 2");
    for (int j = 0; j + 1 < l; ++j) pairs.push_back({j, j + 1});
  } else {
    if (l < 4) throw ValidationError("vlf_pairs: variant b needs l >= 4 (two sets of two modes)");
    for (int j = 0; j + 2 < l; ++j) pairs.push_back({j, j + 2});
  }
  return pairs;
}

namespace detail {

template <typename Scalar>
void check_pair(const ModePair& pair, int modes) {
  if (pair.first < 0 || pair.second < 0 || pair.first >= modes || pair.second >= modes ||
      pair.first == pair.second)
    throw ValidationError("vlf: mode pair (" + std::to_string(pair.first) + ", " +
                          std::to_string(pair.second) + ") out of range for " +
                          std::to_string(modes) + " modes");
}

// Coefficients (over the rotated quadratures) of x_p - x_q and of
// y_p + y_q + Σ G_m y_m.
template <typename Scalar>
std::pair<VectorX<Scalar>, VectorX<Scalar>> vlf_combinations(int modes, const ModePair& pair,
                                                             const VectorX<Scalar>& gains) {
  VectorX<Scalar> u = VectorX<Scalar>::Zero(2 * modes);
  VectorX<Scalar> w = VectorX<Scalar>::Zero(2 * modes);
  u(2 * pair.first) = Scalar(1);
  u(2 * pair.second) = Scalar(-1);
  for (int m = 0; m < modes; ++m)
    if (m != pair.first && m != pair.second) w(2 * m + 1) = gains(m);
  w(2 * pair.first + 1) = Scalar(1);
  w(2 * pair.second + 1) = Scalar(1);
  return {std::move(u), std::move(w)};
}

}  // namespace detail

/// VLF combination for one pair of modes:
/// V[x_p(θ_p) - x_q(θ_q)] + V[y_p(θ_p) + y_q(θ_q) + Σ_{m≠p,q} G_m y_m(θ_m)].
template <typename Scalar>
Scalar vlf_value(const IndividualCovariance<Scalar>& v, const ModePair& pair,
                 const MeasurementProfile<Scalar>& profile) {
  detail::check_pair<Scalar>(pair, v.modes());
  if (profile.gains.size() != v.modes())
    throw ValidationError("vlf_value: gain vector size mismatch");
  const auto rotated = rotate_quadratures(v, profile.theta);
  const auto [u, w] = detail::vlf_combinations(v.modes(), pair, profile.gains);
  return variance_of_combination(rotated, u) + variance_of_combination(rotated, w);
}

/// Inequality j (0-based) between neighbouring modes j and j+1.
template <typename Scalar>
Scalar vlf_value(const IndividualCovariance<Scalar>& v, int j, const MeasurementProfile<Scalar>& profile) {
  if (j < 0 || j + 1 >= v.modes())
    throw ValidationError("vlf_value: inequality index " + std::to_string(j) + " out of range");
  return vlf_value(v, ModePair{j, j + 1}, profile);
}

template <typename Scalar = double>
struct GainSolution {
  VectorX<Scalar> gains;  // zero on the probed pair
  Scalar value{};
  bool singular = false;  // normal matrix rank-deficient; minimum-norm gains used
};

/// Exact minimiser of the VLF combination over the auxiliary gains.
///
/// Only the second variance depends on G, and it is the quadratic form
/// (w + B g)ᵀ V (w + B g) with B selecting the y(θ) quadratures of the
/// auxiliary modes. The minimiser solves (Bᵀ V B) g = -Bᵀ V w.
template <typename Scalar>
GainSolution<Scalar> optimize_gains(const IndividualCovariance<Scalar>& v, const ModePair& pair,
                                    const VectorX<Scalar>& theta) {
  using std::abs;
  const int n = v.modes();
  detail::check_pair<Scalar>(pair, n);
  const auto rotated = rotate_quadratures(v, theta);
  const MatrixX<Scalar>& r = rotated.entries();

  std::vector<int> aux;
  for (int m = 0; m < n; ++m)
    if (m != pair.first && m != pair.second) aux.push_back(m);
  const auto k = static_cast<Eigen::Index>(aux.size());

  GainSolution<Scalar> sol;
  sol.gains = VectorX<Scalar>::Zero(n);
  if (k > 0) {
    MatrixX<Scalar> normal(k, k);
    VectorX<Scalar> rhs(k);
    for (Eigen::Index a = 0; a < k; ++a) {
      const int ya = 2 * aux[a] + 1;
      rhs(a) = -(r(ya, 2 * pair.first + 1) + r(ya, 2 * pair.second + 1));
      for (Eigen::Index b = 0; b < k; ++b) normal(a, b) = r(ya, 2 * aux[b] + 1);
    }
    const Eigen::LDLT<MatrixX<Scalar>> ldlt(normal);
    const auto d = ldlt.vectorD();
    const Scalar dmax = d.cwiseAbs().maxCoeff();
    const Scalar dmin = d.minCoeff();
    VectorX<Scalar> g;
    if (ldlt.info() == Eigen::Success && dmin > Scalar(k) * std::numeric_limits<Scalar>::epsilon() * dmax) {
      g = ldlt.solve(rhs);
    } else {
      sol.singular = true;
      g = normal.completeOrthogonalDecomposition().solve(rhs);
    }
    for (Eigen::Index a = 0; a < k; ++a) sol.gains(aux[a]) = g(a);
  }
  MeasurementProfile<Scalar> profile{theta, sol.gains};
  sol.value = vlf_value(v, pair, profile);
  return sol;
}

template <typename Scalar>
GainSolution<Scalar> optimize_gains(const IndividualCovariance<Scalar>& v, int j,
                                    const VectorX<Scalar>& theta) {
  if (j < 0 || j + 1 >= v.modes())
    throw ValidationError("optimize_gains: inequality index " + std::to_string(j) + " out of range");
  return optimize_gains(v, ModePair{j, j + 1}, theta);
}

/// Closed-form VLF value in the large-coupling limit.
///
/// Unoptimised: 4[(l-1) + e^{-4ηz}]/l. Optimised with the symmetric gain
/// ansatz (equal gains within odd and within even auxiliary labels):
///   odd l:  minus 2(l²-4l+3)/l · t² / (2l(l-2) - (l²-4l+3) t)
///   even l: minus 2(l-2)/l · t² / (2l - (l-2) t)
/// with t = 1 - e^{-4ηz}. z may be +infinity.
template <typename Scalar = double>
Scalar asymptotic_vlf(int l, const Scalar& eta, const Scalar& z, bool optimized) {
  using std::exp;
  if (l < 2) throw ValidationError("asymptotic_vlf: l must be >= 2");
  if (eta < Scalar(0) || z < Scalar(0)) throw ValidationError("asymptotic_vlf: eta and z must be >= 0");
  const Scalar decay = (eta == Scalar(0)) ? Scalar(1) : Scalar(exp(Scalar(-4) * eta * z));
  const Scalar ls(l);
  const Scalar base = Scalar(4) * ((ls - Scalar(1)) + decay) / ls;
  if (!optimized) return base;
  const Scalar t = Scalar(1) - decay;
  if (l % 2 == 1) {
    const Scalar q = ls * ls - Scalar(4) * ls + Scalar(3);
    return base - Scalar(2) * q / ls * t * t / (Scalar(2) * ls * (ls - Scalar(2)) - q * t);
  }
  return base - Scalar(2) * (ls - Scalar(2)) / ls * t * t / (Scalar(2) * ls - (ls - Scalar(2)) * t);
}

/// Zero-supermode weights on the l odd waveguides of a homogeneous array:
/// (-1)^j / sqrt(l) for 0-based label j.
template <typename Scalar = double>
VectorX<Scalar> zero_supermode_weights(int l) {
  using std::sqrt;
  VectorX<Scalar> m(l);
  const Scalar norm = Scalar(1) / sqrt(Scalar(l));
  for (int j = 0; j < l; ++j) m(j) = (j % 2 == 0) ? norm : Scalar(-norm);
  return m;
}

/// Covariance of the l odd waveguides in the C₀ → ∞ limit:
/// V(x_i,x_j) = V(y_i,y_j) = δ_ij + 2 M_i M_j sinh²(2ηz), V(x_i,y_j) = M_i M_j sinh(4ηz).
template <typename Scalar = double>
IndividualCovariance<Scalar> large_coupling_covariance(int l, const Scalar& eta, const Scalar& z) {
  using std::sinh;
  if (l < 1) throw ValidationError("large_coupling_covariance: l must be >= 1");
  if (eta < Scalar(0) || z < Scalar(0))
    throw ValidationError("large_coupling_covariance: eta and z must be >= 0");
  const VectorX<Scalar> m = zero_supermode_weights<Scalar>(l);
  const Scalar sh = sinh(Scalar(2) * eta * z);
  const Scalar diag = Scalar(2) * sh * sh;
  const Scalar cross = sinh(Scalar(4) * eta * z);
  MatrixX<Scalar> v = MatrixX<Scalar>::Identity(2 * l, 2 * l);
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j) {
      const Scalar mm = m(i) * m(j);
      v(2 * i, 2 * j) += mm * diag;
      v(2 * i + 1, 2 * j + 1) += mm * diag;
      v(2 * i, 2 * j + 1) = mm * cross;
      v(2 * i + 1, 2 * j) = mm * cross;
    }
  return IndividualCovariance<Scalar>(std::move(v));
}

template <typename Scalar = double>
struct VlfReport {
  ArrayConfig<Scalar> config;
  Scalar z{};
  Variant variant = Variant::a;
  bool optimized = true;
  std::vector<ModePair> pairs;         // 0-based labels
  std::vector<Scalar> values;
  std::vector<VectorX<Scalar>> gains;  // one gain vector per inequality
  std::vector<bool> singular;          // normal equations rank-deficient
  VectorX<Scalar> theta;
  Scalar asymptote{};                  // matching large-coupling closed form
  bool fully_inseparable = false;      // every value < 4
  double reduced_purity = 0;           // det of the odd-waveguide covariance
  bool genuine_multipartite = false;   // fully inseparable and reduced state pure
  bool outside_model_scope = false;    // some supermode in the hyperbolic regime

  int labels() const { return static_cast<int>(theta.size()); }
};

/// Evaluates every inequality of the chosen variant for an odd array at
/// distance z, on the covariance restricted to the odd waveguides.
template <typename Scalar>
VlfReport<Scalar> vlf_suite(const ArrayConfig<Scalar>& config, const Scalar& z, Variant variant,
                            bool optimized = true) {
  using std::abs;
  config.validate();
  const int l = zero_supermode_index(config.n);
  const auto pairs = vlf_pairs(l, variant);

  const auto basis = supermode_decomposition(config);
  const auto full = covariance_individual(config, basis, z);
  std::vector<int> odd(l);
  for (int j = 0; j < l; ++j) odd[j] = 2 * j;
  const auto reduced = restrict_modes(full, odd);

  VlfReport<Scalar> rep;
  rep.config = config;
  rep.z = z;
  rep.variant = variant;
  rep.optimized = optimized;
  rep.pairs = pairs;
  rep.theta = lo_profile<Scalar>(l, variant);
  rep.fully_inseparable = true;
  for (const auto& pair : pairs) {
    GainSolution<Scalar> sol;
    if (optimized) {
      sol = optimize_gains(reduced, pair, rep.theta);
    } else {
      sol.gains = VectorX<Scalar>::Zero(l);
      sol.value = vlf_value(reduced, pair, MeasurementProfile<Scalar>{rep.theta, sol.gains});
    }
    rep.fully_inseparable = rep.fully_inseparable && sol.value < Scalar(kVlfThreshold);
    rep.values.push_back(sol.value);
    rep.gains.push_back(sol.gains);
    rep.singular.push_back(sol.singular);
  }
  // Only variant a has an optimised closed form; variant b is compared with
  // the (degenerate) unoptimised one.
  rep.asymptote = asymptotic_vlf<Scalar>(l, config.eta, z, optimized && variant == Variant::a);
  rep.reduced_purity = static_cast<double>(reduced.entries().partialPivLu().determinant());
  rep.genuine_multipartite =
      rep.fully_inseparable && std::abs(rep.reduced_purity - 1.0) <= kPhysicalityTolerance;
  rep.outside_model_scope = has_hyperbolic_modes(basis, config.eta);
  return rep;
}

struct Nullifier {
  int i = 0;  // 0-based labels, i < j
  int j = 0;
  double x_variance = 0;  // V[x_i(θ_i) - x_j(θ_j)]
  double y_variance = 0;  // V[y_i(θ_i) + y_j(θ_j)]

  bool below_shot_noise() const {
    return x_variance < kPairShotNoise - kNullifierMargin && y_variance < kPairShotNoise - kNullifierMargin;
  }
};

struct GraphEdge {
  int i = 0;  // 0-based labels
  int j = 0;
  double weight = 0;  // larger of the two EPR variances

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

/// Duan-criterion entanglement graph over l labels. Node j (0-based) is
/// label j+1 and waveguide 2j+1 (both 1-based).
struct EntanglementGraph {
  int nodes = 0;
  std::vector<GraphEdge> edges;

  static int label(int node) { return node + 1; }
  static int waveguide(int node) { return 2 * node + 1; }
  bool has_edge(int i, int j) const {
    return std::any_of(edges.begin(), edges.end(), [&](const GraphEdge& e) {
      return (e.i == i && e.j == j) || (e.i == j && e.j == i);
    });
  }
};

/// Both EPR variances for every pair of labels, measured with the variant's
/// LO profile. The rotated quadratures are the primed ones of the pair
/// (x' = -y, y' = x at θ = -π/2; x' = y, y' = -x at θ = π/2).
template <typename Scalar>
std::vector<Nullifier> nullifier_table(const IndividualCovariance<Scalar>& v, Variant variant) {
  const int l = v.modes();
  const auto rotated = rotate_quadratures(v, lo_profile<Scalar>(l, variant));
  const MatrixX<Scalar>& r = rotated.entries();
  std::vector<Nullifier> table;
  for (int i = 0; i < l; ++i)
    for (int j = i + 1; j < l; ++j) {
      const Scalar vx = r(2 * i, 2 * i) + r(2 * j, 2 * j) - Scalar(2) * r(2 * i, 2 * j);
      const Scalar vy = r(2 * i + 1, 2 * i + 1) + r(2 * j + 1, 2 * j + 1) + Scalar(2) * r(2 * i + 1, 2 * j + 1);
      table.push_back({i, j, static_cast<double>(vx), static_cast<double>(vy)});
    }
  return table;
}

/// Edge between two labels when both EPR variances are below shot noise.
template <typename Scalar>
EntanglementGraph duan_nullifiers(const IndividualCovariance<Scalar>& v, Variant variant) {
  EntanglementGraph g;
  g.nodes = v.modes();
  for (const auto& n : nullifier_table(v, variant))
    if (n.below_shot_noise()) g.edges.push_back({n.i, n.j, std::max(n.x_variance, n.y_variance)});
  return g;
}

/// Connected components as sorted lists of 0-based nodes, ordered by their
/// smallest node. Isolated nodes form their own component.
inline std::vector<std::vector<int>> connected_components(const EntanglementGraph& g) {
  std::vector<int> parent(g.nodes);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : g.edges) parent[find(e.i)] = find(e.j);
  std::vector<std::vector<int>> comps;
  std::vector<int> index(g.nodes, -1);
  for (int v = 0; v < g.nodes; ++v) {
    const int root = find(v);
    if (index[root] < 0) {
      index[root] = static_cast<int>(comps.size());
      comps.emplace_back();
    }
    comps[index[root]].push_back(v);
  }
  return comps;
}

template <typename Scalar = double>
struct ProfileSearch {
  VectorX<Scalar> theta;
  std::vector<Scalar> values;  // optimised VLF per pair at `theta`
  Scalar worst{};              // max of values
  int sweeps = 0;
};

/// Coordinate-wise grid search over LO phases, starting from the variant's
/// profile and minimising the largest optimised VLF value. Each sweep scans
/// one phase at a time over [-π, π) with the given step and keeps the best;
/// it stops when a full sweep brings no improvement.
template <typename Scalar>
ProfileSearch<Scalar> search_lo_profile(const IndividualCovariance<Scalar>& v, Variant variant,
                                        Scalar step = pi<Scalar>() / Scalar(180), int max_sweeps = 20) {
  using std::ceil;
  if (!(step > Scalar(0))) throw ValidationError("search_lo_profile: step must be > 0");
  const int l = v.modes();
  const auto pairs = vlf_pairs(l, variant);
  auto evaluate = [&](const VectorX<Scalar>& theta, std::vector<Scalar>* values) {
    Scalar worst(-1);
    for (const auto& pair : pairs) {
      const Scalar val = optimize_gains(v, pair, theta).value;
      if (values) values->push_back(val);
      worst = std::max(worst, val);
    }
    return worst;
  };
  ProfileSearch<Scalar> out;
  out.theta = lo_profile<Scalar>(l, variant);
  Scalar best = evaluate(out.theta, nullptr);
  const Scalar p = pi<Scalar>();
  const int points = static_cast<int>(ceil(Scalar(2) * p / step));
  for (out.sweeps = 0; out.sweeps < max_sweeps;) {
    ++out.sweeps;
    bool improved = false;
    for (int m = 0; m < l; ++m) {
      VectorX<Scalar> trial = out.theta;
      for (int k = 0; k < points; ++k) {
        trial(m) = -p + Scalar(k) * step;
        const Scalar val = evaluate(trial, nullptr);
        if (val < best) {
          best = val;
          out.theta(m) = trial(m);
          improved = true;
        }
      }
    }
    if (!improved) break;
  }
  out.worst = evaluate(out.theta, &out.values);
  return out;
}

}  // namespace anw
