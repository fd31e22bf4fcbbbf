#pragma once

// Complex-weighted adjacency matrix Z = V + iU of the large-coupling state and
// its distance from a cluster-state graph.

#include "anw/entanglement.hpp"
#include "anw/gaussian.hpp"
#include "anw/types.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace anw {

template <typename Scalar = double>
struct AdjacencyPair {
  MatrixX<Scalar> v;
  MatrixX<Scalar> u;
  int l = 0;
};

/// Matrix with entries (-1)^(i+j).
template <typename Scalar = double>
MatrixX<Scalar> checkerboard(int l) {
  MatrixX<Scalar> c(l, l);
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j) c(i, j) = ((i + j) % 2 == 0) ? Scalar(1) : Scalar(-1);
  return c;
}

/// V = tanh(4ηz)/l · C, U = sech(4ηz)/l · C + (l·I - C)/l with C the
/// checkerboard matrix.
template <typename Scalar = double>
AdjacencyPair<Scalar> adjacency_matrices(int l, const Scalar& eta, const Scalar& z) {
  using std::cosh;
  using std::tanh;
  if (l < 1) throw ValidationError("adjacency_matrices: l must be >= 1");
  if (eta < Scalar(0) || z < Scalar(0)) throw ValidationError("adjacency_matrices: eta and z must be >= 0");
  const Scalar t = Scalar(4) * eta * z;
  const Scalar ls(l);
  const MatrixX<Scalar> c = checkerboard<Scalar>(l);
  AdjacencyPair<Scalar> pair;
  pair.l = l;
  pair.v = (tanh(t) / ls) * c;
  pair.u = (Scalar(1) / (cosh(t) * ls)) * c + (ls * MatrixX<Scalar>::Identity(l, l) - c) / ls;
  return pair;
}

/// Large-squeezing limit of V: C / l.
template <typename Scalar = double>
MatrixX<Scalar> v_infinity(int l) {
  if (l < 1) throw ValidationError("v_infinity: l must be >= 1");
  return checkerboard<Scalar>(l) / Scalar(l);
}

/// tr U: vanishes only for an ideal cluster state.
template <typename Scalar>
Scalar approximation_error(const AdjacencyPair<Scalar>& pair) {
  return pair.u.trace();
}

struct ClusterVerdict {
  int l = 0;
  std::vector<double> z;
  std::vector<double> trace;
  double limit = 0;            // tr U as 4ηz → ∞, equal to l - 1
  bool cluster_state = false;  // limit < 1
};

inline ClusterVerdict cluster_limit_verdict(int l, double eta, const std::vector<double>& z_grid) {
  if (l < 1) throw ValidationError("cluster_limit_verdict: l must be >= 1");
  for (std::size_t i = 1; i < z_grid.size(); ++i)
    if (!(z_grid[i] > z_grid[i - 1])) throw ValidationError("cluster_limit_verdict: z grid must be increasing");
  ClusterVerdict out;
  out.l = l;
  out.z = z_grid;
  for (double z : z_grid) out.trace.push_back(approximation_error(adjacency_matrices(l, eta, z)));
  out.limit = static_cast<double>(l - 1);
  out.cluster_state = out.limit < 1.0;
  return out;
}

namespace detail {

// Graph Z = V + iU of a pure state from its covariance: U = σ_xx⁻¹ and
// V = σ_xx⁻¹ σ_xy. Only used to score local phase shifts.
template <typename Scalar>
AdjacencyPair<Scalar> graph_from_covariance(const IndividualCovariance<Scalar>& cov) {
  const int l = cov.modes();
  MatrixX<Scalar> sxx(l, l), sxy(l, l);
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j) {
      sxx(i, j) = cov(2 * i, 2 * j);
      sxy(i, j) = cov(2 * i, 2 * j + 1);
    }
  AdjacencyPair<Scalar> pair;
  pair.l = l;
  const auto lu = sxx.partialPivLu();
  // Entries of σ_xx carry rounding of order eps·max|V| (a squeezed x is the
  // difference of e^{4ηz}-sized terms). If its smallest scale, about
  // rcond·‖σ_xx‖₁, is not clear of that, the inverse is noise.
  const Scalar sxx_norm = sxx.cwiseAbs().colwise().sum().maxCoeff();
  const Scalar noise = Scalar(100) * std::numeric_limits<Scalar>::epsilon() * cov.entries().cwiseAbs().maxCoeff();
  if (!(lu.rcond() * sxx_norm > noise))
    throw NumericalError("graph_from_covariance: sigma_xx not resolvable in this scalar type");
  pair.u = lu.inverse();
  pair.u = (Scalar(0.5) * (pair.u + pair.u.transpose())).eval();
  pair.v = lu.solve(sxy);
  return pair;
}

}  // namespace detail

struct PhaseSearchResult {
  double min_trace = 0;
  Eigen::VectorXd phases;
  bool exhaustive = false;
  long evaluations = 0;
};

/// Smallest tr U reachable by local phase shifts of the large-coupling state
/// on a grid of step `step` over [0, π) per mode (a π shift leaves the
/// covariance unchanged). The grid is enumerated completely when it has at
/// most `exhaustive_limit` points; otherwise cyclic coordinate descent runs
/// from a fixed set of starting profiles.
template <typename Scalar = double>
PhaseSearchResult local_phase_search(int l, const Scalar& eta, const Scalar& z, double step = M_PI / 12,
                                     long exhaustive_limit = 250000) {
  if (!(step > 0)) throw ValidationError("local_phase_search: step must be > 0");
  const auto base = large_coupling_covariance<Scalar>(l, eta, z);
  const int points = static_cast<int>(std::ceil(M_PI / step - 1e-9));
  PhaseSearchResult out;
  out.min_trace = std::numeric_limits<double>::infinity();
  out.phases = Eigen::VectorXd::Zero(l);

  auto trace_at = [&](const Eigen::VectorXd& phases) {
    ++out.evaluations;
    const VectorX<Scalar> theta = phases.cast<Scalar>();
    return static_cast<double>(approximation_error(detail::graph_from_covariance(rotate_quadratures(base, theta))));
  };

  const double grid_size = std::pow(static_cast<double>(points), l);
  if (grid_size <= static_cast<double>(exhaustive_limit)) {
    out.exhaustive = true;
    std::vector<int> idx(l, 0);
    Eigen::VectorXd phases = Eigen::VectorXd::Zero(l);
    while (true) {
      for (int m = 0; m < l; ++m) phases(m) = idx[m] * step;
      const double t = trace_at(phases);
      if (t < out.min_trace) {
        out.min_trace = t;
        out.phases = phases;
      }
      int m = 0;
      while (m < l && ++idx[m] == points) idx[m++] = 0;
      if (m == l) break;
    }
    return out;
  }

  std::vector<Eigen::VectorXd> starts;
  starts.push_back(Eigen::VectorXd::Zero(l));
  for (int shift : {points / 2, points / 4, (3 * points) / 4}) {
    Eigen::VectorXd s(l);
    for (int m = 0; m < l; ++m) s(m) = (m % 2 == 0) ? 0.0 : shift * step;
    starts.push_back(s);
  }
  for (int k = 1; k < points; k += 3) starts.push_back(Eigen::VectorXd::Constant(l, k * step));

  for (Eigen::VectorXd phases : starts) {
    double current = trace_at(phases);
    for (int sweep = 0; sweep < 50; ++sweep) {
      bool improved = false;
      for (int m = 0; m < l; ++m) {
        Eigen::VectorXd trial = phases;
        for (int k = 0; k < points; ++k) {
          trial(m) = k * step;
          const double t = trace_at(trial);
          if (t < current - 1e-15) {
            current = t;
            phases(m) = trial(m);
            improved = true;
          }
        }
      }
      if (!improved) break;
    }
    if (current < out.min_trace) {
      out.min_trace = current;
      out.phases = phases;
    }
  }
  return out;
}

}  // namespace anw
