#pragma once

// Coupling matrix of a nearest-neighbour waveguide array and its
// propagation eigenmodes (supermodes).

#include "anw/tridiagonal.hpp"
#include "anw/types.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace anw {

/// Physical description of an array of N coupled χ(2) waveguides under a flat
/// pump. Lengths are in mm, rates in 1/mm.
template <typename Scalar = double>
struct ArrayConfig {
  int n = 1;                    // number of waveguides
  Scalar c0 = Scalar(0.70);     // coupling strength
  Scalar eta = Scalar(0.025);   // |η|, identical in every waveguide
  VectorX<Scalar> profile;      // f_1 .. f_{N-1}

  static ArrayConfig homogeneous(int n, Scalar c0, Scalar eta) {
    ArrayConfig cfg;
    cfg.n = n;
    cfg.c0 = c0;
    cfg.eta = eta;
    cfg.profile = VectorX<Scalar>::Ones(std::max(n - 1, 0));
    return cfg;
  }

  Scalar coupling(int j) const { return c0 * profile(j); }

  void validate() const {
    if (n < 1) throw ValidationError("array: N must be >= 1");
    if (!is_finite(c0) || !(c0 > Scalar(0))) throw ValidationError("array: C0 must be > 0");
    if (!is_finite(eta) || eta < Scalar(0)) throw ValidationError("array: eta must be >= 0");
    if (profile.size() != n - 1)
      throw ValidationError("array: coupling profile needs N-1 = " + std::to_string(n - 1) +
                            " entries, got " + std::to_string(profile.size()));
    for (Eigen::Index j = 0; j < profile.size(); ++j)
      if (!is_finite(profile(j)) || !(profile(j) > Scalar(0)))
        throw ValidationError("array: coupling profile entries must be > 0");
  }

  template <typename Other>
  ArrayConfig<Other> cast() const {
    ArrayConfig<Other> out;
    out.n = n;
    out.c0 = Other(c0);
    out.eta = Other(eta);
    out.profile = profile.template cast<Other>();
    return out;
  }
};

/// Real symmetric tridiagonal N×N matrix with zero diagonal; entry (j, j+1)
/// is C₀ f_j.
template <typename Scalar = double>
struct CouplingMatrix {
  MatrixX<Scalar> entries;

  int size() const { return static_cast<int>(entries.rows()); }

  VectorX<Scalar> diagonal() const { return entries.diagonal(); }

  VectorX<Scalar> offdiagonal() const {
    VectorX<Scalar> e(std::max(size() - 1, 0));
    for (int j = 0; j + 1 < size(); ++j) e(j) = entries(j, j + 1);
    return e;
  }
};

/// Orthogonal change of basis to the supermodes. Row k of `modes` is
/// supermode k expressed over the individual waveguides, so that
/// ξ_S,k = Σ_j modes(k, j) ξ_j. `lambda` is sorted in descending order.
template <typename Scalar = double>
struct SupermodeBasis {
  MatrixX<Scalar> modes;
  VectorX<Scalar> lambda;

  int size() const { return static_cast<int>(lambda.size()); }
};

template <typename Scalar>
CouplingMatrix<Scalar> build_coupling_matrix(const ArrayConfig<Scalar>& config) {
  config.validate();
  CouplingMatrix<Scalar> c{MatrixX<Scalar>::Zero(config.n, config.n)};
  for (int j = 0; j + 1 < config.n; ++j) {
    c.entries(j, j + 1) = config.coupling(j);
    c.entries(j + 1, j) = config.coupling(j);
  }
  return c;
}

namespace detail {

// First entry larger than the tolerance is made positive.
template <typename Scalar>
void fix_row_signs(MatrixX<Scalar>& modes) {
  using std::abs;
  using std::sqrt;
  const Scalar tol = sqrt(std::numeric_limits<Scalar>::epsilon());
  for (Eigen::Index k = 0; k < modes.rows(); ++k) {
    for (Eigen::Index j = 0; j < modes.cols(); ++j) {
      if (abs(modes(k, j)) > tol) {
        if (modes(k, j) < Scalar(0)) modes.row(k) *= Scalar(-1);
        break;
      }
    }
  }
}

// Replaces the rows [first, last) spanning a degenerate eigenspace by the
// ordered Gram-Schmidt basis obtained from projecting e_0, e_1, ... onto it.
template <typename Scalar>
void canonicalize_subspace(MatrixX<Scalar>& modes, Eigen::Index first, Eigen::Index last) {
  using std::sqrt;
  const Eigen::Index m = last - first;
  const Eigen::Index n = modes.cols();
  const MatrixX<Scalar> rows = modes.middleRows(first, m);
  const MatrixX<Scalar> projector = rows.transpose() * rows;
  const Scalar tol = sqrt(std::numeric_limits<Scalar>::epsilon());
  std::vector<VectorX<Scalar>> basis;
  for (Eigen::Index i = 0; i < n && static_cast<Eigen::Index>(basis.size()) < m; ++i) {
    VectorX<Scalar> v = projector.col(i);
    for (const auto& b : basis) v -= b.dot(v) * b;
    for (const auto& b : basis) v -= b.dot(v) * b;  // second pass for orthogonality
    const Scalar norm = v.norm();
    if (norm > tol) basis.push_back(v / norm);
  }
  if (static_cast<Eigen::Index>(basis.size()) != m)
    throw NumericalError("supermode_decomposition: degenerate subspace lost rank");
  for (Eigen::Index k = 0; k < m; ++k) modes.row(first + k) = basis[k].transpose();
}

}  // namespace detail

/// Supermodes of the coupling matrix. Eigenvalues are sorted descending, each
/// row has its first nonzero entry positive, and (numerically) degenerate
/// eigenspaces get a deterministic basis.
template <typename Scalar>
SupermodeBasis<Scalar> supermode_decomposition(const CouplingMatrix<Scalar>& coupling) {
  using std::abs;
  const int n = coupling.size();
  if (n < 1) throw ValidationError("supermode_decomposition: empty coupling matrix");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (abs(i - j) > 1 && coupling.entries(i, j) != Scalar(0))
        throw ValidationError("supermode_decomposition: matrix is not tridiagonal");
      if (coupling.entries(i, j) != coupling.entries(j, i))
        throw ValidationError("supermode_decomposition: matrix is not symmetric");
    }

  const TridiagonalEigen<Scalar> eig =
      tridiagonal_eigen<Scalar>(coupling.diagonal(), coupling.offdiagonal());

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return eig.values(a) > eig.values(b);
  });

  SupermodeBasis<Scalar> basis;
  basis.lambda.resize(n);
  basis.modes.resize(n, n);
  for (int k = 0; k < n; ++k) {
    basis.lambda(k) = eig.values(order[k]);
    basis.modes.row(k) = eig.vectors.col(order[k]).transpose();
  }

  const Scalar scale = std::max(Scalar(1), basis.lambda.cwiseAbs().maxCoeff());
  const Scalar gap = Scalar(64) * std::numeric_limits<Scalar>::epsilon() * scale;
  for (Eigen::Index first = 0; first < n;) {
    Eigen::Index last = first + 1;
    while (last < n && abs(basis.lambda(last - 1) - basis.lambda(last)) <= gap) ++last;
    if (last - first > 1) detail::canonicalize_subspace(basis.modes, first, last);
    first = last;
  }
  detail::fix_row_signs(basis.modes);
  return basis;
}

template <typename Scalar>
SupermodeBasis<Scalar> supermode_decomposition(const ArrayConfig<Scalar>& config) {
  return supermode_decomposition(build_coupling_matrix(config));
}

/// Closed-form supermodes of a homogeneous array (f = 1):
/// modes(k, j) = sqrt(2/(N+1)) sin((j+1)(k+1)π/(N+1)), λ_k = 2 c0 cos((k+1)π/(N+1)).
template <typename Scalar = double>
SupermodeBasis<Scalar> homogeneous_closed_form(int n, Scalar c0 = Scalar(1)) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  if (n < 1) throw ValidationError("homogeneous_closed_form: N must be >= 1");
  const Scalar p = pi<Scalar>();
  const Scalar norm = sqrt(Scalar(2) / Scalar(n + 1));
  SupermodeBasis<Scalar> basis;
  basis.modes.resize(n, n);
  basis.lambda.resize(n);
  for (int k = 1; k <= n; ++k) {
    basis.lambda(k - 1) = Scalar(2) * c0 * cos(Scalar(k) * p / Scalar(n + 1));
    for (int j = 1; j <= n; ++j)
      basis.modes(k - 1, j - 1) = norm * sin(Scalar(j * k) * p / Scalar(n + 1));
  }
  // The middle eigenvalue of an odd array is zero analytically.
  if (n % 2 == 1) basis.lambda((n - 1) / 2) = Scalar(0);
  return basis;
}

/// 1-based index l = (N+1)/2 of the zero supermode. Only arrays with an odd
/// number of waveguides have one.
inline int zero_supermode_index(int n) {
  if (n < 1) throw ValidationError("zero_supermode_index: N must be >= 1");
  if (n % 2 == 0)
    throw ValidationError("no zero supermode: N = " + std::to_string(n) + " is even");
  return (n + 1) / 2;
}

}  // namespace anw
