#pragma once

// Covariance-matrix algebra for zero-mean Gaussian states. Quadratures are
// ordered interleaved, (x₁, y₁, x₂, y₂, ...), and the vacuum has unit
// variance in every quadrature.

#include "anw/lattice.hpp"
#include "anw/types.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <complex>
#include <string_view>
#include <vector>

namespace anw {

enum class Basis { individual, supermode };

constexpr std::string_view to_string(Basis b) {
  return b == Basis::individual ? "individual" : "supermode";
}

/// Second-moment matrix of a Gaussian state. The basis is part of the type,
/// so individual-mode and supermode covariances cannot be mixed by accident.
template <typename Scalar, Basis B>
class CovarianceMatrix {
 public:
  static constexpr Basis basis = B;

  CovarianceMatrix() = default;

  explicit CovarianceMatrix(MatrixX<Scalar> entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() % 2 != 0)
      throw ValidationError("covariance: matrix must be square with even dimension");
  }

  static CovarianceMatrix vacuum(int modes) {
    return CovarianceMatrix(MatrixX<Scalar>::Identity(2 * modes, 2 * modes));
  }

  const MatrixX<Scalar>& entries() const { return entries_; }
  int modes() const { return static_cast<int>(entries_.rows() / 2); }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

  /// 2×2 block (x_i, y_i; x_j, y_j) of modes i and j (0-based).
  Matrix2<Scalar> block(int i, int j) const { return entries_.template block<2, 2>(2 * i, 2 * j); }

 private:
  MatrixX<Scalar> entries_;
};

template <typename Scalar>
using IndividualCovariance = CovarianceMatrix<Scalar, Basis::individual>;

template <typename Scalar>
using SupermodeCovariance = CovarianceMatrix<Scalar, Basis::supermode>;

/// Ω = ⊕ [[0, 1], [-1, 0]] in interleaved ordering.
template <typename Scalar = double>
MatrixX<Scalar> symplectic_form(int modes) {
  MatrixX<Scalar> omega = MatrixX<Scalar>::Zero(2 * modes, 2 * modes);
  for (int j = 0; j < modes; ++j) {
    omega(2 * j, 2 * j + 1) = Scalar(1);
    omega(2 * j + 1, 2 * j) = Scalar(-1);
  }
  return omega;
}

/// Block-diagonal rotation taking (x_j, y_j) to (x_j(θ_j), y_j(θ_j)) with
/// x(θ) = x cos θ + y sin θ and y(θ) = x(θ + π/2).
template <typename Scalar>
MatrixX<Scalar> quadrature_rotation(const VectorX<Scalar>& theta) {
  using std::cos;
  using std::sin;
  const Eigen::Index n = theta.size();
  MatrixX<Scalar> r = MatrixX<Scalar>::Zero(2 * n, 2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Scalar c = cos(theta(j));
    const Scalar s = sin(theta(j));
    r(2 * j, 2 * j) = c;
    r(2 * j, 2 * j + 1) = s;
    r(2 * j + 1, 2 * j) = -s;
    r(2 * j + 1, 2 * j + 1) = c;
  }
  return r;
}

/// Covariance of the generalized quadratures (x_j(θ_j), y_j(θ_j)).
template <typename Scalar, Basis B>
CovarianceMatrix<Scalar, B> rotate_quadratures(const CovarianceMatrix<Scalar, B>& v,
                                               const VectorX<Scalar>& theta) {
  if (theta.size() != v.modes())
    throw ValidationError("rotate_quadratures: expected " + std::to_string(v.modes()) +
                          " phases, got " + std::to_string(theta.size()));
  const MatrixX<Scalar> r = quadrature_rotation(theta);
  MatrixX<Scalar> out = r * v.entries() * r.transpose();
  out = (Scalar(0.5) * (out + out.transpose())).eval();
  return CovarianceMatrix<Scalar, B>(std::move(out));
}

/// Supermode → individual basis: V = (Mᵀ⊗I₂) V_S (M⊗I₂).
/// M is orthogonal, so only the deviation from vacuum is transformed; the
/// vacuum then maps to the identity exactly.
template <typename Scalar>
IndividualCovariance<Scalar> change_basis(const SupermodeCovariance<Scalar>& v,
                                          const SupermodeBasis<Scalar>& basis) {
  if (basis.size() != v.modes()) throw ValidationError("change_basis: dimension mismatch");
  const MatrixX<Scalar> t = expand_to_quadratures(basis.modes);
  const auto id = MatrixX<Scalar>::Identity(t.rows(), t.cols());
  MatrixX<Scalar> out = id + t.transpose() * (v.entries() - id) * t;
  out = (Scalar(0.5) * (out + out.transpose())).eval();
  return IndividualCovariance<Scalar>(std::move(out));
}

/// Individual → supermode basis: V_S = (M⊗I₂) V (Mᵀ⊗I₂).
template <typename Scalar>
SupermodeCovariance<Scalar> change_basis(const IndividualCovariance<Scalar>& v,
                                         const SupermodeBasis<Scalar>& basis) {
  if (basis.size() != v.modes()) throw ValidationError("change_basis: dimension mismatch");
  const MatrixX<Scalar> t = expand_to_quadratures(basis.modes);
  const auto id = MatrixX<Scalar>::Identity(t.rows(), t.cols());
  MatrixX<Scalar> out = id + t * (v.entries() - id) * t.transpose();
  out = (Scalar(0.5) * (out + out.transpose())).eval();
  return SupermodeCovariance<Scalar>(std::move(out));
}

/// uᵀ V u: variance of the quadrature combination Σ u_i ξ_i.
template <typename Scalar, Basis B>
Scalar variance_of_combination(const CovarianceMatrix<Scalar, B>& v, const VectorX<Scalar>& coeffs) {
  if (coeffs.size() != v.entries().rows())
    throw ValidationError("variance_of_combination: expected " +
                          std::to_string(v.entries().rows()) + " coefficients");
  return coeffs.dot(v.entries() * coeffs);
}

/// Covariance of a subset of modes (0-based indices, in the given order).
template <typename Scalar, Basis B>
CovarianceMatrix<Scalar, B> restrict_modes(const CovarianceMatrix<Scalar, B>& v,
                                           const std::vector<int>& modes) {
  const auto k = static_cast<Eigen::Index>(modes.size());
  MatrixX<Scalar> out(2 * k, 2 * k);
  for (Eigen::Index a = 0; a < k; ++a) {
    if (modes[a] < 0 || modes[a] >= v.modes())
      throw ValidationError("restrict_modes: mode index out of range");
    for (Eigen::Index b = 0; b < k; ++b)
      out.template block<2, 2>(2 * a, 2 * b) = v.block(modes[a], modes[b]);
  }
  return CovarianceMatrix<Scalar, B>(std::move(out));
}

struct PhysicalityReport {
  bool symmetric = false;
  double symmetry_residual = 0;
  bool positive = false;
  double min_eigenvalue = 0;
  bool uncertainty_ok = false;
  double uncertainty_min_eigenvalue = 0;  // smallest eigenvalue of V + iΩ
  double purity = 0;                      // det V; 1 for pure states
  bool pure = false;

  bool physical() const { return symmetric && positive && uncertainty_ok; }
};

inline constexpr double kPhysicalityTolerance = 1e-9;

/// Symmetry, positivity, the uncertainty relation V + iΩ ⪰ 0 and det V.
/// Eigenvalue checks run in double; the determinant in Scalar.
template <typename Scalar, Basis B>
PhysicalityReport check_physicality(const CovarianceMatrix<Scalar, B>& v,
                                    double tolerance = kPhysicalityTolerance) {
  using std::abs;
  PhysicalityReport rep;
  const MatrixX<Scalar>& m = v.entries();
  const Eigen::MatrixXd md = m.template cast<double>();
  const double scale = std::max(1.0, md.cwiseAbs().maxCoeff());

  rep.symmetry_residual = (md - md.transpose()).cwiseAbs().maxCoeff();
  rep.symmetric = rep.symmetry_residual <= 1e-12 * scale;

  const Eigen::MatrixXd sym = 0.5 * (md + md.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  rep.min_eigenvalue = es.eigenvalues().minCoeff();
  // relative to the largest eigenvalue: in double the smallest one of a
  // strongly squeezed state (~1/λ_max) is below rounding
  rep.positive = rep.min_eigenvalue > -tolerance * std::max(1.0, es.eigenvalues().maxCoeff());

  const Eigen::MatrixXcd h =
      sym.cast<std::complex<double>>() + std::complex<double>(0, 1) * symplectic_form<double>(v.modes()).template cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs(h, Eigen::EigenvaluesOnly);
  rep.uncertainty_min_eigenvalue = hs.eigenvalues().minCoeff();
  rep.uncertainty_ok = rep.uncertainty_min_eigenvalue >= -tolerance;

  const Scalar det = m.partialPivLu().determinant();
  rep.purity = static_cast<double>(det);
  rep.pure = abs(det - Scalar(1)) <= Scalar(tolerance);
  return rep;
}

/// Symplectic eigenvalues ν_k ≥ 1 (moduli of the eigenvalues of iΩV), sorted
/// ascending. All equal 1 for a pure state.
template <typename Scalar, Basis B>
Eigen::VectorXd symplectic_eigenvalues(const CovarianceMatrix<Scalar, B>& v) {
  const Eigen::MatrixXd md = v.entries().template cast<double>();
  const Eigen::MatrixXd omega = symplectic_form<double>(v.modes());
  Eigen::EigenSolver<Eigen::MatrixXd> es(omega * md, false);
  std::vector<double> mags;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) mags.push_back(std::abs(es.eigenvalues()(i)));
  std::sort(mags.begin(), mags.end());
  Eigen::VectorXd nu(v.modes());
  for (int k = 0; k < v.modes(); ++k) nu(k) = 0.5 * (mags[2 * k] + mags[2 * k + 1]);
  return nu;
}

}  // namespace anw
