#pragma once

// Propagation of quadratures along the array. Each supermode evolves under
// its own 2×2 symplectic block; the individual-mode picture follows from the
// orthogonal change of basis. A direct matrix exponential of the full
// generator is provided as an independent check.

#include "anw/expm.hpp"
#include "anw/gaussian.hpp"
#include "anw/lattice.hpp"
#include "anw/types.hpp"

#include <limits>
#include <utility>
#include <vector>

namespace anw {

enum class Regime { trigonometric, zero_eigenvalue, hyperbolic };

constexpr std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::trigonometric: return "trigonometric";
    case Regime::zero_eigenvalue: return "zero-eigenvalue";
    case Regime::hyperbolic: return "hyperbolic";
  }
  return "unknown";
}

inline constexpr double kZeroEigenvalueTolerance = 1e-12;

/// Parameters of one supermode.
///
/// In the trigonometric regime (|λ| > 2η) `r` is the squeezing parameter
/// ½ ln[(λ+2η)/(λ-2η)] and `frequency` is F = sign(λ) sqrt(λ² - 4η²). The
/// sign keeps the closed-form block exact for negative λ. In the other two
/// regimes `frequency` holds the real growth rate κ = sqrt(4η² - λ²) and `r`
/// is NaN (no bounded squeezing oscillation exists).
template <typename Scalar = double>
struct SqueezingParams {
  Scalar lambda{};
  Scalar eta{};
  Scalar r{};
  Scalar frequency{};
  Regime regime = Regime::trigonometric;
};

template <typename Scalar>
SqueezingParams<Scalar> squeezing_params(const Scalar& lambda, const Scalar& eta) {
  using std::abs;
  using std::log;
  using std::sqrt;
  if (!is_finite(eta) || eta < Scalar(0)) throw ValidationError("squeezing_params: eta must be >= 0");
  if (!is_finite(lambda)) throw ValidationError("squeezing_params: lambda must be finite");
  SqueezingParams<Scalar> p;
  p.lambda = lambda;
  p.eta = eta;
  const Scalar two_eta = Scalar(2) * eta;
  if (abs(lambda) <= Scalar(kZeroEigenvalueTolerance)) {
    p.regime = Regime::zero_eigenvalue;
    p.lambda = Scalar(0);
    p.frequency = two_eta;
    p.r = std::numeric_limits<Scalar>::quiet_NaN();
  } else if (abs(lambda) > two_eta) {
    p.regime = Regime::trigonometric;
    const Scalar f = sqrt(lambda * lambda - two_eta * two_eta);
    p.frequency = lambda > Scalar(0) ? f : Scalar(-f);
    p.r = Scalar(0.5) * log((lambda + two_eta) / (lambda - two_eta));
  } else {
    p.regime = Regime::hyperbolic;
    p.frequency = sqrt(two_eta * two_eta - lambda * lambda);
    p.r = std::numeric_limits<Scalar>::quiet_NaN();
  }
  return p;
}

/// Per-supermode generator [[0, -(λ-2η)], [λ+2η, 0]].
template <typename Scalar>
Matrix2<Scalar> supermode_generator(const Scalar& lambda, const Scalar& eta) {
  Matrix2<Scalar> g;
  g << Scalar(0), -(lambda - Scalar(2) * eta), lambda + Scalar(2) * eta, Scalar(0);
  return g;
}

/// S_k(z), mapping ξ_S,k(0) to ξ_S,k(z). Unit determinant in every regime.
template <typename Scalar>
Matrix2<Scalar> supermode_symplectic(const SqueezingParams<Scalar>& p, const Scalar& z) {
  using std::cos;
  using std::cosh;
  using std::exp;
  using std::sin;
  using std::sinh;
  if (!is_finite(z) || z < Scalar(0)) throw ValidationError("supermode_symplectic: z must be >= 0");
  Matrix2<Scalar> s;
  switch (p.regime) {
    case Regime::trigonometric: {
      const Scalar c = cos(p.frequency * z);
      const Scalar sn = sin(p.frequency * z);
      s << c, -exp(-p.r) * sn, exp(p.r) * sn, c;
      break;
    }
    case Regime::zero_eigenvalue: {
      const Scalar arg = Scalar(2) * p.eta * z;
      s << cosh(arg), sinh(arg), sinh(arg), cosh(arg);
      break;
    }
    case Regime::hyperbolic: {
      // Analytic continuation F → iκ of the trigonometric block.
      const Scalar kappa = p.frequency;
      const Scalar c = cosh(kappa * z);
      const Scalar sh = kappa > Scalar(0) ? Scalar(sinh(kappa * z) / kappa) : z;
      const Scalar a = p.lambda - Scalar(2) * p.eta;
      const Scalar b = p.lambda + Scalar(2) * p.eta;
      s << c, -a * sh, b * sh, c;
      break;
    }
  }
  if (!all_finite(s)) throw NumericalError("supermode_symplectic: overflow (4*eta*z too large for this scalar type)");
  return s;
}

/// 2×2 supermode covariance S Sᵀ, written out in closed form for the
/// trigonometric and zero-eigenvalue regimes.
template <typename Scalar>
Matrix2<Scalar> supermode_covariance(const SqueezingParams<Scalar>& p, const Scalar& z) {
  using std::cosh;
  using std::exp;
  using std::sin;
  using std::sinh;
  if (!is_finite(z) || z < Scalar(0)) throw ValidationError("supermode_covariance: z must be >= 0");
  Matrix2<Scalar> v;
  switch (p.regime) {
    case Regime::trigonometric: {
      // written as vacuum plus a correction in sin²(Fz) so z=0 gives I exactly
      const Scalar s1 = sin(p.frequency * z);
      const Scalar s2 = sin(Scalar(2) * p.frequency * z);
      const Scalar xx = Scalar(1) - Scalar(2) * exp(-p.r) * sinh(p.r) * s1 * s1;
      const Scalar yy = Scalar(1) + Scalar(2) * exp(p.r) * sinh(p.r) * s1 * s1;
      const Scalar xy = sinh(p.r) * s2;
      v << xx, xy, xy, yy;
      break;
    }
    case Regime::zero_eigenvalue: {
      const Scalar arg = Scalar(4) * p.eta * z;
      v << cosh(arg), sinh(arg), sinh(arg), cosh(arg);
      break;
    }
    case Regime::hyperbolic: {
      const Matrix2<Scalar> s = supermode_symplectic(p, z);
      v = s * s.transpose();
      break;
    }
  }
  if (!all_finite(v)) throw NumericalError("supermode_covariance: overflow (4*eta*z too large for this scalar type)");
  return v;
}

/// Generator Δ of dξ/dz = Δ ξ over interleaved quadratures.
template <typename Scalar = double>
struct Generator {
  MatrixX<Scalar> entries;

  int modes() const { return static_cast<int>(entries.rows() / 2); }
};

/// Nonlinear diagonal blocks [[0, 2η], [2η, 0]] and coupling blocks
/// C_j [[0, -1], [1, 0]] between neighbours j and j+1 (both directions).
template <typename Scalar>
Generator<Scalar> assemble_generator(const ArrayConfig<Scalar>& config) {
  config.validate();
  const int n = config.n;
  Generator<Scalar> g{MatrixX<Scalar>::Zero(2 * n, 2 * n)};
  const Scalar two_eta = Scalar(2) * config.eta;
  for (int j = 0; j < n; ++j) {
    g.entries(2 * j, 2 * j + 1) = two_eta;
    g.entries(2 * j + 1, 2 * j) = two_eta;
  }
  for (int j = 0; j + 1 < n; ++j) {
    const Scalar c = config.coupling(j);
    for (auto [a, b] : {std::pair{j, j + 1}, std::pair{j + 1, j}}) {
      g.entries(2 * a, 2 * b + 1) = -c;
      g.entries(2 * a + 1, 2 * b) = c;
    }
  }
  return g;
}

/// exp(Δ z) by scaling and squaring; independent of the supermode solution.
template <typename Scalar>
MatrixX<Scalar> propagate_numeric(const Generator<Scalar>& gen, const Scalar& z) {
  if (!is_finite(z) || z < Scalar(0)) throw ValidationError("propagate_numeric: z must be >= 0");
  return expm(gen.entries * z);
}

/// Block-diagonal supermode propagator diag{S_1(z), ..., S_N(z)}.
template <typename Scalar>
MatrixX<Scalar> supermode_propagator(const SupermodeBasis<Scalar>& basis, const Scalar& eta,
                                     const Scalar& z) {
  const int n = basis.size();
  MatrixX<Scalar> s = MatrixX<Scalar>::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k)
    s.template block<2, 2>(2 * k, 2 * k) = supermode_symplectic(squeezing_params(basis.lambda(k), eta), z);
  return s;
}

namespace detail {

// (Mᵀ⊗I₂) diag{B_k} (M⊗I₂) for 2×2 blocks B_k, one n×n product Mᵀ diag(B_k(a,b)) M
// per quadrature pair (a,b) instead of a dense 2n×2n triple product.
template <typename Scalar>
MatrixX<Scalar> mode_sum(const MatrixX<Scalar>& modes, const std::vector<Matrix2<Scalar>>& blocks) {
  const Eigen::Index n = modes.rows();
  MatrixX<Scalar> out(2 * n, 2 * n);
  VectorX<Scalar> d(n);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      for (Eigen::Index k = 0; k < n; ++k) d(k) = blocks[k](a, b);
      const MatrixX<Scalar> m = modes.transpose() * (d.asDiagonal() * modes);
      out(Eigen::seqN(a, n, 2), Eigen::seqN(b, n, 2)) = m;
    }
  return out;
}

}  // namespace detail

/// Full individual-mode propagator S(z) = (Mᵀ⊗I₂) diag{S_k(z)} (M⊗I₂).
template <typename Scalar>
MatrixX<Scalar> analytic_symplectic(const ArrayConfig<Scalar>& config,
                                    const SupermodeBasis<Scalar>& basis, const Scalar& z) {
  config.validate();
  if (basis.size() != config.n) throw ValidationError("analytic_symplectic: basis size mismatch");
  std::vector<Matrix2<Scalar>> blocks;
  for (int k = 0; k < config.n; ++k)
    blocks.push_back(supermode_symplectic(squeezing_params(basis.lambda(k), config.eta), z));
  return detail::mode_sum(basis.modes, blocks);
}

/// Vacuum-input covariance in the supermode basis: diag{V_k(z)}.
template <typename Scalar>
SupermodeCovariance<Scalar> covariance_supermode(const ArrayConfig<Scalar>& config,
                                                 const SupermodeBasis<Scalar>& basis,
                                                 const Scalar& z) {
  config.validate();
  if (basis.size() != config.n) throw ValidationError("covariance_supermode: basis size mismatch");
  const int n = config.n;
  MatrixX<Scalar> v = MatrixX<Scalar>::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k)
    v.template block<2, 2>(2 * k, 2 * k) = supermode_covariance(squeezing_params(basis.lambda(k), config.eta), z);
  return SupermodeCovariance<Scalar>(std::move(v));
}

/// Vacuum-input covariance over the individual waveguides at distance z:
/// V(ξ_i, ξ_j) = Σ_k M_{k,i} M_{k,j} V(ξ_S,k, ξ_S,k), including x-y blocks.
template <typename Scalar>
IndividualCovariance<Scalar> covariance_individual(const ArrayConfig<Scalar>& config,
                                                   const SupermodeBasis<Scalar>& basis,
                                                   const Scalar& z) {
  config.validate();
  if (basis.size() != config.n) throw ValidationError("covariance_individual: basis size mismatch");
  // same vacuum-offset form as change_basis, using the block structure
  std::vector<Matrix2<Scalar>> blocks;
  for (int k = 0; k < config.n; ++k)
    blocks.push_back(supermode_covariance(squeezing_params(basis.lambda(k), config.eta), z) -
                     Matrix2<Scalar>::Identity());
  MatrixX<Scalar> v = detail::mode_sum(basis.modes, blocks);
  v = (Scalar(0.5) * (v + v.transpose())).eval();
  v += MatrixX<Scalar>::Identity(2 * config.n, 2 * config.n);
  return IndividualCovariance<Scalar>(std::move(v));
}

/// True when any supermode of the basis lies in the hyperbolic regime
/// (0 < |λ| ≤ 2η). Such inputs fall outside the periodic-squeezing picture.
template <typename Scalar>
bool has_hyperbolic_modes(const SupermodeBasis<Scalar>& basis, const Scalar& eta) {
  for (int k = 0; k < basis.size(); ++k)
    if (squeezing_params(basis.lambda(k), eta).regime == Regime::hyperbolic) return true;
  return false;
}

/// n-th distance of maximum squeezing L = (2n-1)π/(2|F|) and of null
/// squeezing L' = nπ/|F|.
template <typename Scalar>
std::pair<Scalar, Scalar> squeezing_extrema(const SqueezingParams<Scalar>& p, int n) {
  using std::abs;
  if (n < 1) throw ValidationError("squeezing_extrema: n must be >= 1");
  if (p.regime != Regime::trigonometric || p.frequency == Scalar(0))
    throw ValidationError("squeezing_extrema: no periodic extrema outside the trigonometric regime");
  const Scalar f = abs(p.frequency);
  const Scalar pi_ = pi<Scalar>();
  return {Scalar(2 * n - 1) * pi_ / (Scalar(2) * f), Scalar(n) * pi_ / f};
}

}  // namespace anw
