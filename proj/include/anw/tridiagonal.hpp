#pragma once

#include "anw/types.hpp"

#include <limits>

namespace anw {

template <typename Scalar>
struct TridiagonalEigen {
  VectorX<Scalar> values;   // unordered
  MatrixX<Scalar> vectors;  // column i pairs with values(i)
};

namespace detail {

template <typename Scalar>
Scalar hypot2(const Scalar& a, const Scalar& b) {
  using std::abs;
  using std::sqrt;
  const Scalar aa = abs(a);
  const Scalar ab = abs(b);
  if (aa > ab) {
    const Scalar t = ab / aa;
    return aa * sqrt(Scalar(1) + t * t);
  }
  if (ab == Scalar(0)) return Scalar(0);
  const Scalar t = aa / ab;
  return ab * sqrt(Scalar(1) + t * t);
}

}  // namespace detail

/// Eigen-decomposition of a real symmetric tridiagonal matrix by the implicit
/// QL algorithm with Wilkinson-type shifts.
///
/// `diag` holds the n diagonal entries and `offdiag` the n-1 sub-diagonal
/// entries. Works for any real scalar type providing abs/sqrt and
/// std::numeric_limits<Scalar>::epsilon(), which lets the same routine run in
/// extended precision. Throws NumericalError if an eigenvalue fails to
/// converge within `max_iterations` QL sweeps.
template <typename Scalar>
TridiagonalEigen<Scalar> tridiagonal_eigen(const VectorX<Scalar>& diag,
                                           const VectorX<Scalar>& offdiag,
                                           int max_iterations = 60) {
  using std::abs;
  const Eigen::Index n = diag.size();
  if (n == 0) throw ValidationError("tridiagonal_eigen: empty matrix");
  if (offdiag.size() != n - 1)
    throw ValidationError("tridiagonal_eigen: off-diagonal must have n-1 entries");

  VectorX<Scalar> d = diag;
  VectorX<Scalar> e = VectorX<Scalar>::Zero(n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) e(i) = offdiag(i);
  MatrixX<Scalar> z = MatrixX<Scalar>::Identity(n, n);
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();

  for (Eigen::Index l = 0; l < n; ++l) {
    int iter = 0;
    Eigen::Index m = l;
    do {
      for (m = l; m + 1 < n; ++m) {
        const Scalar dd = abs(d(m)) + abs(d(m + 1));
        if (abs(e(m)) <= eps * dd) break;
      }
      if (m == l) break;
      if (iter++ == max_iterations)
        throw NumericalError("tridiagonal_eigen: no convergence for eigenvalue " +
                             std::to_string(l) + " after " + std::to_string(max_iterations) +
                             " iterations");

      Scalar g = (d(l + 1) - d(l)) / (Scalar(2) * e(l));
      Scalar r = detail::hypot2(g, Scalar(1));
      g = d(m) - d(l) + e(l) / (g + (g >= Scalar(0) ? abs(r) : -abs(r)));
      Scalar s(1), c(1), p(0);
      bool underflow = false;
      for (Eigen::Index i = m - 1; i >= l; --i) {
        const Scalar f = s * e(i);
        const Scalar b = c * e(i);
        r = detail::hypot2(f, g);
        e(i + 1) = r;
        if (r == Scalar(0)) {
          d(i + 1) -= p;
          e(m) = Scalar(0);
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d(i + 1) - p;
        r = (d(i) - g) * s + Scalar(2) * c * b;
        p = s * r;
        d(i + 1) = g + p;
        g = c * r - b;
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar t = z(k, i + 1);
          z(k, i + 1) = s * z(k, i) + c * t;
          z(k, i) = c * z(k, i) - s * t;
        }
      }
      if (underflow) continue;
      d(l) -= p;
      e(l) = g;
      e(m) = Scalar(0);
    } while (m != l);
  }
  return {std::move(d), std::move(z)};
}

}  // namespace anw
