#pragma once

#include "anw/types.hpp"

#include <limits>
#include <type_traits>

namespace anw {

namespace detail {

// Largest ‖A‖₁ for which the [13/13] Padé approximant meets the unit
// roundoff of Scalar. For double this is Higham's θ13; for other types the
// leading truncation term (13!)² / (26! 27!) ‖A‖²⁷ is bounded by epsilon.
template <typename Scalar>
Scalar pade13_theta() {
  using std::pow;
  if constexpr (std::is_same_v<Scalar, double>) {
    return 5.371920351148152;
  } else {
    Scalar c(1);
    for (int k = 1; k <= 13; ++k) c *= Scalar(k) * Scalar(k);
    for (int k = 1; k <= 26; ++k) c /= Scalar(k);
    for (int k = 1; k <= 27; ++k) c /= Scalar(k);
    const Scalar theta = pow(std::numeric_limits<Scalar>::epsilon() / c, Scalar(1) / Scalar(27));
    return theta < Scalar(5.371920351148152) ? theta : Scalar(5.371920351148152);
  }
}

}  // namespace detail

/// Matrix exponential by scaling and squaring with a degree-13 Padé
/// approximant (Higham 2005). Throws NumericalError for non-finite input or
/// when the required scaling would underflow.
template <typename Derived>
MatrixX<typename Derived::Scalar> expm(const Eigen::MatrixBase<Derived>& input) {
  using Scalar = typename Derived::Scalar;
  using std::ceil;
  using std::log2;
  using std::pow;
  if (input.rows() != input.cols()) throw ValidationError("expm: matrix must be square");
  if (!all_finite(input)) throw NumericalError("expm: non-finite input");

  const Eigen::Index n = input.rows();
  const MatrixX<Scalar> ident = MatrixX<Scalar>::Identity(n, n);
  if (n == 0) return ident;

  const Scalar norm = input.cwiseAbs().colwise().sum().maxCoeff();
  if (norm == Scalar(0)) return ident;
  const Scalar theta = detail::pade13_theta<Scalar>();
  int squarings = 0;
  if (norm > theta) {
    const Scalar s = ceil(log2(norm / theta));
    if (s > Scalar(1000)) throw NumericalError("expm: scaling step underflow (norm too large)");
    squarings = static_cast<int>(s);
  }
  const MatrixX<Scalar> a = input * pow(Scalar(2), Scalar(-squarings));

  static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                 1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,       1323241920.0,
                                 40840800.0,          960960.0,            16380.0,
                                 182.0,               1.0};
  const MatrixX<Scalar> a2 = a * a;
  const MatrixX<Scalar> a4 = a2 * a2;
  const MatrixX<Scalar> a6 = a4 * a2;
  const MatrixX<Scalar> u_inner = a6 * (Scalar(b[13]) * a6 + Scalar(b[11]) * a4 + Scalar(b[9]) * a2) +
                                  Scalar(b[7]) * a6 + Scalar(b[5]) * a4 + Scalar(b[3]) * a2 +
                                  Scalar(b[1]) * ident;
  const MatrixX<Scalar> u = a * u_inner;
  const MatrixX<Scalar> v = a6 * (Scalar(b[12]) * a6 + Scalar(b[10]) * a4 + Scalar(b[8]) * a2) +
                            Scalar(b[6]) * a6 + Scalar(b[4]) * a4 + Scalar(b[2]) * a2 +
                            Scalar(b[0]) * ident;

  MatrixX<Scalar> r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < squarings; ++k) r = (r * r).eval();
  if (!all_finite(r)) throw NumericalError("expm: overflow while squaring");
  return r;
}

}  // namespace anw
