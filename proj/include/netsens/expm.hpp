#pragma once

#include <array>
#include <cmath>

#include "netsens/error.hpp"
#include "netsens/linalg.hpp"

namespace netsens {

namespace detail {

inline double norm1(const Matrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().colwise().sum().maxCoeff();
}

// Numerator/denominator pieces U (odd part) and V (even part) of the
// degree-m Pade approximant to exp, evaluated with the usual Horner splits.
inline void pade_terms(const Matrix& a, int degree, Matrix& u, Matrix& v) {
  const auto n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  if (degree == 13) {
    static constexpr std::array<double, 14> b{64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                              1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                              670442572800.0,      33522128640.0,       1323241920.0,
                                              40840800.0,          960960.0,            16380.0,
                                              182.0,               1.0};
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    Matrix inner = b[13] * a6 + b[11] * a4 + b[9] * a2;
    Matrix odd = a6 * inner;
    odd += b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
    u = a * odd;
    inner = b[12] * a6 + b[10] * a4 + b[8] * a2;
    v = a6 * inner;
    v += b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
    return;
  }

  static constexpr std::array<double, 4> b3{120.0, 60.0, 12.0, 1.0};
  static constexpr std::array<double, 6> b5{30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
  static constexpr std::array<double, 8> b7{17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0};
  static constexpr std::array<double, 10> b9{17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                                             2162160.0,     110880.0,     3960.0,       90.0,        1.0};
  const double* b = degree == 3 ? b3.data() : degree == 5 ? b5.data() : degree == 7 ? b7.data() : b9.data();

  Matrix odd = b[1] * id;
  Matrix even = b[0] * id;
  Matrix power = id;
  for (int k = 2; k <= degree; k += 2) {
    power = power * a2;
    odd += b[k + 1] * power;
    even += b[k] * power;
  }
  u = a * odd;
  v = std::move(even);
}

} // namespace detail

// Matrix exponential by scaling and squaring with a diagonal Pade
// approximant of degree 3, 5, 7, 9 or 13 chosen from the 1-norm.
inline Matrix expm(const Matrix& a) {
  if (a.rows() != a.cols()) throw DataError("expm needs a square matrix");
  if (!a.allFinite()) throw DataError("expm input has non-finite entries");
  const auto n = a.rows();
  if (n == 0) return Matrix(0, 0);

  static constexpr std::array<double, 5> theta{1.495585217958292e-2, 2.539398330063230e-1, 9.504178996162932e-1,
                                               2.097847961257068e0, 5.371920351148152e0};
  static constexpr std::array<int, 5> degrees{3, 5, 7, 9, 13};

  const double norm = detail::norm1(a);
  Matrix u, v;
  int squarings = 0;
  bool done = false;
  for (std::size_t k = 0; k < 4 && !done; ++k) {
    if (norm <= theta[k]) {
      detail::pade_terms(a, degrees[k], u, v);
      done = true;
    }
  }
  if (!done) {
    if (norm > theta[4]) squarings = static_cast<int>(std::ceil(std::log2(norm / theta[4])));
    const Matrix scaled = a / std::ldexp(1.0, squarings);
    detail::pade_terms(scaled, 13, u, v);
  }

  Matrix result = (v - u).partialPivLu().solve(v + u);
  for (int s = 0; s < squarings; ++s) result = result * result;
  if (!result.allFinite()) throw OverflowError("matrix exponential overflows double precision");
  return result;
}

// exp(A) - I: the walk-counting series without its identity term.
inline Matrix exp0(const Matrix& a) {
  Matrix out = expm(a);
  out.diagonal().array() -= 1.0;
  return out;
}

inline double exp0(double x) { return std::expm1(x); }

} // namespace netsens
