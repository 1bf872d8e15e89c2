#pragma once

// Dense complex linear algebra for two-qubit Hilbert spaces.
//
// Basis convention (global): index = 2*a + b, where a (b) is the index of
// qubit A (B) and |+> (sigma^z = +1) maps to index 0. Subsystem A is the
// left, slow-varying tensor factor.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>

#include "qet/errors.hpp"

namespace qet {

using cplx = std::complex<double>;

inline constexpr double kHermitianTol = 1e-10;

template <std::size_t N>
struct Vec {
  std::array<cplx, N> amp{};

  static constexpr std::size_t size() { return N; }

  cplx& operator[](std::size_t i) { return amp[i]; }
  const cplx& operator[](std::size_t i) const { return amp[i]; }

  static Vec basis(std::size_t i) {
    Vec v;
    v.amp[i] = 1.0;
    return v;
  }

  double norm() const {
    double s = 0.0;
    for (const auto& a : amp) s += std::norm(a);
    return std::sqrt(s);
  }

  Vec normalized() const {
    const double n = norm();
    Vec r = *this;
    for (auto& a : r.amp) a /= n;
    return r;
  }

  friend Vec operator+(Vec a, const Vec& b) {
    for (std::size_t i = 0; i < N; ++i) a.amp[i] += b.amp[i];
    return a;
  }
  friend Vec operator-(Vec a, const Vec& b) {
    for (std::size_t i = 0; i < N; ++i) a.amp[i] -= b.amp[i];
    return a;
  }
  friend Vec operator*(cplx s, Vec a) {
    for (auto& x : a.amp) x *= s;
    return a;
  }
};

// <a|b>, conjugate-linear in the first argument.
template <std::size_t N>
cplx inner(const Vec<N>& a, const Vec<N>& b) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += std::conj(a[i]) * b[i];
  return s;
}

template <std::size_t N>
struct Mat {
  std::array<cplx, N * N> e{};

  static constexpr std::size_t dim() { return N; }

  cplx& operator()(std::size_t r, std::size_t c) { return e[r * N + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return e[r * N + c]; }

  static Mat zero() { return Mat{}; }

  static Mat identity() {
    Mat m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }

  static Mat diag(const std::array<double, N>& d) {
    Mat m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = d[i];
    return m;
  }

  Mat adjoint() const {
    Mat r;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) r(i, j) = std::conj((*this)(j, i));
    return r;
  }

  cplx trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < N; ++i) t += (*this)(i, i);
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& x : e) m = std::max(m, std::abs(x));
    return m;
  }

  double frobenius() const {
    double s = 0.0;
    for (const auto& x : e) s += std::norm(x);
    return std::sqrt(s);
  }

  Mat& operator+=(const Mat& o) {
    for (std::size_t i = 0; i < N * N; ++i) e[i] += o.e[i];
    return *this;
  }
  Mat& operator-=(const Mat& o) {
    for (std::size_t i = 0; i < N * N; ++i) e[i] -= o.e[i];
    return *this;
  }
  Mat& operator*=(cplx s) {
    for (auto& x : e) x *= s;
    return *this;
  }

  friend Mat operator+(Mat a, const Mat& b) { return a += b; }
  friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
  friend Mat operator*(cplx s, Mat a) { return a *= s; }
  friend Mat operator*(Mat a, cplx s) { return a *= s; }

  friend Mat operator*(const Mat& a, const Mat& b) {
    Mat r;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = 0; k < N; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{}) continue;
        for (std::size_t j = 0; j < N; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }

  friend Vec<N> operator*(const Mat& a, const Vec<N>& v) {
    Vec<N> r;
    for (std::size_t i = 0; i < N; ++i) {
      cplx s = 0.0;
      for (std::size_t j = 0; j < N; ++j) s += a(i, j) * v[j];
      r[i] = s;
    }
    return r;
  }
};

using Operator2 = Mat<2>;
using Operator4 = Mat<4>;
using StateVector4 = Vec<4>;

// |a><b|
template <std::size_t N>
Mat<N> outer(const Vec<N>& a, const Vec<N>& b) {
  Mat<N> m;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) m(i, j) = a[i] * std::conj(b[j]);
  return m;
}

template <std::size_t N>
double hermiticity_residual(const Mat<N>& m) {
  double r = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i; j < N; ++j) r = std::max(r, std::abs(m(i, j) - std::conj(m(j, i))));
  return r;
}

template <std::size_t N>
double unitarity_residual(const Mat<N>& m) {
  return (m.adjoint() * m - Mat<N>::identity()).max_abs();
}

template <std::size_t N>
Mat<N> commutator(const Mat<N>& a, const Mat<N>& b) {
  return a * b - b * a;
}

template <std::size_t N>
void require_hermitian(const Mat<N>& m, double tol = kHermitianTol) {
  const double r = hermiticity_residual(m);
  if (!(r <= tol)) throw NonHermitianInput(r);
}

enum class Axis { x, y, z };

inline Operator2 pauli(Axis axis) {
  using namespace std::complex_literals;
  Operator2 s;
  switch (axis) {
    case Axis::x:
      s(0, 1) = 1.0;
      s(1, 0) = 1.0;
      break;
    case Axis::y:
      s(0, 1) = -1i;
      s(1, 0) = 1i;
      break;
    case Axis::z:
      s(0, 0) = 1.0;
      s(1, 1) = -1.0;
      break;
  }
  return s;
}

// Kronecker product a (x) b with a as the slow factor.
template <std::size_t N, std::size_t M>
Mat<N * M> tensor(const Mat<N>& a, const Mat<M>& b) {
  Mat<N * M> r;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      for (std::size_t k = 0; k < M; ++k)
        for (std::size_t l = 0; l < M; ++l) r(i * M + k, j * M + l) = a(i, j) * b(k, l);
  return r;
}

template <std::size_t N>
struct EigenSystem {
  std::array<double, N> values{};  // ascending
  Mat<N> vectors;                  // column j pairs with values[j]

  Vec<N> vector(std::size_t j) const {
    Vec<N> v;
    for (std::size_t i = 0; i < N; ++i) v[i] = vectors(i, j);
    return v;
  }

  Mat<N> reconstruct() const { return vectors * Mat<N>::diag(values) * vectors.adjoint(); }
};

// Cyclic complex Jacobi diagonalization of a Hermitian matrix.
template <std::size_t N>
EigenSystem<N> hermitian_eig(const Mat<N>& m) {
  require_hermitian(m);

  Mat<N> a = m;
  Mat<N> v = Mat<N>::identity();
  const double stop = 1e-14 * std::max(1.0, m.frobenius());

  auto off_norm = [&a] {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 100 && off_norm() > stop; ++sweep) {
    for (std::size_t p = 0; p + 1 < N; ++p) {
      for (std::size_t q = p + 1; q < N; ++q) {
        const cplx apq = a(p, q);
        const double b = std::abs(apq);
        if (b < 1e-300) continue;
        const cplx phase = std::conj(apq / b);
        const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * b);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;

        // J = diag(1, phase) * [[c, s], [-s, c]] on the (p, q) plane.
        const cplx jpp = c, jpq = s, jqp = -s * phase, jqq = c * phase;

        // a <- a J
        for (std::size_t i = 0; i < N; ++i) {
          const cplx aip = a(i, p), aiq = a(i, q);
          a(i, p) = aip * jpp + aiq * jqp;
          a(i, q) = aip * jpq + aiq * jqq;
        }
        // a <- J^dagger a
        for (std::size_t j = 0; j < N; ++j) {
          const cplx apj = a(p, j), aqj = a(q, j);
          a(p, j) = std::conj(jpp) * apj + std::conj(jqp) * aqj;
          a(q, j) = std::conj(jpq) * apj + std::conj(jqq) * aqj;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        // v <- v J
        for (std::size_t i = 0; i < N; ++i) {
          const cplx vip = v(i, p), viq = v(i, q);
          v(i, p) = vip * jpp + viq * jqp;
          v(i, q) = vip * jpq + viq * jqq;
        }
      }
    }
  }

  std::array<std::size_t, N> order;
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&a](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  EigenSystem<N> es;
  for (std::size_t j = 0; j < N; ++j) {
    es.values[j] = a(order[j], order[j]).real();
    for (std::size_t i = 0; i < N; ++i) es.vectors(i, j) = v(i, order[j]);
  }
  return es;
}

template <std::size_t N>
std::array<double, N> eigenvalues(const Mat<N>& m) {
  return hermitian_eig(m).values;
}

// exp(-i t m) for Hermitian m.
template <std::size_t N>
Mat<N> matrix_exp_i(const EigenSystem<N>& es, double t) {
  Mat<N> d;
  for (std::size_t i = 0; i < N; ++i) d(i, i) = std::polar(1.0, -t * es.values[i]);
  return es.vectors * d * es.vectors.adjoint();
}

template <std::size_t N>
Mat<N> matrix_exp_i(const Mat<N>& m, double t) {
  return matrix_exp_i(hermitian_eig(m), t);
}

class DensityMatrix {
public:
  static DensityMatrix from_pure(const StateVector4& psi) {
    const double n = psi.norm();
    if (std::abs(n - 1.0) > 1e-10) throw NotNormalized(n);
    return DensityMatrix(outer(psi, psi));
  }

  // Validates hermiticity, unit trace and positivity (to 1e-10).
  static DensityMatrix from_matrix(const Operator4& m) {
    require_hermitian(m);
    const cplx tr = m.trace();
    if (std::abs(tr - 1.0) > 1e-10) throw DomainError("DensityMatrix: trace != 1");
    const auto ev = eigenvalues(m);
    if (ev.front() < -1e-10) throw DomainError("DensityMatrix: negative eigenvalue");
    return DensityMatrix(m);
  }

  static DensityMatrix maximally_mixed() { return DensityMatrix(0.25 * Operator4::identity()); }

  const Operator4& matrix() const { return rho_; }

private:
  explicit DensityMatrix(const Operator4& m) : rho_(m) {}
  Operator4 rho_;
};

// x ln x with the 0 ln 0 = 0 convention.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

enum class Subsystem { A, B };

// Reduced 2x2 operator on the kept qubit.
inline Operator2 partial_trace(const Operator4& rho, Subsystem keep) {
  Operator2 r;
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y)
      for (std::size_t s = 0; s < 2; ++s) {
        if (keep == Subsystem::B)
          r(x, y) += rho(2 * s + x, 2 * s + y);
        else
          r(x, y) += rho(2 * x + s, 2 * y + s);
      }
  return r;
}

inline Operator2 partial_trace(const DensityMatrix& rho, Subsystem keep) {
  return partial_trace(rho.matrix(), keep);
}

namespace detail {
inline double checked_real(cplx value, double scale) {
  if (std::abs(value.imag()) > 1e-12 * std::max(1.0, scale))
    throw NonHermitianInput(std::abs(value.imag()));
  return value.real();
}
}  // namespace detail

// <psi|op|psi>; psi need not be normalized.
inline double expectation(const StateVector4& psi, const Operator4& op) {
  require_hermitian(op);
  return detail::checked_real(inner(psi, op * psi), op.max_abs() * std::norm(psi.norm()));
}

inline double expectation(const DensityMatrix& rho, const Operator4& op) {
  require_hermitian(op);
  return detail::checked_real((rho.matrix() * op).trace(), op.max_abs());
}

}  // namespace qet
