#pragma once

// Dense symmetric matrices of dimension <= 4. Inversion and determinants are
// written out in closed form so every formula can be read off directly.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace stateamp {

inline constexpr std::size_t kMaxDim = 4;

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Row-major square matrix with at most kMaxDim rows.
class SmallMatrix {
 public:
  SmallMatrix() = default;

  explicit SmallMatrix(std::size_t dim) : dim_(dim) {
    if (dim == 0 || dim > kMaxDim) {
      throw std::invalid_argument("SmallMatrix: dimension must be in [1, 4], got " +
                                  std::to_string(dim));
    }
  }

  SmallMatrix(std::initializer_list<std::initializer_list<double>> rows)
      : SmallMatrix(rows.size()) {
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != dim_) {
        throw std::invalid_argument("SmallMatrix: ragged initializer");
      }
      std::size_t j = 0;
      for (double v : row) (*this)(i, j++) = v;
      ++i;
    }
  }

  std::size_t dim() const { return dim_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * kMaxDim + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * kMaxDim + j]; }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  // Principal submatrix on the given index list (order preserved).
  SmallMatrix sub(const std::vector<std::size_t>& idx) const {
    SmallMatrix out(idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b) out(a, b) = (*this)(idx[a], idx[b]);
    return out;
  }

  bool is_symmetric(double tol) const {
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = i + 1; j < dim_; ++j)
        if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    return true;
  }

 private:
  std::size_t dim_ = 0;
  std::array<double, kMaxDim * kMaxDim> data_{};
};

namespace detail {

inline double det2(double a, double b, double c, double d) { return a * d - b * c; }

inline double det3(const SmallMatrix& m, std::size_t r0, std::size_t r1, std::size_t r2,
                   std::size_t c0, std::size_t c1, std::size_t c2) {
  return m(r0, c0) * det2(m(r1, c1), m(r1, c2), m(r2, c1), m(r2, c2)) -
         m(r0, c1) * det2(m(r1, c0), m(r1, c2), m(r2, c0), m(r2, c2)) +
         m(r0, c2) * det2(m(r1, c0), m(r1, c1), m(r2, c0), m(r2, c1));
}

}  // namespace detail

// Cofactor expansion; exact for the dimensions used here.
inline double determinant(const SmallMatrix& m) {
  switch (m.dim()) {
    case 1:
      return m(0, 0);
    case 2:
      return detail::det2(m(0, 0), m(0, 1), m(1, 0), m(1, 1));
    case 3:
      return detail::det3(m, 0, 1, 2, 0, 1, 2);
    case 4:
      return m(0, 0) * detail::det3(m, 1, 2, 3, 1, 2, 3) -
             m(0, 1) * detail::det3(m, 1, 2, 3, 0, 2, 3) +
             m(0, 2) * detail::det3(m, 1, 2, 3, 0, 1, 3) -
             m(0, 3) * detail::det3(m, 1, 2, 3, 0, 1, 2);
    default:
      throw std::invalid_argument("determinant: empty matrix");
  }
}

// Relative tolerance for singularity checks, scaled by the matrix trace.
inline constexpr double kSingularTol = 1e-10;

// Closed-form inverse for dim <= 3 via the adjugate. The pivot check compares
// |det| against tol * trace^dim, which is scale-invariant.
inline SmallMatrix inverse(const SmallMatrix& m, double tol = kSingularTol) {
  const std::size_t n = m.dim();
  if (n > 3) throw std::invalid_argument("inverse: closed form only for dim <= 3");
  const double det = determinant(m);
  const double scale = std::pow(std::abs(m.trace()), static_cast<double>(n));
  if (!(std::abs(det) > tol * scale) || !std::isfinite(det)) {
    throw SingularMatrixError("inverse: matrix is numerically singular (det=" +
                              std::to_string(det) + ")");
  }
  SmallMatrix inv(n);
  if (n == 1) {
    inv(0, 0) = 1.0 / m(0, 0);
  } else if (n == 2) {
    inv(0, 0) = m(1, 1) / det;
    inv(0, 1) = -m(0, 1) / det;
    inv(1, 0) = -m(1, 0) / det;
    inv(1, 1) = m(0, 0) / det;
  } else {
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        // cofactor C_ji goes to inv(i, j)
        std::size_t r[2], c[2];
        for (std::size_t k = 0, a = 0; k < 3; ++k)
          if (k != j) r[a++] = k;
        for (std::size_t k = 0, a = 0; k < 3; ++k)
          if (k != i) c[a++] = k;
        const double minor = detail::det2(m(r[0], c[0]), m(r[0], c[1]), m(r[1], c[0]), m(r[1], c[1]));
        inv(i, j) = (((i + j) % 2) ? -minor : minor) / det;
      }
    }
  }
  return inv;
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
inline std::vector<double> symmetric_eigenvalues(SmallMatrix a) {
  const std::size_t n = a.dim();
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

}  // namespace stateamp
