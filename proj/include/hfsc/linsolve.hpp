#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "hfsc/errors.hpp"
#include "hfsc/model.hpp"

namespace hfsc {

/// LU factorization with partial pivoting of a dense complex matrix,
/// row-major.  Small N; no blocking.
struct LuFactors {
  std::vector<Complex> lu;   // packed L (unit diagonal) and U
  std::vector<int> perm;     // perm[i] = original row index of pivot row i
  std::size_t n = 0;
};

inline double norm1(const std::vector<Complex>& a, std::size_t n) {
  double best = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < n; ++i) col += std::abs(a[i * n + j]);
    best = std::max(best, col);
  }
  return best;
}

inline LuFactors lu_factor(std::vector<Complex> a, std::size_t n) {
  LuFactors f;
  f.n = n;
  f.perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.perm[i] = static_cast<int>(i);

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = std::abs(a[col * n + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double v = std::abs(a[r * n + col]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0) {
      throw Error(Errc::conditioning, "exactly singular matrix in LU solve",
                  std::numeric_limits<double>::infinity());
    }
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j)
        std::swap(a[piv * n + j], a[col * n + j]);
      std::swap(f.perm[piv], f.perm[col]);
    }
    const Complex d = a[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const Complex l = a[r * n + col] / d;
      a[r * n + col] = l;
      for (std::size_t j = col + 1; j < n; ++j) a[r * n + j] -= l * a[col * n + j];
    }
  }
  f.lu = std::move(a);
  return f;
}

/// Solves A x = b given the factorization of A.
inline std::vector<Complex> lu_solve(const LuFactors& f,
                                     const std::vector<Complex>& b) {
  const std::size_t n = f.n;
  std::vector<Complex> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  for (std::size_t i = 1; i < n; ++i) {
    Complex s = x[i];
    for (std::size_t j = 0; j < i; ++j) s -= f.lu[i * n + j] * x[j];
    x[i] = s;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    Complex s = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= f.lu[ii * n + j] * x[j];
    x[ii] = s / f.lu[ii * n + ii];
  }
  return x;
}

/// Solves A^H x = b using the same factorization (needed by the condition
/// estimator).  With P A = L U, A^H = U^H L^H P.
inline std::vector<Complex> lu_solve_adjoint(const LuFactors& f,
                                             const std::vector<Complex>& b) {
  const std::size_t n = f.n;
  std::vector<Complex> w(b);
  // U^H w' = b  (U^H is lower triangular)
  for (std::size_t i = 0; i < n; ++i) {
    Complex s = w[i];
    for (std::size_t j = 0; j < i; ++j) s -= std::conj(f.lu[j * n + i]) * w[j];
    w[i] = s / std::conj(f.lu[i * n + i]);
  }
  // L^H g = w'  (L^H is unit upper triangular)
  for (std::size_t ii = n; ii-- > 0;) {
    Complex s = w[ii];
    for (std::size_t j = ii + 1; j < n; ++j)
      s -= std::conj(f.lu[j * n + ii]) * w[j];
    w[ii] = s;
  }
  // undo pivoting: x[perm[i]] = g[i]
  std::vector<Complex> x(n);
  for (std::size_t i = 0; i < n; ++i) x[f.perm[i]] = w[i];
  return x;
}

/// Hager-style 1-norm estimate of ||A^{-1}||_1 from the LU factors.
inline double inverse_norm1_estimate(const LuFactors& f) {
  const std::size_t n = f.n;
  if (n == 1) return 1.0 / std::abs(f.lu[0]);

  std::vector<Complex> x(n, Complex(1.0 / static_cast<double>(n), 0.0));
  double est = 0.0;
  std::size_t last_j = n;  // sentinel
  for (int iter = 0; iter < 5; ++iter) {
    std::vector<Complex> y = lu_solve(f, x);
    double y1 = 0.0;
    for (const Complex& v : y) y1 += std::abs(v);
    est = std::max(est, y1);

    std::vector<Complex> xi(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double m = std::abs(y[i]);
      xi[i] = (m == 0.0) ? Complex(1.0, 0.0) : y[i] / m;
    }
    std::vector<Complex> z = lu_solve_adjoint(f, xi);
    std::size_t j = 0;
    double zmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double m = std::abs(z[i]);
      if (m > zmax) {
        zmax = m;
        j = i;
      }
    }
    double zx = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      zx += (std::conj(z[i]) * x[i]).real();
    if (zmax <= zx || j == last_j) break;
    std::fill(x.begin(), x.end(), Complex(0.0, 0.0));
    x[j] = Complex(1.0, 0.0);
    last_j = j;
  }
  return est;
}

/// 1-norm condition estimate of the matrix whose factors are given.
inline double condition_estimate(const LuFactors& f, double a_norm1) {
  if (!std::isfinite(a_norm1)) return std::numeric_limits<double>::infinity();
  const double inv = inverse_norm1_estimate(f);
  return a_norm1 * inv;
}

}  // namespace hfsc
