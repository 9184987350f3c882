#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "kirchhoff/errors.hpp"
#include "kirchhoff/radial.hpp"

namespace kirchhoff {

// Tridiagonal matrix over the interior DOFs (nodes 1..n-2) with a pivoted
// solve.  lower[i] = A(i,i-1), diag[i] = A(i,i), upper[i] = A(i,i+1).
struct Tridiag {
  std::vector<double> lower, diag, upper;

  std::size_t size() const noexcept { return diag.size(); }

  // Gaussian elimination with partial pivoting (fill-in one superdiagonal).
  std::vector<double> solve(std::vector<double> rhs) const {
    const std::size_t m = diag.size();
    if (rhs.size() != m) throw error(errc::shape_mismatch, "tridiag rhs size");
    std::vector<double> a(lower), d(diag), c(upper), e(m, 0.0);
    for (std::size_t k = 0; k + 1 < m; ++k) {
      if (std::abs(a[k + 1]) > std::abs(d[k])) {
        std::swap(d[k], a[k + 1]);
        std::swap(c[k], d[k + 1]);
        if (k + 2 < m) std::swap(e[k], c[k + 1]);
        std::swap(rhs[k], rhs[k + 1]);
      }
      if (d[k] == 0.0) throw error(errc::singular_system, "zero pivot in tridiag");
      double f = a[k + 1] / d[k];
      d[k + 1] -= f * c[k];
      if (k + 2 < m) c[k + 1] -= f * e[k];
      rhs[k + 1] -= f * rhs[k];
    }
    std::vector<double> x(m);
    if (d[m - 1] == 0.0) throw error(errc::singular_system, "zero pivot in tridiag");
    x[m - 1] = rhs[m - 1] / d[m - 1];
    if (m >= 2) x[m - 2] = (rhs[m - 2] - c[m - 2] * x[m - 1]) / d[m - 2];
    for (std::size_t i = m; i-- > 2;) {
      std::size_t k = i - 2;
      x[k] = (rhs[k] - c[k] * x[k + 1] - e[k] * x[k + 2]) / d[k];
    }
    return x;
  }
};

// coefA * (staggered stiffness) on interior DOFs; cells 0 and 1 are merged
// on the slope (u2-u1)/h to match dirichlet_energy / laplacian.
inline Tridiag stiffness_tridiag(const RadialGrid& g, double coefA) {
  const std::size_t n = g.n();
  const std::size_t m = n - 2;
  const double h2 = g.h() * g.h();
  auto cv = g.cell_volumes();
  Tridiag T;
  T.lower.assign(m, 0.0);
  T.diag.assign(m, 0.0);
  T.upper.assign(m, 0.0);
  double wb1 = (cv[0] + cv[1]) / h2;
  T.diag[0] += wb1;
  if (m > 1) {
    T.upper[0] -= wb1;
    T.lower[1] -= wb1;
    T.diag[1] += wb1;
  }
  for (std::size_t c = 2; c + 1 < n; ++c) {
    double k = cv[c] / h2;
    std::size_t i = c - 1;  // DOF index of node c
    T.diag[i] += k;
    if (i + 1 < m) {
      T.upper[i] -= k;
      T.lower[i + 1] -= k;
      T.diag[i + 1] += k;
    }
  }
  for (auto& x : T.lower) x *= coefA;
  for (auto& x : T.diag) x *= coefA;
  for (auto& x : T.upper) x *= coefA;
  return T;
}

}  // namespace kirchhoff
