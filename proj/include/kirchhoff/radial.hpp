#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

// Uniform radial mesh on [0, r_max] carrying quadrature weights for
// integrals of radial profiles over R^3, i.e. sum_i w_i f_i ~ int f(|x|) dx.
//
// Node weights are trapezoid weights times the volume factor 4 pi r^2,
// rescaled by a single constant so that the constant-1 profile integrates
// to the exact ball volume.  The r=0 node therefore carries weight zero.
// The cell weights (exact shell volumes) back the staggered first-difference
// form used for Dirichlet energies; see functional.hpp.
class RadialGrid {
 public:
  static std::shared_ptr<const RadialGrid> make(double r_max, std::size_t n);

  double r_max() const noexcept { return r_max_; }
  std::size_t n() const noexcept { return n_; }
  double h() const noexcept { return h_; }
  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> cell_volumes() const noexcept { return cell_vol_; }

  double quad(std::span<const double> f) const;
  bool same_mesh(const RadialGrid& other) const noexcept {
    return n_ == other.n_ && r_max_ == other.r_max_;
  }

 private:
  RadialGrid(double r_max, std::size_t n);

  double r_max_;
  std::size_t n_;
  double h_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> cell_vol_;  // n-1 exact shell volumes
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr make_grid(double r_max, std::size_t n);

// Sampled radial profile with Dirichlet truncation u(r_max) = 0.
// The boundary sample is forced to zero on construction; all entries must
// be finite.
class RadialFunction {
 public:
  RadialFunction(GridPtr grid, std::vector<double> values);

  static RadialFunction zero(GridPtr grid);
  // u(r) = amp * exp(-((r - center)/width)^2)
  static RadialFunction gaussian(GridPtr grid, double width, double amp = 1.0,
                                 double center = 0.0);

  const RadialGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::vector<double>& mutable_values() noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }

  void enforce_boundary();  // clamps u(r_max)=0, re-checks finiteness

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

struct Norms {
  double dirichlet = 0.0;  // int |Du|^2
  double l2sq = 0.0;       // int u^2
};

// Pointwise derivative samples: central second-order differences in the
// interior, du(0)=0 by even extension, one-sided second-order at r_max.
std::vector<double> d_dr(const RadialFunction& u);

// Dirichlet energy int |Du|^2 via the staggered conservative form over
// exact shell volumes.  The first cell reuses the second cell's slope so
// the form never references the (weightless) r=0 sample; this makes
// quad(laplacian(u) * v) equal the associated bilinear form exactly.
double dirichlet_energy(const RadialFunction& u);

// L[u] ~ -(u'' + 2u'/r) with quad(L[u]*v) = staggered form of (u, v).
// The r=0 sample is set from the even-extension second difference; it
// carries no quadrature weight.
std::vector<double> laplacian(const RadialFunction& u);

Norms norms(const RadialFunction& u);
double lq_norm_pow(const RadialFunction& u, double q);  // int |u|^q, q >= 1

// Fiber scaling u_t(x) = t u(x/t) by linear interpolation, zero beyond the
// original support, boundary sample clamped to zero.
RadialFunction rescale(const RadialFunction& u, double t);

// CSV persistence: header "# r_max=<v> n=<v>", then "r,value" rows.
void write_profile_csv(std::ostream& os, const RadialFunction& u);
void write_profile_csv(const std::string& path, const RadialFunction& u);
RadialFunction read_profile_csv(std::istream& is);
RadialFunction read_profile_csv(const std::string& path);

}  // namespace kirchhoff
