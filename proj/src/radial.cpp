#include "kirchhoff/radial.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace kirchhoff {

namespace {
constexpr double kPi = std::numbers::pi;

void require_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) throw error(errc::shape_mismatch, "non-finite sample");
}
}  // namespace

RadialGrid::RadialGrid(double r_max, std::size_t n) : r_max_(r_max), n_(n) {
  h_ = r_max / static_cast<double>(n - 1);
  nodes_.resize(n);
  for (std::size_t i = 0; i < n; ++i) nodes_[i] = h_ * static_cast<double>(i);
  nodes_.back() = r_max;

  weights_.resize(n);
  long double sum = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    double trap = (i == 0 || i == n - 1) ? 0.5 * h_ : h_;
    weights_[i] = trap * 4.0 * kPi * nodes_[i] * nodes_[i];
    sum += weights_[i];
  }
  // rescale so the constant profile integrates to the exact ball volume
  const long double vol = 4.0L / 3.0L * kPi * static_cast<long double>(r_max) * r_max * r_max;
  const double s = static_cast<double>(vol / sum);
  for (auto& w : weights_) w *= s;

  cell_vol_.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double r0 = nodes_[i], r1 = nodes_[i + 1];
    cell_vol_[i] = 4.0 / 3.0 * kPi * (r1 * r1 * r1 - r0 * r0 * r0);
  }
}

GridPtr RadialGrid::make(double r_max, std::size_t n) {
  if (!(r_max > 0.0) || !std::isfinite(r_max))
    throw error(errc::invalid_grid, "r_max must be positive");
  if (n < 16) throw error(errc::invalid_grid, "need at least 16 nodes");
  return std::shared_ptr<const RadialGrid>(new RadialGrid(r_max, n));
}

GridPtr make_grid(double r_max, std::size_t n) { return RadialGrid::make(r_max, n); }

double RadialGrid::quad(std::span<const double> f) const {
  if (f.size() != n_) throw error(errc::shape_mismatch, "sample count != grid size");
  long double acc = 0.0L;
  for (std::size_t i = 0; i < n_; ++i) acc += static_cast<long double>(weights_[i]) * f[i];
  return static_cast<double>(acc);
}

RadialFunction::RadialFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw error(errc::invalid_grid, "null grid");
  if (values_.size() != grid_->n())
    throw error(errc::shape_mismatch, "sample count != grid size");
  require_finite(values_);
  values_.back() = 0.0;
}

RadialFunction RadialFunction::zero(GridPtr grid) {
  std::vector<double> v(grid->n(), 0.0);
  return RadialFunction(std::move(grid), std::move(v));
}

RadialFunction RadialFunction::gaussian(GridPtr grid, double width, double amp,
                                        double center) {
  if (!(width > 0.0)) throw error(errc::invalid_input, "gaussian width must be positive");
  std::vector<double> v(grid->n());
  auto r = grid->nodes();
  for (std::size_t i = 0; i < v.size(); ++i) {
    double z = (r[i] - center) / width;
    v[i] = amp * std::exp(-z * z);
  }
  return RadialFunction(std::move(grid), std::move(v));
}

void RadialFunction::enforce_boundary() {
  require_finite(values_);
  values_.back() = 0.0;
}

std::vector<double> d_dr(const RadialFunction& u) {
  const auto& g = u.grid();
  const auto v = u.values();
  const std::size_t n = g.n();
  const double h = g.h();
  std::vector<double> du(n);
  du[0] = 0.0;  // even profile
  for (std::size_t i = 1; i + 1 < n; ++i) du[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
  du[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
  return du;
}

double dirichlet_energy(const RadialFunction& u) {
  const auto& g = u.grid();
  const auto v = u.values();
  const auto cv = g.cell_volumes();
  const std::size_t n = g.n();
  const double h = g.h();
  long double acc = 0.0L;
  // first cell borrows the second cell's slope (no u[0] reference)
  double s1 = (v[2] - v[1]) / h;
  acc += static_cast<long double>(cv[0] + cv[1]) * s1 * s1;
  for (std::size_t c = 2; c + 1 < n; ++c) {
    double s = (v[c + 1] - v[c]) / h;
    acc += static_cast<long double>(cv[c]) * s * s;
  }
  return static_cast<double>(acc);
}

std::vector<double> laplacian(const RadialFunction& u) {
  const auto& g = u.grid();
  const auto v = u.values();
  const auto cv = g.cell_volumes();
  const auto w = g.weights();
  const std::size_t n = g.n();
  const double h = g.h();
  // m = D^T Wbar D u (cells 0 and 1 merged on the slope (v2-v1)/h)
  std::vector<double> m(n, 0.0);
  {
    double f01 = (cv[0] + cv[1]) * (v[2] - v[1]) / (h * h);
    m[1] -= f01;
    m[2] += f01;
  }
  for (std::size_t c = 2; c + 1 < n; ++c) {
    double f = cv[c] * (v[c + 1] - v[c]) / (h * h);
    m[c] -= f;
    m[c + 1] += f;
  }
  std::vector<double> out(n);
  out[0] = 6.0 * (v[0] - v[1]) / (h * h);  // cosmetic; weightless node
  for (std::size_t j = 1; j < n; ++j) out[j] = m[j] / w[j];
  return out;
}

Norms norms(const RadialFunction& u) {
  Norms out;
  out.dirichlet = dirichlet_energy(u);
  const auto v = u.values();
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = v[i] * v[i];
  out.l2sq = u.grid().quad(sq);
  return out;
}

double lq_norm_pow(const RadialFunction& u, double q) {
  if (!(q >= 1.0)) throw error(errc::invalid_exponent, "lq requires q >= 1");
  const auto v = u.values();
  std::vector<double> f(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) f[i] = std::pow(std::abs(v[i]), q);
  return u.grid().quad(f);
}

RadialFunction rescale(const RadialFunction& u, double t) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw error(errc::invalid_scale, "scale parameter must be positive");
  const auto& g = u.grid();
  const auto v = u.values();
  const auto r = g.nodes();
  const std::size_t n = g.n();
  const double h = g.h();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double rq = r[i] / t;
    if (rq >= g.r_max()) {
      out[i] = 0.0;
      continue;
    }
    double x = rq / h;
    auto j = static_cast<std::size_t>(x);
    if (j + 1 >= n) j = n - 2;
    double frac = x - static_cast<double>(j);
    out[i] = t * ((1.0 - frac) * v[j] + frac * v[j + 1]);
  }
  out[n - 1] = 0.0;
  return RadialFunction(u.grid_ptr(), std::move(out));
}

void write_profile_csv(std::ostream& os, const RadialFunction& u) {
  char buf[64];
  os << "# r_max=" << u.grid().r_max() << " n=" << u.grid().n() << "\n";
  os << "r,value\n";
  auto r = u.grid().nodes();
  auto v = u.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g", r[i], v[i]);
    os << buf << "\n";
  }
}

void write_profile_csv(const std::string& path, const RadialFunction& u) {
  std::ofstream os(path);
  if (!os) throw error(errc::io_error, "cannot open " + path);
  write_profile_csv(os, u);
}

RadialFunction read_profile_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# r_max=", 0) != 0)
    throw error(errc::io_error, "missing profile header");
  double r_max = 0.0;
  std::size_t n = 0;
  if (std::sscanf(line.c_str(), "# r_max=%lf n=%zu", &r_max, &n) != 2)
    throw error(errc::io_error, "bad profile header: " + line);
  std::getline(is, line);  // column header
  std::vector<double> vals;
  vals.reserve(n);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    double r = 0.0, v = 0.0;
    if (std::sscanf(line.c_str(), "%lf,%lf", &r, &v) != 2)
      throw error(errc::io_error, "bad profile row: " + line);
    vals.push_back(v);
  }
  if (vals.size() != n) throw error(errc::io_error, "row count mismatch");
  return RadialFunction(make_grid(r_max, n), std::move(vals));
}

RadialFunction read_profile_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw error(errc::io_error, "cannot open " + path);
  return read_profile_csv(is);
}

}  // namespace kirchhoff
