#include "kirchhoff/functional.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "kirchhoff/tridiag.hpp"

namespace kirchhoff {

void ProblemParams::validate_base() const {
  if (!(a > 0.0) || !(b > 0.0)) throw error(errc::invalid_input, "need a > 0, b > 0");
  if (!(p > 1.0)) throw error(errc::invalid_exponent, "need p > 1");
  if (!(lambda > 0.0) || !(lambda <= 1.0))
    throw error(errc::invalid_input, "need lambda in (0, 1]");
  if (!(delta_interval > 0.0) || !(delta_interval < 1.0) || lambda < delta_interval)
    throw error(errc::invalid_input, "need delta <= lambda <= 1 with delta in (0,1)");
}

void ProblemParams::require_manifold_regime() const {
  validate_base();
  if (!(p > 2.0) || !(p < 5.0))
    throw error(errc::invalid_exponent, "manifold operations need p in (2,5)");
}

void ProblemParams::require_nonexistence_regime() const {
  if (!(p > 1.0) || !(p <= 2.0))
    throw error(errc::out_of_hypothesis, "nonexistence regime needs p in (1,2]");
  if (!(a > 1.0)) throw error(errc::out_of_hypothesis, "nonexistence regime needs a > 1");
  if (!(b > 0.0)) throw error(errc::invalid_input, "need b > 0");
}

PotentialSpec PotentialSpec::constant(double value) {
  PotentialSpec s;
  s.kind_ = Kind::constant;
  s.v_inf_ = value;
  return s;
}

PotentialSpec PotentialSpec::radial(GridPtr grid, std::vector<double> v,
                                    std::vector<double> rvp, double v_inf) {
  if (!grid) throw error(errc::invalid_grid, "null grid");
  if (v.size() != grid->n()) throw error(errc::shape_mismatch, "V sample count");
  if (!rvp.empty() && rvp.size() != grid->n())
    throw error(errc::shape_mismatch, "rV' sample count");
  PotentialSpec s;
  s.kind_ = Kind::radial;
  s.grid_ = std::move(grid);
  s.v_ = std::move(v);
  s.rvp_ = std::move(rvp);
  s.v_inf_ = v_inf;
  return s;
}

PotentialSpec PotentialSpec::well_example(GridPtr grid, double v1) {
  auto r = grid->nodes();
  std::vector<double> v(grid->n()), rvp(grid->n());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double d = r[i] + 1.0;
    v[i] = v1 - 1.0 / d;
    rvp[i] = r[i] / (d * d);
  }
  return radial(std::move(grid), std::move(v), std::move(rvp), v1);
}

PotentialSpec PotentialSpec::from_csv(const std::string& path, GridPtr grid,
                                      double v_inf) {
  std::ifstream is(path);
  if (!is) throw error(errc::io_error, "cannot open " + path);
  std::string line;
  std::vector<double> rs, vs, rvps;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("r,", 0) == 0) continue;
    double r, v, rvp;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &r, &v, &rvp) != 3)
      throw error(errc::io_error, "bad potential row: " + line);
    rs.push_back(r);
    vs.push_back(v);
    rvps.push_back(rvp);
  }
  if (rs.size() < 2) throw error(errc::io_error, "potential file too short");
  auto interp = [&](double r, const std::vector<double>& y) {
    auto it = std::upper_bound(rs.begin(), rs.end(), r);
    if (it == rs.begin()) return y.front();
    if (it == rs.end()) return y.back();
    std::size_t j = static_cast<std::size_t>(it - rs.begin()) - 1;
    double w = (r - rs[j]) / (rs[j + 1] - rs[j]);
    return (1.0 - w) * y[j] + w * y[j + 1];
  };
  auto nodes = grid->nodes();
  std::vector<double> v(grid->n()), rvp(grid->n());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = interp(nodes[i], vs);
    rvp[i] = interp(nodes[i], rvps);
  }
  return radial(std::move(grid), std::move(v), std::move(rvp), v_inf);
}

std::vector<double> PotentialSpec::values_on(const RadialGrid& grid) const {
  if (kind_ == Kind::constant) return std::vector<double>(grid.n(), v_inf_);
  if (!grid_->same_mesh(grid)) throw error(errc::shape_mismatch, "potential on wrong grid");
  return v_;
}

std::vector<double> PotentialSpec::rvp_on(const RadialGrid& grid) const {
  if (kind_ == Kind::constant) return std::vector<double>(grid.n(), 0.0);
  if (rvp_.empty()) throw error(errc::incomplete_spec, "potential lacks rV' samples");
  if (!grid_->same_mesh(grid)) throw error(errc::shape_mismatch, "potential on wrong grid");
  return rvp_;
}

EnergyBreakdown breakdown(const RadialFunction& u, const ProblemParams& params,
                          const PotentialSpec& V) {
  if (!(params.p > 1.0)) throw error(errc::invalid_exponent, "need p > 1");
  EnergyBreakdown bd;
  bd.dirichlet = dirichlet_energy(u);
  bd.gradQ = params.a * bd.dirichlet;
  bd.kirchQ = params.b * bd.dirichlet * bd.dirichlet;
  const auto& g = u.grid();
  const auto uv = u.values();
  std::vector<double> f(uv.size());
  if (V.is_constant()) {
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = uv[i] * uv[i];
    bd.massQ = V.v_inf() * g.quad(f);
    bd.dvQ = 0.0;
  } else {
    auto vv = V.values_on(g);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = vv[i] * uv[i] * uv[i];
    bd.massQ = g.quad(f);
    auto rvp = V.rvp_on(g);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = rvp[i] * uv[i] * uv[i];
    bd.dvQ = g.quad(f);
  }
  bd.powQ = lq_norm_pow(u, params.p + 1.0);
  return bd;
}

double energy_I(const EnergyBreakdown& bd, const ProblemParams& params) {
  return 0.5 * bd.gradQ + 0.5 * bd.massQ + 0.25 * bd.kirchQ -
         params.lambda * bd.powQ / (params.p + 1.0);
}

double constraint_G(const EnergyBreakdown& bd, const ProblemParams& params) {
  return 1.5 * bd.gradQ + 2.5 * bd.massQ + 1.5 * bd.kirchQ -
         params.lambda * (params.p + 4.0) / (params.p + 1.0) * bd.powQ;
}

double constraint_G_full(const EnergyBreakdown& bd, const ProblemParams& params) {
  return constraint_G(bd, params) + 0.5 * bd.dvQ;
}

double pohozaev_P(const EnergyBreakdown& bd, const ProblemParams& params) {
  return 0.5 * bd.gradQ + 1.5 * bd.massQ + 0.5 * bd.dvQ + 0.5 * bd.kirchQ -
         3.0 * params.lambda / (params.p + 1.0) * bd.powQ;
}

double nehari_N(const EnergyBreakdown& bd, const ProblemParams& params) {
  return bd.gradQ + bd.massQ + bd.kirchQ - params.lambda * bd.powQ;
}

double phi(const EnergyBreakdown& bd, const ProblemParams& params) {
  return 0.25 * bd.gradQ + bd.massQ / 12.0 +
         params.lambda * (params.p - 2.0) / (6.0 * (params.p + 1.0)) * bd.powQ;
}

std::vector<double> gradient_I(const RadialFunction& u, const ProblemParams& params,
                               const PotentialSpec& V) {
  const auto& g = u.grid();
  const auto uv = u.values();
  const double d = dirichlet_energy(u);
  auto out = laplacian(u);
  const double coef = params.a + params.b * d;
  const double lam = params.lambda, p = params.p;
  if (V.is_constant()) {
    const double vc = V.v_inf();
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = coef * out[i] + vc * uv[i] -
               lam * std::pow(std::abs(uv[i]), p - 1.0) * uv[i];
  } else {
    auto vv = V.values_on(g);
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = coef * out[i] + vv[i] * uv[i] -
               lam * std::pow(std::abs(uv[i]), p - 1.0) * uv[i];
  }
  return out;
}

double smallest_schrodinger_eigenvalue(const RadialGrid& grid,
                                       std::span<const double> V) {
  // generalized problem (K + diag(V w)) x = mu diag(w) x on interior DOFs,
  // symmetrized to a plain tridiagonal via D^{-1/2} scaling.
  const std::size_t n = grid.n();
  if (V.size() != n) throw error(errc::shape_mismatch, "V sample count");
  Tridiag T = stiffness_tridiag(grid, 1.0);
  const auto w = grid.weights();
  const std::size_t m = n - 2;
  std::vector<double> diag(m), off(m - 1);
  for (std::size_t i = 0; i < m; ++i) {
    double wi = w[i + 1];
    diag[i] = (T.diag[i] + V[i + 1] * wi) / wi;
  }
  for (std::size_t i = 0; i + 1 < m; ++i)
    off[i] = T.upper[i] / std::sqrt(w[i + 1] * w[i + 2]);
  // Gershgorin bounds
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < m; ++i) {
    double r = (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < m ? std::abs(off[i]) : 0.0);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  auto count_below = [&](double x) {
    // Sturm sequence: number of eigenvalues < x
    std::size_t cnt = 0;
    double q = diag[0] - x;
    if (q < 0.0) ++cnt;
    for (std::size_t i = 1; i < m; ++i) {
      double o2 = off[i - 1] * off[i - 1];
      if (q == 0.0) q = 1e-300;
      q = diag[i] - x - o2 / q;
      if (q < 0.0) ++cnt;
    }
    return cnt;
  };
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
    double mid = 0.5 * (lo + hi);
    if (count_below(mid) >= 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

VHypothesesReport check_V_hypotheses(const PotentialSpec& V, const GridPtr& grid) {
  VHypothesesReport rep;
  auto vv = V.values_on(*grid);
  auto rvp = V.rvp_on(*grid);  // throws incomplete-spec when absent
  double v1min = std::numeric_limits<double>::infinity();
  double slack_max = -std::numeric_limits<double>::infinity();
  bool v2_nodewise = true;
  for (std::size_t i = 0; i < vv.size(); ++i) {
    v1min = std::min(v1min, vv[i] - rvp[i]);
    double slack = V.v_inf() - vv[i];
    slack_max = std::max(slack_max, slack);
    if (slack < 0.0) v2_nodewise = false;
  }
  rep.v1_min = v1min;
  rep.v1_ok = v1min >= 0.0;
  rep.v2_max_slack = slack_max;
  rep.v2_ok = v2_nodewise && slack_max > 0.0;
  rep.v3_quotient = smallest_schrodinger_eigenvalue(*grid, vv);
  rep.v3_ok = rep.v3_quotient > 0.0;
  return rep;
}

namespace {

// quotient R(u) = (a_weight dir + int V u^2) / (int |u|^q)^{2/q}
struct Quotient {
  const RadialGrid& g;
  std::vector<double> V;
  double aw, q;

  double numerator(const RadialFunction& u) const {
    const auto uv = u.values();
    std::vector<double> f(uv.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = V[i] * uv[i] * uv[i];
    return aw * dirichlet_energy(u) + g.quad(f);
  }
  double denominator(const RadialFunction& u) const {
    return std::pow(lq_norm_pow(u, q), 2.0 / q);
  }
  double value(const RadialFunction& u) const { return numerator(u) / denominator(u); }
};

}  // namespace

QuotientResult minimize_quotient(const GridPtr& grid, const PotentialSpec& V,
                                 double a_weight, double q,
                                 std::size_t max_iters, double tol) {
  if (!(q >= 1.0)) throw error(errc::invalid_exponent, "quotient needs q >= 1");
  Quotient Q{*grid, V.values_on(*grid), a_weight, q};
  const std::size_t n = grid->n();
  const auto w = grid->weights();

  RadialFunction u = RadialFunction::gaussian(grid, std::max(1.0, grid->r_max() / 24.0));
  double lq = lq_norm_pow(u, q);
  {
    auto& vals = u.mutable_values();
    double s = std::pow(lq, -1.0 / q);
    for (auto& x : vals) x *= s;
  }
  double R = Q.value(u);

  // preconditioner: a_weight K + diag((V+shift) w), shift keeps SPD
  double vmin = *std::min_element(Q.V.begin(), Q.V.end());
  double shift = vmin < 0.1 ? (0.1 - vmin) : 0.0;

  std::size_t it = 0;
  for (; it < max_iters; ++it) {
    const auto uv = u.values();
    auto Lu = laplacian(u);
    double den = Q.denominator(u);
    double lqq = lq_norm_pow(u, q);
    // gradient of R in the quad metric
    std::vector<double> grad(n);
    for (std::size_t i = 0; i < n; ++i) {
      double dnum = 2.0 * (a_weight * Lu[i] + Q.V[i] * uv[i]);
      double dden = 2.0 * std::pow(lqq, 2.0 / q - 1.0) *
                    std::pow(std::abs(uv[i]), q - 2.0) * uv[i];
      grad[i] = (dnum - R * dden) / den;
    }
    double gmax = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) gmax = std::max(gmax, std::abs(grad[i]));
    if (gmax <= tol * std::max(1.0, std::abs(R)))
      return {R, u, true, it};

    Tridiag T = stiffness_tridiag(*grid, a_weight);
    for (std::size_t i = 0; i + 2 < n; ++i)
      T.diag[i] += (Q.V[i + 1] + shift + 0.1) * w[i + 1];
    std::vector<double> rhs(n - 2);
    for (std::size_t i = 0; i + 2 < n; ++i) rhs[i] = w[i + 1] * grad[i + 1];
    std::vector<double> z(n, 0.0);
    auto sol = T.solve(rhs);
    for (std::size_t i = 0; i + 2 < n; ++i) z[i + 1] = sol[i];

    double s = 1.0;
    bool accepted = false;
    for (int back = 0; back < 50; ++back) {
      std::vector<double> cand(n);
      for (std::size_t i = 0; i < n; ++i) cand[i] = uv[i] - s * z[i];
      cand[n - 1] = 0.0;
      RadialFunction cu(grid, std::move(cand));
      double clq = lq_norm_pow(cu, q);
      if (clq > 1e-300) {
        double sc = std::pow(clq, -1.0 / q);
        for (auto& x : cu.mutable_values()) x *= sc;
        double Rc = Q.value(cu);
        if (Rc < R - 1e-12 * std::abs(R)) {
          u = std::move(cu);
          R = Rc;
          accepted = true;
          break;
        }
      }
      s *= 0.5;
    }
    if (!accepted) {
      // gradient flat in R but not pointwise small: report best value found
      return {R, u, true, it};
    }
  }
  return {R, u, false, it};
}

QuotientResult sobolev_constant(const GridPtr& grid, const PotentialSpec& V,
                                std::size_t max_iters) {
  auto res = minimize_quotient(grid, V, 1.0, 3.0, max_iters);
  if (!res.converged)
    throw error(errc::convergence_failure,
                "sobolev quotient minimization stalled at " + std::to_string(res.value));
  return res;
}

QuotientResult embedding_constant(const GridPtr& grid, const PotentialSpec& V,
                                  double a_weight, double p, std::size_t max_iters) {
  return minimize_quotient(grid, V, a_weight, p + 1.0, max_iters);
}

}  // namespace kirchhoff
