#include "kirchhoff/solver.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>

#include "kirchhoff/tridiag.hpp"

namespace kirchhoff {

void SolverOptions::validate() const {
  if (max_iters < 1) throw error(errc::invalid_input, "max_iters >= 1");
  if (!(grad_tol > 0.0)) throw error(errc::invalid_input, "grad_tol > 0");
  if (!(armijo_c > 0.0) || !(armijo_c < 1.0))
    throw error(errc::invalid_input, "armijo_c in (0,1)");
  if (!(step_init > 0.0)) throw error(errc::invalid_input, "step_init > 0");
}

namespace {

constexpr double kCollapsePow = 1e-14;

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

struct Engine {
  GridPtr grid;
  ProblemParams prm;
  std::vector<double> V;   // nodewise potential
  std::vector<double> dv;  // nodewise r V'
  bool const_V = true;

  const RadialGrid& g() const { return *grid; }
  std::size_t n() const { return grid->n(); }

  EnergyBreakdown bd_of(const std::vector<double>& u) const {
    RadialFunction uf(grid, u);
    EnergyBreakdown bd;
    bd.dirichlet = dirichlet_energy(uf);
    bd.gradQ = prm.a * bd.dirichlet;
    bd.kirchQ = prm.b * bd.dirichlet * bd.dirichlet;
    std::vector<double> f(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) f[i] = V[i] * u[i] * u[i];
    bd.massQ = g().quad(f);
    if (!const_V) {
      for (std::size_t i = 0; i < u.size(); ++i) f[i] = dv[i] * u[i] * u[i];
      bd.dvQ = g().quad(f);
    }
    bd.powQ = lq_norm_pow(uf, prm.p + 1.0);
    return bd;
  }

  std::vector<double> lap_of(const std::vector<double>& u) const {
    return laplacian(RadialFunction(grid, u));
  }

  std::vector<double> grad_of(const std::vector<double>& u,
                              const EnergyBreakdown& bd) const {
    auto out = lap_of(u);
    const double coef = prm.a + prm.b * bd.dirichlet;
    const double lam = prm.lambda, p = prm.p;
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = coef * out[i] + V[i] * u[i] -
               lam * std::pow(std::abs(u[i]), p - 1.0) * u[i];
    return out;
  }

  double Gfull(const EnergyBreakdown& bd) const { return constraint_G_full(bd, prm); }
  double N(const EnergyBreakdown& bd) const { return nehari_N(bd, prm); }
  double P(const EnergyBreakdown& bd) const { return pohozaev_P(bd, prm); }
  double I(const EnergyBreakdown& bd) const { return energy_I(bd, prm); }
  double norm_base(const EnergyBreakdown& bd) const {
    return 1.0 + bd.gradQ + bd.massQ;
  }

  double pde_res(const std::vector<double>& gv, const EnergyBreakdown& bd) const {
    double mx = 0.0;
    for (std::size_t i = 1; i + 1 < gv.size(); ++i) mx = std::max(mx, std::abs(gv[i]));
    return mx / norm_base(bd);
  }

  // exact amplitude root of G_full(m u) near m = 1
  bool amp_polish(std::vector<double>& u, const EnergyBreakdown& bd) const {
    const double p = prm.p;
    const double q = 1.5 * bd.gradQ + 2.5 * bd.massQ + 0.5 * bd.dvQ;
    const double k = 1.5 * bd.kirchQ;
    const double z = prm.lambda * (p + 4.0) / (p + 1.0) * bd.powQ;
    if (!(z > 0.0)) return false;
    auto f = [&](double m) { return q + k * m * m - z * std::pow(m, p - 1.0); };
    const double fscale = q + k + z;
    double m = 1.0;
    bool found = false;
    for (int it = 0; it < 100; ++it) {
      double fm = f(m);
      if (std::abs(fm) <= 1e-13 * fscale) {
        found = true;
        break;
      }
      double dfm = 2.0 * k * m - (p - 1.0) * z * std::pow(m, p - 2.0);
      if (dfm == 0.0) break;
      double m2 = m - fm / dfm;
      if (!(m2 > 0.25 && m2 < 4.0)) break;
      m = m2;
    }
    if (!found) {
      // bracketed fallback on [0.5, 2]
      double lo = 0.5, hi = 2.0, flo = f(lo);
      bool bracket = false;
      for (int k2 = 1; k2 <= 60; ++k2) {
        double x = 0.5 + 1.5 * k2 / 60.0;
        double fx = f(x);
        if (flo == 0.0 || flo * fx < 0.0) {
          hi = x;
          bracket = true;
          break;
        }
        lo = x;
        flo = fx;
      }
      if (!bracket) return false;
      for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        if (f(lo) * f(mid) <= 0.0)
          hi = mid;
        else
          lo = mid;
      }
      m = 0.5 * (lo + hi);
    }
    for (auto& x : u) x *= m;
    return true;
  }

  // clipped-well preconditioner solve: (coefA K + diag(max(V - lam p |u|^{p-1}, floor) w)) z = w g
  std::vector<double> precond(const std::vector<double>& u, const EnergyBreakdown& bd,
                              const std::vector<double>& gv) const {
    const std::size_t nn = n();
    Tridiag T = stiffness_tridiag(g(), prm.a + prm.b * bd.dirichlet);
    const auto w = g().weights();
    double vbar = 0.0;
    for (double x : V) vbar += x;
    vbar /= static_cast<double>(nn);
    const double floor = 0.05 * std::max(vbar, 1e-6);
    std::vector<double> rhs(nn - 2);
    for (std::size_t i = 0; i + 2 < nn; ++i) {
      double dvi = std::max(V[i + 1] - prm.lambda * prm.p *
                                           std::pow(std::abs(u[i + 1]), prm.p - 1.0),
                            floor);
      T.diag[i] += dvi * w[i + 1];
      rhs[i] = w[i + 1] * gv[i + 1];
    }
    auto sol = T.solve(rhs);
    std::vector<double> z(nn, 0.0);
    for (std::size_t i = 0; i + 2 < nn; ++i) z[i + 1] = sol[i];
    return z;
  }

  // doubly-bordered Newton step for the KKT system with constraints
  // G_full = 0 and N = 0; tau is a Levenberg shift.
  std::optional<std::vector<double>> newton_step(const std::vector<double>& u,
                                                 const EnergyBreakdown& bd,
                                                 const std::vector<double>& gv,
                                                 double tau) const {
    const std::size_t nn = n();
    const auto w = g().weights();
    const double p = prm.p, lam = prm.lambda;
    Tridiag T = stiffness_tridiag(g(), prm.a + prm.b * bd.dirichlet);
    for (std::size_t i = 0; i + 2 < nn; ++i) {
      double dvi = V[i + 1] - lam * p * std::pow(std::abs(u[i + 1]), p - 1.0) + tau;
      T.diag[i] += dvi * w[i + 1];
    }
    auto Lu = lap_of(u);
    auto solveT = [&](const std::vector<double>& v) {
      std::vector<double> rhs(nn - 2);
      for (std::size_t i = 0; i + 2 < nn; ++i) rhs[i] = w[i + 1] * v[i + 1];
      auto sol = T.solve(rhs);
      std::vector<double> z(nn, 0.0);
      for (std::size_t i = 0; i + 2 < nn; ++i) z[i + 1] = sol[i];
      return z;
    };
    auto qdot = [&](const std::vector<double>& x, const std::vector<double>& y) {
      long double acc = 0.0L;
      for (std::size_t i = 0; i < nn; ++i)
        acc += static_cast<long double>(w[i]) * x[i] * y[i];
      return static_cast<double>(acc);
    };
    std::vector<double> xL;
    try {
      xL = solveT(Lu);
    } catch (const error&) {
      return std::nullopt;
    }
    const double den = 1.0 + 2.0 * prm.b * qdot(Lu, xL);
    if (!std::isfinite(den) || std::abs(den) < 1e-300) return std::nullopt;
    auto Hinv = [&](const std::vector<double>& v) {
      auto xv = solveT(v);
      double ipv = qdot(Lu, xv);
      double c = 2.0 * prm.b * ipv / den;
      for (std::size_t i = 0; i < nn; ++i) xv[i] -= c * xL[i];
      return xv;
    };
    // constraint gradients
    std::vector<double> cG(nn), cN(nn);
    const double cA = 3.0 * prm.a + 6.0 * prm.b * bd.dirichlet;
    const double nA = 2.0 * prm.a + 4.0 * prm.b * bd.dirichlet;
    for (std::size_t i = 0; i < nn; ++i) {
      double pw = std::pow(std::abs(u[i]), p - 1.0) * u[i];
      cG[i] = cA * Lu[i] + 5.0 * V[i] * u[i] + dv[i] * u[i] - lam * (p + 4.0) * pw;
      cN[i] = nA * Lu[i] + 2.0 * V[i] * u[i] - lam * (p + 1.0) * pw;
    }
    std::vector<double> Hg, HG, HN;
    try {
      Hg = Hinv(gv);
      HG = Hinv(cG);
      HN = Hinv(cN);
    } catch (const error&) {
      return std::nullopt;
    }
    const double A11 = qdot(cG, HG), A12 = qdot(cG, HN);
    const double A21 = qdot(cN, HG), A22 = qdot(cN, HN);
    const double b1 = qdot(cG, Hg) - Gfull(bd);
    const double b2 = qdot(cN, Hg) - N(bd);
    const double det = A11 * A22 - A12 * A21;
    if (!std::isfinite(det) || std::abs(det) < 1e-300) return std::nullopt;
    const double nu1 = (A22 * b1 - A12 * b2) / det;
    const double nu2 = (-A21 * b1 + A11 * b2) / det;
    std::vector<double> d(nn);
    for (std::size_t i = 0; i < nn; ++i) d[i] = Hg[i] - nu1 * HG[i] - nu2 * HN[i];
    if (!std::isfinite(d[nn / 2])) return std::nullopt;
    return d;
  }
};

Engine make_engine(const ProblemParams& prm, const PotentialSpec& V, const GridPtr& grid) {
  Engine e;
  e.grid = grid;
  e.prm = prm;
  e.V = V.values_on(*grid);
  e.const_V = V.is_constant();
  e.dv = e.const_V ? std::vector<double>(grid->n(), 0.0) : V.rvp_on(*grid);
  return e;
}

void set_origin_sample(std::vector<double>& u) {
  if (u.size() >= 3) u[0] = (4.0 * u[1] - u[2]) / 3.0;  // even extension
}

Residuals residuals_of(const Engine& e, const std::vector<double>& u,
                       const EnergyBreakdown& bd) {
  Residuals r;
  auto gv = e.grad_of(u, bd);
  double nb = e.norm_base(bd);
  r.pde_residual = e.pde_res(gv, bd);
  r.pohozaev_residual = std::abs(e.P(bd)) / nb;
  r.g_residual = std::abs(e.Gfull(bd)) / nb;
  return r;
}

SolveReport run_solve(Engine& e, const SolverOptions& opts,
                      const std::optional<RadialFunction>& start, bool general_V) {
  opts.validate();
  const std::size_t nn = e.n();
  std::vector<double> u;
  if (start) {
    if (!start->grid().same_mesh(e.g()))
      throw error(errc::shape_mismatch, "start profile on wrong grid");
    u.assign(start->values().begin(), start->values().end());
  } else {
    double w = opts.seed_width > 0.0 ? opts.seed_width
                                     : std::max(1.0, e.g().r_max() / 20.0);
    auto gf = RadialFunction::gaussian(e.grid, w);
    u.assign(gf.values().begin(), gf.values().end());
  }
  u.back() = 0.0;

  SolveReport rep{RadialFunction::zero(e.grid)};
  rep.upper_bound_only = general_V;

  auto bd = e.bd_of(u);
  if (!(bd.powQ > kCollapsePow)) throw error(errc::collapse, "seed has no mass");

  // initial projection onto the constraint set
  double t0 = 1.0;
  if (general_V) {
    RadialFunction uf(e.grid, u);
    PotentialSpec Vspec = PotentialSpec::radial(e.grid, e.V, e.dv, e.V.back());
    auto fm = fiber_max_general(uf, e.prm, Vspec);
    t0 = fm.t_star;
  } else {
    auto fm = fiber_max(fiber_poly(bd, e.prm));
    t0 = fm.t_star;
  }
  if (std::abs(t0 - 1.0) > 1e-3) {
    auto ut = rescale(RadialFunction(e.grid, u), t0);
    u.assign(ut.values().begin(), ut.values().end());
  }
  bd = e.bd_of(u);
  e.amp_polish(u, bd);
  bd = e.bd_of(u);
  rep.t_history.push_back(t0);

  double Eu = e.I(bd);
  rep.energy_history.push_back(Eu);

  enum class Mode { descent, newton };
  Mode mode = Mode::descent;
  std::size_t stall = 0, newton_fails = 0;
  std::size_t it = 0;

  for (; it < opts.max_iters; ++it) {
    if (!(bd.powQ > kCollapsePow)) throw error(errc::collapse, "iterate collapsed to zero");
    auto gv = e.grad_of(u, bd);
    const double nb = e.norm_base(bd);
    const double res = e.pde_res(gv, bd);
    const double poh = std::abs(e.P(bd)) / nb;
    const double gres = std::abs(e.Gfull(bd)) / nb;
    if (res <= opts.grad_tol && poh <= opts.poh_tol && gres <= opts.g_tol) {
      rep.converged = true;
      break;
    }
    if (mode == Mode::descent && res <= opts.newton_trigger) mode = Mode::newton;

    if (mode == Mode::newton) {
      double umax = 0.0;
      for (double x : u) umax = std::max(umax, std::abs(x));
      double gmax = res * nb;
      double tau = (res < 1e-7) ? 0.0 : gmax / std::max(umax, 1e-30);
      bool ok = false;
      for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
        auto d = e.newton_step(u, bd, gv, tau);
        if (d && all_finite(*d)) {
          std::vector<double> cand(nn);
          for (std::size_t i = 0; i < nn; ++i) cand[i] = u[i] - (*d)[i];
          cand.back() = 0.0;
          auto bdc = e.bd_of(cand);
          if (bdc.powQ > kCollapsePow) {
            e.amp_polish(cand, bdc);
            bdc = e.bd_of(cand);
            auto gc = e.grad_of(cand, bdc);
            double resc = e.pde_res(gc, bdc);
            if (std::isfinite(resc) && resc < res * (1.0 - 1e-4)) {
              u = std::move(cand);
              bd = bdc;
              Eu = e.I(bd);
              ok = true;
            }
          }
        }
        tau = (tau > 0.0) ? tau * 8.0 : std::max(1e-6, res);
      }
      rep.energy_history.push_back(Eu);
      rep.t_history.push_back(1.0);
      if (ok) {
        newton_fails = 0;
        continue;
      }
      ++newton_fails;
      if (newton_fails < 2) continue;
      mode = Mode::descent;  // newton exhausted; let descent reshape
    }

    // descent step with Armijo on the constrained energy
    std::vector<double> z;
    try {
      z = e.precond(u, bd, gv);
    } catch (const error&) {
      z = gv;  // raw gradient fallback
    }
    if (!all_finite(z)) z = gv;
    long double gz_acc = 0.0L;
    {
      auto w = e.g().weights();
      for (std::size_t i = 0; i < nn; ++i)
        gz_acc += static_cast<long double>(w[i]) * gv[i] * z[i];
    }
    const double gz = static_cast<double>(gz_acc);
    double s = opts.step_init;
    bool ok = false;
    double t_used = 1.0;
    for (int back = 0; back < 60 && !ok; ++back, s *= 0.5) {
      std::vector<double> cand(nn);
      if (opts.enforce_positivity)
        for (std::size_t i = 0; i < nn; ++i) cand[i] = std::abs(u[i] - s * z[i]);
      else
        for (std::size_t i = 0; i < nn; ++i) cand[i] = u[i] - s * z[i];
      cand.back() = 0.0;
      if (!all_finite(cand)) continue;
      auto bdc = e.bd_of(cand);
      if (!(bdc.powQ > kCollapsePow)) continue;
      double tc = 1.0;
      if (!general_V) {
        auto fm = fiber_max(fiber_poly(bdc, e.prm));
        tc = fm.t_star;
        if (std::abs(tc - 1.0) > 0.05) {
          auto ut = rescale(RadialFunction(e.grid, cand), tc);
          cand.assign(ut.values().begin(), ut.values().end());
          bdc = e.bd_of(cand);
        }
      }
      if (!e.amp_polish(cand, bdc)) continue;
      bdc = e.bd_of(cand);
      double Ec = e.I(bdc);
      if (Ec <= Eu - opts.armijo_c * s * gz) {
        u = std::move(cand);
        bd = bdc;
        Eu = Ec;
        ok = true;
        t_used = tc;
      }
    }
    rep.energy_history.push_back(Eu);
    rep.t_history.push_back(t_used);
    if (!ok) {
      ++stall;
      if (mode == Mode::descent && stall >= 2) {
        mode = Mode::newton;
        stall = 0;
        newton_fails = 0;
      } else if (stall >= 5) {
        break;  // floor reached; report best effort
      }
    } else {
      stall = 0;
    }
  }

  set_origin_sample(u);
  bd = e.bd_of(u);
  rep.profile = RadialFunction(e.grid, std::move(u));
  rep.bd = bd;
  rep.energy = e.I(bd);
  {
    std::vector<double> uv(rep.profile.values().begin(), rep.profile.values().end());
    rep.residuals = residuals_of(e, uv, bd);
  }
  rep.iterations = it;
  rep.converged = rep.residuals.pde_residual <= opts.grad_tol &&
                  rep.residuals.pohozaev_residual <= opts.poh_tol &&
                  rep.residuals.g_residual <= opts.g_tol;
  return rep;
}

}  // namespace

SolveReport solve_limit_ground_state(const ProblemParams& params, double v_inf,
                                     const GridPtr& grid, const SolverOptions& opts) {
  params.require_manifold_regime();
  if (!(v_inf > 0.0)) throw error(errc::invalid_input, "v_inf must be positive");
  auto V = PotentialSpec::constant(v_inf);
  Engine e = make_engine(params, V, grid);
  std::optional<RadialFunction> start;
  if (opts.seed_kind == SolverOptions::Seed::custom)
    throw error(errc::invalid_input, "custom seed requires solve entry with a profile");
  return run_solve(e, opts, start, /*general_V=*/false);
}

SolveReport solve_V_ground_state(const ProblemParams& params, const PotentialSpec& V,
                                 const GridPtr& grid, const SolverOptions& opts) {
  params.require_manifold_regime();
  if (V.is_constant()) {
    auto rep = solve_limit_ground_state(params, V.v_inf(), grid, opts);
    return rep;
  }
  auto hyp = check_V_hypotheses(V, grid);
  if (!hyp.all_ok())
    throw error(errc::out_of_hypothesis, "potential fails the sampled hypotheses");
  // start from the projected limit ground state
  auto limit = solve_limit_ground_state(params, V.v_inf(), grid, opts);
  Engine e = make_engine(params, V, grid);
  auto rep = run_solve(e, opts, limit.profile, /*general_V=*/true);
  rep.upper_bound_only = true;
  return rep;
}

double mountain_pass_value(const ProblemParams& params, double v_inf,
                           const std::optional<RadialFunction>& u_ref,
                           const GridPtr& grid, std::size_t n_gaussians,
                           std::size_t n_bumps, std::uint64_t seed) {
  params.require_manifold_regime();
  if (n_gaussians == 0 && n_bumps == 0 && !u_ref)
    throw error(errc::invalid_input, "empty probe family");
  auto V = PotentialSpec::constant(v_inf);
  double best = std::numeric_limits<double>::infinity();
  auto probe_value = [&](const RadialFunction& u) {
    auto bd = breakdown(u, params, V);
    if (!(bd.powQ > 0.0)) return std::numeric_limits<double>::infinity();
    return fiber_max(fiber_poly(bd, params)).value;
  };
  const double wmin = 0.5, wmax = grid->r_max() / 6.0;
  for (std::size_t k = 0; k < n_gaussians; ++k) {
    double f = n_gaussians == 1 ? 0.0 : static_cast<double>(k) / (n_gaussians - 1);
    double w = wmin * std::pow(wmax / wmin, f);
    best = std::min(best, probe_value(RadialFunction::gaussian(grid, w)));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> Uc(0.0, grid->r_max() / 8.0);
  std::uniform_real_distribution<double> Uw(1.0, grid->r_max() / 8.0);
  std::uniform_real_distribution<double> Ua(0.25, 2.0);
  for (std::size_t k = 0; k < n_bumps; ++k) {
    std::vector<double> v(grid->n(), 0.0);
    auto r = grid->nodes();
    for (int b = 0; b < 3; ++b) {
      double c = Uc(rng), w = Uw(rng), amp = Ua(rng);
      for (std::size_t i = 0; i < v.size(); ++i) {
        double z = (r[i] - c) / w;
        v[i] += amp * std::exp(-z * z);
      }
    }
    best = std::min(best, probe_value(RadialFunction(grid, std::move(v))));
  }
  if (u_ref) best = std::min(best, probe_value(*u_ref));
  return best;
}

std::vector<SweepRow> lambda_sweep(const ProblemParams& params_template,
                                   const std::vector<double>& lambda_values,
                                   const PotentialSpec& V, const GridPtr& grid,
                                   const SolverOptions& opts) {
  if (lambda_values.empty()) throw error(errc::invalid_input, "empty lambda list");
  for (std::size_t i = 0; i < lambda_values.size(); ++i) {
    double l = lambda_values[i];
    if (l < params_template.delta_interval - 1e-12 || l > 1.0 + 1e-12)
      throw error(errc::invalid_input, "lambda outside [delta, 1]");
    if (i > 0 && l <= lambda_values[i - 1])
      throw error(errc::invalid_input, "lambda list must be strictly increasing");
  }

  struct RowResult {
    SweepRow row;
    std::optional<RadialFunction> profile;
  };
  auto solve_row = [&](double lam) -> RowResult {
    RowResult rr;
    rr.row.lambda = lam;
    ProblemParams prm = params_template;
    prm.lambda = lam;
    try {
      auto limit = solve_limit_ground_state(prm, V.v_inf(), grid, opts);
      rr.row.m_inf = limit.energy;
      if (V.is_constant()) {
        rr.row.c_lambda = limit.energy;
        rr.profile = limit.profile;
      } else {
        Engine e = make_engine(prm, V, grid);
        auto rep = run_solve(e, opts, limit.profile, /*general_V=*/true);
        rr.row.c_lambda = rep.energy;
        rr.profile = rep.profile;
      }
      rr.row.gap = rr.row.m_inf - rr.row.c_lambda;
      rr.row.ok = true;
    } catch (const error& err) {
      rr.row.ok = false;
      rr.row.note = err.what();
    }
    return rr;
  };

  std::vector<std::future<RowResult>> futures;
  futures.reserve(lambda_values.size());
  for (double lam : lambda_values)
    futures.push_back(std::async(std::launch::async, solve_row, lam));
  std::vector<RowResult> results;
  results.reserve(futures.size());
  for (auto& f : futures) results.push_back(f.get());

  // monotone post-pass: the previous row's profile is a valid probe at the
  // current lambda, so min it into the upper bound.
  for (std::size_t k = 1; k < results.size(); ++k) {
    if (!results[k].row.ok || !results[k - 1].row.ok || !results[k - 1].profile)
      continue;
    ProblemParams prm = params_template;
    prm.lambda = results[k].row.lambda;
    try {
      auto fm = fiber_max_general(*results[k - 1].profile, prm, V);
      if (fm.value < results[k].row.c_lambda) {
        results[k].row.c_lambda = fm.value;
        results[k].row.gap = results[k].row.m_inf - results[k].row.c_lambda;
        results[k].profile = rescale(*results[k - 1].profile, fm.t_star);
      }
    } catch (const error&) {
      // keep the row's own estimate
    }
  }

  std::vector<SweepRow> rows;
  rows.reserve(results.size());
  for (auto& rr : results) rows.push_back(rr.row);
  return rows;
}

Residuals residual_report(const RadialFunction& u, const ProblemParams& params,
                          const PotentialSpec& V) {
  Engine e = make_engine(params, V, u.grid_ptr());
  std::vector<double> uv(u.values().begin(), u.values().end());
  auto bd = e.bd_of(uv);
  return residuals_of(e, uv, bd);
}

}  // namespace kirchhoff
