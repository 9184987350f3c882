#include "kirchhoff/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace kirchhoff {

double FiberPolynomial::value(double t) const {
  return c1 * std::pow(t, 3.0) + c2 * std::pow(t, 5.0) + c3 * std::pow(t, 6.0) -
         c4 * std::pow(t, p + 4.0);
}

double FiberPolynomial::derivative(double t) const {
  return 3.0 * c1 * t * t + 5.0 * c2 * std::pow(t, 4.0) + 6.0 * c3 * std::pow(t, 5.0) -
         (p + 4.0) * c4 * std::pow(t, p + 3.0);
}

FiberPolynomial fiber_poly(const EnergyBreakdown& bd, const ProblemParams& params) {
  if (!(params.p > 2.0) || !(params.p < 5.0))
    throw error(errc::invalid_exponent, "fiber needs p in (2,5)");
  if (!(bd.powQ > 0.0))
    throw error(errc::trivial_function, "fiber needs a nontrivial profile");
  FiberPolynomial fp;
  fp.c1 = 0.5 * bd.gradQ;
  fp.c2 = 0.5 * bd.massQ;
  fp.c3 = 0.25 * bd.kirchQ;
  fp.c4 = params.lambda * bd.powQ / (params.p + 1.0);
  fp.p = params.p;
  return fp;
}

FiberMax fiber_max(const FiberPolynomial& fp) {
  if (!(fp.c4 > 0.0)) throw error(errc::trivial_function, "fiber needs c4 > 0");
  if (!(fp.c1 > 0.0 || fp.c2 > 0.0 || fp.c3 > 0.0))
    throw error(errc::degenerate_fiber, "all growth coefficients vanish");
  // phi(t) = gamma'(t)/t^2 keeps one sign change on (0, inf)
  auto phi = [&](double t) {
    return 3.0 * fp.c1 + 5.0 * fp.c2 * t * t + 6.0 * fp.c3 * t * t * t -
           (fp.p + 4.0) * fp.c4 * std::pow(t, fp.p + 1.0);
  };
  double lo, hi;
  if (phi(1.0) > 0.0) {
    hi = 1.0;
    do {
      hi *= 2.0;
      if (hi > 1e200) throw error(errc::degenerate_fiber, "no sign change found");
    } while (phi(hi) > 0.0);
    lo = hi / 2.0;
  } else {
    lo = 1.0;
    do {
      lo *= 0.5;
      if (lo < 1e-200) throw error(errc::degenerate_fiber, "no sign change found");
    } while (phi(lo) <= 0.0);
    hi = lo * 2.0;
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-12 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (phi(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  FiberMax out;
  out.t_star = 0.5 * (lo + hi);
  out.value = fp.value(out.t_star);
  // audit: gamma' positive strictly below, negative strictly above
  out.unique_on_audit = true;
  for (int k = 0; k < 32; ++k) {
    double t = out.t_star * std::pow(1e-3, 1.0 - k / 31.0) * 0.999;
    if (fp.derivative(t) <= 0.0) out.unique_on_audit = false;
  }
  for (int k = 0; k < 32; ++k) {
    double t = out.t_star * std::pow(8.0, (k + 1) / 32.0) * 1.001;
    if (fp.derivative(t) >= 0.0) out.unique_on_audit = false;
  }
  return out;
}

EnergyBreakdown scale_breakdown(const EnergyBreakdown& bd, double t, double m, double p) {
  EnergyBreakdown out;
  const double m2 = m * m;
  out.dirichlet = m2 * std::pow(t, 3.0) * bd.dirichlet;
  out.gradQ = m2 * std::pow(t, 3.0) * bd.gradQ;
  out.massQ = m2 * std::pow(t, 5.0) * bd.massQ;
  out.dvQ = m2 * std::pow(t, 5.0) * bd.dvQ;  // leading law only; exact for constant V (dvQ=0)
  out.kirchQ = m2 * m2 * std::pow(t, 6.0) * bd.kirchQ;
  out.powQ = std::pow(m, p + 1.0) * std::pow(t, p + 4.0) * bd.powQ;
  return out;
}

Projection project_to_M(const RadialFunction& u, const ProblemParams& params,
                        const PotentialSpec& V) {
  if (!V.is_constant())
    throw error(errc::invalid_input, "closed-form projection needs a constant potential");
  auto bd = breakdown(u, params, V);
  auto fm = fiber_max(fiber_poly(bd, params));
  Projection out{fm.t_star, scale_breakdown(bd, fm.t_star, 1.0, params.p),
                 rescale(u, fm.t_star)};
  return out;
}

GeneralFiberMax fiber_max_general(const RadialFunction& u, const ProblemParams& params,
                                  const PotentialSpec& V, double t_tol) {
  auto bd0 = breakdown(u, params, V);
  if (!(bd0.powQ > 0.0))
    throw error(errc::trivial_function, "fiber needs a nontrivial profile");
  const auto& g = u.grid();
  const auto uv = u.values();
  // largest t whose rescaled support still fits on the grid
  double umax = 0.0;
  for (double x : uv) umax = std::max(umax, std::abs(x));
  double r_support = g.r_max();
  for (std::size_t i = g.n(); i-- > 0;) {
    if (std::abs(uv[i]) > 1e-12 * umax) {
      r_support = g.nodes()[i];
      break;
    }
  }
  double t_fit = std::max(1.0, 0.98 * g.r_max() / std::max(r_support, g.h()));

  auto I_of = [&](double t) {
    auto ut = rescale(u, t);
    return energy_I(breakdown(ut, params, V), params);
  };

  GeneralFiberMax out;
  std::vector<double> ts, vs;
  for (int k = -8; k <= 60; ++k) {
    double t = std::pow(2.0, k);
    if (t > t_fit) {
      out.domain_limited = true;
      break;
    }
    ts.push_back(t);
    vs.push_back(I_of(t));
    // stop once the value has decreased for 3 consecutive doublings past the peak
    std::size_t m = vs.size();
    if (m >= 4 && vs[m - 1] < vs[m - 2] && vs[m - 2] < vs[m - 3] &&
        vs[m - 3] < vs[m - 4])
      break;
  }
  if (ts.size() < 3) throw error(errc::flat_fiber, "no interior bracket");
  std::size_t imax = 0;
  for (std::size_t i = 1; i < vs.size(); ++i)
    if (vs[i] > vs[imax]) imax = i;
  if (imax == 0 || imax + 1 == vs.size()) {
    if (!out.domain_limited) throw error(errc::flat_fiber, "no interior maximum");
  }
  // count interior peaks on the sampled grid
  int peaks = 0;
  for (std::size_t i = 1; i + 1 < vs.size(); ++i)
    if (vs[i] > vs[i - 1] && vs[i] > vs[i + 1]) ++peaks;
  out.multimodal = peaks > 1;

  double lo = ts[imax > 0 ? imax - 1 : 0];
  double hi = ts[std::min(imax + 1, ts.size() - 1)];
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = I_of(x1), f2 = I_of(x2);
  while (hi - lo > t_tol * std::max(1.0, hi)) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = I_of(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = I_of(x1);
    }
  }
  out.t_star = 0.5 * (lo + hi);
  out.value = I_of(out.t_star);
  return out;
}

}  // namespace kirchhoff
