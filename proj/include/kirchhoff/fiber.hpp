#pragma once

#include "kirchhoff/functional.hpp"
#include "kirchhoff/radial.hpp"

namespace kirchhoff {

// Coefficients of the scaling-fiber energy
//   gamma(t) = c1 t^3 + c2 t^5 + c3 t^6 - c4 t^{p+4},
// i.e. the energy of u_t(x) = t u(x/t) expanded from a breakdown.
struct FiberPolynomial {
  double c1 = 0.0;  // gradQ/2
  double c2 = 0.0;  // massQ/2
  double c3 = 0.0;  // kirchQ/4
  double c4 = 0.0;  // lambda powQ/(p+1)
  double p = 3.0;

  double value(double t) const;
  double derivative(double t) const;
};

FiberPolynomial fiber_poly(const EnergyBreakdown& bd, const ProblemParams& params);

struct FiberMax {
  double t_star = 1.0;
  double value = 0.0;
  bool unique_on_audit = true;  // gamma' > 0 before t_star, < 0 after
};

// Unique positive critical point of gamma, located by bracket doubling plus
// bisection on gamma'; uniqueness re-checked on a 64-point audit grid.
FiberMax fiber_max(const FiberPolynomial& fp);

struct Projection {
  double t_star = 1.0;
  EnergyBreakdown projected_bd;  // exact scalar projection, G = 0 identically
  RadialFunction projected;      // grid realization (interpolation-limited)
};

// Scaling of breakdown fields under u -> m * u_t (exact laws).
EnergyBreakdown scale_breakdown(const EnergyBreakdown& bd, double t, double m, double p);

// Unique fiber projection onto {G = 0} for constant potentials.
Projection project_to_M(const RadialFunction& u, const ProblemParams& params,
                        const PotentialSpec& V);

struct GeneralFiberMax {
  double t_star = 1.0;
  double value = 0.0;
  bool domain_limited = false;  // bracket capped by the truncation radius
  bool multimodal = false;      // audit grid saw more than one interior peak
};

// max over t of I(u_t) for arbitrary potentials, by golden-section search on
// grid-realized rescales.  The bracket is capped where the rescaled support
// would leave the grid.
GeneralFiberMax fiber_max_general(const RadialFunction& u, const ProblemParams& params,
                                  const PotentialSpec& V, double t_tol = 1e-8);

}  // namespace kirchhoff
