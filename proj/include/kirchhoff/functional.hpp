#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kirchhoff/radial.hpp"

namespace kirchhoff {

// Coefficients of -(a + b int|Du|^2) Lap u + V u = lambda |u|^{p-1} u.
struct ProblemParams {
  double a = 1.0;
  double b = 1.0;
  double p = 3.0;
  double lambda = 1.0;
  double delta_interval = 0.5;  // left endpoint of the lambda interval

  void validate_base() const;
  void require_manifold_regime() const;      // p in (2,5)
  void require_nonexistence_regime() const;  // p in (1,2], a > 1
};

// Potential data: either a constant, or a radial profile sampled on a grid
// together with r V'(r) (the radial form of (DV(x), x)).
class PotentialSpec {
 public:
  static PotentialSpec constant(double value);
  static PotentialSpec radial(GridPtr grid, std::vector<double> v,
                              std::vector<double> rvp, double v_inf);
  // V(r) = v1 - 1/(r+1), rV'(r) = r/(r+1)^2; v_inf = v1
  static PotentialSpec well_example(GridPtr grid, double v1);
  // CSV with header then rows "r,V,rVprime"; resampled onto `grid` linearly
  static PotentialSpec from_csv(const std::string& path, GridPtr grid, double v_inf);

  bool is_constant() const noexcept { return kind_ == Kind::constant; }
  double v_inf() const noexcept { return v_inf_; }
  // nodewise samples on `grid` (constant potentials are expanded on demand)
  std::vector<double> values_on(const RadialGrid& grid) const;
  std::vector<double> rvp_on(const RadialGrid& grid) const;
  bool has_rvp() const noexcept { return kind_ == Kind::constant || !rvp_.empty(); }

 private:
  enum class Kind { constant, radial };
  Kind kind_ = Kind::constant;
  double v_inf_ = 1.0;
  GridPtr grid_;
  std::vector<double> v_;
  std::vector<double> rvp_;
};

// The scalar quadruple/quintuple entering every functional.
struct EnergyBreakdown {
  double dirichlet = 0.0;  // int |Du|^2
  double gradQ = 0.0;      // a * dirichlet
  double massQ = 0.0;      // int V |u|^2
  double dvQ = 0.0;        // int (DV, x) |u|^2
  double kirchQ = 0.0;     // b * dirichlet^2
  double powQ = 0.0;       // int |u|^{p+1}
};

EnergyBreakdown breakdown(const RadialFunction& u, const ProblemParams& params,
                          const PotentialSpec& V);

// I = gradQ/2 + massQ/2 + kirchQ/4 - lambda powQ/(p+1)
double energy_I(const EnergyBreakdown& bd, const ProblemParams& params);
// G = (3/2)gradQ + (5/2)massQ + (3/2)kirchQ - lambda (p+4)/(p+1) powQ
double constraint_G(const EnergyBreakdown& bd, const ProblemParams& params);
// G plus the dvQ/2 term; equals <I'(u),u> + P for any potential
double constraint_G_full(const EnergyBreakdown& bd, const ProblemParams& params);
// P = gradQ/2 + (3/2)massQ + dvQ/2 + kirchQ/2 - 3 lambda/(p+1) powQ
double pohozaev_P(const EnergyBreakdown& bd, const ProblemParams& params);
// Nehari value <I'(u),u> = gradQ + massQ + kirchQ - lambda powQ
double nehari_N(const EnergyBreakdown& bd, const ProblemParams& params);
// Phi = gradQ/4 + massQ/12 + lambda (p-2)/(6(p+1)) powQ;  I = Phi + G/6
double phi(const EnergyBreakdown& bd, const ProblemParams& params);

// Euler-Lagrange residual samples (a + b dirichlet) L[u] + V u - lambda |u|^{p-1} u.
std::vector<double> gradient_I(const RadialFunction& u, const ProblemParams& params,
                               const PotentialSpec& V);

struct VHypothesesReport {
  bool v1_ok = false;       // V - r V' >= 0 nodewise
  bool v2_ok = false;       // V <= v_inf nodewise, strict somewhere
  bool v3_ok = false;       // inf (int |Du|^2 + V u^2)/(int u^2) > 0
  double v1_min = 0.0;      // min over nodes of V - rV'
  double v2_max_slack = 0.0;  // max over nodes of v_inf - V
  double v3_quotient = 0.0;   // smallest generalized eigenvalue found
  bool all_ok() const noexcept { return v1_ok && v2_ok && v3_ok; }
};

VHypothesesReport check_V_hypotheses(const PotentialSpec& V, const GridPtr& grid);

struct QuotientResult {
  double value = 0.0;
  RadialFunction minimizer;
  bool converged = false;
  std::size_t iterations = 0;
};

// inf over discrete profiles of (a_weight int|Du|^2 + int V u^2) / (int |u|^q)^{2/q},
// by preconditioned descent from a Gaussian seed.
QuotientResult minimize_quotient(const GridPtr& grid, const PotentialSpec& V,
                                 double a_weight, double q,
                                 std::size_t max_iters = 2000, double tol = 1e-10);

// Best constant of the embedding H^1 -> L^3 used by the nonexistence threshold:
// C = inf (int |Du|^2 + V u^2)/|u|_3^2.
QuotientResult sobolev_constant(const GridPtr& grid, const PotentialSpec& V,
                                std::size_t max_iters = 2000);

// Embedding constant for |u|_{p+1}: inf (a int|Du|^2 + int V u^2)/|u|_{p+1}^2.
QuotientResult embedding_constant(const GridPtr& grid, const PotentialSpec& V,
                                  double a_weight, double p,
                                  std::size_t max_iters = 2000);

// Smallest eigenvalue of the (weighted) operator u -> -Lap u + V u on the grid,
// via Sturm bisection on the symmetrized tridiagonal pencil.
double smallest_schrodinger_eigenvalue(const RadialGrid& grid,
                                       std::span<const double> V);

}  // namespace kirchhoff
