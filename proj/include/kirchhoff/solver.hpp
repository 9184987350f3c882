#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kirchhoff/fiber.hpp"
#include "kirchhoff/functional.hpp"
#include "kirchhoff/radial.hpp"

namespace kirchhoff {

struct SolverOptions {
  std::size_t max_iters = 50000;
  double grad_tol = 1e-8;   // on the normalized PDE residual
  double poh_tol = 1e-5;    // on the normalized Pohozaev residual
  double g_tol = 1e-8;      // on the normalized constraint residual
  double step_init = 1.0;
  double armijo_c = 1e-4;
  enum class Seed { gaussian, custom } seed_kind = Seed::gaussian;
  double seed_width = 0.0;  // 0 -> max(1, r_max/20)
  bool enforce_positivity = true;
  double newton_trigger = 1e-4;  // residual level that opens the Newton endgame

  void validate() const;
};

struct Residuals {
  double g_residual = 0.0;         // |<I'(u),u> + P| / (1 + gradQ + massQ)
  double pohozaev_residual = 0.0;  // |P| / (1 + gradQ + massQ)
  double pde_residual = 0.0;       // max interior |gradient_I| / (1 + gradQ + massQ)
};

struct SolveReport {
  RadialFunction profile;
  EnergyBreakdown bd;
  double energy = 0.0;
  Residuals residuals;
  bool converged = false;
  bool upper_bound_only = false;  // set for non-constant potentials
  std::size_t iterations = 0;
  std::vector<double> energy_history;
  std::vector<double> t_history;
};

// Ground state of the limit problem
//   -(a + b int|Du|^2) Lap u + v_inf u = lambda |u|^{p-1} u
// by minimizing the fiber-reduced energy over the constraint manifold
// {G = 0}: preconditioned Armijo descent with exact scalar re-projection,
// then a bordered Newton endgame on the free Euler-Lagrange system.
SolveReport solve_limit_ground_state(const ProblemParams& params, double v_inf,
                                     const GridPtr& grid, const SolverOptions& opts);

// Upper bound for the least energy of the potential problem: descent on
// I_{V,lambda} constrained to {<I'(u),u> + P = 0}, started from the
// projected limit-problem ground state.
SolveReport solve_V_ground_state(const ProblemParams& params, const PotentialSpec& V,
                                 const GridPtr& grid, const SolverOptions& opts);

// min over a probe family (Gaussians of varying widths, the reference
// profile when given, random smooth bumps) of the closed-form fiber maxima.
double mountain_pass_value(const ProblemParams& params, double v_inf,
                           const std::optional<RadialFunction>& u_ref,
                           const GridPtr& grid, std::size_t n_gaussians = 32,
                           std::size_t n_bumps = 8, std::uint64_t seed = 0);

struct SweepRow {
  double lambda = 0.0;
  double c_lambda = 0.0;  // upper bound for the potential problem
  double m_inf = 0.0;     // limit-problem ground-state level
  double gap = 0.0;       // m_inf - c_lambda
  bool ok = false;
  std::string note;
};

// One row per lambda: the limit level and the potential-problem upper bound.
// Rows are solved concurrently; a sequential post-pass re-evaluates each
// accepted profile at the neighboring lambda so the reported c_lambda chain
// is non-increasing whenever the underlying solves are sane.
std::vector<SweepRow> lambda_sweep(const ProblemParams& params_template,
                                   const std::vector<double>& lambda_values,
                                   const PotentialSpec& V, const GridPtr& grid,
                                   const SolverOptions& opts);

Residuals residual_report(const RadialFunction& u, const ProblemParams& params,
                          const PotentialSpec& V);

}  // namespace kirchhoff
