#pragma once

#include <array>
#include <optional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

// Exact arithmetic carrier for the multiplier algebra and thresholds.
using Rational = boost::multiprecision::cpp_rational;

using Vec4 = std::array<Rational, 4>;
using Mat4 = std::array<Vec4, 4>;

std::string to_string(const Rational& q);

// Exact determinant by cofactor expansion and exact solve by Gaussian
// elimination with rational pivoting.
Rational det4_cofactor(const Mat4& A);
std::optional<Vec4> solve4(const Mat4& A, const Vec4& rhs);

struct SystemVerdict {
  std::optional<Vec4> solution;  // (alpha, beta, mu, delta)
  std::optional<std::string> contradiction;
  Rational det;
  bool singular = false;
};

// Energy + constraint pair solved for (mu, delta):
//   mu    = (4k(p+4) - 2 alpha (p+1) - 2 beta (p-1)) / (p-2)
//   delta = (6k - (3/2)alpha - beta/2)(p+1)/(p-2)
// Verified against the exact 2x2 elimination.
std::pair<Rational, Rational> step2_solve(const Rational& k, const Rational& alpha,
                                          const Rational& beta, const Rational& p);

// The implication mu > 0, p > 2, alpha, beta > 0 =>
// (alpha+beta)(p-1) < beta(p-1) + alpha(p+1) < 2k(p+4); returns whether the
// chain holds (vacuously true when the premise fails).
bool step2_bound_chain(const Rational& k, const Rational& alpha, const Rational& beta,
                       const Rational& p);

// The 4x4 system of the tangency analysis; unique solution has mu, delta < 0
// for k > 0 and p in (2,5), contradicting their positivity.
SystemVerdict step3_solve(const Rational& k, const Rational& p);

// Coefficient matrix of the Lagrange-multiplier system at multiplier lambda.
Mat4 multiplier_matrix(const Rational& lambda, const Rational& p);

// det A evaluated both by cofactor expansion and via the closed form
// lambda (p-1)(2p-1-9p lambda) / (8(p+1)); throws if the two disagree.
Rational det_A(const Rational& lambda, const Rational& p);

struct Step4Verdict {
  enum class Case { multiplier_zero, unique_solution, degenerate } kind;
  std::optional<Rational> beta;
  std::optional<Rational> delta;
  bool contradiction = false;  // positivity of (beta, delta) violated
  bool bracket_ok = false;     // 1/6 < (2p-1)/(9p) < 1/5
  std::string detail;
};

Step4Verdict step4_case_analysis(const Rational& lambda, const Rational& p,
                                 const Rational& k);

// lambda_0 = 1/(4 b (a-1) C^3)
Rational nonexistence_threshold(const Rational& a, const Rational& b, const Rational& C);

// (l3_int)^2 <= 4 (a-1) b lambda (norm_sq)^3, evaluated exactly.
bool g_nonneg_condition(const Rational& a, const Rational& b, const Rational& lambda,
                        const Rational& norm_sq, const Rational& l3_int);

// h(t) = t^2 + t^3 - t^{p+1} >= 0 for t >= 0 when 1 < p <= 2: checks the
// factorization premise p - 1 <= 1 exactly and scans a dense log grid.
bool h_nonneg_check(const Rational& p);

}  // namespace kirchhoff
