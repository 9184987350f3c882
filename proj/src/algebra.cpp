#include "kirchhoff/algebra.hpp"

#include <cmath>
#include <sstream>

namespace kirchhoff {

std::string to_string(const Rational& q) {
  std::ostringstream os;
  os << numerator(q);
  if (denominator(q) != 1) os << "/" << denominator(q);
  return os.str();
}

Rational det4_cofactor(const Mat4& A) {
  auto det3 = [](const Rational m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  Rational det = 0;
  for (int j = 0; j < 4; ++j) {
    Rational minor[3][3];
    for (int r = 1; r < 4; ++r) {
      int cc = 0;
      for (int c = 0; c < 4; ++c) {
        if (c == j) continue;
        minor[r - 1][cc++] = A[r][c];
      }
    }
    Rational term = A[0][j] * det3(minor);
    det += (j % 2 == 0) ? term : -term;
  }
  return det;
}

std::optional<Vec4> solve4(const Mat4& A, const Vec4& rhs) {
  Rational M[4][5];
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) M[i][j] = A[i][j];
    M[i][4] = rhs[i];
  }
  for (int col = 0; col < 4; ++col) {
    int piv = -1;
    for (int r = col; r < 4; ++r)
      if (M[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) return std::nullopt;
    if (piv != col)
      for (int j = 0; j < 5; ++j) std::swap(M[piv][j], M[col][j]);
    for (int r = 0; r < 4; ++r) {
      if (r == col || M[r][col] == 0) continue;
      Rational f = M[r][col] / M[col][col];
      for (int j = col; j < 5; ++j) M[r][j] -= f * M[col][j];
    }
  }
  Vec4 x;
  for (int i = 0; i < 4; ++i) x[i] = M[i][4] / M[i][i];
  return x;
}

std::pair<Rational, Rational> step2_solve(const Rational& k, const Rational& alpha,
                                          const Rational& beta, const Rational& p) {
  if (p == 2) throw error(errc::division_by_zero, "step2 needs p != 2");
  Rational mu = (4 * k * (p + 4) - 2 * alpha * (p + 1) - 2 * beta * (p - 1)) / (p - 2);
  Rational de = (6 * k - Rational(3, 2) * alpha - beta / 2) * (p + 1) / (p - 2);
  // cross-check against the exact 2x2 elimination of
  //   alpha/2 + beta/2 + mu/4 - delta/(p+1) = k
  //   (3/2)alpha + (5/2)beta + (3/2)mu - (p+4)/(p+1) delta = 0
  // treating (mu, delta) as unknowns
  Rational a11 = Rational(1, 4), a12 = Rational(-1) / (p + 1);
  Rational a21 = Rational(3, 2), a22 = Rational(-(p + 4)) / (p + 1);
  Rational b1 = k - alpha / 2 - beta / 2;
  Rational b2 = -Rational(3, 2) * alpha - Rational(5, 2) * beta;
  Rational det = a11 * a22 - a12 * a21;
  if (det == 0) throw error(errc::singular_system, "step2 system singular");
  Rational mu2 = (b1 * a22 - a12 * b2) / det;
  Rational de2 = (a11 * b2 - b1 * a21) / det;
  if (mu != mu2 || de != de2)
    throw error(errc::invalid_input, "step2 closed form disagrees with elimination");
  return {mu, de};
}

bool step2_bound_chain(const Rational& k, const Rational& alpha, const Rational& beta,
                       const Rational& p) {
  auto [mu, de] = step2_solve(k, alpha, beta, p);
  (void)de;
  if (!(mu > 0 && p > 2 && alpha > 0 && beta > 0)) return true;  // vacuous
  Rational lhs = (alpha + beta) * (p - 1);
  Rational mid = beta * (p - 1) + alpha * (p + 1);
  Rational rhs = 2 * k * (p + 4);
  return lhs < mid && mid < rhs;
}

namespace {

Mat4 step3_matrix(const Rational& p) {
  Mat4 A;
  A[0] = {Rational(1, 2), Rational(1, 2), Rational(1, 4), Rational(-1) / (p + 1)};
  A[1] = {Rational(3, 2), Rational(5, 2), Rational(3, 2), Rational(-(p + 4)) / (p + 1)};
  A[2] = {Rational(3), Rational(5), Rational(6), -(p + 4)};
  A[3] = {Rational(3, 2), Rational(15, 2), Rational(3), Rational(-3) * (p + 4) / (p + 1)};
  return A;
}

}  // namespace

SystemVerdict step3_solve(const Rational& k, const Rational& p) {
  if (p == 0 || p == 1) throw error(errc::singular_system, "step3 singular at p in {0,1}");
  if (p == -1) throw error(errc::division_by_zero, "step3 undefined at p = -1");
  Mat4 A = step3_matrix(p);
  SystemVerdict v;
  v.det = det4_cofactor(A);
  auto sol = solve4(A, {k, 0, 0, 0});
  if (!sol) {
    v.singular = true;
    return v;
  }
  // printed closed forms
  Vec4 printed = {Rational(10) * k * (p + 4) / (3 * p),
                  Rational(2) * k * (p - 5) * (p + 4) / (p * (p - 1)),
                  Rational(-20) * k * (p + 4) / (3 * p),
                  Rational(-20) * k * (p + 1) / (p * (p - 1))};
  for (int i = 0; i < 4; ++i)
    if ((*sol)[i] != printed[i])
      throw error(errc::invalid_input, "step3 closed form disagrees with elimination");
  v.solution = *sol;
  if (k > 0 && p > 2 && p < 5) {
    const auto& mu = (*sol)[2];
    const auto& de = (*sol)[3];
    if (mu < 0 && de < 0)
      v.contradiction = "mu and delta negative but both must be positive";
  }
  return v;
}

Mat4 multiplier_matrix(const Rational& lambda, const Rational& p) {
  if (p == -1) throw error(errc::division_by_zero, "matrix undefined at p = -1");
  Mat4 A;
  A[0] = {Rational(1, 2), Rational(1, 2), Rational(1, 4), Rational(-1) / (p + 1)};
  A[1] = {Rational(3, 2), Rational(5, 2), Rational(3, 2), Rational(-(p + 4)) / (p + 1)};
  A[2] = {3 * lambda - 1, 5 * lambda - 1, 6 * lambda - 1, -((p + 4) * lambda - 1)};
  A[3] = {(3 * lambda - 1) / 2, 3 * (5 * lambda - 1) / 2, (6 * lambda - 1) / 2,
          Rational(-3) * ((p + 4) * lambda - 1) / (p + 1)};
  return A;
}

Rational det_A(const Rational& lambda, const Rational& p) {
  Rational cof = det4_cofactor(multiplier_matrix(lambda, p));
  Rational closed = lambda * (p - 1) * (2 * p - 1 - 9 * p * lambda) / (8 * (p + 1));
  if (cof != closed)
    throw error(errc::invalid_input,
                "det A cofactor expansion disagrees with the closed form: " +
                    to_string(cof) + " vs " + to_string(closed));
  return closed;
}

Step4Verdict step4_case_analysis(const Rational& lambda, const Rational& p,
                                 const Rational& k) {
  if (!(k > 0)) throw error(errc::invalid_input, "step4 needs k > 0");
  if (!(p > 2 && p < 5)) throw error(errc::invalid_exponent, "step4 needs p in (2,5)");
  Step4Verdict out;
  Rational lam_star = (2 * p - 1) / (9 * p);
  out.bracket_ok = (Rational(1, 6) < lam_star) && (lam_star < Rational(1, 5));

  if (lambda == 0) {
    out.kind = Step4Verdict::Case::multiplier_zero;
    out.detail = "multiplier vanishes; free critical point";
    return out;
  }
  if (lambda == lam_star) {
    out.kind = Step4Verdict::Case::degenerate;
    // eliminate alpha and mu from rows 3 and 4 of the multiplier system
    Mat4 A = multiplier_matrix(lambda, p);
    // scale rows as in the reduced display, then combine: 9p*r3 - 3*(6p*r4)
    Vec4 r3, r4;
    for (int j = 0; j < 4; ++j) {
      r3[j] = 9 * p * A[2][j];
      r4[j] = 6 * p * A[3][j];
    }
    Vec4 comb;
    for (int j = 0; j < 4; ++j) comb[j] = r3[j] - 3 * r4[j];
    if (comb[0] != 0 || comb[2] != 0)
      throw error(errc::invalid_input, "step4 degenerate elimination failed");
    // comb is c_beta * beta + c_delta * delta = 0 with c_delta/c_beta = p-2
    if (comb[1] == 0) throw error(errc::invalid_input, "step4 degenerate row vanished");
    Rational ratio = comb[3] / comb[1];
    if (ratio != p - 2)
      throw error(errc::invalid_input, "step4 degenerate relation mismatch");
    out.contradiction = true;  // beta + (p-2) delta = 0 with both positive
    out.detail = "beta + (p-2) delta = 0, impossible for positive beta, delta";
    return out;
  }

  out.kind = Step4Verdict::Case::unique_solution;
  Mat4 A = multiplier_matrix(lambda, p);
  auto sol = solve4(A, {k, 0, 0, 0});
  if (!sol) throw error(errc::singular_system, "multiplier system unexpectedly singular");
  Rational beta_printed =
      Rational(-18) * k * (p - 5) * ((p + 4) * lambda - 1) /
      ((p - 1) * (2 * p - 1 - 9 * p * lambda));
  Rational delta_printed = Rational(36) * k * (1 + p) * (5 * lambda - 1) /
                           ((p - 1) * (2 * p - 1 - 9 * p * lambda));
  if ((*sol)[1] != beta_printed || (*sol)[3] != delta_printed)
    throw error(errc::invalid_input, "step4 closed forms disagree with elimination");
  out.beta = (*sol)[1];
  out.delta = (*sol)[3];
  // printed sign claims
  bool delta_nonpos_region = (lambda >= Rational(1, 5)) || (lambda < lam_star);
  bool beta_neg_region = (lambda > lam_star) && (lambda < Rational(1, 5));
  if (delta_nonpos_region && !(*out.delta <= 0))
    throw error(errc::invalid_input, "printed sign claim for delta failed");
  if (beta_neg_region && !(*out.beta < 0))
    throw error(errc::invalid_input, "printed sign claim for beta failed");
  out.contradiction = (*out.delta <= 0) || (*out.beta < 0);
  out.detail = out.contradiction ? "sign of beta or delta contradicts positivity"
                                 : "no contradiction";
  return out;
}

Rational nonexistence_threshold(const Rational& a, const Rational& b, const Rational& C) {
  if (!(a > 1)) throw error(errc::out_of_hypothesis, "threshold needs a > 1");
  if (!(b > 0) || !(C > 0))
    throw error(errc::invalid_input, "threshold needs b > 0, C > 0");
  return Rational(1) / (4 * b * (a - 1) * C * C * C);
}

bool g_nonneg_condition(const Rational& a, const Rational& b, const Rational& lambda,
                        const Rational& norm_sq, const Rational& l3_int) {
  if (!(a > 1)) throw error(errc::out_of_hypothesis, "condition needs a > 1");
  return l3_int * l3_int <= 4 * (a - 1) * b * lambda * norm_sq * norm_sq * norm_sq;
}

bool h_nonneg_check(const Rational& p) {
  if (!(p > 1 && p <= 2)) throw error(errc::out_of_hypothesis, "h check needs p in (1,2]");
  // factorization h(t) = t^2 (1 + t - t^{p-1}) with p-1 <= 1
  if (!(p - 1 <= 1)) return false;
  const double pd = static_cast<double>(p);
  for (int k = 0; k <= 1200; ++k) {
    double t = std::pow(10.0, -6.0 + 12.0 * k / 1200.0);
    double inner = 1.0 + t - std::pow(t, pd - 1.0);
    if (!(inner >= -1e-12 * (1.0 + t))) return false;
    double h = t * t + t * t * t - std::pow(t, pd + 1.0);
    if (!(h >= -1e-12 * (1.0 + t * t * t))) return false;
  }
  return true;
}

}  // namespace kirchhoff
