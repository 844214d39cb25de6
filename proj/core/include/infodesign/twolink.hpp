#pragma once

#include <string>

#include "infodesign/scenarios.hpp"

namespace infodesign {

/// Two parallel links with affine delays a_e f + b_e, reduced to the slopes
/// and the free-flow difference x = b_1 - b_2.
struct TwoLinkInstance {
  double a1 = 0.0;
  double a2 = 0.0;
  double x = 0.0;

  /// 1 / (2 (a1 + a2))
  double alpha() const { return 1.0 / (2.0 * (a1 + a2)); }
  /// a2 / (a1 + a2)
  double beta() const { return a2 / (a1 + a2); }

  static TwoLinkInstance from_scenario(const Scenario& scenario);
};

/// System-optimal share of link 1: clamp((2 a2 - x) / (2 (a1 + a2)), 0, 1).
/// Depends on the state only, never on the prior. Throws DegenerateInstance
/// when a1 + a2 = 0.
double sys_opt_closed_form(const TwoLinkInstance& instance);

/// Same quantity written through the thresholds on x:
/// 0 for x >= beta/alpha, 1 for x <= (beta - 1)/alpha, beta - alpha x between.
/// Threshold points go to the saturated branch.
double clamped_policy(const TwoLinkInstance& instance);

enum class Conclusion { Optimal, NotOptimal, SupportViolatedInconclusive };

std::string to_string(Conclusion conclusion);

struct TheoremVerdict {
  bool support_ok = false;
  /// Moment expressions that must be <= 0 for optimality.
  double moment1 = 0.0;
  double moment2 = 0.0;
  /// Variance-form slacks sigma^2 - bound (>= 0 for optimality); thm2 only.
  double variance_slack1 = 0.0;
  double variance_slack2 = 0.0;
  /// thm2 only: the moment and variance forms reached the same decision.
  bool forms_agree = true;
  Conclusion conclusion = Conclusion::SupportViolatedInconclusive;
};

/// Support condition max x <= 2 min a2, min x >= -2 max a1 (marginal supports
/// over positive-weight scenarios) and the two moment conditions
/// E[(2 a2 x - x^2)/(a1+a2)] <= 0, E[(-2 a1 x - x^2)/(a1+a2)] <= 0.
TheoremVerdict thm1_check(const ScenarioSet& set);

/// Deterministic slopes; x is read from each scenario as b_1 - b_2.
/// Moment form -E[x^2]/(2 a1) <= E[x] <= E[x^2]/(2 a2) (evaluated multiplied
/// through) and variance form sigma^2 >= E[x](2 a2 - E[x]),
/// sigma^2 >= -E[x](2 a1 + E[x]); support is supp(x) within [-2 a1, 2 a2].
TheoremVerdict thm2_check(double a1, double a2, const ScenarioSet& x_set);

/// Quartics whose positivity signals violation of the first / second
/// obedience constraint under the uniform prior with both saturation regions
/// present (a1, a2 < 1/2).
struct ConstraintPolynomials {
  double g_poly = 0.0;
  double h_poly = 0.0;
};

ConstraintPolynomials thm3_polynomials(double a1, double a2);

/// Obedience integrals of the clamped system optimum under b uniform on [0,1]^2.
struct UniformObedience {
  double lhs1 = 0.0;
  double lhs2 = 0.0;
  /// 1: both saturation triangles, 2: only the pi = 1 triangle, 3: neither
  /// (after ordering the slopes so that a1 <= a2).
  int region_case = 3;
  /// True when the links were relabelled to bring a1 <= a2.
  bool swapped = false;
};

/// Exact piecewise-polynomial integration over the saturation triangles and
/// the interior region.
UniformObedience uniform_obedience_exact(double a1, double a2);

}  // namespace infodesign
