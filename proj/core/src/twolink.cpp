#include "infodesign/twolink.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "infodesign/error.hpp"

namespace infodesign {

TwoLinkInstance TwoLinkInstance::from_scenario(const Scenario& scenario) {
  if (scenario.num_links() != 2) {
    throw Error(ErrorCode::DimensionMismatch, "two-link instance needs exactly two links");
  }
  return {scenario.a(0), scenario.a(1), scenario.x()};
}

namespace {

void require_nondegenerate(const TwoLinkInstance& inst) {
  if (!(inst.a1 >= 0.0) || !(inst.a2 >= 0.0)) {
    throw Error(ErrorCode::NegativeCoefficient, "slopes must be >= 0");
  }
  if (!(inst.a1 + inst.a2 > 0.0)) {
    throw Error(ErrorCode::DegenerateInstance, "a1 + a2 must be positive");
  }
}

}  // namespace

double sys_opt_closed_form(const TwoLinkInstance& instance) {
  require_nondegenerate(instance);
  const double stationary = (2.0 * instance.a2 - instance.x) / (2.0 * (instance.a1 + instance.a2));
  return std::clamp(stationary, 0.0, 1.0);
}

double clamped_policy(const TwoLinkInstance& instance) {
  require_nondegenerate(instance);
  const double alpha = instance.alpha();
  const double beta = instance.beta();
  if (instance.x >= beta / alpha) return 0.0;
  if (instance.x <= (beta - 1.0) / alpha) return 1.0;
  return beta - alpha * instance.x;
}

std::string to_string(Conclusion conclusion) {
  switch (conclusion) {
    case Conclusion::Optimal: return "optimal";
    case Conclusion::NotOptimal: return "not-optimal";
    case Conclusion::SupportViolatedInconclusive: return "support-violated-inconclusive";
  }
  return "unknown";
}

namespace {

struct Extremes {
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -std::numeric_limits<double>::infinity();
  double a1_max = -std::numeric_limits<double>::infinity();
  double a2_min = std::numeric_limits<double>::infinity();
};

Extremes support_extremes(const ScenarioSet& set) {
  if (set.num_links() != 2) {
    throw Error(ErrorCode::DimensionMismatch, "two-link checks need exactly two links");
  }
  Extremes e;
  for (const auto& s : set.scenarios()) {
    if (s.weight == 0.0) continue;
    e.x_min = std::min(e.x_min, s.x());
    e.x_max = std::max(e.x_max, s.x());
    e.a1_max = std::max(e.a1_max, s.a(0));
    e.a2_min = std::min(e.a2_min, s.a(1));
  }
  return e;
}

// relative slack for "<= 0" decisions on quantities of size `scale`
double decision_tolerance(double scale) { return 1e-12 * (1.0 + std::abs(scale)); }

}  // namespace

TheoremVerdict thm1_check(const ScenarioSet& set) {
  const auto ext = support_extremes(set);
  TheoremVerdict v;
  v.support_ok = ext.x_max <= 2.0 * ext.a2_min && ext.x_min >= -2.0 * ext.a1_max;

  v.moment1 = expectation(set, [](const Scenario& s) {
    const double x = s.x();
    return (2.0 * s.a(1) * x - x * x) / (s.a(0) + s.a(1));
  });
  v.moment2 = expectation(set, [](const Scenario& s) {
    const double x = s.x();
    return (-2.0 * s.a(0) * x - x * x) / (s.a(0) + s.a(1));
  });
  const double scale = expectation(set, [](const Scenario& s) {
    const double x = s.x();
    return x * x / (s.a(0) + s.a(1));
  });
  v.variance_slack1 = -v.moment1;
  v.variance_slack2 = -v.moment2;

  if (!v.support_ok) {
    v.conclusion = Conclusion::SupportViolatedInconclusive;
  } else {
    const double tol = decision_tolerance(scale);
    v.conclusion = (v.moment1 <= tol && v.moment2 <= tol) ? Conclusion::Optimal
                                                          : Conclusion::NotOptimal;
  }
  return v;
}

TheoremVerdict thm2_check(double a1, double a2, const ScenarioSet& x_set) {
  if (!(a1 >= 0.0) || !(a2 >= 0.0)) {
    throw Error(ErrorCode::NegativeCoefficient, "slopes must be >= 0");
  }
  const auto ext = support_extremes(x_set);
  TheoremVerdict v;
  v.support_ok = ext.x_min >= -2.0 * a1 && ext.x_max <= 2.0 * a2;

  const double mean = expectation(x_set, [](const Scenario& s) { return s.x(); });
  const double second = expectation(x_set, [](const Scenario& s) { return s.x() * s.x(); });
  const double variance =
      expectation(x_set, [mean](const Scenario& s) { return (s.x() - mean) * (s.x() - mean); });

  // moment form, multiplied through by 2 a_e
  v.moment1 = 2.0 * a2 * mean - second;
  v.moment2 = -2.0 * a1 * mean - second;
  // variance form
  v.variance_slack1 = variance - mean * (2.0 * a2 - mean);
  v.variance_slack2 = variance + mean * (2.0 * a1 + mean);

  const double tol = decision_tolerance(second + std::abs(mean) * (a1 + a2));
  const bool moments_hold = v.moment1 <= tol && v.moment2 <= tol;
  const bool variance_holds = v.variance_slack1 >= -tol && v.variance_slack2 >= -tol;
  v.forms_agree = moments_hold == variance_holds;

  if (!v.support_ok) {
    v.conclusion = Conclusion::SupportViolatedInconclusive;
  } else {
    v.conclusion = moments_hold ? Conclusion::Optimal : Conclusion::NotOptimal;
  }
  return v;
}

ConstraintPolynomials thm3_polynomials(double a1, double a2) {
  const double a1_2 = a1 * a1, a1_3 = a1_2 * a1, a1_4 = a1_3 * a1;
  const double a2_2 = a2 * a2, a2_3 = a2_2 * a2, a2_4 = a2_3 * a2;
  ConstraintPolynomials p;
  p.g_poly = 2.0 * a1_4 - 2.0 * a2_4 - 4.0 * a1_3 + 2.0 * a2_3 + 4.0 * a1_3 * a2 + 3.0 * a1_2 -
             6.0 * a1_2 * a2 - a1 - a2 + 3.0 * a1 * a2;
  p.h_poly = -2.0 * a1_4 + 2.0 * a2_4 + 2.0 * a1_3 - 4.0 * a2_3 + 4.0 * a1 * a2_3 + 3.0 * a2_2 -
             6.0 * a1 * a2_2 - a1 - a2 + 3.0 * a1 * a2;
  return p;
}

namespace {

// c0 + c1 x + c2 x^2
using Quadratic = std::array<double, 3>;

// Integral of q(x) (1 - |x|) over [lo, hi]. The factor (1 - |x|) is the
// density of x = b1 - b2 for b uniform on the unit square, i.e. half the
// length of the y = b1 + b2 range at fixed x.
double integrate_against_density(const Quadratic& q, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  // antiderivative of q(x) (1 + s x), s = -1 for x >= 0 and +1 for x < 0
  const auto primitive = [&q](double x, double s) {
    const double x2 = x * x, x3 = x2 * x, x4 = x3 * x;
    return q[0] * x + (q[1] + s * q[0]) * x2 / 2.0 + (q[2] + s * q[1]) * x3 / 3.0 +
           s * q[2] * x4 / 4.0;
  };
  double total = 0.0;
  if (lo < 0.0) {
    const double top = std::min(hi, 0.0);
    total += primitive(top, 1.0) - primitive(lo, 1.0);
  }
  if (hi > 0.0) {
    const double bottom = std::max(lo, 0.0);
    total += primitive(hi, -1.0) - primitive(bottom, -1.0);
  }
  return total;
}

// Obedience integrands for a1 <= a2 on each region of the clamped policy.
UniformObedience ordered_uniform_obedience(double a1, double a2) {
  UniformObedience out;
  const double t1_edge = -2.0 * a1;  // (beta - 1) / alpha
  const double t2_edge = 2.0 * a2;   // beta / alpha
  const bool has_t1 = t1_edge > -1.0;
  const bool has_t2 = t2_edge < 1.0;
  out.region_case = has_t1 ? (has_t2 ? 1 : 2) : 3;

  // T1: pi = 1, g = x + a1, h = 0
  if (has_t1) out.lhs1 += integrate_against_density({a1, 1.0, 0.0}, -1.0, t1_edge);
  // T2: pi = 0, g = 0, h = a2 - x
  if (has_t2) out.lhs2 += integrate_against_density({a2, -1.0, 0.0}, t2_edge, 1.0);

  // R: pi = beta - alpha x
  const double lo = std::max(-1.0, t1_edge);
  const double hi = std::min(1.0, t2_edge);
  if (hi > lo) {
    const double s = a1 + a2;
    const double alpha = 1.0 / (2.0 * s);
    const double beta = a2 / s;
    // g = (x - a2) pi + s pi^2
    const Quadratic g{-a2 * beta + s * beta * beta, beta + a2 * alpha - 2.0 * s * alpha * beta,
                      -alpha + s * alpha * alpha};
    // h = a2 - x + (x - a1 - 2 a2) pi + s pi^2
    const double c = a1 + 2.0 * a2;
    const Quadratic h{a2 - c * beta + s * beta * beta,
                      -1.0 + beta + c * alpha - 2.0 * s * alpha * beta,
                      -alpha + s * alpha * alpha};
    out.lhs1 += integrate_against_density(g, lo, hi);
    out.lhs2 += integrate_against_density(h, lo, hi);
  }
  return out;
}

}  // namespace

UniformObedience uniform_obedience_exact(double a1, double a2) {
  if (!(a1 >= 0.0) || !(a2 >= 0.0)) {
    throw Error(ErrorCode::NegativeCoefficient, "slopes must be >= 0");
  }
  if (a1 <= a2) return ordered_uniform_obedience(a1, a2);
  // Relabelling the links maps x -> -x (the prior of x is symmetric) and
  // exchanges the two constraints.
  auto out = ordered_uniform_obedience(a2, a1);
  std::swap(out.lhs1, out.lhs2);
  out.swapped = true;
  return out;
}

}  // namespace infodesign
