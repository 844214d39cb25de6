#include "infodesign/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "infodesign/error.hpp"
#include "infodesign/optim.hpp"
#include "infodesign/parallel.hpp"
#include "infodesign/twolink.hpp"
#include "random_util.hpp"

namespace infodesign {

ObedienceReport obedience_residuals(const Policy& policy, const ScenarioSet& set,
                                    const PathSet& paths) {
  policy.validate(set, paths);
  if (set.num_links() != paths.num_links()) {
    throw Error(ErrorCode::DimensionMismatch, "scenarios and network disagree on links");
  }
  const auto np = static_cast<Eigen::Index>(paths.num_paths());
  const Eigen::MatrixXd& A = paths.incidence;
  ObedienceReport report;
  report.residuals = Eigen::MatrixXd::Zero(np, np);
  for (std::size_t k = 0; k < set.size(); ++k) {
    const auto& s = set[k];
    if (s.weight == 0.0) continue;
    const Eigen::VectorXd pi = policy.pi.row(static_cast<Eigen::Index>(k)).transpose();
    const Eigen::VectorXd f = A * pi;
    const Eigen::VectorXd c = A.transpose() * (s.a.cwiseProduct(f) + s.b);
    for (Eigen::Index i = 0; i < np; ++i) {
      if (pi(i) == 0.0) continue;
      for (Eigen::Index j = 0; j < np; ++j) {
        if (i != j) report.residuals(i, j) += s.weight * pi(i) * (c(i) - c(j));
      }
    }
  }
  report.max_violation = 0.0;
  for (Eigen::Index i = 0; i < np; ++i) {
    for (Eigen::Index j = 0; j < np; ++j) {
      if (i != j) report.max_violation = std::max(report.max_violation, report.residuals(i, j));
    }
  }
  report.marginals = signal_marginals(policy, set);
  return report;
}

double cost_ratio(double cost, double system_optimum_cost) {
  if (system_optimum_cost == 0.0) {
    if (cost == 0.0) return 1.0;
    throw Error(ErrorCode::ZeroOptimalCost,
                "system-optimum cost is zero while the policy cost is " + std::to_string(cost));
  }
  return cost / system_optimum_cost;
}

namespace {

// Per-scenario data of the two-link program.
struct TwoLinkData {
  Eigen::VectorXd w, s, x, a1, a2, b2;

  std::size_t size() const { return static_cast<std::size_t>(w.size()); }

  // objective and constraints, all in the form sum_theta w (c0 + c1 p + s p^2)
  double objective(const Eigen::VectorXd& p) const {
    return (w.array() * ((x - 2.0 * a2).array() * p.array() + s.array() * p.array().square())).sum();
  }
  double constraint1(const Eigen::VectorXd& p) const {
    return (w.array() * ((x - a2).array() * p.array() + s.array() * p.array().square())).sum();
  }
  double constraint2(const Eigen::VectorXd& p) const {
    return (w.array() * ((a2 - x).array() + (x - a1 - 2.0 * a2).array() * p.array() +
                         s.array() * p.array().square()))
        .sum();
  }
  double constant_term() const { return (w.array() * (a2 + b2).array()).sum(); }
  double full_cost(const Eigen::VectorXd& p) const { return objective(p) + constant_term(); }

  // argmin_p of the Lagrangian for multipliers (l1, l2), scenario by scenario
  Eigen::VectorXd lagrangian_minimizer(double l1, double l2) const {
    Eigen::VectorXd p(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      const double linear = (x(k) - 2.0 * a2(k)) + l1 * (x(k) - a2(k)) +
                            l2 * (x(k) - a1(k) - 2.0 * a2(k));
      const double curvature = 2.0 * s(k) * (1.0 + l1 + l2);
      if (curvature > 0.0) {
        p(k) = std::clamp(-linear / curvature, 0.0, 1.0);
      } else {
        p(k) = linear < 0.0 ? 1.0 : 0.0;
      }
    }
    return p;
  }

  // max over scenarios of |p - clamp(p - dL/dp / w)|, max lambda_k |G_k|
  double kkt_residual(const Eigen::VectorXd& p, double l1, double l2) const {
    double worst = 0.0;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      if (w(k) == 0.0) continue;
      const double grad = (x(k) - 2.0 * a2(k) + 2.0 * s(k) * p(k)) +
                          l1 * (x(k) - a2(k) + 2.0 * s(k) * p(k)) +
                          l2 * (x(k) - a1(k) - 2.0 * a2(k) + 2.0 * s(k) * p(k));
      worst = std::max(worst, std::abs(p(k) - std::clamp(p(k) - grad, 0.0, 1.0)));
    }
    worst = std::max(worst, std::abs(l1 * constraint1(p)));
    worst = std::max(worst, std::abs(l2 * constraint2(p)));
    return worst;
  }
};

TwoLinkData two_link_data(const ScenarioSet& set) {
  if (set.num_links() != 2) {
    throw Error(ErrorCode::DimensionMismatch, "design_two_link needs exactly two parallel links");
  }
  const auto n = static_cast<Eigen::Index>(set.size());
  TwoLinkData d{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n),
                Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& sc = set[static_cast<std::size_t>(k)];
    d.w(k) = sc.weight;
    d.a1(k) = sc.a(0);
    d.a2(k) = sc.a(1);
    d.s(k) = sc.a(0) + sc.a(1);
    d.x(k) = sc.x();
    d.b2(k) = sc.b(1);
    if (sc.weight > 0.0 && !(d.s(k) > 0.0)) {
      throw Error(ErrorCode::DegenerateInstance,
                  "a1 + a2 = 0 on scenario " + std::to_string(k) + " with positive weight");
    }
  }
  return d;
}

// Smallest multiplier making constraint G nonpositive, given a monotone
// nonincreasing map lambda -> G(p(lambda)). Returns nullopt when no finite
// multiplier up to 1e16 achieves feasibility.
template <class ConstraintAt>
std::optional<double> smallest_feasible_multiplier(const ConstraintAt& g) {
  if (g(0.0) <= 0.0) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (g(hi) > 0.0) {
    lo = hi;
    hi *= 10.0;
    if (hi > 1e16) return std::nullopt;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

struct DualSolution {
  double l1 = 0.0;
  double l2 = 0.0;
  Eigen::VectorXd p;
};

// Maximizes the concave two-dimensional dual. A primal point p(lambda) with
// G_k(p) <= tolerance and complementary multipliers is a KKT point.
std::optional<DualSolution> refine_dual(const TwoLinkData& d, double tolerance) {
  const auto g1_at = [&d](double l1, double l2) {
    return d.constraint1(d.lagrangian_minimizer(l1, l2));
  };
  const auto g2_at = [&d](double l1, double l2) {
    return d.constraint2(d.lagrangian_minimizer(l1, l2));
  };

  if (auto l1 = smallest_feasible_multiplier([&](double l) { return g1_at(l, 0.0); })) {
    Eigen::VectorXd p = d.lagrangian_minimizer(*l1, 0.0);
    if (d.constraint2(p) <= tolerance) return DualSolution{*l1, 0.0, std::move(p)};
  }
  if (auto l2 = smallest_feasible_multiplier([&](double l) { return g2_at(0.0, l); })) {
    Eigen::VectorXd p = d.lagrangian_minimizer(0.0, *l2);
    if (d.constraint1(p) <= tolerance) return DualSolution{0.0, *l2, std::move(p)};
  }

  // both constraints active: nested one-dimensional searches
  const auto inner = [&](double l1) {
    return smallest_feasible_multiplier([&](double l) { return g2_at(l1, l); });
  };
  const auto outer_g = [&](double l1) {
    const auto l2 = inner(l1);
    return l2 ? g1_at(l1, *l2) : std::numeric_limits<double>::infinity();
  };
  const auto l1 = smallest_feasible_multiplier(outer_g);
  if (!l1) return std::nullopt;
  const auto l2 = inner(*l1);
  if (!l2) return std::nullopt;
  Eigen::VectorXd p = d.lagrangian_minimizer(*l1, *l2);
  if (d.constraint1(p) > tolerance || d.constraint2(p) > tolerance) return std::nullopt;
  return DualSolution{*l1, *l2, std::move(p)};
}

Policy two_link_policy(const Eigen::VectorXd& p) {
  Policy policy;
  policy.pi.resize(p.size(), 2);
  policy.pi.col(0) = p;
  policy.pi.col(1) = (1.0 - p.array()).matrix();
  return policy;
}

}  // namespace

DesignResult design_two_link(const ScenarioSet& set, const DesignOptions& options) {
  const TwoLinkData d = two_link_data(set);
  const auto n = static_cast<Eigen::Index>(d.size());
  const double tol = options.obedience_tolerance;

  // full-information system optimum and user equilibrium shares of link 1
  Eigen::VectorXd p_opt(n);
  Eigen::VectorXd p_ue(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (d.s(k) > 0.0) {
      p_opt(k) = sys_opt_closed_form({d.a1(k), d.a2(k), d.x(k)});
      p_ue(k) = std::clamp((d.a2(k) - d.x(k)) / d.s(k), 0.0, 1.0);
    } else {
      p_opt(k) = p_ue(k) = d.x(k) < 0.0 ? 1.0 : 0.0;
    }
  }

  DesignResult result;
  result.diagnostics.method = "two-link";
  result.system_optimum_cost = d.full_cost(p_opt);
  result.full_information_cost = d.full_cost(p_ue);

  Eigen::VectorXd chosen;
  double l1 = 0.0;
  double l2 = 0.0;
  if (d.constraint1(p_opt) <= tol && d.constraint2(p_opt) <= tol) {
    chosen = p_opt;
    result.optimal = true;
    result.diagnostics.selected = "unconstrained-optimum";
  } else {
    optim::ConstrainedProblem problem;
    problem.num_constraints = 2;
    problem.objective = [&d](const Eigen::VectorXd& p, Eigen::VectorXd& grad) {
      grad = (d.w.array() * ((d.x - 2.0 * d.a2).array() + 2.0 * d.s.array() * p.array())).matrix();
      return d.objective(p);
    };
    problem.constraints = [&d](const Eigen::VectorXd& p, Eigen::VectorXd& values) {
      values.resize(2);
      values << d.constraint1(p), d.constraint2(p);
    };
    problem.add_constraint_gradients = [&d](const Eigen::VectorXd& p, const Eigen::VectorXd& mu,
                                            Eigen::VectorXd& grad) {
      const Eigen::ArrayXd two_sp = 2.0 * d.s.array() * p.array();
      grad.array() += d.w.array() * (mu(0) * ((d.x - d.a2).array() + two_sp) +
                                     mu(1) * ((d.x - d.a1 - 2.0 * d.a2).array() + two_sp));
    };
    optim::AlOptions al;
    al.inner.max_iterations = options.solver.max_iterations;
    al.inner.tolerance = options.solver.tolerance;
    al.inner.residual_scale = d.w.unaryExpr([](double w) { return w > 0.0 ? 1.0 / w : 0.0; });
    al.max_outer = options.max_outer;
    al.initial_penalty = options.initial_penalty;
    al.penalty_growth = options.penalty_growth;
    al.feasibility_tolerance = tol;
    al.stationarity_tolerance = options.kkt_tolerance;
    // zero-weight scenarios do not move; park them at the system optimum
    Eigen::VectorXd start = p_ue;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (d.w(k) == 0.0) start(k) = p_opt(k);
    }
    const auto al_result = optim::augmented_lagrangian(
        problem, [](Eigen::VectorXd& p) { optim::project_box(p, 0.0, 1.0); }, start, al);
    result.diagnostics.outer_iterations = al_result.outer_iterations;
    result.diagnostics.inner_iterations = al_result.inner_iterations;

    if (auto dual = refine_dual(d, tol)) {
      chosen = std::move(dual->p);
      l1 = dual->l1;
      l2 = dual->l2;
      result.diagnostics.selected = "dual-refined";
    } else {
      // no finite multipliers: keep the cheaper of the AL point and full disclosure
      chosen = p_ue;
      result.diagnostics.selected = "full-information-fallback";
      if (al_result.max_violation <= tol && d.objective(al_result.x) < d.objective(p_ue)) {
        chosen = al_result.x;
        l1 = al_result.multipliers(0);
        l2 = al_result.multipliers(1);
        result.diagnostics.selected = "augmented-lagrangian";
      }
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      if (d.w(k) == 0.0) chosen(k) = p_opt(k);
    }
  }

  result.policy = two_link_policy(chosen);
  result.algebraic_objective = d.objective(chosen);
  result.expected_cost = d.full_cost(chosen);
  result.obedience = obedience_residuals(result.policy, set, enumerate_paths(parallel_links(2)));
  result.poa = cost_ratio(result.expected_cost, result.system_optimum_cost);
  result.diagnostics.multipliers = Eigen::Vector2d(l1, l2);
  result.diagnostics.kkt_residual = d.kkt_residual(chosen, l1, l2);
  result.diagnostics.max_violation =
      std::max({0.0, d.constraint1(chosen), d.constraint2(chosen)});
  result.diagnostics.kkt_certified = result.diagnostics.kkt_residual <= options.kkt_tolerance &&
                                     result.diagnostics.max_violation <= tol;
  return result;
}

namespace {

// Obedience-constrained expected cost over per-scenario path distributions,
// flattened row-major (scenario blocks of |P| entries).
struct GeneralProblem {
  const ScenarioSet& set;
  const PathSet& paths;
  Eigen::Index np;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;

  GeneralProblem(const ScenarioSet& s, const PathSet& p)
      : set(s), paths(p), np(static_cast<Eigen::Index>(p.num_paths())) {
    for (Eigen::Index i = 0; i < np; ++i) {
      for (Eigen::Index j = 0; j < np; ++j) {
        if (i != j) pairs.emplace_back(i, j);
      }
    }
  }

  auto block(const Eigen::VectorXd& v, std::size_t k) const {
    return v.segment(static_cast<Eigen::Index>(k) * np, np);
  }

  double objective(const Eigen::VectorXd& v, Eigen::VectorXd& grad) const {
    const Eigen::MatrixXd& A = paths.incidence;
    grad.setZero(v.size());
    double total = 0.0;
    for (std::size_t k = 0; k < set.size(); ++k) {
      const auto& s = set[k];
      if (s.weight == 0.0) continue;
      const Eigen::VectorXd f = A * block(v, k);
      total += s.weight * f.dot(s.a.cwiseProduct(f) + s.b);
      grad.segment(static_cast<Eigen::Index>(k) * np, np) =
          s.weight * (A.transpose() * (2.0 * s.a.cwiseProduct(f) + s.b));
    }
    return total;
  }

  void constraints(const Eigen::VectorXd& v, Eigen::VectorXd& values) const {
    const Eigen::MatrixXd& A = paths.incidence;
    values.setZero(static_cast<Eigen::Index>(pairs.size()));
    for (std::size_t k = 0; k < set.size(); ++k) {
      const auto& s = set[k];
      if (s.weight == 0.0) continue;
      const Eigen::VectorXd pi = block(v, k);
      const Eigen::VectorXd c = A.transpose() * (s.a.cwiseProduct(A * pi) + s.b);
      for (std::size_t q = 0; q < pairs.size(); ++q) {
        const auto [i, j] = pairs[q];
        values(static_cast<Eigen::Index>(q)) += s.weight * pi(i) * (c(i) - c(j));
      }
    }
  }

  void add_gradients(const Eigen::VectorXd& v, const Eigen::VectorXd& mu,
                     Eigen::VectorXd& grad) const {
    const Eigen::MatrixXd& A = paths.incidence;
    for (std::size_t k = 0; k < set.size(); ++k) {
      const auto& s = set[k];
      if (s.weight == 0.0) continue;
      const Eigen::VectorXd pi = block(v, k);
      const Eigen::VectorXd c = A.transpose() * (s.a.cwiseProduct(A * pi) + s.b);
      Eigen::VectorXd direct = Eigen::VectorXd::Zero(np);
      Eigen::VectorXd through_flow = Eigen::VectorXd::Zero(np);
      for (std::size_t q = 0; q < pairs.size(); ++q) {
        const double m = mu(static_cast<Eigen::Index>(q));
        if (m == 0.0) continue;
        const auto [i, j] = pairs[q];
        direct(i) += m * (c(i) - c(j));
        through_flow(i) += m * pi(i);
        through_flow(j) -= m * pi(i);
      }
      // d(c_i - c_j)/d pi = (A' diag(a) A)(e_i - e_j), symmetric
      const Eigen::VectorXd curvature = A.transpose() * s.a.cwiseProduct(A * through_flow);
      grad.segment(static_cast<Eigen::Index>(k) * np, np) += s.weight * (direct + curvature);
    }
  }

  Policy to_policy(const Eigen::VectorXd& v) const {
    Policy p;
    p.pi.resize(static_cast<Eigen::Index>(set.size()), np);
    for (std::size_t k = 0; k < set.size(); ++k) {
      p.pi.row(static_cast<Eigen::Index>(k)) = block(v, k).transpose();
    }
    return p;
  }

  Eigen::VectorXd flatten(const Eigen::MatrixXd& rows) const {
    Eigen::VectorXd v(rows.size());
    for (Eigen::Index k = 0; k < rows.rows(); ++k) v.segment(k * np, np) = rows.row(k).transpose();
    return v;
  }
};

struct Candidate {
  Policy policy;
  double cost = std::numeric_limits<double>::infinity();
  bool feasible = false;
  int outer = 0;
  int inner = 0;
};

}  // namespace

DesignResult design_general(const ScenarioSet& set, const PathSet& paths,
                            const DesignOptions& options) {
  if (set.num_links() != paths.num_links()) {
    throw Error(ErrorCode::DimensionMismatch, "scenarios and network disagree on links");
  }
  const double tol = options.obedience_tolerance;
  DesignResult result;
  result.diagnostics.method = "general";
  result.algebraic_objective = std::numeric_limits<double>::quiet_NaN();

  const Assignment so = system_optimum(set, paths, options.solver);
  const Assignment ue = full_info_ue(set, paths, options.solver);
  result.system_optimum_cost = expected_cost(so.flow, set);
  result.full_information_cost = expected_cost(ue.flow, set);

  const auto finish = [&](Policy policy, double cost) {
    result.policy = std::move(policy);
    result.expected_cost = cost;
    result.obedience = obedience_residuals(result.policy, set, paths);
    result.diagnostics.max_violation = result.obedience.max_violation;
    result.poa = cost_ratio(result.expected_cost, result.system_optimum_cost);
    return result;
  };

  // a system-optimal path decomposition that is obedient cannot be beaten
  Policy so_policy{so.path_flows};
  const auto so_report = obedience_residuals(so_policy, set, paths);
  if (so_report.obedient(tol)) {
    result.optimal = true;
    result.diagnostics.selected = "system-optimum-certificate";
    result.diagnostics.kkt_certified = true;
    return finish(std::move(so_policy), result.system_optimum_cost);
  }

  const GeneralProblem gp(set, paths);
  optim::ConstrainedProblem problem;
  problem.num_constraints = gp.pairs.size();
  problem.objective = [&gp](const Eigen::VectorXd& v, Eigen::VectorXd& g) {
    return gp.objective(v, g);
  };
  problem.constraints = [&gp](const Eigen::VectorXd& v, Eigen::VectorXd& values) {
    gp.constraints(v, values);
  };
  problem.add_constraint_gradients = [&gp](const Eigen::VectorXd& v, const Eigen::VectorXd& mu,
                                           Eigen::VectorXd& g) { gp.add_gradients(v, mu, g); };

  optim::AlOptions al;
  al.inner.max_iterations = options.solver.max_iterations;
  al.inner.tolerance = options.solver.tolerance;
  al.inner.simplex_blocks = set.size();
  al.inner.residual_scale.resize(static_cast<Eigen::Index>(set.size()) * gp.np);
  for (std::size_t k = 0; k < set.size(); ++k) {
    const double w = set[k].weight;
    al.inner.residual_scale.segment(static_cast<Eigen::Index>(k) * gp.np, gp.np)
        .setConstant(w > 0.0 ? 1.0 / w : 0.0);
  }
  al.max_outer = options.max_outer;
  al.initial_penalty = options.initial_penalty;
  al.penalty_growth = options.penalty_growth;
  al.feasibility_tolerance = tol;
  al.stationarity_tolerance = options.kkt_tolerance;

  const auto rows = set.size();
  const auto cols = paths.num_paths();
  const optim::Projection project = [rows, cols](Eigen::VectorXd& v) {
    optim::project_row_simplices(v, rows, cols);
  };

  std::vector<Candidate> candidates(options.restarts);
  parallel_for(options.restarts, resolve_thread_count(options.threads), [&](std::size_t r) {
    Eigen::VectorXd start;
    if (r == 0) {
      start = gp.flatten(ue.path_flows);
    } else {
      std::seed_seq seq{static_cast<std::uint64_t>(options.seed), static_cast<std::uint64_t>(r)};
      std::mt19937_64 rng(seq);
      start.resize(static_cast<Eigen::Index>(rows * cols));
      for (std::size_t k = 0; k < rows; ++k) {
        start.segment(static_cast<Eigen::Index>(k * cols), gp.np) =
            detail::flat_dirichlet(rng, gp.np);
      }
    }
    const auto al_result = optim::augmented_lagrangian(problem, project, start, al);
    Candidate c;
    c.policy = gp.to_policy(al_result.x);
    c.outer = al_result.outer_iterations;
    c.inner = al_result.inner_iterations;
    const auto report = obedience_residuals(c.policy, set, paths);
    if (report.obedient(tol)) {
      try {
        const auto eq = bayesian_ue(c.policy, set, paths, {options.solver, std::nullopt});
        c.cost = expected_cost(eq.flow, set);
        c.feasible = true;
      } catch (const Error&) {
        c.feasible = false;
      }
    }
    candidates[r] = std::move(c);
  });

  result.diagnostics.restarts = options.restarts;
  int best = -1;
  double best_cost = result.full_information_cost;
  for (std::size_t r = 0; r < candidates.size(); ++r) {
    const auto& c = candidates[r];
    result.diagnostics.outer_iterations += c.outer;
    result.diagnostics.inner_iterations += c.inner;
    if (!c.feasible) continue;
    ++result.diagnostics.feasible_restarts;
    // a restart must beat the incumbent by more than the solver tolerance;
    // ties go to the exactly obedient full-information policy
    if (c.cost < best_cost - options.solver.tolerance * (1.0 + std::abs(best_cost))) {
      best = static_cast<int>(r);
      best_cost = c.cost;
    }
  }
  result.diagnostics.fallback_used = result.diagnostics.feasible_restarts == 0;
  result.diagnostics.best_restart = best;
  if (best < 0) {
    result.diagnostics.selected = "full-information-fallback";
    return finish(Policy{ue.path_flows}, result.full_information_cost);
  }
  result.diagnostics.selected = "restart";
  return finish(std::move(candidates[static_cast<std::size_t>(best)].policy), best_cost);
}

double price_of_anarchy(const Policy& policy, const ScenarioSet& set, const PathSet& paths,
                        const SolverOptions& options) {
  const auto eq = bayesian_ue(policy, set, paths, {options, std::nullopt});
  const double cost = expected_cost(eq.flow, set);
  const double optimum = expected_cost(system_optimum(set, paths, options).flow, set);
  return cost_ratio(cost, optimum);
}

double price_of_anarchy(const DesignResult& result, const ScenarioSet& set, const PathSet& paths,
                        const SolverOptions& options) {
  const double optimum = expected_cost(system_optimum(set, paths, options).flow, set);
  return cost_ratio(result.expected_cost, optimum);
}

}  // namespace infodesign
