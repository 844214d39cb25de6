#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "infodesign/equilibrium.hpp"
#include "infodesign/network.hpp"
#include "infodesign/scenarios.hpp"

namespace infodesign {

/// Aggregated obedience constraints of a policy under the obedient flow A pi.
struct ObedienceReport {
  /// (i, j): sum_theta w pi_i (c_i - c_j); zero on the diagonal.
  Eigen::MatrixXd residuals;
  /// Largest off-diagonal residual, floored at zero.
  double max_violation = 0.0;
  Eigen::VectorXd marginals;

  bool obedient(double tolerance) const { return max_violation <= tolerance; }
};

ObedienceReport obedience_residuals(const Policy& policy, const ScenarioSet& set,
                                    const PathSet& paths);

struct DesignOptions {
  SolverOptions solver;
  /// Feasibility tolerance on obedience inside the solvers.
  double obedience_tolerance = 1e-9;
  double kkt_tolerance = 1e-8;
  int max_outer = 20;
  double initial_penalty = 10.0;
  double penalty_growth = 10.0;
  std::size_t restarts = 16;
  std::uint64_t seed = 0;
  /// 0: resolve from hardware and INFODESIGN_THREADS.
  std::size_t threads = 0;
};

struct DesignDiagnostics {
  std::string method;
  /// Which candidate was returned: "unconstrained-optimum", "dual-refined",
  /// "augmented-lagrangian", "system-optimum-certificate", "restart",
  /// "full-information-fallback".
  std::string selected;
  int outer_iterations = 0;
  int inner_iterations = 0;
  double kkt_residual = 0.0;
  double max_violation = 0.0;
  Eigen::VectorXd multipliers;
  std::size_t restarts = 0;
  std::size_t feasible_restarts = 0;
  /// Restart index of the returned policy, -1 when none was used.
  int best_restart = -1;
  bool kkt_certified = false;
  /// No restart produced an obedient policy.
  bool fallback_used = false;
};

struct DesignResult {
  Policy policy;
  /// Expected travel time of the designed policy.
  double expected_cost = 0.0;
  /// Two-link program value without the policy-independent term E[a2 + b2];
  /// NaN for general networks.
  double algebraic_objective = 0.0;
  double system_optimum_cost = 0.0;
  double full_information_cost = 0.0;
  ObedienceReport obedience;
  double poa = 1.0;
  /// The system optimum itself is obedient, so no policy can do better.
  bool optimal = false;
  DesignDiagnostics diagnostics;
};

/// Convex two-link program over pi_1(theta) in [0,1]: minimize
/// E[(x - 2 a2) p + (a1 + a2) p^2] subject to the two aggregated obedience
/// constraints. Requires a1 + a2 > 0 on positive-weight scenarios.
DesignResult design_two_link(const ScenarioSet& set, const DesignOptions& options = {});

/// Multistart heuristic for arbitrary networks. Returns the system-optimum
/// policy with optimal = true when it is obedient; otherwise the cheapest
/// obedient candidate among the restarts and the full-information equilibrium.
/// Candidate costs are evaluated at their Bayesian equilibrium.
DesignResult design_general(const ScenarioSet& set, const PathSet& paths,
                            const DesignOptions& options = {});

/// ratio numerator / system-optimum cost with the 0/0 = 1 convention; throws
/// ZeroOptimalCost when only the denominator vanishes.
double cost_ratio(double cost, double system_optimum_cost);

/// Price of anarchy of an arbitrary policy: Bayesian-equilibrium expected cost
/// over the full-information system-optimum cost.
double price_of_anarchy(const Policy& policy, const ScenarioSet& set, const PathSet& paths,
                        const SolverOptions& options = {});

double price_of_anarchy(const DesignResult& result, const ScenarioSet& set, const PathSet& paths,
                        const SolverOptions& options = {});

}  // namespace infodesign
