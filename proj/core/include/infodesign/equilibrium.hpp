#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "infodesign/network.hpp"
#include "infodesign/scenarios.hpp"

namespace infodesign {

/// Per-scenario distribution over paths; row k is pi(theta_k).
struct Policy {
  Eigen::MatrixXd pi;

  std::size_t num_scenarios() const { return static_cast<std::size_t>(pi.rows()); }
  std::size_t num_paths() const { return static_cast<std::size_t>(pi.cols()); }

  /// Same recommendation distribution in every scenario.
  static Policy constant(std::size_t scenarios, const Eigen::VectorXd& distribution);

  /// Throws DimensionMismatch or InvalidArgument when a row leaves the simplex
  /// by more than 1e-12.
  void validate(const ScenarioSet& set, const PathSet& paths) const;
};

/// Per-scenario link flows; row k is f(theta_k).
struct StateFlow {
  Eigen::MatrixXd flows;
};

/// Row-stochastic matrix; y(i, j) is the share of users told i who take j.
struct ResponseMatrix {
  Eigen::MatrixXd y;

  static ResponseMatrix identity(std::size_t paths);
  /// Rows drawn uniformly from the simplex.
  static ResponseMatrix random(std::size_t paths, std::uint64_t seed);
};

struct SolverOptions {
  int max_iterations = 100000;
  double tolerance = 1e-9;
};

/// c_i = sum_e A(e, i) (a_e f_e + b_e).
Eigen::VectorXd path_costs(const Scenario& scenario, const Eigen::VectorXd& link_flow,
                           const PathSet& paths);

/// Result of a per-scenario assignment (system optimum or Wardrop equilibrium).
struct Assignment {
  StateFlow flow;
  /// Row k is the path flow z(theta_k) with f = A z.
  Eigen::MatrixXd path_flows;
  /// Worst optimality residual over scenarios: used paths are within this
  /// much of the cheapest (marginal) path cost.
  double max_residual = 0.0;
  int iterations = 0;
};

/// Minimizer of sum_e f_e (a_e f_e + b_e) over unit o-d flows, solved
/// scenario by scenario. Throws SolverDivergence.
Assignment system_optimum(const ScenarioSet& set, const PathSet& paths,
                          const SolverOptions& options = {});

/// Full-information Wardrop equilibrium (Beckmann potential minimizer) per
/// scenario. Throws SolverDivergence.
Assignment full_info_ue(const ScenarioSet& set, const PathSet& paths,
                        const SolverOptions& options = {});

/// max over used paths of c_i - min_j c_j.
double wardrop_residual(const Eigen::VectorXd& path_flow, const Eigen::VectorXd& costs);

/// Link flows A y' pi(theta) for every scenario.
StateFlow induced_flow(const Policy& policy, const ResponseMatrix& response, const PathSet& paths);

/// Weighted potential: sum_theta w sum_e (a_e g_e^2 / 2 + b_e g_e), g = A y' pi(theta).
double potential(const Policy& policy, const ResponseMatrix& response, const ScenarioSet& set,
                 const PathSet& paths);

/// d potential / d y(i, j) = sum_theta w pi_i(theta) c_j(f(theta), theta).
Eigen::MatrixXd potential_gradient(const Policy& policy, const ResponseMatrix& response,
                                   const ScenarioSet& set, const PathSet& paths);

/// Largest E_i[c_j] - min_k E_i[c_k] over signals i with positive marginal
/// and responses y(i, j) > 0; zero when the equilibrium conditions hold.
double equilibrium_residual(const Policy& policy, const ResponseMatrix& response,
                            const ScenarioSet& set, const PathSet& paths);

struct BayesianEquilibrium {
  ResponseMatrix response;
  StateFlow flow;
  double potential = 0.0;
  /// Projected-gradient stationarity of the potential at the returned y.
  double stationarity = 0.0;
  double equilibrium_residual = 0.0;
  int iterations = 0;
};

struct BayesianOptions {
  SolverOptions solver;
  /// Starting response matrix; identity when absent.
  std::optional<ResponseMatrix> initial;
};

/// Minimizes the potential over row-stochastic response matrices. The flow is
/// unique even where y is not. Throws SolverDivergence with the worst
/// equilibrium residual in the message.
BayesianEquilibrium bayesian_ue(const Policy& policy, const ScenarioSet& set, const PathSet& paths,
                                const BayesianOptions& options = {});

struct PosteriorSet {
  ScenarioSet posterior;
  /// sum_omega pi_i(omega) w(omega)
  double marginal = 0.0;
};

/// Bayes update after signal i. A signal that is constant over positive-weight
/// scenarios returns the prior weights unchanged. Throws DegenerateSignal when
/// the marginal is zero.
PosteriorSet posterior(const Policy& policy, const ScenarioSet& set, std::size_t signal);

/// Per-signal marginals sum_theta w pi_i(theta).
Eigen::VectorXd signal_marginals(const Policy& policy, const ScenarioSet& set);

/// sum_theta w sum_e f_e (a_e f_e + b_e).
double expected_cost(const StateFlow& flow, const ScenarioSet& set);

/// Cost of one scenario's link flow.
double scenario_cost(const Scenario& scenario, const Eigen::VectorXd& link_flow);

}  // namespace infodesign
