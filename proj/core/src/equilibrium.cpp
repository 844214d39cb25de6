#include "infodesign/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "infodesign/error.hpp"
#include "infodesign/optim.hpp"
#include "random_util.hpp"

namespace infodesign {

namespace {

constexpr double kSimplexTolerance = 1e-12;

void check_dimensions(const ScenarioSet& set, const PathSet& paths) {
  if (set.num_links() != paths.num_links()) {
    throw Error(ErrorCode::DimensionMismatch,
                "scenarios have " + std::to_string(set.num_links()) + " links, network has " +
                    std::to_string(paths.num_links()));
  }
}

}  // namespace

Policy Policy::constant(std::size_t scenarios, const Eigen::VectorXd& distribution) {
  Policy p;
  p.pi = distribution.transpose().replicate(static_cast<Eigen::Index>(scenarios), 1);
  return p;
}

void Policy::validate(const ScenarioSet& set, const PathSet& paths) const {
  if (num_scenarios() != set.size() || num_paths() != paths.num_paths()) {
    std::ostringstream msg;
    msg << "policy is " << pi.rows() << "x" << pi.cols() << ", expected " << set.size() << "x"
        << paths.num_paths();
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
  for (Eigen::Index k = 0; k < pi.rows(); ++k) {
    if (pi.row(k).minCoeff() < -kSimplexTolerance ||
        std::abs(pi.row(k).sum() - 1.0) > kSimplexTolerance || !pi.row(k).allFinite()) {
      throw Error(ErrorCode::InvalidArgument,
                  "policy row " + std::to_string(k) + " is not a probability vector");
    }
  }
}

ResponseMatrix ResponseMatrix::identity(std::size_t paths) {
  const auto n = static_cast<Eigen::Index>(paths);
  return {Eigen::MatrixXd::Identity(n, n)};
}

ResponseMatrix ResponseMatrix::random(std::size_t paths, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(paths);
  std::mt19937_64 rng(seed);
  ResponseMatrix r{Eigen::MatrixXd(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) r.y.row(i) = detail::flat_dirichlet(rng, n).transpose();
  return r;
}

Eigen::VectorXd path_costs(const Scenario& scenario, const Eigen::VectorXd& link_flow,
                           const PathSet& paths) {
  if (static_cast<std::size_t>(link_flow.size()) != paths.num_links() ||
      scenario.num_links() != paths.num_links()) {
    throw Error(ErrorCode::DimensionMismatch, "link flow, scenario and network disagree");
  }
  const Eigen::VectorXd link_delay = scenario.a.cwiseProduct(link_flow) + scenario.b;
  return paths.incidence.transpose() * link_delay;
}

double wardrop_residual(const Eigen::VectorXd& path_flow, const Eigen::VectorXd& costs) {
  const double cheapest = costs.minCoeff();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < costs.size(); ++i) {
    if (path_flow(i) > 0.0) worst = std::max(worst, costs(i) - cheapest);
  }
  return worst;
}

namespace {

// Per-scenario quadratic over the path simplex:
// 1/2 z'Qz + q'z with Q = A' diag(curvature * a) A, q = A' b.
Assignment solve_assignment(const ScenarioSet& set, const PathSet& paths, double curvature,
                            const SolverOptions& options, const char* what) {
  check_dimensions(set, paths);
  const auto np = static_cast<Eigen::Index>(paths.num_paths());
  const auto nl = static_cast<Eigen::Index>(paths.num_links());
  const auto ns = static_cast<Eigen::Index>(set.size());
  const Eigen::MatrixXd& A = paths.incidence;

  Assignment out;
  out.flow.flows.resize(ns, nl);
  out.path_flows.resize(ns, np);

  optim::PgOptions pg;
  pg.max_iterations = options.max_iterations;
  pg.tolerance = options.tolerance;
  pg.simplex_blocks = 1;
  pg.polish = true;
  const optim::Projection project = [](Eigen::VectorXd& z) { optim::project_simplex(z); };

  Eigen::VectorXd z_prev = Eigen::VectorXd::Constant(np, 1.0 / static_cast<double>(np));
  for (Eigen::Index k = 0; k < ns; ++k) {
    const auto& s = set[static_cast<std::size_t>(k)];
    const Eigen::MatrixXd Q = A.transpose() * (curvature * s.a).asDiagonal() * A;
    const Eigen::VectorXd q = A.transpose() * s.b;
    Eigen::VectorXd z;
    Eigen::VectorXd grad;
    if (np == 1) {
      z = Eigen::VectorXd::Ones(1);
      grad = Q * z + q;
    } else {
      const optim::Objective f = [&](const Eigen::VectorXd& v, Eigen::VectorXd& g) {
        g.noalias() = Q * v;
        const double value = 0.5 * v.dot(g) + q.dot(v);
        g += q;
        return value;
      };
      auto result = optim::projected_gradient(f, project, z_prev, pg);
      out.iterations += result.iterations;
      if (!result.converged) {
        throw Error(ErrorCode::SolverDivergence,
                    std::string(what) + ": scenario " + std::to_string(k) + " stalled at residual " +
                        std::to_string(result.residual));
      }
      z = std::move(result.x);
      grad = Q * z + q;
    }
    out.max_residual = std::max(out.max_residual, wardrop_residual(z, grad));
    out.path_flows.row(k) = z.transpose();
    out.flow.flows.row(k) = (A * z).transpose();
    z_prev = z;
  }
  return out;
}

}  // namespace

Assignment system_optimum(const ScenarioSet& set, const PathSet& paths,
                          const SolverOptions& options) {
  return solve_assignment(set, paths, 2.0, options, "system optimum");
}

Assignment full_info_ue(const ScenarioSet& set, const PathSet& paths, const SolverOptions& options) {
  return solve_assignment(set, paths, 1.0, options, "user equilibrium");
}

StateFlow induced_flow(const Policy& policy, const ResponseMatrix& response, const PathSet& paths) {
  StateFlow out;
  // rows: pi(theta)' y A'
  out.flows = policy.pi * response.y * paths.incidence.transpose();
  return out;
}

namespace {

void check_response(const ResponseMatrix& response, const PathSet& paths) {
  const auto n = static_cast<Eigen::Index>(paths.num_paths());
  if (response.y.rows() != n || response.y.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "response matrix must be |P| x |P|");
  }
}

// potential and, optionally, its gradient in one pass over the scenarios
double potential_impl(const Eigen::MatrixXd& pi, const Eigen::MatrixXd& y, const ScenarioSet& set,
                      const PathSet& paths, Eigen::MatrixXd* gradient) {
  const Eigen::MatrixXd& A = paths.incidence;
  const Eigen::MatrixXd path_flow = pi * y;  // rows: y' pi(theta)
  double value = 0.0;
  if (gradient) gradient->setZero(y.rows(), y.cols());
  for (std::size_t k = 0; k < set.size(); ++k) {
    const auto& s = set[k];
    if (s.weight == 0.0) continue;
    const auto row = static_cast<Eigen::Index>(k);
    const Eigen::VectorXd g = A * path_flow.row(row).transpose();
    value += s.weight * (0.5 * s.a.cwiseProduct(g).dot(g) + s.b.dot(g));
    if (gradient) {
      const Eigen::VectorXd c = A.transpose() * (s.a.cwiseProduct(g) + s.b);
      gradient->noalias() += s.weight * pi.row(row).transpose() * c.transpose();
    }
  }
  return value;
}

}  // namespace

double potential(const Policy& policy, const ResponseMatrix& response, const ScenarioSet& set,
                 const PathSet& paths) {
  check_dimensions(set, paths);
  check_response(response, paths);
  policy.validate(set, paths);
  return potential_impl(policy.pi, response.y, set, paths, nullptr);
}

Eigen::MatrixXd potential_gradient(const Policy& policy, const ResponseMatrix& response,
                                   const ScenarioSet& set, const PathSet& paths) {
  check_dimensions(set, paths);
  check_response(response, paths);
  policy.validate(set, paths);
  Eigen::MatrixXd grad;
  potential_impl(policy.pi, response.y, set, paths, &grad);
  return grad;
}

Eigen::VectorXd signal_marginals(const Policy& policy, const ScenarioSet& set) {
  return policy.pi.transpose() * set.weights();
}

double equilibrium_residual(const Policy& policy, const ResponseMatrix& response,
                            const ScenarioSet& set, const PathSet& paths) {
  const Eigen::MatrixXd grad = potential_gradient(policy, response, set, paths);
  const Eigen::VectorXd marginal = signal_marginals(policy, set);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < grad.rows(); ++i) {
    if (!(marginal(i) > 0.0)) continue;
    const Eigen::VectorXd expected = grad.row(i).transpose() / marginal(i);
    const double best = expected.minCoeff();
    for (Eigen::Index j = 0; j < grad.cols(); ++j) {
      if (response.y(i, j) > 0.0) worst = std::max(worst, expected(j) - best);
    }
  }
  return worst;
}

BayesianEquilibrium bayesian_ue(const Policy& policy, const ScenarioSet& set, const PathSet& paths,
                                const BayesianOptions& options) {
  check_dimensions(set, paths);
  policy.validate(set, paths);
  const auto np = static_cast<Eigen::Index>(paths.num_paths());
  ResponseMatrix start = options.initial ? *options.initial : ResponseMatrix::identity(paths.num_paths());
  check_response(start, paths);

  // optimize over the row-major flattening of y
  const auto to_matrix = [np](const Eigen::VectorXd& v) {
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
               v.data(), np, np)
        .eval();
  };
  Eigen::VectorXd x0(np * np);
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(x0.data(), np,
                                                                                      np) = start.y;

  const optim::Objective f = [&](const Eigen::VectorXd& v, Eigen::VectorXd& g) {
    Eigen::MatrixXd grad;
    const double value = potential_impl(policy.pi, to_matrix(v), set, paths, &grad);
    g.resize(v.size());
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(g.data(), np,
                                                                                        np) = grad;
    return value;
  };
  const auto rows = static_cast<std::size_t>(np);
  const optim::Projection project = [rows](Eigen::VectorXd& v) {
    optim::project_row_simplices(v, rows, rows);
  };
  optim::PgOptions pg;
  pg.max_iterations = options.solver.max_iterations;
  pg.tolerance = options.solver.tolerance;
  pg.simplex_blocks = rows;
  pg.polish = true;
  // stationarity in posterior units: row i of the gradient carries the
  // signal marginal as a factor
  const Eigen::VectorXd marginal = signal_marginals(policy, set);
  pg.residual_scale.resize(np * np);
  for (Eigen::Index i = 0; i < np; ++i) {
    pg.residual_scale.segment(i * np, np)
        .setConstant(marginal(i) > 0.0 ? 1.0 / marginal(i) : 0.0);
  }
  auto result = optim::projected_gradient(f, project, x0, pg);

  BayesianEquilibrium out;
  out.response.y = to_matrix(result.x);
  out.flow = induced_flow(policy, out.response, paths);
  out.potential = result.value;
  out.stationarity = result.residual;
  out.iterations = result.iterations;
  out.equilibrium_residual = equilibrium_residual(policy, out.response, set, paths);
  if (!result.converged) {
    throw Error(ErrorCode::SolverDivergence,
                "bayesian equilibrium stalled at stationarity " + std::to_string(result.residual) +
                    ", worst equilibrium residual " + std::to_string(out.equilibrium_residual));
  }
  return out;
}

PosteriorSet posterior(const Policy& policy, const ScenarioSet& set, std::size_t signal) {
  if (policy.num_scenarios() != set.size() || signal >= policy.num_paths()) {
    throw Error(ErrorCode::DimensionMismatch, "signal or policy shape does not match the scenarios");
  }
  const auto col = static_cast<Eigen::Index>(signal);
  const Eigen::VectorXd prior = set.weights();
  const double marginal = policy.pi.col(col).dot(prior);
  if (!(marginal > 0.0)) {
    throw Error(ErrorCode::DegenerateSignal,
                "signal " + std::to_string(signal) + " is never sent; posterior undefined");
  }
  bool constant = true;
  double first = std::numeric_limits<double>::quiet_NaN();
  for (Eigen::Index k = 0; k < prior.size() && constant; ++k) {
    if (prior(k) == 0.0) continue;
    if (std::isnan(first)) {
      first = policy.pi(k, col);
    } else if (policy.pi(k, col) != first) {
      constant = false;
    }
  }
  if (constant) return {set, marginal};

  Eigen::VectorXd weights = policy.pi.col(col).cwiseProduct(prior) / marginal;
  // absorb rounding so the reweighted set satisfies the unit-sum invariant
  weights /= weights.sum();
  return {set.reweighted(weights), marginal};
}

double scenario_cost(const Scenario& scenario, const Eigen::VectorXd& link_flow) {
  return link_flow.dot(scenario.a.cwiseProduct(link_flow) + scenario.b);
}

double expected_cost(const StateFlow& flow, const ScenarioSet& set) {
  if (static_cast<std::size_t>(flow.flows.rows()) != set.size() ||
      static_cast<std::size_t>(flow.flows.cols()) != set.num_links()) {
    throw Error(ErrorCode::DimensionMismatch, "state flow shape does not match the scenarios");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < set.size(); ++k) {
    const auto& s = set[k];
    if (s.weight == 0.0) continue;
    total += s.weight * scenario_cost(s, flow.flows.row(static_cast<Eigen::Index>(k)).transpose());
  }
  return total;
}

}  // namespace infodesign
