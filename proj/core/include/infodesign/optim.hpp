#pragma once

#include <cstddef>
#include <functional>

#include <Eigen/Dense>

namespace infodesign::optim {

/// Euclidean projection onto the probability simplex (sort-based).
void project_simplex(Eigen::Ref<Eigen::VectorXd> v);

/// x holds `rows` consecutive blocks of `cols` entries, each projected onto
/// its own simplex.
void project_row_simplices(Eigen::VectorXd& x, std::size_t rows, std::size_t cols);

void project_box(Eigen::VectorXd& x, double lower, double upper);

using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;
using Projection = std::function<void(Eigen::VectorXd& x)>;

struct PgOptions {
  int max_iterations = 100000;
  /// Convergence when ||P(x - D g) - x||_inf <= tolerance.
  double tolerance = 1e-9;
  double armijo = 1e-4;
  double min_step = 1e-14;
  double max_step = 1e14;
  /// Optional diagonal D in the stationarity measure; identity when empty.
  Eigen::VectorXd residual_scale;
  /// When nonzero, x is a stack of this many equal simplex blocks and every
  /// gradient is passed through center_row_blocks.
  std::size_t simplex_blocks = 0;
  /// On convergence return P(x - D g) instead of x; coordinates the final
  /// step identifies as inactive come back as exact zeros.
  bool polish = false;
};

struct PgResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// ||P(x - D g) - x||_inf.
double stationarity(const Eigen::VectorXd& x, const Eigen::VectorXd& grad,
                    const Projection& project, const Eigen::VectorXd& scale = {});

/// Shifts each block of g by its x-weighted mean. Simplex projections are
/// invariant under per-block constant shifts; the shifted gradient avoids
/// cancellation in x - t g near a solution.
void center_row_blocks(const Eigen::VectorXd& x, Eigen::VectorXd& g, std::size_t rows,
                       std::size_t cols);

/// P(x - D g).
Eigen::VectorXd projected_step(const Eigen::VectorXd& x, const Eigen::VectorXd& grad,
                               const Projection& project, const Eigen::VectorXd& scale = {});

/// Spectral projected gradient: Barzilai-Borwein trial steps along the
/// projected direction with Armijo backtracking.
PgResult projected_gradient(const Objective& f, const Projection& project, Eigen::VectorXd x0,
                            const PgOptions& options = {});

/// min f(x) s.t. g_k(x) <= 0, x in the projection's feasible set.
struct ConstrainedProblem {
  Objective objective;
  std::size_t num_constraints = 0;
  std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& values)> constraints;
  /// grad += sum_k weights_k * grad g_k(x)
  std::function<void(const Eigen::VectorXd& x, const Eigen::VectorXd& weights,
                     Eigen::VectorXd& grad)>
      add_constraint_gradients;
};

struct AlOptions {
  PgOptions inner;
  int max_outer = 20;
  double initial_penalty = 10.0;
  double penalty_growth = 10.0;
  double feasibility_tolerance = 1e-9;
  double stationarity_tolerance = 1e-8;
  Eigen::VectorXd initial_multipliers;
};

struct AlResult {
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers;
  Eigen::VectorXd constraint_values;
  double objective = 0.0;
  double max_violation = 0.0;
  /// Projected-gradient residual of the Lagrangian at (x, multipliers).
  double stationarity = 0.0;
  double complementarity = 0.0;
  double penalty = 0.0;
  int outer_iterations = 0;
  int inner_iterations = 0;
  bool converged = false;
};

/// Augmented Lagrangian outer loop: multipliers lambda <- max(0, lambda + rho g),
/// rho grows by `penalty_growth` whenever the violation fails to drop by 4x.
AlResult augmented_lagrangian(const ConstrainedProblem& problem, const Projection& project,
                              Eigen::VectorXd x0, const AlOptions& options = {});

}  // namespace infodesign::optim
