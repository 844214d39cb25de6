#include "infodesign/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace infodesign::optim {

void project_simplex(Eigen::Ref<Eigen::VectorXd> v) {
  const auto n = v.size();
  if (n == 0) return;
  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cumulative += sorted[static_cast<std::size_t>(k)];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[static_cast<std::size_t>(k)] - candidate > 0.0) theta = candidate;
  }
  for (Eigen::Index k = 0; k < n; ++k) v(k) = std::max(v(k) - theta, 0.0);
}

void project_row_simplices(Eigen::VectorXd& x, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    project_simplex(x.segment(static_cast<Eigen::Index>(r * cols), static_cast<Eigen::Index>(cols)));
  }
}

void project_box(Eigen::VectorXd& x, double lower, double upper) {
  x = x.cwiseMax(lower).cwiseMin(upper);
}

void center_row_blocks(const Eigen::VectorXd& x, Eigen::VectorXd& g, std::size_t rows,
                       std::size_t cols) {
  const auto n = static_cast<Eigen::Index>(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto start = static_cast<Eigen::Index>(r * cols);
    auto block = g.segment(start, n);
    const double mass = x.segment(start, n).sum();
    if (!(mass > 0.0)) continue;
    block.array() -= x.segment(start, n).dot(block) / mass;
  }
}

Eigen::VectorXd projected_step(const Eigen::VectorXd& x, const Eigen::VectorXd& grad,
                               const Projection& project, const Eigen::VectorXd& scale) {
  Eigen::VectorXd trial = scale.size() == 0 ? Eigen::VectorXd(x - grad)
                                            : Eigen::VectorXd(x - scale.cwiseProduct(grad));
  project(trial);
  return trial;
}

double stationarity(const Eigen::VectorXd& x, const Eigen::VectorXd& grad,
                    const Projection& project, const Eigen::VectorXd& scale) {
  if (x.size() == 0) return 0.0;
  return (projected_step(x, grad, project, scale) - x).cwiseAbs().maxCoeff();
}

PgResult projected_gradient(const Objective& f, const Projection& project, Eigen::VectorXd x0,
                            const PgOptions& options) {
  PgResult out;
  Eigen::VectorXd x = std::move(x0);
  project(x);
  const auto evaluate = [&](const Eigen::VectorXd& z, Eigen::VectorXd& grad) {
    const double value = f(z, grad);
    if (options.simplex_blocks > 0) {
      center_row_blocks(z, grad, options.simplex_blocks,
                        static_cast<std::size_t>(z.size()) / options.simplex_blocks);
    }
    return value;
  };
  Eigen::VectorXd g(x.size());
  double fx = evaluate(x, g);
  Eigen::VectorXd g_new(x.size());
  Eigen::VectorXd x_new(x.size());

  double residual = stationarity(x, g, project, options.residual_scale);
  double step = residual > 0.0 ? std::clamp(1.0 / residual, options.min_step, options.max_step) : 1.0;
  constexpr double eps = std::numeric_limits<double>::epsilon();

  int it = 0;
  for (; it < options.max_iterations; ++it) {
    if (residual <= options.tolerance) {
      out.converged = true;
      break;
    }
    Eigen::VectorXd direction = options.residual_scale.size() == 0
                                    ? Eigen::VectorXd(x - step * g)
                                    : Eigen::VectorXd(x - step * options.residual_scale.cwiseProduct(g));
    project(direction);
    direction -= x;
    const double slope = g.dot(direction);
    if (!(slope < 0.0)) {
      // trial step too small to move; restart from a unit step
      if (step >= 1.0) break;
      step = 1.0;
      continue;
    }

    double lambda = 1.0;
    double f_new = 0.0;
    bool accepted = false;
    const double slack = 16.0 * eps * (1.0 + std::abs(fx));
    while (lambda > 1e-20) {
      x_new = x + lambda * direction;
      f_new = evaluate(x_new, g_new);
      if (f_new <= fx + options.armijo * lambda * slope + slack) {
        accepted = true;
        break;
      }
      // safeguarded quadratic interpolation
      const double denom = 2.0 * (f_new - fx - lambda * slope);
      double next = denom > 0.0 ? -slope * lambda * lambda / denom : 0.5 * lambda;
      lambda = std::clamp(next, 0.1 * lambda, 0.5 * lambda);
    }
    if (!accepted) break;

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    x.swap(x_new);
    g.swap(g_new);
    fx = f_new;

    double sy = s.dot(y);
    if (options.residual_scale.size() != 0) {
      // Barzilai-Borwein in the scaled metric
      const Eigen::VectorXd inv = options.residual_scale.unaryExpr(
          [](double d) { return d > 0.0 ? 1.0 / d : 0.0; });
      const double ss = s.dot(inv.cwiseProduct(s));
      step = sy > 0.0 ? std::clamp(ss / sy, options.min_step, options.max_step) : options.max_step;
    } else {
      step = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, options.min_step, options.max_step)
                      : options.max_step;
    }
    residual = stationarity(x, g, project, options.residual_scale);
  }
  if (out.converged && options.polish) {
    x = projected_step(x, g, project, options.residual_scale);
    fx = evaluate(x, g);
  }
  out.x = std::move(x);
  out.value = fx;
  out.residual = residual;
  out.iterations = it;
  if (residual <= options.tolerance) out.converged = true;
  return out;
}

AlResult augmented_lagrangian(const ConstrainedProblem& problem, const Projection& project,
                              Eigen::VectorXd x0, const AlOptions& options) {
  const auto m = static_cast<Eigen::Index>(problem.num_constraints);
  AlResult out;
  Eigen::VectorXd lambda = options.initial_multipliers.size() == m
                               ? Eigen::VectorXd(options.initial_multipliers.cwiseMax(0.0))
                               : Eigen::VectorXd::Zero(m);
  double rho = options.initial_penalty;
  Eigen::VectorXd x = std::move(x0);
  project(x);
  Eigen::VectorXd values(m);
  problem.constraints(x, values);
  double previous_violation = std::max(0.0, m > 0 ? values.maxCoeff() : 0.0);

  for (int outer = 0; outer < options.max_outer; ++outer) {
    const Eigen::VectorXd lambda_fixed = lambda;
    const double rho_fixed = rho;
    optim::Objective augmented = [&](const Eigen::VectorXd& z, Eigen::VectorXd& grad) {
      double value = problem.objective(z, grad);
      Eigen::VectorXd g(m);
      problem.constraints(z, g);
      Eigen::VectorXd weights(m);
      for (Eigen::Index k = 0; k < m; ++k) {
        const double shifted = std::max(0.0, lambda_fixed(k) + rho_fixed * g(k));
        weights(k) = shifted;
        value += (shifted * shifted - lambda_fixed(k) * lambda_fixed(k)) / (2.0 * rho_fixed);
      }
      if (m > 0) problem.add_constraint_gradients(z, weights, grad);
      return value;
    };
    auto inner = projected_gradient(augmented, project, x, options.inner);
    x = std::move(inner.x);
    out.inner_iterations += inner.iterations;
    out.outer_iterations = outer + 1;

    problem.constraints(x, values);
    for (Eigen::Index k = 0; k < m; ++k) lambda(k) = std::max(0.0, lambda(k) + rho * values(k));
    const double violation = std::max(0.0, m > 0 ? values.maxCoeff() : 0.0);

    Eigen::VectorXd grad(x.size());
    problem.objective(x, grad);
    if (m > 0) problem.add_constraint_gradients(x, lambda, grad);
    out.stationarity = stationarity(x, grad, project, options.inner.residual_scale);
    out.complementarity = m > 0 ? lambda.cwiseProduct(values).cwiseAbs().maxCoeff() : 0.0;
    out.max_violation = violation;
    if (violation <= options.feasibility_tolerance &&
        out.stationarity <= options.stationarity_tolerance &&
        out.complementarity <= options.stationarity_tolerance) {
      out.converged = true;
      break;
    }
    if (violation > 0.25 * previous_violation) rho *= options.penalty_growth;
    previous_violation = violation;
  }

  Eigen::VectorXd grad(x.size());
  out.objective = problem.objective(x, grad);
  out.x = std::move(x);
  out.multipliers = std::move(lambda);
  out.constraint_values = values;
  out.penalty = rho;
  return out;
}

}  // namespace infodesign::optim
