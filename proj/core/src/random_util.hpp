#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace infodesign::detail {

inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform draw from the simplex (flat Dirichlet).
inline Eigen::VectorXd flat_dirichlet(std::mt19937_64& rng, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = -std::log1p(-unit_uniform(rng));
  const double total = v.sum();
  if (total > 0.0) {
    v /= total;
  } else {
    v.setConstant(1.0 / static_cast<double>(n));
  }
  return v;
}

}  // namespace infodesign::detail
