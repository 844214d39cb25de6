#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "infodesign/equilibrium.hpp"
#include "infodesign/network.hpp"
#include "infodesign/scenarios.hpp"

namespace fixtures {

inline infodesign::Graph wheatstone() {
  return infodesign::build_graph({{"ou", "o", "u"}, {"ov", "o", "v"}, {"uv", "u", "v"}, {"ud", "u", "d"},
                                  {"vd", "v", "d"}},
                                 "o", "d");
}

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

/// Single deterministic scenario.
inline infodesign::ScenarioSet single(std::initializer_list<double> a, std::initializer_list<double> b) {
  return infodesign::from_discrete_spec({{1.0, vec(a), vec(b)}});
}

inline infodesign::ScenarioSet pigou() { return single({1.0, 0.0}, {0.0, 1.0}); }

/// Two-link scenarios with fixed slopes and x = b1 - b2 placed on the
/// nonnegative orthant.
inline infodesign::ScenarioSet two_link_x_prior(double a1, double a2, const std::vector<double>& xs,
                                                const std::vector<double>& ws) {
  std::vector<infodesign::DiscreteEntry> entries;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double x = xs[k];
    entries.push_back({ws[k], vec({a1, a2}), x >= 0.0 ? vec({x, 0.0}) : vec({0.0, -x})});
  }
  return infodesign::from_discrete_spec(entries);
}

/// Parallel-link instance with random coefficients in [lo, hi] and random
/// weights; a_e is zero with probability `zero_slope`.
template <class Rng>
infodesign::ScenarioSet random_parallel(Rng& rng, std::size_t links, std::size_t scenarios, double zero_slope = 0.0,
                                        double lo = 0.0, double hi = 2.0) {
  std::uniform_real_distribution<double> coef(lo, hi), weight(0.1, 1.0), unit(0.0, 1.0);
  std::vector<infodesign::DiscreteEntry> entries;
  for (std::size_t k = 0; k < scenarios; ++k) {
    Eigen::VectorXd a(static_cast<Eigen::Index>(links)), b(static_cast<Eigen::Index>(links));
    for (Eigen::Index e = 0; e < a.size(); ++e) {
      a(e) = unit(rng) < zero_slope ? 0.0 : coef(rng);
      b(e) = coef(rng);
    }
    entries.push_back({weight(rng), a, b});
  }
  return infodesign::from_discrete_spec(entries);
}

template <class Rng>
infodesign::Policy random_policy(Rng& rng, std::size_t scenarios, std::size_t paths) {
  std::exponential_distribution<double> e(1.0);
  infodesign::Policy p;
  p.pi.resize(static_cast<Eigen::Index>(scenarios), static_cast<Eigen::Index>(paths));
  for (Eigen::Index k = 0; k < p.pi.rows(); ++k) {
    for (Eigen::Index i = 0; i < p.pi.cols(); ++i) p.pi(k, i) = e(rng);
    p.pi.row(k) /= p.pi.row(k).sum();
  }
  return p;
}

}  // namespace fixtures
