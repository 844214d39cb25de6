#include <random>

#include <benchmark/benchmark.h>

#include "infodesign/design.hpp"
#include "infodesign/equilibrium.hpp"
#include "infodesign/network.hpp"
#include "infodesign/optim.hpp"
#include "infodesign/scenarios.hpp"
#include "infodesign/twolink.hpp"

namespace {

using namespace infodesign;

void BM_ProjectSimplex(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(state.range(0));
  for (auto& x : v) x = normal(rng);
  for (auto _ : state) {
    Eigen::VectorXd w = v;
    optim::project_simplex(w);
    benchmark::DoNotOptimize(w.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ProjectSimplex)->RangeMultiplier(4)->Range(4, 4096)->Complexity(benchmark::oNLogN);

void BM_BayesianUe(benchmark::State& state) {
  const auto links = static_cast<std::size_t>(state.range(0));
  const auto paths = enumerate_paths(parallel_links(links));
  SamplerSpec spec = SamplerSpec::uniform_box(Eigen::VectorXd::Constant(links, 0.2),
                                              Eigen::VectorXd::Constant(links, 2.0),
                                              Eigen::VectorXd::Zero(links),
                                              Eigen::VectorXd::Constant(links, 1.0));
  const auto set = monte_carlo(spec, static_cast<std::size_t>(state.range(1)), 3);
  std::mt19937_64 rng(4);
  Policy policy;
  policy.pi.resize(static_cast<Eigen::Index>(set.size()), static_cast<Eigen::Index>(links));
  std::uniform_real_distribution<double> unit;
  for (Eigen::Index k = 0; k < policy.pi.rows(); ++k) {
    for (Eigen::Index j = 0; j < policy.pi.cols(); ++j) policy.pi(k, j) = unit(rng);
    policy.pi.row(k) /= policy.pi.row(k).sum();
  }
  for (auto _ : state) benchmark::DoNotOptimize(bayesian_ue(policy, set, paths).potential);
}
BENCHMARK(BM_BayesianUe)->Args({2, 20})->Args({4, 20})->Args({4, 200})->Unit(benchmark::kMicrosecond);

void BM_DesignTwoLinkUniformGrid(benchmark::State& state) {
  const auto set = uniform_b_grid(Eigen::Vector2d(0.3, 0.7), static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(design_two_link(set).expected_cost);
}
BENCHMARK(BM_DesignTwoLinkUniformGrid)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_UniformObedienceExact(benchmark::State& state) {
  double a = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(uniform_obedience_exact(a, 2.1 - a).lhs1);
    a = a < 2.0 ? a + 0.01 : 0.1;
  }
}
BENCHMARK(BM_UniformObedienceExact);

}  // namespace

BENCHMARK_MAIN();
