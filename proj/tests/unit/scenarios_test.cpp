#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "infodesign/error.hpp"
#include "infodesign/scenarios.hpp"

using namespace infodesign;
using fixtures::vec;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

double x_of(const Scenario& s) { return s.b(0) - s.b(1); }

}  // namespace

TEST(Scenarios, DiscreteSingle) {
  const auto set = from_discrete_spec({{1.0, vec({1, 1}), vec({0, 0})}});
  ASSERT_EQ(set.size(), 1u);
  EXPECT_EQ(set[0].weight, 1.0);
  EXPECT_EQ(set.provenance().kind, ProvenanceKind::DiscreteSpec);
}

TEST(Scenarios, DiscreteRenormalizesAndKeepsOrder) {
  const auto set = from_discrete_spec({{2.0, vec({1, 1}), vec({0, 0})}, {2.0, vec({2, 1}), vec({1, 0})}});
  EXPECT_EQ(set[0].weight, 0.5);
  EXPECT_EQ(set[1].weight, 0.5);
  EXPECT_EQ(set[1].a(0), 2.0);
}

TEST(Scenarios, TwoPointBoundaryPrior) {
  const double a1 = 1.0, a2 = 1.5, p = 0.3;
  const auto set = fixtures::two_link_x_prior(a1, a2, {2 * a2, -2 * a1}, {p, 1 - p});
  ASSERT_EQ(set.size(), 2u);
  EXPECT_DOUBLE_EQ(x_of(set[0]), 2 * a2);
  EXPECT_DOUBLE_EQ(x_of(set[1]), -2 * a1);
}

TEST(Scenarios, DiscreteErrors) {
  EXPECT_EQ(code_of([] { from_discrete_spec({}); }), ErrorCode::EmptySpec);
  EXPECT_EQ(code_of([] { from_discrete_spec({{0.0, vec({1}), vec({0})}}); }), ErrorCode::EmptySpec);
  EXPECT_EQ(code_of([] { from_discrete_spec({{1.0, vec({-1, 1}), vec({0, 0})}}); }),
            ErrorCode::NegativeCoefficient);
  EXPECT_EQ(code_of([] { from_discrete_spec({{1.0, vec({1, 1}), vec({0, -0.5})}}); }),
            ErrorCode::NegativeCoefficient);
  EXPECT_EQ(code_of([] { from_discrete_spec({{1.0, vec({1, 1}), vec({0, 0})}, {1.0, vec({1}), vec({0})}}); }),
            ErrorCode::DimensionMismatch);
}

TEST(Scenarios, UniformGridMidpoints) {
  const auto one = uniform_b_grid({1.0, 1.0}, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].b, vec({0.5, 0.5}));

  const auto two = uniform_b_grid({1.0, 2.0}, 2);
  ASSERT_EQ(two.size(), 4u);
  const double expected[4][2] = {{0.25, 0.25}, {0.25, 0.75}, {0.75, 0.25}, {0.75, 0.75}};
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(two[k].b(0), expected[k][0]);
    EXPECT_EQ(two[k].b(1), expected[k][1]);
    EXPECT_EQ(two[k].weight, 0.25);
    EXPECT_EQ(two[k].a, vec({1.0, 2.0}));
  }
  EXPECT_EQ(code_of([] { uniform_b_grid({1.0, 1.0}, 0); }), ErrorCode::InvalidGridSize);
}

TEST(Scenarios, WeightsSumToOneForLargeGrids) {
  for (std::size_t n : {3u, 7u, 200u, 333u}) {
    const auto set = uniform_b_grid({0.5, 0.5}, n);
    double total = 0.0, comp = 0.0;
    for (const auto& s : set.scenarios()) {
      const double y = s.weight - comp;
      const double t = total + y;
      comp = (t - total) - y;
      total = t;
    }
    EXPECT_NEAR(total, 1.0, 1e-12) << n;
  }
}

TEST(Scenarios, UniformGridMoments) {
  for (std::size_t n : {2u, 5u, 200u}) {
    const auto set = uniform_b_grid({1.0, 1.0}, n);
    EXPECT_NEAR(expectation(set, x_of), 0.0, 1e-14);
  }
  const auto set = uniform_b_grid({1.0, 1.0}, 200);
  EXPECT_NEAR(expectation(set, [](const Scenario& s) { return x_of(s) * x_of(s); }), 1.0 / 6.0, 1e-4);
}

TEST(Scenarios, MidpointRuleConvergesAtSecondOrder) {
  // exact integrals over the unit square
  struct Case {
    std::function<double(double, double)> g;
    double exact;
  };
  const std::vector<Case> cases = {
      {[](double u, double v) { return u * u * v; }, 1.0 / 6.0},
      {[](double u, double v) { return std::pow(u - v, 4); }, 1.0 / 15.0},
      {[](double u, double v) { return u * u * v * v; }, 1.0 / 9.0},
      {[](double u, double) { return u * u * u; }, 0.25},
  };
  for (const auto& c : cases) {
    double prev = 0.0;
    for (std::size_t n : {10u, 20u, 40u}) {
      const auto set = uniform_b_grid({1.0, 1.0}, n);
      const double err =
          std::abs(expectation(set, [&](const Scenario& s) { return c.g(s.b(0), s.b(1)); }) - c.exact);
      EXPECT_LE(err, 1.0 / static_cast<double>(n * n));
      if (prev > 0.0) EXPECT_NEAR(prev / err, 4.0, 0.5);
      prev = err;
    }
  }
}

TEST(Scenarios, MonteCarloMeanWithinClt) {
  const auto spec = SamplerSpec::uniform_box(vec({1, 1}), vec({1, 1}), vec({0, 0}), vec({1, 1}));
  const auto set = monte_carlo(spec, 1000, 42);
  EXPECT_LE(std::abs(expectation(set, x_of)), 3.0 / std::sqrt(1000.0));
  EXPECT_EQ(set.provenance().kind, ProvenanceKind::MonteCarlo);
  EXPECT_EQ(set.provenance().seed, 42u);
  EXPECT_EQ(set.provenance().rng, "mt19937_64");
}

TEST(Scenarios, MonteCarloReproducible) {
  SamplerSpec spec;
  spec.a = {Distribution::exponential(2.0), Distribution::constant(0.5)};
  spec.b = {Distribution::uniform(0.0, 3.0), Distribution::discrete({0.0, 1.0, 2.0}, {0.2, 0.3, 0.5})};
  const auto s1 = monte_carlo(spec, 50, 9);
  const auto s2 = monte_carlo(spec, 50, 9);
  const auto s3 = monte_carlo(spec, 50, 10);
  bool differs = false;
  for (std::size_t k = 0; k < 50; ++k) {
    EXPECT_EQ(s1[k].a, s2[k].a);
    EXPECT_EQ(s1[k].b, s2[k].b);
    EXPECT_EQ(s1[k].weight, 0.02);
    differs = differs || s1[k].b != s3[k].b;
    EXPECT_EQ(s1[k].a(1), 0.5);
    const double d = s1[k].b(1);
    EXPECT_TRUE(d == 0.0 || d == 1.0 || d == 2.0);
  }
  EXPECT_TRUE(differs);
  const auto single = monte_carlo(spec, 1, 3);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].weight, 1.0);
}

TEST(Scenarios, MonteCarloFirstDrawIsPinned) {
  // First output of mt19937_64 seeded with 5489 is 14514284786278117030;
  // its top 53 bits scaled to [0, 1) give the first uniform.
  const auto spec = SamplerSpec::uniform_box(vec({0}), vec({1}), vec({0}), vec({1}));
  const auto set = monte_carlo(spec, 1, 5489);
  const double expected = static_cast<double>(14514284786278117030ull >> 11) * 0x1.0p-53;
  EXPECT_EQ(set[0].a(0), expected);
}

TEST(Scenarios, UnsupportedDistribution) {
  EXPECT_EQ(code_of([] { Distribution::kind_from_name("cauchy"); }), ErrorCode::UnsupportedDistribution);
  EXPECT_EQ(Distribution::kind_from_name("exponential"), Distribution::Kind::Exponential);
}

TEST(Scenarios, ExpectationBasics) {
  const auto set = uniform_b_grid({1.0, 1.0}, 4);
  EXPECT_NEAR(expectation(set, [](const Scenario&) { return 2.5; }), 2.5, 1e-15);
  EXPECT_EQ(code_of([&] { expectation(set, [](const Scenario&) { return std::nan(""); }); }),
            ErrorCode::SingularIntegrand);
  // zero-weight scenarios are not evaluated
  const auto w = from_discrete_spec({{1.0, vec({0, 0}), vec({0, 0})}, {0.0, vec({1, 1}), vec({0, 0})}});
  EXPECT_EQ(code_of([&] { expectation(w, [](const Scenario& s) { return 1.0 / (s.a(0) + s.a(1)); }); }),
            ErrorCode::SingularIntegrand);
  const auto w2 = from_discrete_spec({{0.0, vec({0, 0}), vec({0, 0})}, {1.0, vec({1, 1}), vec({0, 0})}});
  EXPECT_EQ(expectation(w2, [](const Scenario& s) { return 1.0 / (s.a(0) + s.a(1)); }), 0.5);
}

TEST(Scenarios, ExpectationAgreesAcrossThreadCounts) {
  const auto spec = SamplerSpec::uniform_box(vec({0, 0}), vec({3, 3}), vec({0, 0}), vec({5, 5}));
  const auto set = monte_carlo(spec, 100000, 1);
  const auto g = [](const Scenario& s) { return s.a(0) * s.b(1) - std::sin(s.b(0)); };
  const double serial = expectation(set, g, 1);
  for (std::size_t t : {2u, 3u, 8u}) EXPECT_NEAR(expectation(set, g, t), serial, 1e-10);
}

TEST(Scenarios, ScaledAndReweighted) {
  const auto set = uniform_b_grid({1.0, 2.0}, 3);
  const auto scaled = set.scaled(10.0);
  for (std::size_t k = 0; k < set.size(); ++k) {
    EXPECT_EQ(scaled[k].a, 10.0 * set[k].a);
    EXPECT_EQ(scaled[k].b, 10.0 * set[k].b);
  }
  Eigen::VectorXd w = Eigen::VectorXd::Zero(9);
  w(4) = 1.0;
  const auto point = set.reweighted(w);
  EXPECT_EQ(point[4].weight, 1.0);
  EXPECT_EQ(code_of([&] { set.reweighted(Eigen::VectorXd::Constant(9, 0.5)); }), ErrorCode::InvalidArgument);
}
