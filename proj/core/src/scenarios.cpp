#include "infodesign/scenarios.hpp"

#include <cmath>
#include <random>

#include "infodesign/error.hpp"
#include "infodesign/parallel.hpp"

namespace infodesign {

std::string to_string(ProvenanceKind kind) {
  switch (kind) {
    case ProvenanceKind::DiscreteSpec: return "discrete-spec";
    case ProvenanceKind::UniformGrid: return "uniform-grid";
    case ProvenanceKind::MonteCarlo: return "monte-carlo";
  }
  return "unknown";
}

namespace {

void check_coefficients(const Eigen::VectorXd& a, const Eigen::VectorXd& b, std::size_t where) {
  if (a.size() != b.size() || a.size() == 0) {
    throw Error(ErrorCode::DimensionMismatch,
                "scenario " + std::to_string(where) + ": a and b must be nonempty and equal length");
  }
  for (Eigen::Index e = 0; e < a.size(); ++e) {
    if (!(a(e) >= 0.0) || !(b(e) >= 0.0) || !std::isfinite(a(e)) || !std::isfinite(b(e))) {
      throw Error(ErrorCode::NegativeCoefficient,
                  "scenario " + std::to_string(where) + ": coefficients must be finite and >= 0");
    }
  }
}

// Neumaier summation; naive sums of 10^4+ equal weights drift past 1e-12
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    comp_ += std::abs(sum_) >= std::abs(v) ? (sum_ - t) + v : (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

ScenarioSet::ScenarioSet(std::vector<Scenario> scenarios, Provenance provenance)
    : scenarios_(std::move(scenarios)), provenance_(std::move(provenance)) {
  if (scenarios_.empty()) throw Error(ErrorCode::EmptySpec, "scenario set is empty");
  const auto m = scenarios_.front().a.size();
  CompensatedSum total;
  for (std::size_t k = 0; k < scenarios_.size(); ++k) {
    auto& s = scenarios_[k];
    s.index = k;
    check_coefficients(s.a, s.b, k);
    if (s.a.size() != m) {
      throw Error(ErrorCode::DimensionMismatch, "scenarios disagree on the number of links");
    }
    if (!(s.weight >= 0.0) || !std::isfinite(s.weight)) {
      throw Error(ErrorCode::InvalidArgument, "scenario weights must be finite and >= 0");
    }
    total.add(s.weight);
  }
  if (std::abs(total.value() - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "scenario weights sum to " + std::to_string(total.value()));
  }
}

Eigen::VectorXd ScenarioSet::weights() const {
  Eigen::VectorXd w(static_cast<Eigen::Index>(size()));
  for (std::size_t k = 0; k < size(); ++k) w(static_cast<Eigen::Index>(k)) = scenarios_[k].weight;
  return w;
}

ScenarioSet ScenarioSet::reweighted(const Eigen::VectorXd& weights) const {
  if (static_cast<std::size_t>(weights.size()) != size()) {
    throw Error(ErrorCode::DimensionMismatch, "weight vector length mismatch");
  }
  auto copy = scenarios_;
  for (std::size_t k = 0; k < copy.size(); ++k) copy[k].weight = weights(static_cast<Eigen::Index>(k));
  return ScenarioSet(std::move(copy), provenance_);
}

ScenarioSet ScenarioSet::scaled(double factor) const {
  if (!(factor > 0.0)) throw Error(ErrorCode::InvalidArgument, "scale factor must be > 0");
  auto copy = scenarios_;
  for (auto& s : copy) {
    s.a *= factor;
    s.b *= factor;
  }
  return ScenarioSet(std::move(copy), provenance_);
}

ScenarioSet from_discrete_spec(const std::vector<DiscreteEntry>& entries) {
  if (entries.empty()) throw Error(ErrorCode::EmptySpec, "discrete spec has no entries");
  double total = 0.0;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    check_coefficients(entries[k].a, entries[k].b, k);
    if (!(entries[k].weight >= 0.0) || !std::isfinite(entries[k].weight)) {
      throw Error(ErrorCode::NegativeCoefficient, "weights must be finite and >= 0");
    }
    total += entries[k].weight;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::EmptySpec, "all weights are zero");

  std::vector<Scenario> scenarios;
  scenarios.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    scenarios.push_back({k, entries[k].weight / total, entries[k].a, entries[k].b});
  }
  return ScenarioSet(std::move(scenarios), {ProvenanceKind::DiscreteSpec, entries.size(), 0, ""});
}

ScenarioSet uniform_b_grid(const Eigen::Vector2d& a, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidGridSize, "grid size must be >= 1");
  if (!(a(0) >= 0.0) || !(a(1) >= 0.0)) {
    throw Error(ErrorCode::NegativeCoefficient, "slopes must be >= 0");
  }
  const double h = 1.0 / static_cast<double>(n);
  const double w = 1.0 / static_cast<double>(n * n);
  std::vector<Scenario> scenarios;
  scenarios.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Eigen::VectorXd b(2);
      b << (static_cast<double>(i) + 0.5) * h, (static_cast<double>(j) + 0.5) * h;
      scenarios.push_back({i * n + j, w, Eigen::VectorXd(a), std::move(b)});
    }
  }
  return ScenarioSet(std::move(scenarios), {ProvenanceKind::UniformGrid, n, 0, ""});
}

Distribution Distribution::constant(double value) {
  Distribution d;
  d.kind = Kind::Constant;
  d.p0 = value;
  return d;
}

Distribution Distribution::uniform(double low, double high) {
  if (!(low <= high)) throw Error(ErrorCode::InvalidArgument, "uniform needs low <= high");
  Distribution d;
  d.kind = Kind::Uniform;
  d.p0 = low;
  d.p1 = high;
  return d;
}

Distribution Distribution::exponential(double rate) {
  if (!(rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "exponential needs rate > 0");
  Distribution d;
  d.kind = Kind::Exponential;
  d.p0 = rate;
  return d;
}

Distribution Distribution::discrete(std::vector<double> values, std::vector<double> probs) {
  if (values.empty() || values.size() != probs.size()) {
    throw Error(ErrorCode::InvalidArgument, "discrete needs matching nonempty values and probs");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw Error(ErrorCode::InvalidArgument, "discrete probabilities must be >= 0");
    total += p;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::InvalidArgument, "discrete probabilities sum to zero");
  for (double& p : probs) p /= total;
  Distribution d;
  d.kind = Kind::Discrete;
  d.values = std::move(values);
  d.probs = std::move(probs);
  return d;
}

Distribution::Kind Distribution::kind_from_name(const std::string& name) {
  if (name == "constant") return Kind::Constant;
  if (name == "uniform") return Kind::Uniform;
  if (name == "exponential") return Kind::Exponential;
  if (name == "discrete") return Kind::Discrete;
  throw Error(ErrorCode::UnsupportedDistribution, "unsupported distribution '" + name + "'");
}

SamplerSpec SamplerSpec::uniform_box(const Eigen::VectorXd& a_low, const Eigen::VectorXd& a_high,
                                     const Eigen::VectorXd& b_low, const Eigen::VectorXd& b_high) {
  if (a_low.size() != a_high.size() || b_low.size() != b_high.size() ||
      a_low.size() != b_low.size()) {
    throw Error(ErrorCode::DimensionMismatch, "uniform box bounds disagree in length");
  }
  SamplerSpec spec;
  for (Eigen::Index e = 0; e < a_low.size(); ++e) {
    spec.a.push_back(Distribution::uniform(a_low(e), a_high(e)));
    spec.b.push_back(Distribution::uniform(b_low(e), b_high(e)));
  }
  return spec;
}

namespace {

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double draw(const Distribution& d, std::mt19937_64& rng) {
  switch (d.kind) {
    case Distribution::Kind::Constant: return d.p0;
    case Distribution::Kind::Uniform: return d.p0 + (d.p1 - d.p0) * unit_uniform(rng);
    case Distribution::Kind::Exponential: return -std::log1p(-unit_uniform(rng)) / d.p0;
    case Distribution::Kind::Discrete: {
      const double u = unit_uniform(rng);
      double acc = 0.0;
      for (std::size_t i = 0; i < d.values.size(); ++i) {
        acc += d.probs[i];
        if (u < acc) return d.values[i];
      }
      return d.values.back();
    }
  }
  return 0.0;
}

}  // namespace

ScenarioSet monte_carlo(const SamplerSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "monte carlo needs n >= 1");
  if (spec.a.empty() || spec.a.size() != spec.b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "sampler needs one a and one b law per link");
  }
  const auto m = static_cast<Eigen::Index>(spec.a.size());
  std::mt19937_64 rng(seed);
  std::vector<Scenario> scenarios;
  scenarios.reserve(n);
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    Scenario s{k, w, Eigen::VectorXd(m), Eigen::VectorXd(m)};
    for (Eigen::Index e = 0; e < m; ++e) s.a(e) = draw(spec.a[static_cast<std::size_t>(e)], rng);
    for (Eigen::Index e = 0; e < m; ++e) s.b(e) = draw(spec.b[static_cast<std::size_t>(e)], rng);
    scenarios.push_back(std::move(s));
  }
  return ScenarioSet(std::move(scenarios), {ProvenanceKind::MonteCarlo, n, seed, kMonteCarloRng});
}

double expectation(const ScenarioSet& set, const std::function<double(const Scenario&)>& g,
                   std::size_t threads) {
  const std::size_t n = set.size();
  threads = std::max<std::size_t>(1, std::min(threads, n));
  std::vector<double> partial(threads, 0.0);
  const std::size_t block = (n + threads - 1) / threads;
  parallel_for(threads, threads, [&](std::size_t t) {
    const std::size_t lo = t * block;
    const std::size_t hi = std::min(n, lo + block);
    double acc = 0.0;
    for (std::size_t k = lo; k < hi; ++k) {
      const auto& s = set[k];
      if (s.weight == 0.0) continue;
      const double v = g(s);
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::SingularIntegrand,
                    "integrand is not finite on scenario " + std::to_string(k));
      }
      acc += s.weight * v;
    }
    partial[t] = acc;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace infodesign
