#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace infodesign {

/// One realization of the network state with affine link delays
/// tau_e(f) = a_e f + b_e.
struct Scenario {
  std::size_t index = 0;
  double weight = 0.0;
  Eigen::VectorXd a;
  Eigen::VectorXd b;

  std::size_t num_links() const { return static_cast<std::size_t>(a.size()); }
  /// Free-flow difference b_1 - b_2 (two-link instances).
  double x() const { return b(0) - b(1); }
};

enum class ProvenanceKind { DiscreteSpec, UniformGrid, MonteCarlo };

std::string to_string(ProvenanceKind kind);

struct Provenance {
  ProvenanceKind kind = ProvenanceKind::DiscreteSpec;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  /// Identifier of the pseudo-random generator; empty for deterministic sets.
  std::string rng;
};

/// Finite weighted discretization of the prior over network states.
///
/// Weights sum to one within 1e-12, every coefficient is nonnegative and all
/// scenarios share the same link dimension. Immutable.
class ScenarioSet {
 public:
  /// Validates the invariants; `index` fields are reassigned to positions.
  ScenarioSet(std::vector<Scenario> scenarios, Provenance provenance);

  const std::vector<Scenario>& scenarios() const { return scenarios_; }
  const Scenario& operator[](std::size_t k) const { return scenarios_[k]; }
  std::size_t size() const { return scenarios_.size(); }
  std::size_t num_links() const { return scenarios_.front().num_links(); }
  const Provenance& provenance() const { return provenance_; }
  Eigen::VectorXd weights() const;

  /// Same states with new weights; `weights` must already sum to one.
  ScenarioSet reweighted(const Eigen::VectorXd& weights) const;
  /// Every a_e and b_e multiplied by `factor` > 0.
  ScenarioSet scaled(double factor) const;

 private:
  std::vector<Scenario> scenarios_;
  Provenance provenance_;
};

struct DiscreteEntry {
  double weight = 0.0;
  Eigen::VectorXd a;
  Eigen::VectorXd b;
};

/// Renormalizes the weights; order is preserved.
/// Throws EmptySpec, NegativeCoefficient or DimensionMismatch.
ScenarioSet from_discrete_spec(const std::vector<DiscreteEntry>& entries);

/// n x n midpoint grid of (b_1, b_2) over the unit square with fixed slopes
/// `a` and weight 1/n^2 per cell. Scenario k = i*n + j has
/// b = ((i + 1/2)/n, (j + 1/2)/n).
ScenarioSet uniform_b_grid(const Eigen::Vector2d& a, std::size_t n);

/// Univariate law for one coefficient.
struct Distribution {
  enum class Kind { Constant, Uniform, Exponential, Discrete };
  Kind kind = Kind::Constant;
  double p0 = 0.0;  ///< constant value, uniform low, exponential rate
  double p1 = 0.0;  ///< uniform high
  std::vector<double> values;  ///< discrete support
  std::vector<double> probs;   ///< discrete probabilities

  static Distribution constant(double value);
  static Distribution uniform(double low, double high);
  static Distribution exponential(double rate);
  static Distribution discrete(std::vector<double> values, std::vector<double> probs);
  /// Throws UnsupportedDistribution for unknown names.
  static Kind kind_from_name(const std::string& name);
};

/// Independent product over the per-link coefficients a_e and b_e.
struct SamplerSpec {
  std::vector<Distribution> a;
  std::vector<Distribution> b;

  /// a_e ~ U[a_low_e, a_high_e], b_e ~ U[b_low_e, b_high_e] independently.
  static SamplerSpec uniform_box(const Eigen::VectorXd& a_low, const Eigen::VectorXd& a_high,
                                 const Eigen::VectorXd& b_low, const Eigen::VectorXd& b_high);
};

/// Name recorded in provenance for monte_carlo sets.
inline constexpr const char* kMonteCarloRng = "mt19937_64";

/// n equally weighted draws. Coordinates are drawn in the order
/// a_1..a_m, b_1..b_m per scenario from a single mt19937_64 stream; uniforms
/// use the top 53 bits of each output so sets are bit-reproducible.
ScenarioSet monte_carlo(const SamplerSpec& spec, std::size_t n, std::uint64_t seed);

/// sum_k w_k g(s_k) over scenarios with positive weight. Throws
/// SingularIntegrand when g is not finite on such a scenario. With
/// threads > 1 the sum is split into contiguous blocks reduced in order.
double expectation(const ScenarioSet& set, const std::function<double(const Scenario&)>& g,
                   std::size_t threads = 1);

}  // namespace infodesign
