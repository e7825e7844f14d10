// Seeded synthetic data generators for the benchmark families, built on a
// counter-based PRNG so replication streams are reproducible and splittable.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <nlohmann/json_fwd.hpp>

#include "drotrim/sample.hpp"

namespace drotrim {

struct InvalidCovariance : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// CounterRng v1: a stateless 64-bit counter-based generator. Output i of
// stream `key` is mix(key ^ mix(i)) with the SplitMix64 finalizer as mix();
// streams with distinct keys are independent for Monte Carlo purposes and
// any (key, i) pair can be evaluated without generating predecessors.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64();
  double uniform();  // in (0, 1]
  double normal();   // standard normal via Box-Muller (two uniforms per call)

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Documented stream-derivation hash: children (seed; a, b, c) never collide
// across distinct coordinate tuples, so replications parallelize without
// stream overlap.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a,
                            std::uint64_t b = 0, std::uint64_t c = 0);

// Equal-weight mixture of two bivariate normals over (z, y).
struct NewsvendorMixtureSpec {
  Eigen::Vector2d mean1{0.6, 0.75};
  Eigen::Vector2d mean2{0.5, -0.75};
  Eigen::Vector2d var1{0.5, 0.01};     // diagonal covariances
  Eigen::Vector2d var2{0.0001, 0.1};
};

// Covariates (z1, z2, z3) with given marginals and 6 asset returns whose
// conditional mean shifts linearly in the covariates:
//   y | z ~ N6(mu + 0.1 (z1-1000) v1 + 1000 z2 v2 + 10 log(z3+1) v3, S S')
// with v1 = v3 = ones and v2 = (4,1,1,1,1,1). mu and the covariance square
// root S are artifact defaults, not ground truth from any source.
struct PortfolioCovariateSpec {
  Eigen::VectorXd mu;        // 6-vector
  Eigen::MatrixXd cov_sqrt;  // 6x6
  double z1_mean = 1000.0, z1_var = 50.0;
  double z2_mean = 0.02, z2_var = 0.01;

  static PortfolioCovariateSpec defaults();
};

// Gaussian component for contamination studies (possibly degenerate).
struct GaussianSpec {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov_sqrt;
};

EmpiricalSample sample_newsvendor(const NewsvendorMixtureSpec& spec, int N,
                                  std::uint64_t seed);
EmpiricalSample sample_portfolio(const PortfolioCovariateSpec& spec, int N,
                                 std::uint64_t seed);

// Each draw comes from `correct` with probability alpha, else from
// `contamination`; no labels are emitted. dz of the result is 0.
EmpiricalSample sample_contaminated(const GaussianSpec& correct,
                                    const GaussianSpec& contamination,
                                    double alpha, int N, std::uint64_t seed);

// Generator spec as it appears in experiment configs:
// {"family":"newsvendor"|"portfolio"|"contaminated", ...params}.
struct GeneratorSpec {
  enum class Family { Newsvendor, Portfolio, Contaminated } family;
  NewsvendorMixtureSpec newsvendor;
  PortfolioCovariateSpec portfolio = PortfolioCovariateSpec::defaults();
  GaussianSpec correct, contamination;
  double mix_alpha = 1.0;

  EmpiricalSample draw(int N, std::uint64_t seed) const;
  static GeneratorSpec from_json(const nlohmann::json& j);
};

}  // namespace drotrim
