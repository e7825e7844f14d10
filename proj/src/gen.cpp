#include "drotrim/gen.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

namespace drotrim {

namespace {

// SplitMix64 finalizer: bijective 64-bit mixing.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

std::uint64_t CounterRng::next_u64() { return mix64(key_ ^ mix64(counter_++)); }

double CounterRng::uniform() {
  // 53 random bits into (0, 1]: never exactly zero, safe for log().
  return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double CounterRng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a,
                            std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ a);
  h = mix64(h ^ b);
  h = mix64(h ^ c);
  return h;
}

EmpiricalSample sample_newsvendor(const NewsvendorMixtureSpec& spec, int N,
                                  std::uint64_t seed) {
  CounterRng rng(seed);
  Eigen::MatrixXd pts(N, 2);
  for (int i = 0; i < N; ++i) {
    const bool first = rng.uniform() <= 0.5;
    const Eigen::Vector2d& mean = first ? spec.mean1 : spec.mean2;
    const Eigen::Vector2d& var = first ? spec.var1 : spec.var2;
    pts(i, 0) = mean[0] + std::sqrt(var[0]) * rng.normal();
    pts(i, 1) = mean[1] + std::sqrt(var[1]) * rng.normal();
  }
  return EmpiricalSample(std::move(pts), 1, 1);
}

PortfolioCovariateSpec PortfolioCovariateSpec::defaults() {
  PortfolioCovariateSpec spec;
  spec.mu.resize(6);
  spec.mu << 0.06, 0.05, 0.04, 0.03, 0.02, 0.01;
  spec.cov_sqrt =
      0.1 * (Eigen::MatrixXd::Identity(6, 6) +
             0.2 * (Eigen::MatrixXd::Ones(6, 6) -
                    Eigen::MatrixXd::Identity(6, 6)));
  return spec;
}

EmpiricalSample sample_portfolio(const PortfolioCovariateSpec& spec, int N,
                                 std::uint64_t seed) {
  if (spec.mu.size() != 6 || spec.cov_sqrt.rows() != 6 ||
      spec.cov_sqrt.cols() != 6 || !spec.cov_sqrt.allFinite())
    throw InvalidCovariance("portfolio spec needs a 6-vector mu and 6x6 S");
  CounterRng rng(seed);
  const Eigen::VectorXd v1 = Eigen::VectorXd::Ones(6);
  Eigen::VectorXd v2(6);
  v2 << 4, 1, 1, 1, 1, 1;
  const Eigen::VectorXd v3 = Eigen::VectorXd::Ones(6);
  Eigen::MatrixXd pts(N, 9);
  for (int i = 0; i < N; ++i) {
    const double z1 = spec.z1_mean + std::sqrt(spec.z1_var) * rng.normal();
    const double z2 = spec.z2_mean + std::sqrt(spec.z2_var) * rng.normal();
    const double z3 = std::exp(rng.normal());  // log z3 ~ N(0,1)
    Eigen::VectorXd noise(6);
    for (int j = 0; j < 6; ++j) noise[j] = rng.normal();
    Eigen::VectorXd y = spec.mu + 0.1 * (z1 - 1000.0) * v1 + 1000.0 * z2 * v2 +
                        10.0 * std::log(z3 + 1.0) * v3 + spec.cov_sqrt * noise;
    pts(i, 0) = z1;
    pts(i, 1) = z2;
    pts(i, 2) = z3;
    pts.row(i).tail(6) = y.transpose();
  }
  return EmpiricalSample(std::move(pts), 3, 6);
}

EmpiricalSample sample_contaminated(const GaussianSpec& correct,
                                    const GaussianSpec& contamination,
                                    double alpha, int N, std::uint64_t seed) {
  if (alpha < 0.0 || alpha > 1.0)
    throw DimensionMismatch("mixing weight outside [0,1]");
  const int d = static_cast<int>(correct.mean.size());
  if (contamination.mean.size() != d || correct.cov_sqrt.rows() != d ||
      contamination.cov_sqrt.rows() != d)
    throw InvalidCovariance("contamination components dimension mismatch");
  CounterRng rng(seed);
  Eigen::MatrixXd pts(N, d);
  Eigen::VectorXd noise(d);
  for (int i = 0; i < N; ++i) {
    const GaussianSpec& g =
        rng.uniform() <= alpha ? correct : contamination;
    for (int j = 0; j < d; ++j) noise[j] = rng.normal();
    pts.row(i) = (g.mean + g.cov_sqrt * noise).transpose();
  }
  return EmpiricalSample(std::move(pts), 0, d);
}

EmpiricalSample GeneratorSpec::draw(int N, std::uint64_t seed) const {
  switch (family) {
    case Family::Newsvendor:
      return sample_newsvendor(newsvendor, N, seed);
    case Family::Portfolio:
      return sample_portfolio(portfolio, N, seed);
    case Family::Contaminated:
      return sample_contaminated(correct, contamination, mix_alpha, N, seed);
  }
  throw DimensionMismatch("unknown generator family");
}

GeneratorSpec GeneratorSpec::from_json(const nlohmann::json& j) {
  GeneratorSpec spec;
  const std::string family = j.at("family");
  auto vec = [](const nlohmann::json& node) {
    auto v = node.get<std::vector<double>>();
    return Eigen::Map<Eigen::VectorXd>(v.data(), v.size()).eval();
  };
  auto mat = [](const nlohmann::json& node) {
    auto rows = node.get<std::vector<std::vector<double>>>();
    Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (size_t r = 0; r < rows.size(); ++r)
      for (size_t c = 0; c < rows[r].size(); ++c)
        m(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
    return m;
  };
  if (family == "newsvendor") {
    spec.family = Family::Newsvendor;
    if (j.contains("mean1")) spec.newsvendor.mean1 = vec(j.at("mean1"));
    if (j.contains("mean2")) spec.newsvendor.mean2 = vec(j.at("mean2"));
    if (j.contains("var1")) spec.newsvendor.var1 = vec(j.at("var1"));
    if (j.contains("var2")) spec.newsvendor.var2 = vec(j.at("var2"));
  } else if (family == "portfolio") {
    spec.family = Family::Portfolio;
    if (j.contains("mu")) spec.portfolio.mu = vec(j.at("mu"));
    if (j.contains("cov_sqrt"))
      spec.portfolio.cov_sqrt = mat(j.at("cov_sqrt"));
  } else if (family == "contaminated") {
    spec.family = Family::Contaminated;
    spec.correct = {vec(j.at("correct_mean")), mat(j.at("correct_cov_sqrt"))};
    spec.contamination = {vec(j.at("contamination_mean")),
                          mat(j.at("contamination_cov_sqrt"))};
    spec.mix_alpha = j.at("mix_alpha").get<double>();
  } else {
    throw DimensionMismatch("unknown generator family: " + family);
  }
  return spec;
}

}  // namespace drotrim
