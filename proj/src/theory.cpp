#include "drotrim/theory.hpp"

#include <cmath>

namespace drotrim {

double beta_bound(const ConcentrationConstants& k, double epsilon,
                  double alpha, int N) {
  k.validate();
  if (epsilon <= 0.0 || alpha <= 0.0 || N < 1)
    throw UnsupportedCase("beta_bound needs epsilon, alpha > 0 and N >= 1");
  const double half_d = 0.5 * k.d;
  const double threshold = std::pow(alpha, -1.0 / k.p);
  double value = 0.0;
  if (epsilon <= threshold) {
    double exponent;
    if (k.p > half_d) {
      exponent = k.c * N * alpha * alpha * std::pow(epsilon, 2.0 * k.p);
    } else if (k.p == half_d) {
      const double u = alpha * std::pow(epsilon, k.p);
      const double ratio = u / std::log(2.0 + 1.0 / u);
      exponent = k.c * N * ratio * ratio;
    } else {
      exponent = k.c * N * std::pow(alpha, k.d / k.p) * std::pow(epsilon, k.d);
    }
    value = k.C * std::exp(-exponent);
  } else {
    value = k.C * std::exp(-k.c * N * std::pow(alpha, k.a / k.p) *
                           std::pow(epsilon, k.a));
  }
  return value;
}

double radius(const ConcentrationConstants& k, double beta, double alpha,
              int N) {
  k.validate();
  if (beta <= 0.0 || beta >= 1.0 || alpha <= 0.0 || N < 1)
    throw UnsupportedCase("radius needs beta in (0,1), alpha > 0, N >= 1");
  const double half_d = 0.5 * k.d;
  if (k.p == half_d)
    throw UnsupportedCase("no closed-form radius at p = d/2");
  const double L = std::log(k.C / beta);
  const double scale = std::pow(alpha, -1.0 / k.p);
  const double base = L / (k.c * N);
  if (static_cast<double>(N) >= L / k.c) {
    const double exponent = k.p > half_d ? 1.0 / (2.0 * k.p) : 1.0 / k.d;
    return std::pow(base, exponent) * scale;
  }
  return std::pow(base, 1.0 / k.a) * scale;
}

double alpha_hat_empirical(const EmpiricalSample& sample,
                           const ConditioningEvent& event) {
  Eigen::VectorXd dist = event_distances(sample, event);
  int inside = 0;
  for (int i = 0; i < sample.size(); ++i)
    if (dist[i] == 0.0) ++inside;
  return static_cast<double>(inside) / sample.size();
}

TrimmedAmbiguitySpec drknn_budget(const EmpiricalSample& sample,
                                  const ConditioningEvent& event, int K,
                                  double delta_rho, double p) {
  if (K < 1 || K > sample.size())
    throw DimensionMismatch("K outside [1, N]");
  const double alpha = static_cast<double>(K) / sample.size();
  TrimmedAmbiguitySpec spec;
  spec.alpha = alpha;
  const double eps = minimum_transport_budget(sample, event, alpha, p);
  spec.min_budget = std::pow(eps, p);
  spec.rho = spec.min_budget + delta_rho;
  return spec;
}

TrimmedAmbiguitySpec drnw_budget(const EmpiricalSample& sample,
                                 const ConditioningEvent& event,
                                 double bandwidth, double cutoff,
                                 double delta_rho, double p) {
  if (bandwidth <= 0.0 || cutoff <= 0.0)
    throw DimensionMismatch("bandwidth and cutoff must be positive");
  EventOrdering ord = order_by_event_distance(sample, event);
  const double reach = cutoff * bandwidth;
  int within = 0;
  double weighted_cost = 0.0;
  for (int j = 0; j < sample.size(); ++j) {
    if (ord.sorted_distances[j] > reach) break;
    ++within;
    weighted_cost += std::pow(ord.sorted_distances[j], p);
  }
  if (within == 0)
    throw EmptyKernel("no sample point within kernel reach");
  weighted_cost /= within;  // box kernel: uniform weights 1/within

  TrimmedAmbiguitySpec spec;
  spec.alpha = static_cast<double>(within) / sample.size();  // 1/(N w_max)
  const double eps =
      minimum_transport_budget(ord.sorted_distances, spec.alpha, p);
  spec.min_budget = std::pow(eps, p);
  spec.rho = weighted_cost + delta_rho;
  return spec;
}

}  // namespace drotrim
