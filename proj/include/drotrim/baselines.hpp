// Comparator methods: conditional SAA with KNN weights, Wasserstein DRO on
// the projected KNN sample (KNNDRO), pointwise-robustified KNN (KNNROBUST),
// and SAA / Wasserstein DRO on the interior points (SAA, SAADRO).
#pragma once

#include <Eigen/Dense>

#include "drotrim/dro.hpp"
#include "drotrim/loss.hpp"
#include "drotrim/sample.hpp"

namespace drotrim {

struct EventNotSingleton : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NoInteriorPoints : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WeightedConditionalSample {
  Eigen::MatrixXd points;   // full-dimension points, projected into the event
  Eigen::VectorXd weights;  // nonnegative, summing to 1
  std::vector<int> source;  // originating sample indices

  int size() const { return static_cast<int>(points.rows()); }
};

struct BaselineResult {
  Eigen::VectorXd x;
  double value = 0.0;
};

// Uniform weight 1/K on the K event-nearest samples (distance ties broken by
// index), each replaced by its l1 projection onto the event.
WeightedConditionalSample knn_weights(const EmpiricalSample& sample,
                                      const ConditioningEvent& event, int K);

// min_x sum w_i f(x, xi_i) over the decision set (epigraph LP).
BaselineResult saa_solve(const WeightedConditionalSample& wcs,
                         const PiecewiseBiAffineLoss& loss,
                         const DecisionSet& decisions);

// Wasserstein-ball DRO of radius rho around the projected-KNN empirical
// measure, supported on the event: the trimmed solver with alpha = 1.
BaselineResult knndro_solve(const EmpiricalSample& sample,
                            const ConditioningEvent& event, int K, double rho,
                            const PiecewiseBiAffineLoss& loss,
                            const DecisionSet& decisions);

// Pointwise robustification (singleton-z events only):
//   min_x sum_i w_i sup_{||y - y_i||_1 <= eps} max_k g_k(x, (z*, y))
// with the inner sup in closed form g_k(x,(z*,y_i)) + eps ||a_k^y(x)||_inf.
BaselineResult knnrobust_solve(const EmpiricalSample& sample,
                               const ConditioningEvent& event, int K,
                               double epsilon,
                               const PiecewiseBiAffineLoss& loss,
                               const DecisionSet& decisions);

// Wasserstein DRO around the uniform measure on the sample points inside
// the event (requires at least one interior point).
BaselineResult saadro_solve(const EmpiricalSample& sample,
                            const ConditioningEvent& event, double rho,
                            const PiecewiseBiAffineLoss& loss,
                            const DecisionSet& decisions);

// The interior points with uniform weights (the SAA nominal of saadro).
WeightedConditionalSample interior_weights(const EmpiricalSample& sample,
                                           const ConditioningEvent& event);

// K-rules from the experiments: floor(N / log(N+1)), floor(N^0.9),
// floor(sqrt(N)), each clamped to [1, N].
int k_rule_log(int N);
int k_rule_pow09(int N);
int k_rule_sqrt(int N);

}  // namespace drotrim
