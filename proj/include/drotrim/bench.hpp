// Benchmark harness: experiment configs, the bootstrap reliability-tuning
// protocol, replication loops (OpenMP-parallel over cells, with a serial
// path at threads = 1), and CSV/JSON emission.
#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "drotrim/baselines.hpp"
#include "drotrim/gen.hpp"
#include "drotrim/loss.hpp"
#include "drotrim/sample.hpp"

namespace drotrim {

struct InsufficientData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MethodSpec {
  std::string name;          // DROTRIMM | KNN | KNNDRO | KNNROBUST | SAA |
                             // SAADRO
  std::vector<double> grid;  // robustness-parameter candidates (ascending)
};

struct ExperimentConfig {
  GeneratorSpec generator;
  PiecewiseBiAffineLoss loss;
  std::string event_json_text;  // serialized event spec, re-parsed per run
  DecisionSet decisions;
  std::vector<MethodSpec> methods;
  std::vector<int> Ns;
  int runs = 10;
  double beta = 0.15;
  int kboot = 50;
  std::string k_rule = "log";       // log | pow09 | sqrt
  int proxy_draws = 10000;
  std::string proxy_mode = "knn";   // knn | interior
  std::string alpha_mode = "knn";   // knn (alpha=K/N) | fixed | empirical
  double alpha_fixed = 0.0;
  bool standardize = false;
  // Index of a decision coordinate to re-minimize against the proxy when
  // evaluating out-of-sample, or -1 for none. Used for epigraph auxiliaries
  // (e.g. the CVaR threshold beta'): the auxiliary is part of x only to
  // linearize the loss, so the true out-of-sample cost of the remaining
  // decision is the loss minimized over that coordinate.
  int eval_reoptimize = -1;
  std::uint64_t seed = 1;

  static ExperimentConfig from_json(const nlohmann::json& j);
};

struct RunRecord {
  std::string method;
  int N = 0;
  int run = 0;
  double param = 0.0;
  bool fallback = false;
  bool failed = false;
  double J_hat = 0.0;
  double J = 0.0;
  double disappointment = 0.0;
  double wall_ms = 0.0;
  Eigen::VectorXd x_hat;
};

// Weighted average loss over the evaluation proxy.
double out_of_sample(const Eigen::VectorXd& x,
                     const PiecewiseBiAffineLoss& loss,
                     const WeightedConditionalSample& proxy);

// As above, but with decision coordinate `reopt_coordinate` re-minimized
// against the proxy (pass -1 for the plain average). For each proxy point the
// loss is a max of lines in that coordinate, so the weighted average is convex
// piecewise linear; the minimizer lies at a pairwise piece crossing and is
// located by ternary search over the crossing bracket. Deterministic, and
// never larger than the plain average at the trained coordinate value.
double out_of_sample(const Eigen::VectorXd& x,
                     const PiecewiseBiAffineLoss& loss,
                     const WeightedConditionalSample& proxy,
                     int reopt_coordinate);

int apply_k_rule(const std::string& rule, int N);

// One tuned solve of a named method at a given robustness parameter.
BaselineResult solve_method(const std::string& name,
                            const EmpiricalSample& sample,
                            const ConditioningEvent& event, double param,
                            const ExperimentConfig& cfg);

struct TuneResult {
  double param = 0.0;
  bool fallback = false;
  BaselineResult result;
};

// The four-step protocol: (1) kboot bootstrap resamples with validation sets
// from the out-of-resample points (their K-nearest to the event, or the
// interior points); (2) one solve per (resample, candidate); (3) keep
// candidates whose certificate covers validation performance in at least
// (1 - beta) of the retained resamples and pick the best mean validation
// performance; (4) re-solve on the full sample. Falls back to the largest
// candidate (flagged) when none passes the reliability filter.
TuneResult bootstrap_tune(const MethodSpec& method,
                          const EmpiricalSample& sample,
                          const ConditioningEvent& event,
                          const ExperimentConfig& cfg,
                          std::uint64_t seed_base);

struct ExperimentResult {
  std::vector<RunRecord> records;
  std::string summary_json;  // serialized per-method/per-N statistics
};

// Full tuned benchmark: runs x |Ns| x |methods| bootstrap-tuned solves.
// Deterministic for a given config seed regardless of thread count.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads = 1);

// Robustness-parameter sweep: solves every method at every grid value on the
// full sample (no tuning) and records the out-of-sample curve.
ExperimentResult sweep_experiment(const ExperimentConfig& cfg,
                                  int threads = 1);

void write_records_csv(const std::vector<RunRecord>& records,
                       std::ostream& os);

}  // namespace drotrim
