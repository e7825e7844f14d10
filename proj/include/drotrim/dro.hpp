// Core solver: the joint LP reformulation of the trimmed-ambiguity DRO
// problem
//   min_{x in X}  sup { E_Q f(x, xi) : Q on the event,
//                       W_1(R_{1-alpha}(Q_N), Q) <= rho }
// via its dual
//   min  lambda rho + theta + (1/(N alpha)) sum_i mu_i
//   s.t. mu_i + theta >= sup_{xi in event} ( g_k(x, xi)
//                                            - lambda ||xi - xi_i||_1 )
// with the inner sup dualized analytically over the polyhedral event, plus
// worst-case distribution recovery and discrete brute-force oracles.
#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <optional>

#include "drotrim/loss.hpp"
#include "drotrim/lp.hpp"
#include "drotrim/sample.hpp"

namespace drotrim {

struct InfeasibleBudget : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnboundedInner : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnboundedDecision : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DroProblem {
  EmpiricalSample sample;
  ConditioningEvent event;
  TrimmedAmbiguitySpec spec;
  PiecewiseBiAffineLoss loss;
  DecisionSet decisions;
};

struct DroSolution {
  Eigen::VectorXd x_hat;
  double J_hat = 0.0;  // certificate (LP optimum)
  double lambda = 0.0;
  double theta = 0.0;
  Eigen::VectorXd mu_bar;
  lp::Status status = lp::Status::Optimal;
  // True when the ambiguity set provably collapses to a single measure
  // (rho at the feasibility minimum with a unique nearest trimming); the
  // problem is then solved exactly as a weighted SAA and the dual variables
  // are not populated beyond the J_hat identity.
  bool reduced_singleton = false;
};

struct WcAtom {
  double weight = 0.0;
  Eigen::VectorXd xi;
  int i = 0;  // source sample index
  int k = 0;  // loss piece
};

struct WorstCaseDistribution {
  std::vector<WcAtom> atoms;
  double objective = 0.0;
  // Mass that vanished along recession directions (gamma below the floor
  // with nonzero displacement): reported, the atoms are dropped.
  bool degenerate = false;
  double dropped_displacement = 0.0;
};

// Column layout of the assembled joint LP (for solution extraction).
struct JointLpLayout {
  int x0 = -1;       // first decision column (-1 when x is fixed)
  int lambda = -1;
  int theta = -1;
  int mu0 = -1;      // first mu column, -1 when the cap 1/(N alpha) >= 1
  int num_mu = 0;
};

// Builds the single LP equivalent to the dual reformulation. When `fixed_x`
// is given the decision is substituted and the LP evaluates the certificate
// at that x. Throws InfeasibleBudget when rho < min_budget.
lp::LinearProgram assemble_joint_lp(const DroProblem& problem,
                                    JointLpLayout* layout = nullptr,
                                    const Eigen::VectorXd* fixed_x = nullptr);

DroSolution solve(const DroProblem& problem);

// The dual value at a fixed decision (certificate of x).
double certificate_at(const DroProblem& problem, const Eigen::VectorXd& x);

// Recovers a worst-case distribution at decision x from the primal LP in
// (gamma_ik, q_ik): atoms xi*_ik = xi_i - q_ik/gamma_ik for gamma above the
// floor; the objective matches certificate_at(x) within the gap tolerance.
WorstCaseDistribution worst_case_distribution(const DroProblem& problem,
                                              const Eigen::VectorXd& x,
                                              double gamma_floor = 1e-9);

// Brute-force oracle: sup of E_Q f(x, .) over distributions Q supported on
// the finite grid (rows of `grid`, all inside the event), reachable from
// some (1-alpha)-trimming within transport budget rho. Exact LP.
double solve_sp2_discrete(const EmpiricalSample& sample,
                          const Eigen::MatrixXd& grid, double alpha,
                          double rho, const PiecewiseBiAffineLoss& loss,
                          const Eigen::VectorXd& x, double p = 1.0);

// Brute-force oracle for the un-relaxed conditional problem: sup over joint
// Q (supported on grid + original sample points) with Q(event) = alpha and
// W_1(Q, Q_N) <= rho * alpha of (1/alpha) E_Q[f(x,.) 1_event].
double solve_sp1_discrete(const EmpiricalSample& sample,
                          const Eigen::MatrixXd& grid,
                          const ConditioningEvent& event, double alpha,
                          double rho, const PiecewiseBiAffineLoss& loss,
                          const Eigen::VectorXd& x, double p = 1.0);

// Weighted SAA: min_x sum_i w_i f(x, xi_i) over the decision set, as an
// epigraph LP. Shared by the singleton fast path and the baselines.
struct SaaResult {
  Eigen::VectorXd x;
  double value = 0.0;
};
SaaResult solve_weighted_saa(const Eigen::MatrixXd& points,
                             const Eigen::VectorXd& weights,
                             const PiecewiseBiAffineLoss& loss,
                             const DecisionSet& decisions);

nlohmann::json solution_to_json(const DroSolution& sol,
                                const WorstCaseDistribution* wc = nullptr);

}  // namespace drotrim
