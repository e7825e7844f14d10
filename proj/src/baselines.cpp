#include "drotrim/baselines.hpp"

#include <cmath>

namespace drotrim {

namespace {

int clamp_k(double k, int N) {
  int ki = static_cast<int>(std::floor(k));
  return std::max(1, std::min(ki, N));
}

}  // namespace

int k_rule_log(int N) { return clamp_k(N / std::log(N + 1.0), N); }
int k_rule_pow09(int N) { return clamp_k(std::pow(N, 0.9), N); }
int k_rule_sqrt(int N) { return clamp_k(std::sqrt(N), N); }

WeightedConditionalSample knn_weights(const EmpiricalSample& sample,
                                      const ConditioningEvent& event, int K) {
  if (K < 1 || K > sample.size())
    throw DimensionMismatch("K outside [1, N]");
  EventOrdering ord = order_by_event_distance(sample, event);
  WeightedConditionalSample wcs;
  wcs.points.resize(K, sample.dim());
  wcs.weights = Eigen::VectorXd::Constant(K, 1.0 / K);
  wcs.source.resize(K);
  for (int j = 0; j < K; ++j) {
    const int i = ord.order[j];
    wcs.points.row(j) = project_to_event(sample.point(i), event).point;
    wcs.source[j] = i;
  }
  return wcs;
}

WeightedConditionalSample interior_weights(const EmpiricalSample& sample,
                                           const ConditioningEvent& event) {
  Eigen::VectorXd dist = event_distances(sample, event);
  std::vector<int> inside;
  for (int i = 0; i < sample.size(); ++i)
    if (dist[i] == 0.0) inside.push_back(i);
  if (inside.empty())
    throw NoInteriorPoints("no sample points inside the event");
  WeightedConditionalSample wcs;
  wcs.points.resize(static_cast<int>(inside.size()), sample.dim());
  wcs.weights = Eigen::VectorXd::Constant(static_cast<int>(inside.size()),
                                          1.0 / inside.size());
  wcs.source = inside;
  for (size_t j = 0; j < inside.size(); ++j)
    wcs.points.row(static_cast<int>(j)) = sample.points.row(inside[j]);
  return wcs;
}

BaselineResult saa_solve(const WeightedConditionalSample& wcs,
                         const PiecewiseBiAffineLoss& loss,
                         const DecisionSet& decisions) {
  SaaResult r = solve_weighted_saa(wcs.points, wcs.weights, loss, decisions);
  return {r.x, r.value};
}

namespace {

BaselineResult wasserstein_dro(const Eigen::MatrixXd& points, int dz, int dy,
                               const ConditioningEvent& event, double rho,
                               const PiecewiseBiAffineLoss& loss,
                               const DecisionSet& decisions) {
  DroProblem pb{EmpiricalSample(points, dz, dy), event,
                TrimmedAmbiguitySpec{}, loss, decisions};
  pb.spec = make_ambiguity_spec(pb.sample, event, 1.0, rho);
  DroSolution sol = drotrim::solve(pb);
  return {sol.x_hat, sol.J_hat};
}

}  // namespace

BaselineResult knndro_solve(const EmpiricalSample& sample,
                            const ConditioningEvent& event, int K, double rho,
                            const PiecewiseBiAffineLoss& loss,
                            const DecisionSet& decisions) {
  WeightedConditionalSample wcs = knn_weights(sample, event, K);
  return wasserstein_dro(wcs.points, sample.dz, sample.dy, event, rho, loss,
                         decisions);
}

BaselineResult saadro_solve(const EmpiricalSample& sample,
                            const ConditioningEvent& event, double rho,
                            const PiecewiseBiAffineLoss& loss,
                            const DecisionSet& decisions) {
  WeightedConditionalSample wcs = interior_weights(sample, event);
  return wasserstein_dro(wcs.points, sample.dz, sample.dy, event, rho, loss,
                         decisions);
}

BaselineResult knnrobust_solve(const EmpiricalSample& sample,
                               const ConditioningEvent& event, int K,
                               double epsilon,
                               const PiecewiseBiAffineLoss& loss,
                               const DecisionSet& decisions) {
  const Eigen::VectorXd* zstar = event.singleton_z();
  if (!zstar && event.num_rows() > 0)
    throw EventNotSingleton("KNNROBUST requires a singleton feature event");
  const int dz = zstar ? static_cast<int>(zstar->size()) : sample.dz;
  const int dy = sample.dim() - dz;
  if (zstar && dz != sample.dz)
    throw DimensionMismatch("event feature dimension mismatch");
  WeightedConditionalSample wcs = knn_weights(sample, event, K);
  if (epsilon == 0.0) return saa_solve(wcs, loss, decisions);

  // Epigraph LP with auxiliary m_k >= ||a_k^y(x)||_inf:
  //   min sum_i w_i t_i
  //   s.t. t_i >= g_k(x, xi_i) + eps m_k,  m_k >= +-(A_k x + b_k)_j (y rows).
  lp::LinearProgram prog;
  prog.sense = lp::Sense::Min;
  const int n = loss.n;
  const int Kp = loss.num_pieces();
  for (int j = 0; j < n; ++j) prog.add_var(0.0, -lp::kInf, lp::kInf);
  const int t0 = prog.num_vars();
  for (int i = 0; i < wcs.size(); ++i)
    prog.add_var(wcs.weights[i], -lp::kInf, lp::kInf);
  const int m0 = prog.num_vars();
  for (int k = 0; k < Kp; ++k) prog.add_var(0.0, 0.0, lp::kInf);
  for (int r = 0; r < decisions.num_rows(); ++r) {
    int row = prog.add_row(
        decisions.is_eq(r) ? lp::RowSense::EQ : lp::RowSense::LE,
        decisions.g[r]);
    for (int j = 0; j < n; ++j) prog.set_entry(row, j, decisions.G(r, j));
  }
  for (int i = 0; i < wcs.size(); ++i) {
    const Eigen::VectorXd xi = wcs.points.row(i);
    for (int k = 0; k < Kp; ++k) {
      const LossPiece& piece = loss.pieces[k];
      int row = prog.add_row(lp::RowSense::LE, -piece.b.dot(xi) - piece.d);
      for (int j = 0; j < n; ++j)
        prog.set_entry(row, j, xi.dot(piece.A.col(j)) + piece.c[j]);
      prog.set_entry(row, t0 + i, -1.0);
      prog.set_entry(row, m0 + k, epsilon);
    }
  }
  for (int k = 0; k < Kp; ++k) {
    const LossPiece& piece = loss.pieces[k];
    for (int j = dz; j < sample.dim(); ++j) {
      for (int sign = 0; sign < 2; ++sign) {
        const double s = sign == 0 ? 1.0 : -1.0;
        int row = prog.add_row(lp::RowSense::LE, -s * piece.b[j]);
        for (int t = 0; t < n; ++t)
          prog.set_entry(row, t, s * piece.A(j, t));
        prog.set_entry(row, m0 + k, -1.0);
      }
    }
  }
  (void)dy;
  auto sol = lp::solve(prog);
  if (sol.status == lp::Status::Unbounded)
    throw UnboundedDecision("KNNROBUST objective unbounded below");
  if (sol.status != lp::Status::Optimal)
    throw lp::NumericalFailure("KNNROBUST LP infeasible");
  BaselineResult out;
  out.x = Eigen::Map<const Eigen::VectorXd>(sol.primal.data(), n);
  out.value = sol.objective;
  return out;
}

}  // namespace drotrim
