#include "drotrim/dro.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

namespace drotrim {

namespace {

// How the inner sup over the event decomposes for a given problem.
enum class EventShape {
  Separable,  // whole space, or singleton-z: no event multipliers needed
  General,    // polyhedral event: per-(i,k) multipliers eta over event rows
};

struct AssemblyContext {
  EventShape shape = EventShape::General;
  Eigen::MatrixXd eval_points;  // per-sample points entering g_k
  Eigen::VectorXd lambda_dist;  // per-sample l1 charge paid at fixed lambda
  std::vector<char> free_coord;  // coords without event-matrix support
};

AssemblyContext classify(const DroProblem& pb) {
  AssemblyContext ctx;
  const int d = pb.sample.dim();
  const int N = pb.sample.size();
  ctx.free_coord.assign(d, 1);
  if (pb.event.num_rows() == 0) {
    ctx.shape = EventShape::Separable;
    ctx.eval_points = pb.sample.points;
    ctx.lambda_dist = Eigen::VectorXd::Zero(N);
    return ctx;
  }
  const Eigen::VectorXd* zstar = pb.event.singleton_z();
  if (zstar && zstar->size() == pb.sample.dz) {
    // sup over {z*} x R^dy: the feature block contributes the constant
    // l1 charge ||z_i - z*||_1 and only the y-slope needs |.| <= lambda.
    ctx.shape = EventShape::Separable;
    ctx.eval_points = pb.sample.points;
    ctx.lambda_dist.resize(N);
    for (int i = 0; i < N; ++i) {
      ctx.eval_points.row(i).head(pb.sample.dz) = zstar->transpose();
      double dist =
          (pb.sample.points.row(i).head(pb.sample.dz).transpose() - *zstar)
              .lpNorm<1>();
      ctx.lambda_dist[i] = dist < 1e-9 ? 0.0 : dist;
    }
    for (int j = 0; j < pb.sample.dz; ++j) ctx.free_coord[j] = 0;
    return ctx;
  }
  ctx.shape = EventShape::General;
  ctx.eval_points = pb.sample.points;
  ctx.lambda_dist = Eigen::VectorXd::Zero(N);
  for (int j = 0; j < d; ++j)
    for (int r = 0; r < pb.event.num_rows(); ++r)
      if (pb.event.H()(r, j) != 0.0) {
        ctx.free_coord[j] = 0;
        break;
      }
  return ctx;
}

void check_budget(const DroProblem& pb) {
  if (pb.spec.rho < pb.spec.min_budget - 1e-12 * (1.0 + pb.spec.min_budget))
    throw InfeasibleBudget(
        "transport budget below the feasibility minimum for this event");
}

double cap_value(const DroProblem& pb) {
  return pb.spec.alpha > 0.0
             ? 1.0 / (pb.sample.size() * pb.spec.alpha)
             : lp::kInf;
}

}  // namespace

lp::LinearProgram assemble_joint_lp(const DroProblem& pb,
                                    JointLpLayout* layout,
                                    const Eigen::VectorXd* fixed_x) {
  pb.loss.validate();
  check_budget(pb);
  const int N = pb.sample.size();
  const int K = pb.loss.num_pieces();
  const int d = pb.sample.dim();
  const int n = pb.loss.n;
  if (pb.event.dim() != d)
    throw DimensionMismatch("event and sample dimensions differ");
  if (fixed_x && fixed_x->size() != n)
    throw DimensionMismatch("fixed decision has wrong dimension");
  const double cap = cap_value(pb);
  const bool has_mu = pb.spec.alpha > 0.0 && cap < 1.0 - 1e-12;
  AssemblyContext ctx = classify(pb);

  lp::LinearProgram prog;
  prog.sense = lp::Sense::Min;
  JointLpLayout lay;
  if (!fixed_x) {
    lay.x0 = 0;
    for (int j = 0; j < n; ++j) prog.add_var(0.0, -lp::kInf, lp::kInf);
  }
  lay.lambda = prog.add_var(pb.spec.rho, 0.0, lp::kInf);
  lay.theta = prog.add_var(1.0, -lp::kInf, lp::kInf);
  if (has_mu) {
    lay.mu0 = prog.num_vars();
    lay.num_mu = N;
    for (int i = 0; i < N; ++i) prog.add_var(cap, 0.0, lp::kInf);
  }
  const int m_event = pb.event.num_rows();
  int eta0 = -1;
  if (ctx.shape == EventShape::General) {
    eta0 = prog.num_vars();
    for (int i = 0; i < N; ++i)
      for (int k = 0; k < K; ++k)
        for (int r = 0; r < m_event; ++r)
          prog.add_var(0.0, pb.event.is_eq(r) ? -lp::kInf : 0.0, lp::kInf);
  }
  auto eta_col = [&](int i, int k, int r) {
    return eta0 + (i * K + k) * m_event + r;
  };
  // Emits the x-coefficient either as a column entry or folded into the rhs.
  auto x_coef = [&](int row, int j, double coef, double& rhs) {
    if (fixed_x)
      rhs -= coef * (*fixed_x)[j];
    else
      prog.set_entry(row, lay.x0 + j, coef);
  };

  if (!fixed_x) {
    for (int r = 0; r < pb.decisions.num_rows(); ++r) {
      int row = prog.add_row(
          pb.decisions.is_eq(r) ? lp::RowSense::EQ : lp::RowSense::LE,
          pb.decisions.g[r]);
      for (int j = 0; j < n; ++j)
        prog.set_entry(row, lay.x0 + j, pb.decisions.G(r, j));
    }
  }

  for (int i = 0; i < N; ++i) {
    const Eigen::VectorXd xi = ctx.eval_points.row(i);
    for (int k = 0; k < K; ++k) {
      const LossPiece& piece = pb.loss.pieces[k];
      // mu_i + theta >= g_k(x, xi_i~) - lambda * dist_i  (separable), or
      // mu_i + theta >= <eta, h - H xi_i> + <a_k(x), xi_i> + <c_k, x> + d_k.
      double rhs = -piece.b.dot(xi) - piece.d;
      int row = prog.add_row(lp::RowSense::LE, 0.0);
      for (int j = 0; j < n; ++j) {
        double coef = xi.dot(piece.A.col(j)) + piece.c[j];
        x_coef(row, j, coef, rhs);
      }
      prog.set_entry(row, lay.theta, -1.0);
      if (has_mu) prog.set_entry(row, lay.mu0 + i, -1.0);
      if (ctx.shape == EventShape::Separable) {
        prog.set_entry(row, lay.lambda, -ctx.lambda_dist[i]);
      } else {
        const Eigen::VectorXd slack =
            pb.event.h() - pb.event.H() * pb.sample.points.row(i).transpose();
        for (int r = 0; r < m_event; ++r)
          prog.set_entry(row, eta_col(i, k, r), slack[r]);
      }
      prog.rhs[row] = rhs;

      // Dual-norm bound on the constrained coordinates, per (i,k):
      // |(a_k(x) - H' eta)_j| <= lambda.
      if (ctx.shape == EventShape::General) {
        for (int j = 0; j < d; ++j) {
          if (ctx.free_coord[j]) continue;
          for (int sign = 0; sign < 2; ++sign) {
            const double s = sign == 0 ? 1.0 : -1.0;
            double nrhs = -s * piece.b[j];
            int nrow = prog.add_row(lp::RowSense::LE, 0.0);
            for (int t = 0; t < n; ++t)
              x_coef(nrow, t, s * piece.A(j, t), nrhs);
            for (int r = 0; r < m_event; ++r)
              if (pb.event.H()(r, j) != 0.0)
                prog.set_entry(nrow, eta_col(i, k, r),
                               -s * pb.event.H()(r, j));
            prog.set_entry(nrow, lay.lambda, -1.0);
            prog.rhs[nrow] = nrhs;
          }
        }
      }
    }
  }

  // Coordinates the event never touches: |a_k(x)_j| <= lambda, shared
  // across samples, once per piece.
  for (int k = 0; k < K; ++k) {
    const LossPiece& piece = pb.loss.pieces[k];
    for (int j = 0; j < d; ++j) {
      if (!ctx.free_coord[j]) continue;
      for (int sign = 0; sign < 2; ++sign) {
        const double s = sign == 0 ? 1.0 : -1.0;
        double nrhs = -s * piece.b[j];
        int nrow = prog.add_row(lp::RowSense::LE, 0.0);
        for (int t = 0; t < n; ++t) x_coef(nrow, t, s * piece.A(j, t), nrhs);
        prog.set_entry(nrow, lay.lambda, -1.0);
        prog.rhs[nrow] = nrhs;
      }
    }
  }

  if (layout) *layout = lay;
  return prog;
}

namespace {

// Detects the collapse of the ambiguity set to a single measure: rho at the
// feasibility minimum, N*alpha an integer K, a strictly unique set of K
// nearest points, and unique projections (whole space / singleton-z only).
struct SingletonReduction {
  bool applies = false;
  Eigen::MatrixXd points;   // K projected support points
  Eigen::VectorXd weights;  // uniform 1/K
};

SingletonReduction try_singleton_reduction(const DroProblem& pb) {
  SingletonReduction red;
  if (pb.spec.alpha <= 0.0 || pb.spec.rho > pb.spec.min_budget) return red;
  if (pb.event.num_rows() != 0 && !pb.event.singleton_z()) return red;
  const int N = pb.sample.size();
  const double na = N * pb.spec.alpha;
  const int K = static_cast<int>(std::lround(na));
  if (K < 1 || std::abs(na - K) > 1e-9) return red;
  EventOrdering ord = order_by_event_distance(pb.sample, pb.event);
  if (K < N &&
      ord.sorted_distances[K] <= ord.sorted_distances[K - 1] + 1e-12)
    return red;
  red.applies = true;
  red.points.resize(K, pb.sample.dim());
  for (int j = 0; j < K; ++j) {
    Eigen::VectorXd p = pb.sample.point(ord.order[j]);
    if (const Eigen::VectorXd* zstar = pb.event.singleton_z())
      p.head(zstar->size()) = *zstar;
    red.points.row(j) = p;
  }
  red.weights = Eigen::VectorXd::Constant(K, 1.0 / K);
  return red;
}

}  // namespace

SaaResult solve_weighted_saa(const Eigen::MatrixXd& points,
                             const Eigen::VectorXd& weights,
                             const PiecewiseBiAffineLoss& loss,
                             const DecisionSet& decisions) {
  const int M = static_cast<int>(points.rows());
  if (weights.size() != M || M == 0)
    throw DimensionMismatch("weighted SAA: points/weights mismatch");
  lp::LinearProgram prog;
  prog.sense = lp::Sense::Min;
  const int n = loss.n;
  for (int j = 0; j < n; ++j) prog.add_var(0.0, -lp::kInf, lp::kInf);
  const int t0 = prog.num_vars();
  for (int i = 0; i < M; ++i)
    prog.add_var(weights[i], -lp::kInf, lp::kInf);
  for (int r = 0; r < decisions.num_rows(); ++r) {
    int row = prog.add_row(
        decisions.is_eq(r) ? lp::RowSense::EQ : lp::RowSense::LE,
        decisions.g[r]);
    for (int j = 0; j < n; ++j) prog.set_entry(row, j, decisions.G(r, j));
  }
  for (int i = 0; i < M; ++i) {
    const Eigen::VectorXd xi = points.row(i);
    for (int k = 0; k < loss.num_pieces(); ++k) {
      const LossPiece& piece = loss.pieces[k];
      int row = prog.add_row(lp::RowSense::LE, -piece.b.dot(xi) - piece.d);
      for (int j = 0; j < n; ++j)
        prog.set_entry(row, j, xi.dot(piece.A.col(j)) + piece.c[j]);
      prog.set_entry(row, t0 + i, -1.0);
    }
  }
  auto sol = lp::solve(prog);
  if (sol.status == lp::Status::Unbounded)
    throw UnboundedDecision("weighted SAA objective unbounded below");
  if (sol.status != lp::Status::Optimal)
    throw lp::NumericalFailure("weighted SAA LP infeasible");
  SaaResult out;
  out.x = Eigen::Map<const Eigen::VectorXd>(sol.primal.data(), n);
  out.value = sol.objective;
  return out;
}

DroSolution solve(const DroProblem& pb) {
  check_budget(pb);
  SingletonReduction red = try_singleton_reduction(pb);
  if (red.applies) {
    SaaResult saa =
        solve_weighted_saa(red.points, red.weights, pb.loss, pb.decisions);
    DroSolution sol;
    sol.x_hat = saa.x;
    sol.J_hat = saa.value;
    sol.lambda = 0.0;
    sol.theta = saa.value;  // J = lambda rho + theta + cap sum(mu) trivially
    sol.mu_bar = Eigen::VectorXd::Zero(pb.sample.size());
    sol.reduced_singleton = true;
    return sol;
  }

  JointLpLayout lay;
  lp::LinearProgram prog = assemble_joint_lp(pb, &lay);
  auto lpsol = lp::solve(prog);
  if (lpsol.status == lp::Status::Unbounded)
    throw UnboundedInner(
        "joint LP unbounded: decision set admits arbitrarily good decisions");
  if (lpsol.status != lp::Status::Optimal)
    throw lp::NumericalFailure("joint LP infeasible");
  DroSolution sol;
  sol.x_hat = Eigen::Map<const Eigen::VectorXd>(lpsol.primal.data() + lay.x0,
                                                pb.loss.n);
  sol.J_hat = lpsol.objective;
  sol.lambda = lpsol.primal[lay.lambda];
  sol.theta = lpsol.primal[lay.theta];
  sol.mu_bar = Eigen::VectorXd::Zero(pb.sample.size());
  if (lay.mu0 >= 0)
    for (int i = 0; i < lay.num_mu; ++i)
      sol.mu_bar[i] = lpsol.primal[lay.mu0 + i];
  return sol;
}

double certificate_at(const DroProblem& pb, const Eigen::VectorXd& x) {
  check_budget(pb);
  SingletonReduction red = try_singleton_reduction(pb);
  if (red.applies) {
    double value = 0.0;
    for (int i = 0; i < red.points.rows(); ++i)
      value += red.weights[i] * pb.loss.evaluate(x, red.points.row(i));
    return value;
  }
  JointLpLayout lay;
  lp::LinearProgram prog = assemble_joint_lp(pb, &lay, &x);
  auto lpsol = lp::solve(prog);
  if (lpsol.status == lp::Status::Unbounded)
    throw UnboundedInner("certificate LP unbounded at fixed decision");
  if (lpsol.status != lp::Status::Optimal)
    throw lp::NumericalFailure("certificate LP infeasible");
  return lpsol.objective;
}

WorstCaseDistribution worst_case_distribution(const DroProblem& pb,
                                              const Eigen::VectorXd& x,
                                              double gamma_floor) {
  pb.loss.validate();
  check_budget(pb);
  const int N = pb.sample.size();
  const int K = pb.loss.num_pieces();
  const int d = pb.sample.dim();
  const double cap = cap_value(pb);

  // Primal transport LP in (gamma_ik, q_ik), q split into q+ - q-:
  //   max sum_ik gamma_ik g_k(x, xi_i) - <a_k(x), q_ik>
  //   s.t. H (gamma_ik xi_i - q_ik) <= gamma_ik h      (atom stays in event)
  //        sum ||q_ik||_1 <= rho, sum gamma = 1, sum_k gamma_i. <= cap.
  lp::LinearProgram prog;
  prog.sense = lp::Sense::Max;
  auto gcol = [&](int i, int k) { return (i * K + k) * (1 + 2 * d); };
  auto qp_col = [&](int i, int k, int j) { return gcol(i, k) + 1 + j; };
  auto qm_col = [&](int i, int k, int j) { return gcol(i, k) + 1 + d + j; };
  std::vector<Eigen::VectorXd> slopes(K);
  for (int k = 0; k < K; ++k) slopes[k] = pb.loss.xi_gradient_of_piece(k, x);

  for (int i = 0; i < N; ++i) {
    const Eigen::VectorXd xi = pb.sample.point(i);
    for (int k = 0; k < K; ++k) {
      prog.add_var(pb.loss.piece_value(k, x, xi), 0.0, lp::kInf);  // gamma
      for (int j = 0; j < d; ++j) prog.add_var(-slopes[k][j], 0.0, lp::kInf);
      for (int j = 0; j < d; ++j) prog.add_var(slopes[k][j], 0.0, lp::kInf);
    }
  }
  int budget_row = prog.add_row(lp::RowSense::LE, pb.spec.rho);
  int mass_row = prog.add_row(lp::RowSense::EQ, 1.0);
  std::vector<int> cap_rows;
  const bool has_cap = pb.spec.alpha > 0.0 && cap < 1.0 - 1e-12;
  if (has_cap)
    for (int i = 0; i < N; ++i)
      cap_rows.push_back(prog.add_row(lp::RowSense::LE, cap));
  for (int i = 0; i < N; ++i) {
    const Eigen::VectorXd xi = pb.sample.point(i);
    for (int k = 0; k < K; ++k) {
      for (int j = 0; j < d; ++j) {
        prog.set_entry(budget_row, qp_col(i, k, j), 1.0);
        prog.set_entry(budget_row, qm_col(i, k, j), 1.0);
      }
      prog.set_entry(mass_row, gcol(i, k), 1.0);
      if (has_cap) prog.set_entry(cap_rows[i], gcol(i, k), 1.0);
      for (int r = 0; r < pb.event.num_rows(); ++r) {
        int row = prog.add_row(
            pb.event.is_eq(r) ? lp::RowSense::EQ : lp::RowSense::LE, 0.0);
        prog.set_entry(row, gcol(i, k),
                       pb.event.H().row(r).dot(xi) - pb.event.h()[r]);
        for (int j = 0; j < d; ++j) {
          if (pb.event.H()(r, j) == 0.0) continue;
          prog.set_entry(row, qp_col(i, k, j), -pb.event.H()(r, j));
          prog.set_entry(row, qm_col(i, k, j), pb.event.H()(r, j));
        }
      }
    }
  }

  auto lpsol = lp::solve(prog);
  if (lpsol.status != lp::Status::Optimal)
    throw lp::NumericalFailure("worst-case distribution LP not optimal");
  WorstCaseDistribution out;
  out.objective = lpsol.objective;
  for (int i = 0; i < N; ++i) {
    for (int k = 0; k < K; ++k) {
      const double gamma = lpsol.primal[gcol(i, k)];
      Eigen::VectorXd q(d);
      for (int j = 0; j < d; ++j)
        q[j] = lpsol.primal[qp_col(i, k, j)] - lpsol.primal[qm_col(i, k, j)];
      if (gamma > gamma_floor) {
        WcAtom atom;
        atom.weight = gamma;
        atom.xi = pb.sample.point(i) - q / gamma;
        atom.i = i;
        atom.k = k;
        out.atoms.push_back(std::move(atom));
      } else if (q.lpNorm<Eigen::Infinity>() > 1e-7) {
        // Mass escaping along a recession direction of the event: the
        // supremum is approached but not attained (p = 1, unbounded event).
        out.degenerate = true;
        out.dropped_displacement += q.lpNorm<1>();
      }
    }
  }
  return out;
}

double solve_sp2_discrete(const EmpiricalSample& sample,
                          const Eigen::MatrixXd& grid, double alpha,
                          double rho, const PiecewiseBiAffineLoss& loss,
                          const Eigen::VectorXd& x, double p) {
  const int N = sample.size();
  const int G = static_cast<int>(grid.rows());
  if (G == 0) throw DimensionMismatch("empty grid");
  lp::LinearProgram prog;
  prog.sense = lp::Sense::Max;
  // pi_ij >= 0: mass moved from sample i to grid point j.
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < G; ++j)
      prog.add_var(loss.evaluate(x, grid.row(j)), 0.0, lp::kInf);
  auto col = [&](int i, int j) { return i * G + j; };
  int mass = prog.add_row(lp::RowSense::EQ, 1.0);
  int budget = prog.add_row(lp::RowSense::LE, rho);
  for (int i = 0; i < N; ++i) {
    int caprow = -1;
    if (alpha > 0.0 && 1.0 / (N * alpha) < 1.0)
      caprow = prog.add_row(lp::RowSense::LE, 1.0 / (N * alpha));
    for (int j = 0; j < G; ++j) {
      prog.set_entry(mass, col(i, j), 1.0);
      const double cost =
          std::pow((sample.point(i) - grid.row(j).transpose()).lpNorm<1>(), p);
      prog.set_entry(budget, col(i, j), cost);
      if (caprow >= 0) prog.set_entry(caprow, col(i, j), 1.0);
    }
  }
  auto sol = lp::solve(prog);
  if (sol.status != lp::Status::Optimal)
    throw lp::NumericalFailure("SP2 grid oracle LP not optimal");
  return sol.objective;
}

double solve_sp1_discrete(const EmpiricalSample& sample,
                          const Eigen::MatrixXd& grid,
                          const ConditioningEvent& event, double alpha,
                          double rho, const PiecewiseBiAffineLoss& loss,
                          const Eigen::VectorXd& x, double p) {
  if (alpha <= 0.0) throw DimensionMismatch("SP1 oracle needs alpha > 0");
  const int N = sample.size();
  const int G = static_cast<int>(grid.rows());
  // Targets: grid points (inside the event) plus the original sample points
  // (mass staying put at zero cost, possibly outside the event).
  const int T = G + N;
  auto target = [&](int j) -> Eigen::VectorXd {
    return j < G ? Eigen::VectorXd(grid.row(j)) : sample.point(j - G);
  };
  std::vector<double> indicator(T);
  for (int j = 0; j < T; ++j)
    indicator[j] = j < G ? 1.0 : (event.contains(sample.point(j - G)) ? 1.0
                                                                      : 0.0);
  lp::LinearProgram prog;
  prog.sense = lp::Sense::Max;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < T; ++j)
      prog.add_var(indicator[j] / alpha * loss.evaluate(x, target(j)), 0.0,
                   lp::kInf);
  auto col = [&](int i, int j) { return i * T + j; };
  int event_mass = prog.add_row(lp::RowSense::EQ, alpha);
  int budget = prog.add_row(lp::RowSense::LE, rho * alpha);
  for (int i = 0; i < N; ++i) {
    int source = prog.add_row(lp::RowSense::EQ, 1.0 / N);
    for (int j = 0; j < T; ++j) {
      prog.set_entry(source, col(i, j), 1.0);
      if (indicator[j] != 0.0)
        prog.set_entry(event_mass, col(i, j), indicator[j]);
      const double cost =
          std::pow((sample.point(i) - target(j)).lpNorm<1>(), p);
      if (cost != 0.0) prog.set_entry(budget, col(i, j), cost);
    }
  }
  auto sol = lp::solve(prog);
  if (sol.status != lp::Status::Optimal)
    throw lp::NumericalFailure("SP1 grid oracle LP not optimal");
  return sol.objective;
}

nlohmann::json solution_to_json(const DroSolution& sol,
                                const WorstCaseDistribution* wc) {
  nlohmann::json j;
  j["x_hat"] = std::vector<double>(sol.x_hat.data(),
                                   sol.x_hat.data() + sol.x_hat.size());
  j["J_hat"] = sol.J_hat;
  j["lambda"] = sol.lambda;
  j["theta"] = sol.theta;
  j["mu_bar"] = std::vector<double>(sol.mu_bar.data(),
                                    sol.mu_bar.data() + sol.mu_bar.size());
  if (wc) {
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : wc->atoms) {
      nlohmann::json aj;
      aj["w"] = a.weight;
      aj["xi"] = std::vector<double>(a.xi.data(), a.xi.data() + a.xi.size());
      aj["i"] = a.i;
      aj["k"] = a.k;
      atoms.push_back(aj);
    }
    j["worst_case"] = atoms;
  }
  return j;
}

}  // namespace drotrim
