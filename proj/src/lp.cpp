#include "drotrim/lp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>

namespace drotrim::lp {

namespace {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct SparseCol {
  std::vector<std::pair<int, double>> nz;  // (row, value), rows ascending
};

// Internal equality-form problem: min c't, T t = b, t >= 0, b >= 0 after row
// flips. Columns are ordered structural, then slacks, then artificials.
struct Core {
  int m = 0;
  std::vector<SparseCol> cols;
  std::vector<double> cost;       // phase-2 costs
  std::vector<char> blocked;      // never allowed to enter (artificials)
  Eigen::VectorXd b;
  std::vector<int> basis;         // basic column per row
  std::vector<char> in_basis;     // per column
  RowMajorMatrix Binv;
  Eigen::VectorXd xB;
  int first_artificial = 0;

  int num_cols() const { return static_cast<int>(cols.size()); }
};

enum class CoreStatus { Optimal, Unbounded };

void refactorize(Core& core) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(core.m, core.m);
  for (int i = 0; i < core.m; ++i)
    for (const auto& [r, v] : core.cols[core.basis[i]].nz) B(r, i) = v;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
  core.Binv = lu.inverse();
  if (!core.Binv.allFinite())
    throw NumericalFailure("singular basis during refactorization");
  core.xB = core.Binv * core.b;
}

Eigen::VectorXd ftran(const Core& core, int col) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(core.m);
  for (const auto& [r, v] : core.cols[col].nz) w += v * core.Binv.col(r);
  return w;
}

// Runs primal simplex iterations on `core` with the given phase costs.
// Deterministic: Dantzig pricing with smallest-index tie-breaking, switching
// to Bland's rule after a bounded streak of degenerate pivots.
CoreStatus simplex(Core& core, const std::vector<double>& cost) {
  const int m = core.m;
  const int n = core.num_cols();
  if (m == 0) {
    // No rows: any column with negative cost and room to grow is unbounded.
    for (int j = 0; j < n; ++j)
      if (!core.blocked[j] && cost[j] < -1e-12) return CoreStatus::Unbounded;
    return CoreStatus::Optimal;
  }

  double cmax = 0.0;
  for (int j = 0; j < n; ++j) cmax = std::max(cmax, std::abs(cost[j]));
  const double price_tol = 1e-9 * (1.0 + cmax);

  const long iter_cap = 200L * (m + n) + 10000;
  bool bland = false;
  int degenerate_streak = 0;
  int since_refactor = 0;
  Eigen::VectorXd cB(m), y(m);

  for (long iter = 0;; ++iter) {
    if (iter == iter_cap) throw NumericalFailure("simplex iteration limit");
    if (iter == iter_cap / 2) bland = true;  // last resort: finite by Bland

    for (int i = 0; i < m; ++i) cB[i] = cost[core.basis[i]];
    // Left-multiply keeps the row-major basis inverse in sequential access
    // order (the transposed gemv walks it with stride m).
    y.noalias() = (cB.transpose() * core.Binv).transpose();

    // Pricing.
    int enter = -1;
    double best = -price_tol;
    for (int j = 0; j < n; ++j) {
      if (core.in_basis[j] || core.blocked[j]) continue;
      double dj = cost[j];
      for (const auto& [r, v] : core.cols[j].nz) dj -= y[r] * v;
      if (dj < best) {
        best = dj;
        enter = j;
        if (bland) break;  // Bland: first improving index
      }
    }
    if (enter < 0) return CoreStatus::Optimal;

    Eigen::VectorXd w = ftran(core, enter);

    // Pivot eligibility is scaled by the transformed column so badly scaled
    // columns cannot force a near-singular basis update.
    const double piv_tol = 1e-9 * std::max(1.0, w.cwiseAbs().maxCoeff());

    // Ratio test. Rows carrying a basic artificial at zero are pivoted out
    // first (largest eligible pivot element, smallest basic index on ties)
    // so artificials can never re-grow.
    int leave = -1;
    double step = kInf;
    for (int i = 0; i < m; ++i) {
      if (core.basis[i] >= core.first_artificial && std::abs(w[i]) > piv_tol &&
          core.xB[i] <= 1e-9) {
        if (leave < 0 || std::abs(w[i]) > std::abs(w[leave]) ||
            (std::abs(w[i]) == std::abs(w[leave]) &&
             core.basis[i] < core.basis[leave])) {
          leave = i;
          step = 0.0;
        }
      }
    }
    if (leave < 0) {
      for (int i = 0; i < m; ++i) {
        if (w[i] <= piv_tol) continue;
        double ratio = std::max(core.xB[i], 0.0) / w[i];
        if (leave < 0 || ratio < step - 1e-9 * (1.0 + step)) {
          leave = i;
          step = ratio;
        } else if (ratio <= step + 1e-9 * (1.0 + step) &&
                   core.basis[i] < core.basis[leave]) {
          leave = i;  // tie: smallest basic index (Bland-compatible)
        }
      }
    }
    if (leave < 0) return CoreStatus::Unbounded;

    if (step <= 1e-12) {
      if (++degenerate_streak > 60) bland = true;
    } else {
      degenerate_streak = 0;
      if (iter < iter_cap / 2) bland = false;
    }

    // Pivot: update basis, basic values and the dense basis inverse.
    const double piv = w[leave];
    core.in_basis[core.basis[leave]] = 0;
    core.in_basis[enter] = 1;
    core.basis[leave] = enter;
    core.xB -= step * w;
    core.xB[leave] = step;
    core.Binv.row(leave) /= piv;
    for (int i = 0; i < m; ++i) {
      if (i == leave || w[i] == 0.0) continue;
      core.Binv.row(i) -= w[i] * core.Binv.row(leave);
    }
    // Amortize the O(m^3) refactorization against the O(m^2) pivot updates:
    // a period proportional to m keeps the per-pivot cost quadratic on large
    // instances while small ones refactor every 120 pivots as before.
    if (++since_refactor >= std::max(120, m)) {
      refactorize(core);
      since_refactor = 0;
    }
  }
}

// Variable substitution from general bounds to nonnegative internals.
struct VarMap {
  enum Kind { Shifted, Reflected, Split } kind;
  int col = -1;   // primary internal column
  int col2 = -1;  // negative part for Split
  double shift = 0.0;
};

struct Standardized {
  Core core;
  std::vector<VarMap> vmap;
  std::vector<double> row_flip;  // +-1 per internal row
  int original_rows = 0;
  std::vector<double> phase1_cost;
};

Standardized standardize(const LinearProgram& lp, bool maximize) {
  const int n = lp.num_vars();
  const int m0 = lp.num_rows();
  Standardized s;
  s.original_rows = m0;

  // Internal structural columns and the objective in min form.
  std::vector<double> icost;
  std::vector<VarMap>& vmap = s.vmap;
  vmap.resize(n);
  struct BoundRow {
    int col;
    double rhs;
  };
  std::vector<BoundRow> bound_rows;
  for (int j = 0; j < n; ++j) {
    const double lo = lp.lower[j], hi = lp.upper[j];
    const double cj = maximize ? -lp.cost[j] : lp.cost[j];
    if (lo > hi) throw NumericalFailure("variable with empty bound interval");
    if (lo > -kInf) {
      vmap[j] = {VarMap::Shifted, static_cast<int>(icost.size()), -1, lo};
      icost.push_back(cj);
      if (hi < kInf && hi > lo)
        bound_rows.push_back({vmap[j].col, hi - lo});
      if (hi == lo) bound_rows.push_back({vmap[j].col, 0.0});
    } else if (hi < kInf) {
      vmap[j] = {VarMap::Reflected, static_cast<int>(icost.size()), -1, hi};
      icost.push_back(-cj);
    } else {
      vmap[j] = {VarMap::Split, static_cast<int>(icost.size()),
                 static_cast<int>(icost.size()) + 1, 0.0};
      icost.push_back(cj);
      icost.push_back(-cj);
    }
  }

  const int m = m0 + static_cast<int>(bound_rows.size());
  Core& core = s.core;
  core.m = m;
  core.b = Eigen::VectorXd::Zero(m);
  std::vector<RowSense> isense(m, RowSense::LE);
  for (int i = 0; i < m0; ++i) {
    isense[i] = lp.row_sense[i];
    core.b[i] = lp.rhs[i];
  }
  for (size_t i = 0; i < bound_rows.size(); ++i)
    core.b[m0 + static_cast<int>(i)] = bound_rows[i].rhs;

  // Assemble structural entries (accounting for shifts in the rhs).
  std::vector<std::vector<std::pair<int, double>>> colentries(icost.size());
  for (const auto& e : lp.entries) {
    if (e.row < 0 || e.row >= m0 || e.col < 0 || e.col >= n)
      throw NumericalFailure("entry index out of range");
    const VarMap& vm = vmap[e.col];
    switch (vm.kind) {
      case VarMap::Shifted:
        colentries[vm.col].push_back({e.row, e.value});
        core.b[e.row] -= e.value * vm.shift;
        break;
      case VarMap::Reflected:
        colentries[vm.col].push_back({e.row, -e.value});
        core.b[e.row] -= e.value * vm.shift;
        break;
      case VarMap::Split:
        colentries[vm.col].push_back({e.row, e.value});
        colentries[vm.col2].push_back({e.row, -e.value});
        break;
    }
  }
  for (size_t i = 0; i < bound_rows.size(); ++i)
    colentries[bound_rows[i].col].push_back({m0 + static_cast<int>(i), 1.0});

  // Flip rows with negative rhs so b >= 0 (artificials need that).
  s.row_flip.assign(m, 1.0);
  for (int i = 0; i < m; ++i)
    if (core.b[i] < 0) {
      s.row_flip[i] = -1.0;
      core.b[i] = -core.b[i];
    }

  // Structural columns: merge duplicates, apply flips, sort by row.
  core.cols.resize(icost.size());
  core.cost = icost;
  for (size_t j = 0; j < colentries.size(); ++j) {
    std::map<int, double> merged;
    for (const auto& [r, v] : colentries[j]) merged[r] += v * s.row_flip[r];
    for (const auto& [r, v] : merged)
      if (v != 0.0) core.cols[j].nz.push_back({r, v});
  }

  // Slacks, then artificials; rows whose slack coefficient is +1 start basic.
  core.basis.assign(m, -1);
  for (int i = 0; i < m; ++i) {
    if (isense[i] == RowSense::EQ) continue;
    double coeff = (isense[i] == RowSense::LE ? 1.0 : -1.0) * s.row_flip[i];
    SparseCol col;
    col.nz.push_back({i, coeff});
    core.cols.push_back(col);
    core.cost.push_back(0.0);
    if (coeff > 0) core.basis[i] = core.num_cols() - 1;
  }
  core.first_artificial = core.num_cols();
  s.phase1_cost.assign(core.num_cols(), 0.0);
  for (int i = 0; i < m; ++i) {
    if (core.basis[i] >= 0) continue;
    SparseCol col;
    col.nz.push_back({i, 1.0});
    core.cols.push_back(col);
    core.cost.push_back(0.0);
    s.phase1_cost.push_back(1.0);
    core.basis[i] = core.num_cols() - 1;
  }
  core.blocked.assign(core.num_cols(), 0);
  core.in_basis.assign(core.num_cols(), 0);
  for (int i = 0; i < m; ++i) core.in_basis[core.basis[i]] = 1;
  if (m > 0) refactorize(core);
  return s;
}

Eigen::VectorXd basis_duals(const Core& core, const std::vector<double>& cost) {
  Eigen::VectorXd cB(core.m);
  for (int i = 0; i < core.m; ++i) cB[i] = cost[core.basis[i]];
  return core.Binv.transpose() * cB;
}

// Shared residual assessment; also used by check_certificate.
struct Assessment {
  double primal_res = 0.0;
  double dual_res = 0.0;
  double gap = 0.0;
};

Assessment assess(const LinearProgram& lp, const LpSolution& sol) {
  Assessment a;
  const int n = lp.num_vars();
  const int m = lp.num_rows();
  const bool maximize = lp.sense == Sense::Max;
  const auto& x = sol.primal;
  if (static_cast<int>(x.size()) != n || static_cast<int>(sol.dual.size()) != m)
    return {kInf, kInf, kInf};

  std::vector<double> act(m, 0.0);
  std::vector<double> red(n);  // reduced costs in min orientation
  for (int j = 0; j < n; ++j) red[j] = maximize ? -lp.cost[j] : lp.cost[j];
  std::vector<double> y(m);
  for (int i = 0; i < m; ++i) y[i] = maximize ? -sol.dual[i] : sol.dual[i];
  for (const auto& e : lp.entries) {
    act[e.row] += e.value * x[e.col];
    red[e.col] -= y[e.row] * e.value;
  }

  for (int i = 0; i < m; ++i) {
    switch (lp.row_sense[i]) {
      case RowSense::LE:
        a.primal_res = std::max(a.primal_res, act[i] - lp.rhs[i]);
        a.dual_res = std::max(a.dual_res, y[i]);
        break;
      case RowSense::GE:
        a.primal_res = std::max(a.primal_res, lp.rhs[i] - act[i]);
        a.dual_res = std::max(a.dual_res, -y[i]);
        break;
      case RowSense::EQ:
        a.primal_res = std::max(a.primal_res, std::abs(act[i] - lp.rhs[i]));
        break;
    }
  }

  double primal_obj = 0.0, dual_obj = 0.0;
  for (int i = 0; i < m; ++i) dual_obj += y[i] * lp.rhs[i];
  for (int j = 0; j < n; ++j) {
    const double lo = lp.lower[j], hi = lp.upper[j];
    a.primal_res = std::max(a.primal_res, lo - x[j]);
    a.primal_res = std::max(a.primal_res, x[j] - hi);
    primal_obj += (maximize ? -lp.cost[j] : lp.cost[j]) * x[j];
    const double btol = 1e-7 * (1.0 + std::abs(x[j]));
    const bool at_lo = x[j] <= lo + btol;
    const bool at_hi = x[j] >= hi - btol;
    if (at_lo && at_hi) {
      // fixed variable: reduced cost unconstrained
    } else if (at_lo) {
      a.dual_res = std::max(a.dual_res, -red[j]);
    } else if (at_hi) {
      a.dual_res = std::max(a.dual_res, red[j]);
    } else {
      a.dual_res = std::max(a.dual_res, std::abs(red[j]));
    }
    // Bound-aware dual objective term (complementary slackness form).
    const double rtol = 1e-9 * (1.0 + std::abs(red[j]));
    if (red[j] > rtol) {
      if (lo > -kInf)
        dual_obj += red[j] * lo;
      else
        a.dual_res = std::max(a.dual_res, red[j]);
    } else if (red[j] < -rtol) {
      if (hi < kInf)
        dual_obj += red[j] * hi;
      else
        a.dual_res = std::max(a.dual_res, -red[j]);
    }
  }
  a.gap = std::abs(primal_obj - dual_obj);
  return a;
}

}  // namespace

LpSolution solve(const LinearProgram& lp, const Tolerances& tol) {
  const bool maximize = lp.sense == Sense::Max;
  Standardized s = standardize(lp, maximize);
  Core& core = s.core;

  double bmax = 0.0;
  for (double v : lp.rhs) bmax = std::max(bmax, std::abs(v));
  const double feas_scale = tol.feasibility * (1.0 + bmax);

  LpSolution sol;

  // Phase 1: minimize the sum of artificials.
  if (core.num_cols() > core.first_artificial) {
    simplex(core, s.phase1_cost);  // always bounded below by 0
    refactorize(core);
    double infeas = 0.0;
    for (int i = 0; i < core.m; ++i)
      if (core.basis[i] >= core.first_artificial)
        infeas += std::max(core.xB[i], 0.0);
    if (infeas > feas_scale) {
      sol.status = Status::Infeasible;
      // Farkas certificate from the phase-1 duals.
      Eigen::VectorXd y = basis_duals(core, s.phase1_cost);
      sol.dual.resize(lp.num_rows());
      for (int i = 0; i < lp.num_rows(); ++i)
        sol.dual[i] = (maximize ? -1.0 : 1.0) * s.row_flip[i] * y[i];
      sol.objective = infeas;
      return sol;
    }
  }
  for (int j = core.first_artificial; j < core.num_cols(); ++j)
    core.blocked[j] = 1;
  // Basic artificials surviving phase 1 sit at (numerically) zero; clamp so
  // the ratio test's forced-exit rule keeps them pinned there in phase 2.
  for (int i = 0; i < core.m; ++i)
    if (core.basis[i] >= core.first_artificial && core.xB[i] < 1e-9)
      core.xB[i] = 0.0;

  // Phase 2.
  CoreStatus st = simplex(core, core.cost);
  if (st == CoreStatus::Unbounded) {
    sol.status = Status::Unbounded;
    return sol;
  }
  if (core.m > 0) refactorize(core);

  // Map the internal solution back to the original variables.
  std::vector<double> t(core.first_artificial, 0.0);
  for (int i = 0; i < core.m; ++i)
    if (core.basis[i] < core.first_artificial)
      t[core.basis[i]] = std::max(core.xB[i], 0.0);
  sol.primal.resize(lp.num_vars());
  for (int j = 0; j < lp.num_vars(); ++j) {
    const VarMap& vm = s.vmap[j];
    switch (vm.kind) {
      case VarMap::Shifted:
        sol.primal[j] = vm.shift + t[vm.col];
        break;
      case VarMap::Reflected:
        sol.primal[j] = vm.shift - t[vm.col];
        break;
      case VarMap::Split:
        sol.primal[j] = t[vm.col] - t[vm.col2];
        break;
    }
  }
  sol.objective = 0.0;
  for (int j = 0; j < lp.num_vars(); ++j)
    sol.objective += lp.cost[j] * sol.primal[j];

  Eigen::VectorXd y = core.m > 0 ? basis_duals(core, core.cost)
                                 : Eigen::VectorXd();
  sol.dual.resize(lp.num_rows());
  for (int i = 0; i < lp.num_rows(); ++i)
    sol.dual[i] = (maximize ? -1.0 : 1.0) * s.row_flip[i] * y[i];

  Assessment a = assess(lp, sol);
  sol.primal_residual = a.primal_res;
  sol.dual_residual = a.dual_res;
  sol.status = Status::Optimal;
  return sol;
}

bool check_certificate(const LinearProgram& lp, const LpSolution& sol,
                       const Tolerances& tol) {
  if (sol.status != Status::Optimal) return false;
  double bmax = 0.0, cmax = 0.0;
  for (double v : lp.rhs) bmax = std::max(bmax, std::abs(v));
  for (double v : lp.cost) cmax = std::max(cmax, std::abs(v));
  Assessment a = assess(lp, sol);
  return a.primal_res <= tol.feasibility * (1.0 + bmax) &&
         a.dual_res <= tol.feasibility * (1.0 + cmax) &&
         a.gap <= tol.gap * (1.0 + std::abs(sol.objective));
}

void write_mps(const LinearProgram& lp, std::ostream& os,
               const std::string& name) {
  os << "NAME          " << name << "\n";
  if (lp.sense == Sense::Max) os << "OBJSENSE\n    MAX\n";
  os << "ROWS\n N  COST\n";
  for (int i = 0; i < lp.num_rows(); ++i) {
    char s = lp.row_sense[i] == RowSense::LE
                 ? 'L'
                 : (lp.row_sense[i] == RowSense::GE ? 'G' : 'E');
    os << " " << s << "  R" << i << "\n";
  }
  // Merge duplicate entries per column.
  std::vector<std::map<int, double>> cols(lp.num_vars());
  for (const auto& e : lp.entries) cols[e.col][e.row] += e.value;
  os << "COLUMNS\n" << std::setprecision(17);
  for (int j = 0; j < lp.num_vars(); ++j) {
    if (lp.cost[j] != 0.0)
      os << "    X" << j << "  COST  " << lp.cost[j] << "\n";
    for (const auto& [r, v] : cols[j])
      if (v != 0.0) os << "    X" << j << "  R" << r << "  " << v << "\n";
  }
  os << "RHS\n";
  for (int i = 0; i < lp.num_rows(); ++i)
    if (lp.rhs[i] != 0.0) os << "    RHS  R" << i << "  " << lp.rhs[i] << "\n";
  os << "BOUNDS\n";
  for (int j = 0; j < lp.num_vars(); ++j) {
    const double lo = lp.lower[j], hi = lp.upper[j];
    if (lo == 0.0 && hi == kInf) continue;
    if (lo == -kInf && hi == kInf) {
      os << " FR BND X" << j << "\n";
      continue;
    }
    if (lo == -kInf)
      os << " MI BND X" << j << "\n";
    else if (lo != 0.0)
      os << " LO BND X" << j << "  " << lo << "\n";
    if (hi < kInf) os << " UP BND X" << j << "  " << hi << "\n";
  }
  os << "ENDATA\n";
}

}  // namespace drotrim::lp
