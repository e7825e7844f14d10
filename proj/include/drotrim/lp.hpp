// Linear programming: problem container, a self-contained revised-simplex
// solver with deterministic pivoting, and independent certificate checking.
#pragma once

#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace drotrim::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { Min, Max };
enum class RowSense { LE, EQ, GE };
enum class Status { Optimal, Infeasible, Unbounded };

// General-form LP:
//   min/max  c'x
//   s.t.     A x  {<=,=,>=}  rhs   (row-wise senses)
//            lower <= x <= upper  (entries may be +-infinity)
// A is stored as unordered triplets; duplicate (row,col) entries are summed.
struct LinearProgram {
  struct Entry {
    int row;
    int col;
    double value;
  };

  Sense sense = Sense::Min;
  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<RowSense> row_sense;
  std::vector<double> rhs;
  std::vector<Entry> entries;

  int num_vars() const { return static_cast<int>(cost.size()); }
  int num_rows() const { return static_cast<int>(rhs.size()); }

  // Appends a variable with the given cost and bounds; returns its index.
  int add_var(double c, double lo = 0.0, double hi = kInf) {
    cost.push_back(c);
    lower.push_back(lo);
    upper.push_back(hi);
    return num_vars() - 1;
  }

  // Appends an empty row; returns its index.
  int add_row(RowSense s, double b) {
    row_sense.push_back(s);
    rhs.push_back(b);
    return num_rows() - 1;
  }

  void set_entry(int row, int col, double value) {
    if (value != 0.0) entries.push_back({row, col, value});
  }
};

struct Tolerances {
  double feasibility = 1e-7;  // scaled by (1 + ||rhs||_inf) resp. (1 + ||c||_inf)
  double gap = 1e-6;          // scaled by (1 + |objective|)
};

// Dual sign convention (for Min; negated for Max): y_i <= 0 on <= rows,
// y_i >= 0 on >= rows, free on equalities, so that
//   c'x* = y'rhs + sum_j r_j * (active bound of x_j),  r = c - A'y.
// For Infeasible problems `dual` carries a Farkas certificate: y respects the
// row-sense signs, A'y is <= 0 on variables with lower bound 0 (the only kind
// this solver emits certificates for), and y'rhs > 0.
struct LpSolution {
  Status status = Status::Optimal;
  std::vector<double> primal;
  std::vector<double> dual;
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

// Cycling or irrecoverable loss of numerical accuracy.
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Solves the LP with a two-phase revised simplex method (dense basis inverse,
// sparse columns). Pivot rule: largest reduced-cost violation with
// smallest-index tie-breaking, switching to Bland's rule after a bounded run
// of degenerate pivots, so the result is deterministic: byte-identical inputs
// give bit-identical solutions.
LpSolution solve(const LinearProgram& lp, const Tolerances& tol = {});

// Independently re-verifies an Optimal solution: primal feasibility, dual
// sign conditions, and the duality gap via the bound-aware dual objective.
bool check_certificate(const LinearProgram& lp, const LpSolution& sol,
                       const Tolerances& tol = {});

// Writes the problem in free MPS format (OBJSENSE, ROWS, COLUMNS, RHS,
// BOUNDS) for cross-checking against external solvers.
void write_mps(const LinearProgram& lp, std::ostream& os,
               const std::string& name = "LP");

}  // namespace drotrim::lp
