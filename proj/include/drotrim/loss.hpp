// Piecewise bi-affine losses f(x, xi) = max_k g_k(x, xi) with
// g_k(x, xi) = <xi, A_k x> + <b_k, xi> + <c_k, x> + d_k, polyhedral decision
// sets, and the two benchmark instantiations (newsvendor, CVaR portfolio).
#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <stdexcept>
#include <vector>

#include "drotrim/sample.hpp"  // DimensionMismatch

namespace drotrim {

struct NonpositiveCost : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidDelta : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct LossPiece {
  Eigen::MatrixXd A;  // d x n bilinear coupling
  Eigen::VectorXd b;  // d-vector, xi-linear term
  Eigen::VectorXd c;  // n-vector, x-linear term
  double d = 0.0;     // constant
};

struct PiecewiseBiAffineLoss {
  std::vector<LossPiece> pieces;
  int n = 0;  // decision dimension
  int d = 0;  // uncertainty dimension (dz + dy)

  int num_pieces() const { return static_cast<int>(pieces.size()); }

  double piece_value(int k, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& xi) const;
  double evaluate(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const;

  // xi-slope of piece k at decision x: a_k(x) = A_k x + b_k.
  Eigen::VectorXd xi_gradient_of_piece(int k, const Eigen::VectorXd& x) const;

  void validate() const;
};

// Feasible decisions X = {x : G x <= g, equality rows tight}.
struct DecisionSet {
  Eigen::MatrixXd G;
  Eigen::VectorXd g;
  std::vector<int> eq_rows;
  int n = 0;

  bool is_eq(int row) const;
  int num_rows() const { return static_cast<int>(G.rows()); }

  // x in a box [lo, hi]^n.
  static DecisionSet box(int n, double lo, double hi);
  // Portfolio decisions (x, beta'): x on the unit simplex, beta' free.
  static DecisionSet simplex_with_free(int n_assets);
};

// Newsvendor loss with unit holding cost h and backorder cost b over
// xi = (z, y) with dz = dy = 1: pieces h(x - y) and b(y - x).
PiecewiseBiAffineLoss newsvendor_loss(double h, double b);

// CVaR portfolio loss over xi = (z, y), decision (x, beta'):
//   max( (1 - 1/delta) beta' - (1/delta + lambda) <x, y>,
//        beta' - lambda <x, y> )
// equals beta' + (1/delta)(-<x,y> - beta')^+ - lambda <x,y> pointwise.
PiecewiseBiAffineLoss portfolio_cvar_loss(double delta, double lambda,
                                          int n_assets, int dz = 3);

// {"type":"newsvendor","h":..,"b":..} | {"type":"portfolio","delta":..,
// "lambda":..,"assets":..,"dz":..} | {"type":"custom","n":..,"d":..,
// "pieces":[{"A":[[..]],"b":[..],"c":[..],"d":..},..]}
PiecewiseBiAffineLoss loss_from_json(const nlohmann::json& j);

}  // namespace drotrim
