#include "drotrim/loss.hpp"

#include <nlohmann/json.hpp>

namespace drotrim {

double PiecewiseBiAffineLoss::piece_value(int k, const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& xi) const {
  const LossPiece& p = pieces.at(k);
  return xi.dot(p.A * x) + p.b.dot(xi) + p.c.dot(x) + p.d;
}

double PiecewiseBiAffineLoss::evaluate(const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& xi) const {
  if (x.size() != n || xi.size() != d)
    throw DimensionMismatch("loss evaluate: argument dimensions");
  double best = piece_value(0, x, xi);
  for (int k = 1; k < num_pieces(); ++k)
    best = std::max(best, piece_value(k, x, xi));
  return best;
}

Eigen::VectorXd PiecewiseBiAffineLoss::xi_gradient_of_piece(
    int k, const Eigen::VectorXd& x) const {
  const LossPiece& p = pieces.at(k);
  return p.A * x + p.b;
}

void PiecewiseBiAffineLoss::validate() const {
  if (pieces.empty()) throw DimensionMismatch("loss needs at least one piece");
  for (const auto& p : pieces) {
    if (p.A.rows() != d || p.A.cols() != n || p.b.size() != d ||
        p.c.size() != n)
      throw DimensionMismatch("loss piece dimensions inconsistent");
    if (!p.A.allFinite() || !p.b.allFinite() || !p.c.allFinite() ||
        !std::isfinite(p.d))
      throw DimensionMismatch("loss piece has non-finite coefficients");
  }
}

bool DecisionSet::is_eq(int row) const {
  for (int r : eq_rows)
    if (r == row) return true;
  return false;
}

DecisionSet DecisionSet::box(int n, double lo, double hi) {
  DecisionSet ds;
  ds.n = n;
  ds.G = Eigen::MatrixXd::Zero(2 * n, n);
  ds.g.resize(2 * n);
  for (int j = 0; j < n; ++j) {
    ds.G(2 * j, j) = 1.0;
    ds.g[2 * j] = hi;
    ds.G(2 * j + 1, j) = -1.0;
    ds.g[2 * j + 1] = -lo;
  }
  return ds;
}

DecisionSet DecisionSet::simplex_with_free(int n_assets) {
  DecisionSet ds;
  ds.n = n_assets + 1;  // (x, beta')
  ds.G = Eigen::MatrixXd::Zero(n_assets + 1, ds.n);
  ds.g.resize(n_assets + 1);
  for (int j = 0; j < n_assets; ++j) {
    ds.G(j, j) = -1.0;  // x_j >= 0
    ds.g[j] = 0.0;
  }
  for (int j = 0; j < n_assets; ++j) ds.G(n_assets, j) = 1.0;
  ds.g[n_assets] = 1.0;
  ds.eq_rows = {n_assets};  // sum x = 1
  return ds;
}

PiecewiseBiAffineLoss newsvendor_loss(double h, double b) {
  if (h <= 0.0 || b <= 0.0)
    throw NonpositiveCost("newsvendor costs must be positive");
  PiecewiseBiAffineLoss loss;
  loss.n = 1;
  loss.d = 2;  // (z, y)
  LossPiece hold;  // h (x - y)
  hold.A = Eigen::MatrixXd::Zero(2, 1);
  hold.b = Eigen::Vector2d(0.0, -h);
  hold.c = Eigen::VectorXd::Constant(1, h);
  LossPiece back;  // b (y - x)
  back.A = Eigen::MatrixXd::Zero(2, 1);
  back.b = Eigen::Vector2d(0.0, b);
  back.c = Eigen::VectorXd::Constant(1, -b);
  loss.pieces = {hold, back};
  loss.validate();
  return loss;
}

PiecewiseBiAffineLoss portfolio_cvar_loss(double delta, double lambda,
                                          int n_assets, int dz) {
  if (delta <= 0.0 || delta >= 1.0)
    throw InvalidDelta("delta must lie in (0,1)");
  PiecewiseBiAffineLoss loss;
  loss.n = n_assets + 1;  // (x, beta')
  loss.d = dz + n_assets;
  // <x, y> couples the y-block of xi with the x-block of the decision.
  auto coupling = [&](double coef) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(loss.d, loss.n);
    for (int j = 0; j < n_assets; ++j) A(dz + j, j) = coef;
    return A;
  };
  LossPiece tail;  // (1 - 1/delta) beta' - (1/delta + lambda) <x, y>
  tail.A = coupling(-(1.0 / delta + lambda));
  tail.b = Eigen::VectorXd::Zero(loss.d);
  tail.c = Eigen::VectorXd::Zero(loss.n);
  tail.c[n_assets] = 1.0 - 1.0 / delta;
  LossPiece base;  // beta' - lambda <x, y>
  base.A = coupling(-lambda);
  base.b = Eigen::VectorXd::Zero(loss.d);
  base.c = Eigen::VectorXd::Zero(loss.n);
  base.c[n_assets] = 1.0;
  loss.pieces = {tail, base};
  loss.validate();
  return loss;
}

PiecewiseBiAffineLoss loss_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type");
  if (type == "newsvendor")
    return newsvendor_loss(j.at("h").get<double>(), j.at("b").get<double>());
  if (type == "portfolio")
    return portfolio_cvar_loss(j.at("delta").get<double>(),
                               j.at("lambda").get<double>(),
                               j.at("assets").get<int>(), j.value("dz", 3));
  if (type == "custom") {
    PiecewiseBiAffineLoss loss;
    loss.n = j.at("n").get<int>();
    loss.d = j.at("d").get<int>();
    for (const auto& pj : j.at("pieces")) {
      LossPiece p;
      auto rows = pj.at("A").get<std::vector<std::vector<double>>>();
      p.A.resize(loss.d, loss.n);
      for (int r = 0; r < loss.d; ++r)
        for (int c = 0; c < loss.n; ++c) p.A(r, c) = rows.at(r).at(c);
      auto bv = pj.at("b").get<std::vector<double>>();
      auto cv = pj.at("c").get<std::vector<double>>();
      p.b = Eigen::Map<Eigen::VectorXd>(bv.data(), bv.size());
      p.c = Eigen::Map<Eigen::VectorXd>(cv.data(), cv.size());
      p.d = pj.value("d", 0.0);
      loss.pieces.push_back(std::move(p));
    }
    loss.validate();
    return loss;
  }
  throw DimensionMismatch("unknown loss type: " + type);
}

}  // namespace drotrim
