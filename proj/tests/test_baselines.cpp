#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "drotrim/baselines.hpp"
#include "drotrim/gen.hpp"

using namespace drotrim;

namespace {

struct Rng {
  std::uint64_t s;
  double uni() {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return static_cast<double>(s >> 11) * 0x1.0p-53;
  }
  double sym() { return 2.0 * uni() - 1.0; }
};

EmpiricalSample make_sample(const std::vector<std::vector<double>>& rows,
                            int dz, int dy) {
  Eigen::MatrixXd pts(rows.size(), dz + dy);
  for (size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < dz + dy; ++j) pts(static_cast<int>(i), j) = rows[i][j];
  return EmpiricalSample(std::move(pts), dz, dy);
}

ConditioningEvent z_zero_event() {
  return ConditioningEvent::feature_singleton(Eigen::VectorXd::Zero(1), 1);
}

}  // namespace

TEST_CASE("K-rules") {
  CHECK(k_rule_log(100) == 21);  // floor(100 / log(101))
  CHECK(k_rule_sqrt(100) == 10);
  CHECK(k_rule_pow09(100) == static_cast<int>(std::pow(100.0, 0.9)));
  CHECK(k_rule_log(1) == 1);  // clamped into [1, N]
  CHECK(k_rule_sqrt(2) == 1);
}

TEST_CASE("knn weights: identity, Dirac, projection") {
  ConditioningEvent ev = z_zero_event();
  SUBCASE("K=N with all points inside keeps the empirical measure") {
    EmpiricalSample s = make_sample({{0, 1}, {0, 2}, {0, 3}}, 1, 1);
    WeightedConditionalSample w = knn_weights(s, ev, 3);
    REQUIRE(w.size() == 3);
    for (int i = 0; i < 3; ++i) {
      CHECK(w.weights[i] == doctest::Approx(1.0 / 3.0));
      CHECK((w.points.row(i) - s.points.row(i)).cwiseAbs().maxCoeff() <=
            1e-12);
    }
  }
  SUBCASE("K=1 is a Dirac at the nearest projection") {
    EmpiricalSample s = make_sample({{2, 7}, {0.5, 4}}, 1, 1);
    WeightedConditionalSample w = knn_weights(s, ev, 1);
    REQUIRE(w.size() == 1);
    CHECK(w.weights[0] == doctest::Approx(1.0));
    CHECK(w.source[0] == 1);
    CHECK(w.points(0, 0) == doctest::Approx(0.0));  // z projected to z*
    CHECK(w.points(0, 1) == doctest::Approx(4.0));  // y untouched
  }
}

TEST_CASE("weighted SAA recovers the critical-quantile newsvendor order") {
  // Uniform weights on y in {1..11}; h=1, b=10 => any 10/11-quantile in
  // [10, 11] minimizes; brute-force the value over candidate orders.
  std::vector<std::vector<double>> rows;
  for (int y = 1; y <= 11; ++y) rows.push_back({0.0, double(y)});
  EmpiricalSample s = make_sample(rows, 1, 1);
  WeightedConditionalSample w = knn_weights(s, z_zero_event(), 11);
  PiecewiseBiAffineLoss loss = newsvendor_loss(1.0, 10.0);
  DecisionSet X = DecisionSet::box(1, 0.0, 20.0);
  BaselineResult res = saa_solve(w, loss, X);
  double best = 1e30;
  for (double cand = 0.0; cand <= 20.0; cand += 0.25) {
    double v = 0.0;
    Eigen::VectorXd x(1);
    x << cand;
    for (int i = 0; i < 11; ++i)
      v += w.weights[i] * loss.evaluate(x, w.points.row(i));
    best = std::min(best, v);
  }
  CHECK(res.value == doctest::Approx(best).epsilon(1e-9));
  CHECK(res.x[0] >= 10.0 - 1e-7);
  CHECK(res.x[0] <= 11.0 + 1e-7);
}

TEST_CASE("single atom reproduces the scenario optimum") {
  EmpiricalSample s = make_sample({{0.0, 3.5}}, 1, 1);
  WeightedConditionalSample w = knn_weights(s, z_zero_event(), 1);
  BaselineResult res =
      saa_solve(w, newsvendor_loss(1.0, 10.0), DecisionSet::box(1, 0.0, 9.0));
  CHECK(res.x[0] == doctest::Approx(3.5).epsilon(1e-9));
  CHECK(res.value == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("portfolio SAA with deterministic returns picks the best asset") {
  // dz=0, dy=3; identical return draws: all mass goes to the asset with the
  // best mean-adjusted value (lambda-weighted, CVaR inactive at no-loss).
  std::vector<std::vector<double>> rows(5, {0.1, 0.5, 0.2});
  EmpiricalSample s = make_sample(rows, 0, 3);
  ConditioningEvent ev = ConditioningEvent::whole_space(3);
  WeightedConditionalSample w = knn_weights(s, ev, 5);
  PiecewiseBiAffineLoss loss = portfolio_cvar_loss(0.5, 0.1, 3, 0);
  BaselineResult res = saa_solve(w, loss, DecisionSet::simplex_with_free(3));
  CHECK(res.x[1] == doctest::Approx(1.0).epsilon(1e-7));  // asset 2
}

TEST_CASE("knndro at rho=0 equals KNN-SAA exactly; value grows with rho") {
  Rng rng{101};
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 12; ++i) rows.push_back({rng.sym(), 3.0 * rng.sym()});
  EmpiricalSample s = make_sample(rows, 1, 1);
  ConditioningEvent ev = z_zero_event();
  PiecewiseBiAffineLoss loss = newsvendor_loss(1.0, 10.0);
  DecisionSet X = DecisionSet::box(1, -20.0, 20.0);
  const int K = 5;
  BaselineResult saa = saa_solve(knn_weights(s, ev, K), loss, X);
  BaselineResult dro0 = knndro_solve(s, ev, K, 0.0, loss, X);
  CHECK(dro0.x[0] == saa.x[0]);
  CHECK(dro0.value == saa.value);
  double prev = dro0.value;
  for (double rho : {0.1, 0.5, 1.0}) {
    BaselineResult r = knndro_solve(s, ev, K, rho, loss, X);
    CHECK(r.value >= prev - 1e-9);
    prev = r.value;
  }
}

TEST_CASE("knndro equals KNN on a whole-space support set") {
  // With the support equal to the whole space, the newsvendor worst case
  // shifts every scenario by the same amount, leaving the minimizer as-is.
  Rng rng{55};
  for (int inst = 0; inst < 10; ++inst) {
    std::vector<std::vector<double>> rows;
    const int N = 10;
    for (int i = 0; i < N; ++i) rows.push_back({rng.sym(), 3.0 * rng.sym()});
    EmpiricalSample s = make_sample(rows, 1, 1);
    ConditioningEvent ev = ConditioningEvent::whole_space(2);
    PiecewiseBiAffineLoss loss = newsvendor_loss(1.0, 10.0);
    DecisionSet X = DecisionSet::box(1, -20.0, 20.0);
    const int K = 4;
    BaselineResult knn = saa_solve(knn_weights(s, ev, K), loss, X);
    for (double rho : {0.1, 0.5, 1.0}) {
      BaselineResult dro = knndro_solve(s, ev, K, rho, loss, X);
      CHECK(dro.x[0] == doctest::Approx(knn.x[0]).epsilon(1e-6));
    }
  }
}

TEST_CASE("knnrobust: closed-form inner sup vs 1-D grid, and invariants") {
  Rng rng{202};
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 9; ++i) rows.push_back({rng.sym(), 2.0 * rng.sym()});
  EmpiricalSample s = make_sample(rows, 1, 1);
  ConditioningEvent ev = z_zero_event();
  PiecewiseBiAffineLoss loss = newsvendor_loss(1.0, 10.0);
  DecisionSet X = DecisionSet::box(1, -20.0, 20.0);
  const int K = 4;
  BaselineResult saa = saa_solve(knn_weights(s, ev, K), loss, X);
  BaselineResult rob0 = knnrobust_solve(s, ev, K, 0.0, loss, X);
  CHECK(rob0.x[0] == saa.x[0]);
  CHECK(rob0.value == saa.value);
  double prev = rob0.value;
  for (double eps : {0.05, 0.2, 0.8}) {
    BaselineResult r = knnrobust_solve(s, ev, K, eps, loss, X);
    CHECK(r.value >= prev - 1e-9);
    prev = r.value;
    // Re-evaluate the robustified objective at the returned x by scanning
    // the eps-interval around each neighbor.
    WeightedConditionalSample w = knn_weights(s, ev, K);
    double direct = 0.0;
    for (int i = 0; i < w.size(); ++i) {
      double worst = -1e30;
      for (int g = 0; g <= 1000; ++g) {
        Eigen::VectorXd xi = w.points.row(i);
        xi[1] += -eps + 2.0 * eps * g / 1000.0;
        worst = std::max(worst, loss.evaluate(r.x, xi));
      }
      direct += w.weights[i] * worst;
    }
    CHECK(r.value == doctest::Approx(direct).epsilon(1e-9));
  }
  // Non-singleton feature events are rejected.
  ConditioningEvent box =
      ConditioningEvent::feature_box(Eigen::VectorXd::Zero(1), 0.5, 1);
  CHECK_THROWS_AS(knnrobust_solve(s, box, K, 0.1, loss, X),
                  EventNotSingleton);
}

TEST_CASE("saadro: interior nominal, SAA at radius zero") {
  std::vector<std::vector<double>> rows = {
      {0.0, 1.0}, {0.0, 4.0}, {2.0, 9.0}, {0.0, 2.0}};
  EmpiricalSample s = make_sample(rows, 1, 1);
  ConditioningEvent ev = z_zero_event();
  PiecewiseBiAffineLoss loss = newsvendor_loss(1.0, 10.0);
  DecisionSet X = DecisionSet::box(1, -20.0, 20.0);
  WeightedConditionalSample interior = interior_weights(s, ev);
  REQUIRE(interior.size() == 3);
  BaselineResult saa = saa_solve(interior, loss, X);
  BaselineResult dro0 = saadro_solve(s, ev, 0.0, loss, X);
  CHECK(dro0.value == doctest::Approx(saa.value).epsilon(1e-9));
  // All points interior => same nominal as knndro with K = N.
  std::vector<std::vector<double>> all_in = {
      {0.0, 1.0}, {0.0, 4.0}, {0.0, 9.0}, {0.0, 2.0}};
  EmpiricalSample s2 = make_sample(all_in, 1, 1);
  for (double rho : {0.0, 0.3}) {
    BaselineResult a = saadro_solve(s2, ev, rho, loss, X);
    BaselineResult b = knndro_solve(s2, ev, 4, rho, loss, X);
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-9));
  }
  // No interior points at all.
  EmpiricalSample far = make_sample({{1.0, 0.0}, {2.0, 0.0}}, 1, 1);
  CHECK_THROWS_AS(saadro_solve(far, ev, 0.1, loss, X), NoInteriorPoints);
}

TEST_CASE("standardized portfolio box event captures ~14.6% of draws") {
  // Covariate box ||z_std||_inf <= 0.6 after per-column standardization;
  // the interior fraction approximates the event probability.
  EmpiricalSample raw = sample_portfolio(PortfolioCovariateSpec::defaults(),
                                         5000, 99);
  Eigen::VectorXd mean = raw.points.colwise().mean();
  Eigen::MatrixXd centered = raw.points.rowwise() - mean.transpose();
  Eigen::VectorXd sd =
      (centered.array().square().colwise().mean()).sqrt().matrix();
  Eigen::MatrixXd std_pts =
      centered.array().rowwise() / sd.transpose().array();
  EmpiricalSample s(std::move(std_pts), 3, 6);
  ConditioningEvent box =
      ConditioningEvent::feature_box(Eigen::VectorXd::Zero(3), 0.6, 6);
  WeightedConditionalSample interior = interior_weights(s, box);
  const double frac = static_cast<double>(interior.size()) / s.size();
  CHECK(frac == doctest::Approx(0.146).epsilon(0.15));  // +-0.02 absolute
  CHECK(std::abs(frac - 0.146) <= 0.02);
}
