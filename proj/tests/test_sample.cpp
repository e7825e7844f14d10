#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "drotrim/lp.hpp"
#include "drotrim/sample.hpp"

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

// Brute-force oracle for the minimum transportation budget: minimize
// sum b_i dist_i^p over the trimming box-and-simplex, as one LP.
double budget_oracle(const Eigen::VectorXd& dist, double alpha, double p) {
  const int N = static_cast<int>(dist.size());
  lp::LinearProgram prog;
  const double cap = alpha > 0.0 ? 1.0 / (N * alpha) : lp::kInf;
  for (int i = 0; i < N; ++i)
    prog.add_var(std::pow(dist[i], p), 0.0, cap);
  int r = prog.add_row(lp::RowSense::EQ, 1.0);
  for (int i = 0; i < N; ++i) prog.set_entry(r, i, 1.0);
  lp::LpSolution sol = lp::solve(prog);
  REQUIRE(sol.status == lp::Status::Optimal);
  return std::pow(std::max(sol.objective, 0.0), 1.0 / p);
}

}  // namespace

TEST_CASE("distance to event basics") {
  // Event {z = 0} in dz = dy = 1.
  ConditioningEvent ev =
      ConditioningEvent::feature_singleton(Eigen::VectorXd::Zero(1), 1);
  Eigen::Vector2d inside(0.0, 7.0);
  CHECK(distance_to_event(inside, ev) == doctest::Approx(0.0).epsilon(1e-12));
  Eigen::Vector2d away(3.0, 7.0);
  CHECK(distance_to_event(away, ev) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("distance cross-checked against a boundary grid search") {
  // Event {z1 + z2 <= 1} in d = 3 (dz = 2, dy = 1), point (1, 1, y).
  Eigen::MatrixXd H(1, 3);
  H << 1.0, 1.0, 0.0;
  Eigen::VectorXd h(1);
  h << 1.0;
  ConditioningEvent ev(H, h, {}, true, 2);
  Eigen::Vector3d p(1.0, 1.0, 0.3);
  const double d = distance_to_event(p, ev);
  // The minimizer lies on the boundary z1 + z2 = 1 (the point violates the
  // constraint); scan it at resolution 1e-3.
  double best = 1e30;
  for (double z1 = -1.0; z1 <= 2.0; z1 += 1e-3)
    best = std::min(best, std::abs(1.0 - z1) + std::abs(1.0 - (1.0 - z1)));
  CHECK(d == doctest::Approx(best).epsilon(2e-3));
  CHECK(d == doctest::Approx(1.0).epsilon(1e-7));  // exact l1 value
}

TEST_CASE("projection argmin has zero distance") {
  Eigen::MatrixXd H(2, 2);
  H << 1.0, 0.5, -1.0, 0.25;
  Eigen::VectorXd h(2);
  h << -1.0, -2.0;
  ConditioningEvent ev(H, h, {}, false, 1);
  Rng rng{42};
  for (int t = 0; t < 20; ++t) {
    Eigen::Vector2d p(4.0 * rng.sym(), 4.0 * rng.sym());
    Projection pr = project_to_event(p, ev);
    CHECK(distance_to_event(pr.point, ev) <= 1e-8);
    CHECK(pr.distance == doctest::Approx((p - pr.point).lpNorm<1>())
                             .epsilon(1e-7));
  }
}

TEST_CASE("ordering by event distance with index tie-breaks") {
  ConditioningEvent ev =
      ConditioningEvent::feature_singleton(Eigen::VectorXd::Zero(1), 1);
  SUBCASE("natural order kept") {
    EmpiricalSample s = make_sample({{0, 1}, {1, 2}, {3, 3}}, 1, 1);
    EventOrdering ord = order_by_event_distance(s, ev);
    CHECK(ord.order == std::vector<int>{0, 1, 2});
  }
  SUBCASE("tie broken by original index") {
    EmpiricalSample s = make_sample({{2, 1}, {0, 2}, {2, 3}}, 1, 1);
    EventOrdering ord = order_by_event_distance(s, ev);
    CHECK(ord.order == std::vector<int>{1, 0, 2});
  }
  SUBCASE("random sample matches a full re-sort") {
    Rng rng{7};
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 20; ++i) rows.push_back({rng.sym(), rng.sym()});
    EmpiricalSample s = make_sample(rows, 1, 1);
    EventOrdering ord = order_by_event_distance(s, ev);
    Eigen::VectorXd dist = event_distances(s, ev);
    std::vector<double> sorted(dist.data(), dist.data() + dist.size());
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 20; ++i)
      CHECK(ord.sorted_distances[i] == doctest::Approx(sorted[i]));
  }
}

TEST_CASE("parallel distances are bit-identical to the serial reference") {
  Rng rng{31};
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 64; ++i) rows.push_back({rng.sym(), rng.sym(), rng.sym()});
  EmpiricalSample s = make_sample(rows, 2, 1);
  Eigen::MatrixXd H(2, 3);
  H << 1.0, 1.0, 0.0, -1.0, 0.5, 0.0;
  Eigen::VectorXd h(2);
  h << 0.25, 0.1;
  ConditioningEvent ev(H, h, {}, true, 2);
  Eigen::VectorXd serial = event_distances_serial(s, ev);
  Eigen::VectorXd parallel = event_distances(s, ev);
  REQUIRE(serial.size() == parallel.size());
  CHECK((serial.array() == parallel.array()).all());
}

TEST_CASE("minimum transport budget closed form") {
  ConditioningEvent ev =
      ConditioningEvent::feature_singleton(Eigen::VectorXd::Zero(1), 1);
  EmpiricalSample s = make_sample({{0, 1}, {1, 2}, {3, 3}}, 1, 1);
  CHECK(minimum_transport_budget(s, ev, 2.0 / 3.0, 1.0) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(minimum_transport_budget(s, ev, 0.5, 1.0) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(minimum_transport_budget(s, ev, 0.0, 1.0) ==
        doctest::Approx(0.0).epsilon(1e-12));
  // All ceil(N alpha) nearest points inside the event => zero budget.
  EmpiricalSample s2 = make_sample({{0, 1}, {0, 2}, {3, 3}}, 1, 1);
  CHECK(minimum_transport_budget(s2, ev, 2.0 / 3.0, 1.0) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(minimum_transport_budget(s2, ev, 1.0, 1.0) > 0.0);
}

TEST_CASE("budget equals the brute-force trimming LP on random instances") {
  Rng rng{2024};
  for (int inst = 0; inst < 50; ++inst) {
    const int N = 2 + static_cast<int>(rng.uni() * 11);
    const int d = 1 + static_cast<int>(rng.uni() * 3);
    std::vector<std::vector<double>> rows(N, std::vector<double>(d));
    for (auto& row : rows)
      for (auto& v : row) v = 3.0 * rng.sym();
    EmpiricalSample s = make_sample(rows, d, 0);
    // Random halfspace pair through the origin region; retry if empty.
    Eigen::MatrixXd H(2, d);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < d; ++c) H(r, c) = rng.sym();
    Eigen::VectorXd h(2);
    h << rng.uni(), rng.uni();  // contains the origin: always nonempty
    ConditioningEvent ev(H, h, {}, false, d);
    const double alpha = 0.1 + 0.9 * rng.uni();
    const double p = rng.uni() < 0.5 ? 1.0 : 2.0;
    EventOrdering ord = order_by_event_distance(s, ev);
    const double closed = minimum_transport_budget(s, ev, alpha, p);
    const double oracle = budget_oracle(ord.sorted_distances, alpha, p);
    CHECK(closed == doctest::Approx(oracle).epsilon(1e-7));
  }
}

TEST_CASE("budget is non-increasing as alpha decreases") {
  ConditioningEvent ev =
      ConditioningEvent::feature_singleton(Eigen::VectorXd::Zero(1), 1);
  EmpiricalSample s =
      make_sample({{0.5, 1}, {1, 2}, {2, 3}, {4, 0}, {0.1, 9}}, 1, 1);
  double prev = -1.0;
  for (double alpha : {0.2, 0.4, 0.6, 0.8, 1.0}) {
    const double b = minimum_transport_budget(s, ev, alpha, 1.0);
    CHECK(b >= prev - 1e-12);
    prev = b;
  }
}

TEST_CASE("trimming membership box-and-simplex rules") {
  auto w = [](std::initializer_list<double> vals, double alpha) {
    TrimmingWeights tw;
    tw.b = Eigen::Map<const Eigen::VectorXd>(std::data(vals),
                                             static_cast<int>(vals.size()));
    tw.alpha = alpha;
    return tw;
  };
  CHECK(trimming_membership(w({0.5, 0.5}, 1.0), 2));
  CHECK_FALSE(trimming_membership(w({0.6, 0.4}, 1.0), 2));
  CHECK(trimming_membership(w({0.5, 0.5, 0.0, 0.0}, 0.5), 4));
  CHECK_FALSE(trimming_membership(w({0.6, 0.4, 0.0, 0.0}, 0.5), 4));
  CHECK_FALSE(trimming_membership(w({0.5, 0.4}, 1.0), 2));  // sum != 1
}

TEST_CASE("ambiguity spec caches the feasibility minimum") {
  ConditioningEvent ev =
      ConditioningEvent::feature_singleton(Eigen::VectorXd::Zero(1), 1);
  EmpiricalSample s = make_sample({{0, 1}, {1, 2}, {3, 3}}, 1, 1);
  TrimmedAmbiguitySpec spec = make_ambiguity_spec(s, ev, 2.0 / 3.0, 0.7, 1.0);
  CHECK(spec.min_budget == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(spec.rho == 0.7);
}

TEST_CASE("event construction, JSON, and singleton detection") {
  nlohmann::json j = {{"type", "feature_singleton"},
                      {"z_star", {1.5, -2.0}},
                      {"dy", 1}};
  ConditioningEvent ev = ConditioningEvent::from_json(j, 2);
  REQUIRE(ev.singleton_z() != nullptr);
  CHECK((*ev.singleton_z())[0] == 1.5);
  CHECK((*ev.singleton_z())[1] == -2.0);
  CHECK(ev.feature_only());
  Eigen::Vector3d inside(1.5, -2.0, 77.0);
  CHECK(ev.contains(inside));

  nlohmann::json jb = {{"type", "feature_box"},
                       {"center", {0.0}},
                       {"radius", 0.5},
                       {"dy", 1}};
  ConditioningEvent box = ConditioningEvent::from_json(jb, 1);
  CHECK(box.singleton_z() == nullptr);
  CHECK(box.contains(Eigen::Vector2d(0.4, 9.0)));
  CHECK_FALSE(box.contains(Eigen::Vector2d(0.6, 9.0)));

  nlohmann::json jh = {{"H", {{1.0, 0.0}}}, {"h", {2.0}}};
  ConditioningEvent half = ConditioningEvent::from_json(jh, 1);
  CHECK(half.num_rows() == 1);

  // Empty polyhedron: x <= -1 and x >= 1 (as -x <= -1).
  Eigen::MatrixXd H(2, 1);
  H << 1.0, -1.0;
  Eigen::VectorXd h(2);
  h << -1.0, -1.0;
  CHECK_THROWS_AS(ConditioningEvent(H, h, {}, false, 0), InfeasibleEvent);
}

TEST_CASE("CSV round trip") {
  EmpiricalSample s = make_sample({{0.5, -1.25}, {1.0, 3.5}}, 1, 1);
  std::stringstream ss;
  s.to_csv(ss);
  EmpiricalSample back = EmpiricalSample::from_csv(ss);
  CHECK(back.dz == 1);
  CHECK(back.dy == 1);
  REQUIRE(back.size() == 2);
  CHECK((back.points - s.points).cwiseAbs().maxCoeff() <= 1e-12);
}
