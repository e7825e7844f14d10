#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "drotrim/lp.hpp"

using namespace drotrim::lp;

namespace {

// Deterministic xorshift for reproducible random LPs.
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

}  // namespace

TEST_CASE("one-variable lower-bounded minimum") {
  LinearProgram lp;
  int x = lp.add_var(1.0, -kInf, kInf);
  int r = lp.add_row(RowSense::GE, 3.0);
  lp.set_entry(r, x, 1.0);
  LpSolution sol = solve(lp);
  REQUIRE(sol.status == Status::Optimal);
  CHECK(sol.primal[0] == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(sol.objective == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(check_certificate(lp, sol));
}

TEST_CASE("transport LP between two 2-point measures matches vertex enumeration") {
  // Source atoms {0, 1}, target atoms {2, 3}, all masses 1/2; cost |a - b|.
  const double cost[2][2] = {{2.0, 3.0}, {1.0, 2.0}};
  LinearProgram lp;
  int pi[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) pi[i][j] = lp.add_var(cost[i][j]);
  for (int i = 0; i < 2; ++i) {
    int r = lp.add_row(RowSense::EQ, 0.5);
    for (int j = 0; j < 2; ++j) lp.set_entry(r, pi[i][j], 1.0);
  }
  for (int j = 0; j < 2; ++j) {
    int r = lp.add_row(RowSense::EQ, 0.5);
    for (int i = 0; i < 2; ++i) lp.set_entry(r, pi[i][j], 1.0);
  }
  LpSolution sol = solve(lp);
  REQUIRE(sol.status == Status::Optimal);
  // The transport polytope here has exactly two vertices: the diagonal and
  // the anti-diagonal plan.
  const double v1 = 0.5 * cost[0][0] + 0.5 * cost[1][1];
  const double v2 = 0.5 * cost[0][1] + 0.5 * cost[1][0];
  CHECK(sol.objective == doctest::Approx(std::min(v1, v2)).epsilon(1e-9));
  CHECK(check_certificate(lp, sol));
}

TEST_CASE("infeasible system yields a Farkas certificate") {
  LinearProgram lp;
  int x = lp.add_var(0.0, -kInf, kInf);
  int r1 = lp.add_row(RowSense::LE, 0.0);
  lp.set_entry(r1, x, 1.0);
  int r2 = lp.add_row(RowSense::GE, 1.0);
  lp.set_entry(r2, x, 1.0);
  LpSolution sol = solve(lp);
  REQUIRE(sol.status == Status::Infeasible);
  REQUIRE(sol.dual.size() == 2);
  // Sign conditions: y <= 0 on <=, y >= 0 on >=; y'rhs > 0 and A'y = 0 on
  // the free variable certify infeasibility.
  CHECK(sol.dual[0] <= 1e-9);
  CHECK(sol.dual[1] >= -1e-9);
  CHECK(sol.dual[0] * 0.0 + sol.dual[1] * 1.0 > 1e-9);
  CHECK(std::abs(sol.dual[0] + sol.dual[1]) <= 1e-7);
}

TEST_CASE("unbounded minimization is detected") {
  LinearProgram lp;
  lp.add_var(-1.0);  // min -x, x >= 0 free to grow
  LpSolution sol = solve(lp);
  CHECK(sol.status == Status::Unbounded);
}

TEST_CASE("max-sense and equality rows") {
  // max 3x + 2y s.t. x + y = 4, x - y <= 2, 0 <= x,y.
  LinearProgram lp;
  lp.sense = Sense::Max;
  int x = lp.add_var(3.0), y = lp.add_var(2.0);
  int r1 = lp.add_row(RowSense::EQ, 4.0);
  lp.set_entry(r1, x, 1.0);
  lp.set_entry(r1, y, 1.0);
  int r2 = lp.add_row(RowSense::LE, 2.0);
  lp.set_entry(r2, x, 1.0);
  lp.set_entry(r2, y, -1.0);
  LpSolution sol = solve(lp);
  REQUIRE(sol.status == Status::Optimal);
  CHECK(sol.primal[0] == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(sol.primal[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sol.objective == doctest::Approx(11.0).epsilon(1e-9));
  CHECK(check_certificate(lp, sol));
}

TEST_CASE("upper bounds and negative lower bounds") {
  // min -x - 2y, -1 <= x <= 2, 0 <= y <= 1.5, x + y <= 3.
  LinearProgram lp;
  int x = lp.add_var(-1.0, -1.0, 2.0);
  int y = lp.add_var(-2.0, 0.0, 1.5);
  int r = lp.add_row(RowSense::LE, 3.0);
  lp.set_entry(r, x, 1.0);
  lp.set_entry(r, y, 1.0);
  LpSolution sol = solve(lp);
  REQUIRE(sol.status == Status::Optimal);
  CHECK(sol.primal[0] == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(sol.primal[1] == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(check_certificate(lp, sol));
}

TEST_CASE("degenerate LP with multiple optima still certifies") {
  // min 0*x + 0*y over a triangle: any vertex is optimal.
  LinearProgram lp;
  int x = lp.add_var(0.0), y = lp.add_var(0.0);
  int r1 = lp.add_row(RowSense::LE, 1.0);
  lp.set_entry(r1, x, 1.0);
  lp.set_entry(r1, y, 1.0);
  LpSolution sol = solve(lp);
  REQUIRE(sol.status == Status::Optimal);
  CHECK(check_certificate(lp, sol));
}

TEST_CASE("perturbed primal fails certification") {
  LinearProgram lp;
  int x = lp.add_var(1.0);
  int r = lp.add_row(RowSense::GE, 3.0);
  lp.set_entry(r, x, 1.0);
  LpSolution sol = solve(lp);
  REQUIRE(sol.status == Status::Optimal);
  sol.primal[0] += 1e-3;
  CHECK_FALSE(check_certificate(lp, sol));
}

TEST_CASE("determinism: byte-identical solutions on repeat solves") {
  Rng rng{12345};
  for (int inst = 0; inst < 5; ++inst) {
    LinearProgram lp;
    for (int j = 0; j < 6; ++j) lp.add_var(rng.sym(), -1.0, 1.0);
    for (int i = 0; i < 4; ++i) {
      int r = lp.add_row(i % 2 ? RowSense::LE : RowSense::GE,
                         i % 2 ? 2.0 : -2.0);
      for (int j = 0; j < 6; ++j) lp.set_entry(r, j, rng.sym());
    }
    LpSolution a = solve(lp);
    LpSolution b = solve(lp);
    REQUIRE(a.status == b.status);
    REQUIRE(a.primal.size() == b.primal.size());
    CHECK(std::memcmp(a.primal.data(), b.primal.data(),
                      a.primal.size() * sizeof(double)) == 0);
    CHECK(a.objective == b.objective);
  }
}

TEST_CASE("random bounded LPs solve and certify") {
  Rng rng{99};
  int optimal = 0;
  for (int inst = 0; inst < 40; ++inst) {
    LinearProgram lp;
    const int n = 3 + static_cast<int>(rng.uni() * 4);
    const int m = 2 + static_cast<int>(rng.uni() * 4);
    for (int j = 0; j < n; ++j) lp.add_var(rng.sym(), -2.0, 2.0);
    for (int i = 0; i < m; ++i) {
      const double roll = rng.uni();
      RowSense s = roll < 0.4 ? RowSense::LE
                              : (roll < 0.8 ? RowSense::GE : RowSense::EQ);
      int r = lp.add_row(s, rng.sym());
      for (int j = 0; j < n; ++j)
        if (rng.uni() < 0.7) lp.set_entry(r, j, rng.sym());
    }
    LpSolution sol = solve(lp);
    if (sol.status == Status::Optimal) {
      ++optimal;
      CHECK(check_certificate(lp, sol));
    }
  }
  CHECK(optimal >= 10);  // box bounds rule out unbounded; most are feasible
}

TEST_CASE("MPS export contains the expected sections") {
  LinearProgram lp;
  lp.sense = Sense::Max;
  int x = lp.add_var(1.0, -1.0, kInf);
  int r = lp.add_row(RowSense::LE, 5.0);
  lp.set_entry(r, x, 2.0);
  std::ostringstream os;
  write_mps(lp, os, "demo");
  const std::string text = os.str();
  for (const char* section :
       {"NAME", "OBJSENSE", "ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA"})
    CHECK(text.find(section) != std::string::npos);
}
