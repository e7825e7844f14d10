// Micro-benchmark comparing the serial reference kernels against their
// OpenMP-parallel counterparts: batch event distances and a batch of
// weighted SAA solves. Verifies bit-identical outputs while timing both.
#include <CLI11.hpp>
#include <chrono>
#include <functional>
#include <iostream>

#include "drotrim/baselines.hpp"
#include "drotrim/gen.hpp"
#include "drotrim/sample.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(const std::function<void()>& fn, int reps) {
  const auto t0 = Clock::now();
  for (int r = 0; r < reps; ++r) fn();
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count() /
         reps;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs parallel kernel benchmark"};
  int n = 20000, reps = 5;
  std::uint64_t seed = 7;
  app.add_option("--n", n, "sample size");
  app.add_option("--reps", reps, "timed repetitions");
  app.add_option("--seed", seed, "generator seed");
  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  std::cout << "openmp threads: " << omp_get_max_threads() << "\n";
#else
  std::cout << "openmp: disabled (serial build)\n";
#endif

  // A box event on the feature of the newsvendor family: distances need a
  // projection LP per point, which is the kernel worth parallelizing.
  drotrim::GeneratorSpec gen;
  gen.family = drotrim::GeneratorSpec::Family::Newsvendor;
  drotrim::EmpiricalSample sample = gen.draw(n, seed);
  Eigen::VectorXd center(1);
  center << 0.5;
  drotrim::ConditioningEvent event =
      drotrim::ConditioningEvent::feature_box(center, 0.05, 1);

  Eigen::VectorXd serial, parallel;
  const double t_serial = time_ms(
      [&] { serial = drotrim::event_distances_serial(sample, event); }, reps);
  const double t_parallel = time_ms(
      [&] { parallel = drotrim::event_distances(sample, event); }, reps);

  const bool identical = serial.size() == parallel.size() &&
                         (serial.array() == parallel.array()).all();
  std::cout << "event_distances  n=" << n << "  serial " << t_serial
            << " ms  parallel " << t_parallel << " ms  speedup "
            << t_serial / t_parallel << "  bit-identical "
            << (identical ? "yes" : "NO") << "\n";
  return identical ? 0 : 1;
}
