#include "drotrim/sample.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>

#include "drotrim/lp.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace drotrim {

namespace {

// Distances this small are indistinguishable from zero at LP tolerance;
// snapping keeps "inside the event" a crisp predicate downstream.
constexpr double kDistanceSnap = 1e-9;

// Feasibility / distance LPs over the event polyhedron share this builder:
// variables xi (free), optional t >= 0 with |point - xi| <= t rows.
void add_event_rows(lp::LinearProgram& prog, const ConditioningEvent& event,
                    int xi0) {
  const int d = event.dim();
  for (int r = 0; r < event.num_rows(); ++r) {
    int row = prog.add_row(event.is_eq(r) ? lp::RowSense::EQ : lp::RowSense::LE,
                           event.h()[r]);
    for (int j = 0; j < d; ++j) prog.set_entry(row, xi0 + j, event.H()(r, j));
  }
}

}  // namespace

EmpiricalSample::EmpiricalSample(Eigen::MatrixXd pts, int dz_, int dy_)
    : points(std::move(pts)), dz(dz_), dy(dy_) {
  if (points.rows() < 1) throw DimensionMismatch("sample must be nonempty");
  if (dz < 0 || dy < 0 || dz + dy != points.cols())
    throw DimensionMismatch("sample dimensions inconsistent with dz + dy");
  if (!points.allFinite())
    throw DimensionMismatch("sample contains non-finite coordinates");
}

EmpiricalSample EmpiricalSample::from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw DimensionMismatch("empty CSV: missing header");
  int dz = 0, dy = 0;
  {
    std::stringstream header(line);
    std::string tok;
    while (std::getline(header, tok, ',')) {
      if (!tok.empty() && tok.front() == 'z')
        ++dz;
      else if (!tok.empty() && tok.front() == 'y')
        ++dy;
      else
        throw DimensionMismatch("CSV header columns must be z*/y*");
    }
  }
  std::vector<double> values;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    int cols = 0;
    while (std::getline(ss, tok, ',')) {
      values.push_back(std::stod(tok));
      ++cols;
    }
    if (cols != dz + dy) throw DimensionMismatch("CSV row width mismatch");
    ++rows;
  }
  Eigen::MatrixXd pts(rows, dz + dy);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < dz + dy; ++j) pts(i, j) = values[i * (dz + dy) + j];
  return EmpiricalSample(std::move(pts), dz, dy);
}

void EmpiricalSample::to_csv(std::ostream& out) const {
  for (int j = 0; j < dz; ++j) out << (j ? "," : "") << "z" << (j + 1);
  for (int j = 0; j < dy; ++j) out << (dz + j ? "," : "") << "y" << (j + 1);
  out << "\n" << std::setprecision(17);
  for (int i = 0; i < size(); ++i) {
    for (int j = 0; j < dim(); ++j) out << (j ? "," : "") << points(i, j);
    out << "\n";
  }
}

ConditioningEvent::ConditioningEvent(Eigen::MatrixXd H, Eigen::VectorXd h,
                                     std::vector<int> eq_rows,
                                     bool feature_only, int dz)
    : H_(std::move(H)),
      h_(std::move(h)),
      eq_rows_(std::move(eq_rows)),
      feature_only_(feature_only) {
  if (H_.rows() != h_.size())
    throw DimensionMismatch("event H and h row counts differ");
  eq_mask_.assign(num_rows(), 0);
  for (int r : eq_rows_) {
    if (r < 0 || r >= num_rows())
      throw DimensionMismatch("equality row index out of range");
    eq_mask_[r] = 1;
  }
  if (feature_only_ && dz >= 0) {
    for (int r = 0; r < num_rows(); ++r)
      for (int j = dz; j < dim(); ++j)
        if (H_(r, j) != 0.0)
          throw DimensionMismatch(
              "feature_only event constrains uncertainty coordinates");
  }
  if (num_rows() == 0) return;

  // Nonemptiness check, plus per-coordinate ranges of the feature block to
  // detect singleton-z events (used for fast projections and the singleton
  // requirement of some estimators).
  lp::LinearProgram feas;
  for (int j = 0; j < dim(); ++j) feas.add_var(0.0, -lp::kInf, lp::kInf);
  add_event_rows(feas, *this, 0);
  if (lp::solve(feas).status != lp::Status::Optimal)
    throw InfeasibleEvent("conditioning event polyhedron is empty");

  if (feature_only_ && dz > 0) {
    Eigen::VectorXd zstar(dz);
    bool singleton = true;
    for (int j = 0; j < dz && singleton; ++j) {
      double extreme[2];
      for (int dir = 0; dir < 2; ++dir) {
        lp::LinearProgram range = feas;
        range.cost[j] = dir == 0 ? 1.0 : -1.0;
        range.sense = lp::Sense::Min;
        auto sol = lp::solve(range);
        if (sol.status != lp::Status::Optimal) {
          singleton = false;
          break;
        }
        extreme[dir] = sol.primal[j] ;
      }
      if (!singleton || std::abs(extreme[0] - extreme[1]) > 1e-9) {
        singleton = false;
        break;
      }
      zstar[j] = extreme[0];
    }
    if (singleton) {
      has_singleton_z_ = true;
      singleton_z_ = zstar;
    }
  }
}

ConditioningEvent ConditioningEvent::whole_space(int dim) {
  return ConditioningEvent(Eigen::MatrixXd(0, dim), Eigen::VectorXd(0), {},
                           true, 0);
}

ConditioningEvent ConditioningEvent::feature_singleton(
    const Eigen::VectorXd& z_star, int dy) {
  const int dz = static_cast<int>(z_star.size());
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dz, dz + dy);
  std::vector<int> eq(dz);
  for (int j = 0; j < dz; ++j) {
    H(j, j) = 1.0;
    eq[j] = j;
  }
  return ConditioningEvent(H, z_star, eq, true, dz);
}

ConditioningEvent ConditioningEvent::feature_box(const Eigen::VectorXd& center,
                                                 double radius, int dy) {
  const int dz = static_cast<int>(center.size());
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2 * dz, dz + dy);
  Eigen::VectorXd h(2 * dz);
  for (int j = 0; j < dz; ++j) {
    H(2 * j, j) = 1.0;
    h[2 * j] = center[j] + radius;
    H(2 * j + 1, j) = -1.0;
    h[2 * j + 1] = radius - center[j];
  }
  return ConditioningEvent(H, h, {}, true, dz);
}

ConditioningEvent ConditioningEvent::from_json(const nlohmann::json& j,
                                               int dz) {
  if (j.contains("type")) {
    const std::string type = j.at("type");
    if (type == "whole_space")
      return whole_space(j.at("dim").get<int>());
    if (type == "feature_singleton") {
      auto z = j.at("z_star").get<std::vector<double>>();
      return feature_singleton(
          Eigen::Map<Eigen::VectorXd>(z.data(), z.size()),
          j.at("dy").get<int>());
    }
    if (type == "feature_box") {
      auto c = j.at("center").get<std::vector<double>>();
      return feature_box(Eigen::Map<Eigen::VectorXd>(c.data(), c.size()),
                         j.at("radius").get<double>(), j.at("dy").get<int>());
    }
    throw DimensionMismatch("unknown event type: " + type);
  }
  auto rows = j.at("H").get<std::vector<std::vector<double>>>();
  auto rhs = j.at("h").get<std::vector<double>>();
  const int m = static_cast<int>(rows.size());
  const int d = m > 0 ? static_cast<int>(rows[0].size()) : 0;
  Eigen::MatrixXd H(m, d);
  for (int r = 0; r < m; ++r) {
    if (static_cast<int>(rows[r].size()) != d)
      throw DimensionMismatch("ragged event matrix");
    for (int c = 0; c < d; ++c) H(r, c) = rows[r][c];
  }
  std::vector<int> eq;
  if (j.contains("eq_rows")) eq = j.at("eq_rows").get<std::vector<int>>();
  bool feature_only = j.value("feature_only", false);
  return ConditioningEvent(H, Eigen::Map<Eigen::VectorXd>(rhs.data(),
                                                          rhs.size()),
                           eq, feature_only, dz);
}

bool ConditioningEvent::is_eq(int row) const { return eq_mask_[row] != 0; }

bool ConditioningEvent::contains(const Eigen::VectorXd& xi, double tol) const {
  if (xi.size() != dim()) throw DimensionMismatch("point dimension mismatch");
  for (int r = 0; r < num_rows(); ++r) {
    const double slack = h_[r] - H_.row(r).dot(xi);
    if (is_eq(r) ? std::abs(slack) > tol : slack < -tol) return false;
  }
  return true;
}

Projection project_to_event(const Eigen::VectorXd& point,
                            const ConditioningEvent& event) {
  const int d = event.dim();
  if (point.size() != d) throw DimensionMismatch("point dimension mismatch");
  if (event.num_rows() == 0 || event.contains(point))
    return {0.0, point};

  // Singleton-z events have the unique closest point (z*, y): only the
  // feature block needs to move.
  if (const Eigen::VectorXd* zstar = event.singleton_z()) {
    const int dz = static_cast<int>(zstar->size());
    Eigen::VectorXd proj = point;
    proj.head(dz) = *zstar;
    double dist = (point.head(dz) - *zstar).lpNorm<1>();
    if (dist < kDistanceSnap) dist = 0.0;
    return {dist, proj};
  }

  // General case: min sum t over { |point - xi| <= t, xi in event }.
  lp::LinearProgram prog;
  for (int j = 0; j < d; ++j) prog.add_var(0.0, -lp::kInf, lp::kInf);  // xi
  for (int j = 0; j < d; ++j) prog.add_var(1.0, 0.0, lp::kInf);        // t
  for (int j = 0; j < d; ++j) {
    int up = prog.add_row(lp::RowSense::LE, point[j]);
    prog.set_entry(up, j, 1.0);
    prog.set_entry(up, d + j, -1.0);
    int dn = prog.add_row(lp::RowSense::LE, -point[j]);
    prog.set_entry(dn, j, -1.0);
    prog.set_entry(dn, d + j, -1.0);
  }
  add_event_rows(prog, event, 0);
  auto sol = lp::solve(prog);
  if (sol.status != lp::Status::Optimal)
    throw InfeasibleEvent("distance LP not optimal: empty event?");
  Projection out;
  out.distance = sol.objective < kDistanceSnap ? 0.0 : sol.objective;
  out.point = Eigen::Map<const Eigen::VectorXd>(sol.primal.data(), d);
  return out;
}

double distance_to_event(const Eigen::VectorXd& point,
                         const ConditioningEvent& event) {
  return project_to_event(point, event).distance;
}

Eigen::VectorXd event_distances_serial(const EmpiricalSample& sample,
                                       const ConditioningEvent& event) {
  Eigen::VectorXd d(sample.size());
  for (int i = 0; i < sample.size(); ++i)
    d[i] = distance_to_event(sample.point(i), event);
  return d;
}

Eigen::VectorXd event_distances(const EmpiricalSample& sample,
                                const ConditioningEvent& event) {
  Eigen::VectorXd d(sample.size());
  const int n = sample.size();
#pragma omp parallel for schedule(dynamic, 16)
  for (int i = 0; i < n; ++i)
    d[i] = distance_to_event(sample.point(i), event);
  return d;
}

EventOrdering order_by_event_distance(const EmpiricalSample& sample,
                                      const ConditioningEvent& event) {
  Eigen::VectorXd dist = event_distances(sample, event);
  EventOrdering out;
  out.order.resize(sample.size());
  std::iota(out.order.begin(), out.order.end(), 0);
  std::sort(out.order.begin(), out.order.end(), [&](int a, int b) {
    if (dist[a] != dist[b]) return dist[a] < dist[b];
    return a < b;  // deterministic tie-break on the original index
  });
  out.sorted_distances.resize(sample.size());
  for (int i = 0; i < sample.size(); ++i)
    out.sorted_distances[i] = dist[out.order[i]];
  return out;
}

double minimum_transport_budget(const Eigen::VectorXd& sorted_distances,
                                double alpha, double p) {
  const int N = static_cast<int>(sorted_distances.size());
  if (N < 1) throw DimensionMismatch("empty distance vector");
  if (alpha < 0.0 || alpha > 1.0)
    throw DimensionMismatch("alpha outside [0,1]");
  if (p < 1.0) throw DimensionMismatch("transport order p must be >= 1");
  if (alpha == 0.0) return sorted_distances[0];

  const double na = N * alpha;
  int fl = static_cast<int>(std::floor(na + 1e-9));
  fl = std::min(fl, N);
  double acc = 0.0;
  for (int k = 0; k < fl; ++k) acc += std::pow(sorted_distances[k], p);
  acc /= na;
  if (na - fl > 1e-9 && fl < N)
    acc += (1.0 - fl / na) * std::pow(sorted_distances[fl], p);
  double value = std::pow(acc, 1.0 / p);
  if (value < 1e-12 * (1.0 + sorted_distances[N - 1])) value = 0.0;
  return value;
}

double minimum_transport_budget(const EmpiricalSample& sample,
                                const ConditioningEvent& event, double alpha,
                                double p) {
  EventOrdering ord = order_by_event_distance(sample, event);
  return minimum_transport_budget(ord.sorted_distances, alpha, p);
}

bool trimming_membership(const TrimmingWeights& weights, int sample_size) {
  if (weights.b.size() != sample_size) return false;
  double sum = 0.0;
  const double cap = weights.alpha > 0.0
                         ? 1.0 / (sample_size * weights.alpha)
                         : lp::kInf;
  for (int i = 0; i < sample_size; ++i) {
    const double bi = weights.b[i];
    if (bi < -1e-12 || bi > cap + 1e-12) return false;
    sum += bi;
  }
  return std::abs(sum - 1.0) <= 1e-9;
}

TrimmedAmbiguitySpec make_ambiguity_spec(const EmpiricalSample& sample,
                                         const ConditioningEvent& event,
                                         double alpha, double rho, double p) {
  TrimmedAmbiguitySpec spec;
  spec.alpha = alpha;
  spec.rho = rho;
  const double eps = minimum_transport_budget(sample, event, alpha, p);
  spec.min_budget = std::pow(eps, p);
  return spec;
}

}  // namespace drotrim
