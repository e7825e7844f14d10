// Joint samples (features z, uncertainty y), polyhedral conditioning events,
// l1 distances/projections onto events, nearest-to-event ordering, and the
// trimming-set primitives (membership, minimum transportation budget).
#pragma once

#include <Eigen/Dense>
#include <istream>
#include <nlohmann/json_fwd.hpp>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace drotrim {

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InfeasibleEvent : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// N joint observations (z_i, y_i), one per row, d = dz + dy columns.
struct EmpiricalSample {
  Eigen::MatrixXd points;  // N x d; row i is the concatenation (z_i, y_i)
  int dz = 0;
  int dy = 0;

  EmpiricalSample() = default;
  EmpiricalSample(Eigen::MatrixXd pts, int dz_, int dy_);

  int size() const { return static_cast<int>(points.rows()); }
  int dim() const { return dz + dy; }
  Eigen::VectorXd point(int i) const { return points.row(i); }
  Eigen::VectorXd y_part(int i) const {
    return points.row(i).segment(dz, dy);
  }

  // CSV with header "z1,..,z{dz},y1,..,y{dy}", one observation per line.
  static EmpiricalSample from_csv(std::istream& in);
  void to_csv(std::ostream& out) const;
};

// Polyhedral event {xi : H xi <= h}, with a subset of rows read as
// equalities. `feature_only` asserts the rows touch only the first dz
// coordinates (checked at construction when dz is known).
class ConditioningEvent {
 public:
  // Validates nonemptiness with an LP feasibility check. dz < 0 skips the
  // feature_only column check (dimension split unknown).
  ConditioningEvent(Eigen::MatrixXd H, Eigen::VectorXd h,
                    std::vector<int> eq_rows, bool feature_only, int dz = -1);

  // The whole space (no constraints): every point has distance zero.
  static ConditioningEvent whole_space(int dim);
  // Singleton feature event {z = z_star}, y free.
  static ConditioningEvent feature_singleton(const Eigen::VectorXd& z_star,
                                             int dy);
  // Box feature event {||z - center||_inf <= radius}, y free.
  static ConditioningEvent feature_box(const Eigen::VectorXd& center,
                                       double radius, int dy);
  static ConditioningEvent from_json(const nlohmann::json& j, int dz = -1);

  const Eigen::MatrixXd& H() const { return H_; }
  const Eigen::VectorXd& h() const { return h_; }
  const std::vector<int>& eq_rows() const { return eq_rows_; }
  bool feature_only() const { return feature_only_; }
  bool is_eq(int row) const;
  int dim() const { return static_cast<int>(H_.cols()); }
  int num_rows() const { return static_cast<int>(H_.rows()); }

  bool contains(const Eigen::VectorXd& xi, double tol = 1e-9) const;

  // If the event fixes the feature block to a single z*, returns it.
  // Populated at construction for feature_only events with dz >= 0.
  const Eigen::VectorXd* singleton_z() const {
    return has_singleton_z_ ? &singleton_z_ : nullptr;
  }

 private:
  Eigen::MatrixXd H_;
  Eigen::VectorXd h_;
  std::vector<int> eq_rows_;
  std::vector<char> eq_mask_;
  bool feature_only_ = false;
  bool has_singleton_z_ = false;
  Eigen::VectorXd singleton_z_;
};

struct Projection {
  double distance = 0.0;     // min_{xi in event} ||point - xi||_1
  Eigen::VectorXd point;     // the LP argmin (deterministic vertex)
};

// l1 projection onto the event, solved as an LP with absolute-value splits.
Projection project_to_event(const Eigen::VectorXd& point,
                            const ConditioningEvent& event);
double distance_to_event(const Eigen::VectorXd& point,
                         const ConditioningEvent& event);

// Batch distances for all sample points; the parallel version distributes
// rows over OpenMP threads and returns bit-identical values to the serial
// reference (each entry is computed independently).
Eigen::VectorXd event_distances_serial(const EmpiricalSample& sample,
                                       const ConditioningEvent& event);
Eigen::VectorXd event_distances(const EmpiricalSample& sample,
                                const ConditioningEvent& event);

struct EventOrdering {
  std::vector<int> order;             // sample indices, nearest first
  Eigen::VectorXd sorted_distances;   // distances in the same order
};

// Ascending by distance; ties broken by original index (lowest first).
EventOrdering order_by_event_distance(const EmpiricalSample& sample,
                                      const ConditioningEvent& event);

// Minimum transportation budget: the smallest p-Wasserstein distance from
// the (1-alpha)-trimming set of the empirical measure to any distribution on
// the event,
//   ( (1/(N a)) sum_{k<=floor(N a)} dist_k^p
//     + (1 - floor(N a)/(N a)) dist_{ceil(N a)}^p )^{1/p}
// over the ascending distances dist_k; alpha = 0 degenerates to the distance
// of the single nearest point.
double minimum_transport_budget(const Eigen::VectorXd& sorted_distances,
                                double alpha, double p);
double minimum_transport_budget(const EmpiricalSample& sample,
                                const ConditioningEvent& event, double alpha,
                                double p);

struct TrimmingWeights {
  Eigen::VectorXd b;
  double alpha = 1.0;
};

// Box-and-simplex characterization of (1-alpha)-trimmings of an N-point
// empirical measure: b >= 0, sum b = 1, and b_i <= 1/(N alpha) when
// alpha > 0.
bool trimming_membership(const TrimmingWeights& weights, int sample_size);

// (alpha, rho) pair defining the ambiguity set, with the cached feasibility
// threshold: rho is in p-th-power distance units and must be >= min_budget.
struct TrimmedAmbiguitySpec {
  double alpha = 1.0;
  double rho = 0.0;
  double min_budget = 0.0;  // epsilon-underbar^p for this (sample, event)
};

TrimmedAmbiguitySpec make_ambiguity_spec(const EmpiricalSample& sample,
                                         const ConditioningEvent& event,
                                         double alpha, double rho,
                                         double p = 1.0);

}  // namespace drotrim
