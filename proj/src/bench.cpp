#include "drotrim/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <nlohmann/json.hpp>
#include <numeric>

#include "drotrim/dro.hpp"
#include "drotrim/theory.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace drotrim {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Per-run column standardization (training moments only); the same affine
// map is applied to the evaluation proxy so all methods see consistent
// units. Population std-dev with a floor against constant columns.
struct Standardizer {
  bool active = false;
  Eigen::VectorXd mean, scale;

  static Standardizer fit(const EmpiricalSample& s) {
    Standardizer st;
    st.active = true;
    st.mean = s.points.colwise().mean();
    Eigen::MatrixXd centered = s.points.rowwise() - st.mean.transpose();
    st.scale =
        (centered.array().square().colwise().mean()).sqrt().matrix();
    for (int j = 0; j < st.scale.size(); ++j)
      if (st.scale[j] < 1e-12) st.scale[j] = 1.0;
    return st;
  }

  EmpiricalSample apply(const EmpiricalSample& s) const {
    if (!active) return s;
    Eigen::MatrixXd pts =
        (s.points.rowwise() - mean.transpose()).array().rowwise() /
        scale.transpose().array();
    return EmpiricalSample(std::move(pts), s.dz, s.dy);
  }
};

// Builds the conditioning event from the config spec, mapped into
// standardized units when a standardizer is active. Box events are read as
// already being in standardized units; singleton feature values are given in
// raw units and transformed with the training moments.
ConditioningEvent build_event(const ExperimentConfig& cfg,
                              const EmpiricalSample& sample,
                              const Standardizer& st) {
  nlohmann::json j = nlohmann::json::parse(cfg.event_json_text);
  if (!st.active) return ConditioningEvent::from_json(j, sample.dz);
  const std::string type = j.value("type", "custom");
  if (type == "whole_space") return ConditioningEvent::from_json(j, sample.dz);
  if (type == "feature_singleton") {
    auto z = j.at("z_star").get<std::vector<double>>();
    for (size_t c = 0; c < z.size(); ++c)
      z[c] = (z[c] - st.mean[static_cast<int>(c)]) /
             st.scale[static_cast<int>(c)];
    j["z_star"] = z;
    return ConditioningEvent::from_json(j, sample.dz);
  }
  if (type == "feature_box") {
    // Center and radius are interpreted in standardized units directly.
    return ConditioningEvent::from_json(j, sample.dz);
  }
  throw DimensionMismatch("standardization supports only whole_space, "
                          "feature_singleton and feature_box events");
}

EmpiricalSample take_rows(const EmpiricalSample& s,
                          const std::vector<int>& rows) {
  Eigen::MatrixXd pts(static_cast<int>(rows.size()), s.dim());
  for (size_t r = 0; r < rows.size(); ++r)
    pts.row(static_cast<int>(r)) = s.points.row(rows[r]);
  return EmpiricalSample(std::move(pts), s.dz, s.dy);
}

// Validation / proxy weighting shared by tuning and evaluation: K-nearest
// projected points for the nearest-neighbor recipe, interior points for the
// positive-probability-event recipe.
WeightedConditionalSample conditional_weights(const EmpiricalSample& s,
                                              const ConditioningEvent& event,
                                              const std::string& mode,
                                              const std::string& k_rule) {
  if (mode == "interior") return interior_weights(s, event);
  return knn_weights(s, event, apply_k_rule(k_rule, s.size()));
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return kNan;
  std::sort(v.begin(), v.end());
  const double pos = q * (static_cast<double>(v.size()) - 1.0);
  const int lo = static_cast<int>(std::floor(pos));
  const int hi = std::min<int>(lo + 1, static_cast<int>(v.size()) - 1);
  const double frac = pos - lo;
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.generator = GeneratorSpec::from_json(j.at("generator"));
  cfg.loss = loss_from_json(j.at("loss"));
  cfg.event_json_text = j.at("event").dump();
  {
    const nlohmann::json& d = j.at("decisions");
    const std::string type = d.at("type");
    if (type == "box")
      cfg.decisions = DecisionSet::box(d.at("n").get<int>(),
                                       d.at("lo").get<double>(),
                                       d.at("hi").get<double>());
    else if (type == "simplex_free")
      cfg.decisions = DecisionSet::simplex_with_free(d.at("assets").get<int>());
    else
      throw DimensionMismatch("unknown decision-set type: " + type);
  }
  for (const auto& m : j.at("methods")) {
    MethodSpec ms;
    ms.name = m.at("name").get<std::string>();
    ms.grid = m.at("grid").get<std::vector<double>>();
    if (ms.grid.empty())
      throw DimensionMismatch("empty parameter grid for " + ms.name);
    std::sort(ms.grid.begin(), ms.grid.end());
    cfg.methods.push_back(std::move(ms));
  }
  if (cfg.methods.empty()) throw DimensionMismatch("no methods configured");
  cfg.Ns = j.at("N").get<std::vector<int>>();
  if (cfg.Ns.empty()) throw DimensionMismatch("empty N grid");
  cfg.runs = j.value("runs", 10);
  cfg.beta = j.value("beta", 0.15);
  if (cfg.beta <= 0.0 || cfg.beta >= 1.0)
    throw DimensionMismatch("beta must lie in (0,1)");
  cfg.kboot = j.value("kboot", 50);
  if (cfg.kboot < 1) throw DimensionMismatch("kboot must be >= 1");
  cfg.k_rule = j.value("k_rule", std::string("log"));
  cfg.proxy_draws = j.value("proxy_draws", 10000);
  cfg.proxy_mode = j.value("proxy_mode", std::string("knn"));
  cfg.alpha_mode = j.value("alpha_mode", std::string("knn"));
  cfg.alpha_fixed = j.value("alpha", 0.0);
  cfg.standardize = j.value("standardize", false);
  cfg.eval_reoptimize = j.value("eval_reoptimize", -1);
  if (cfg.eval_reoptimize >= cfg.loss.n)
    throw DimensionMismatch("eval_reoptimize exceeds the decision dimension");
  cfg.seed = j.value("seed", std::uint64_t{1});
  return cfg;
}

double out_of_sample(const Eigen::VectorXd& x,
                     const PiecewiseBiAffineLoss& loss,
                     const WeightedConditionalSample& proxy) {
  double J = 0.0;
  for (int i = 0; i < proxy.size(); ++i)
    J += proxy.weights[i] * loss.evaluate(x, proxy.points.row(i));
  return J;
}

double out_of_sample(const Eigen::VectorXd& x,
                     const PiecewiseBiAffineLoss& loss,
                     const WeightedConditionalSample& proxy,
                     int reopt_coordinate) {
  if (reopt_coordinate < 0) return out_of_sample(x, loss, proxy);
  if (reopt_coordinate >= loss.n)
    throw DimensionMismatch("re-optimized coordinate exceeds decision dim");
  const int jc = reopt_coordinate;
  const int K = loss.num_pieces();
  // Per proxy point, piece k is the line base + slope * b in the coordinate b:
  //   slope = <A_k e_j, xi> + c_k[j],  base = g_k(x, xi) - slope * x[j].
  std::vector<double> wv, base, slope;
  for (int i = 0; i < proxy.size(); ++i) {
    const double w = proxy.weights[i];
    if (w <= 0.0) continue;
    const Eigen::VectorXd xi = proxy.points.row(i);
    wv.push_back(w);
    for (int k = 0; k < K; ++k) {
      const double s = loss.pieces[static_cast<size_t>(k)].A.col(jc).dot(xi) +
                       loss.pieces[static_cast<size_t>(k)].c[jc];
      slope.push_back(s);
      base.push_back(loss.piece_value(k, x, xi) - s * x[jc]);
    }
  }
  const int P = static_cast<int>(wv.size());
  const auto F = [&](double b) {
    double J = 0.0;
    for (int i = 0; i < P; ++i) {
      double m = base[static_cast<size_t>(i) * K] +
                 slope[static_cast<size_t>(i) * K] * b;
      for (int k = 1; k < K; ++k)
        m = std::max(m, base[static_cast<size_t>(i) * K + k] +
                            slope[static_cast<size_t>(i) * K + k] * b);
      J += wv[static_cast<size_t>(i)] * m;
    }
    return J;
  };
  // The objective is convex piecewise linear in b; if bounded below, its
  // minimizer sits at a crossing of two pieces of some point. Bracket by all
  // such crossings (plus the trained value) and ternary-search the bracket.
  double lo = x[jc], hi = x[jc];
  for (int i = 0; i < P; ++i)
    for (int k = 0; k < K; ++k)
      for (int l = k + 1; l < K; ++l) {
        const double ds = slope[static_cast<size_t>(i) * K + l] -
                          slope[static_cast<size_t>(i) * K + k];
        if (std::abs(ds) < 1e-12) continue;
        const double b = (base[static_cast<size_t>(i) * K + k] -
                          base[static_cast<size_t>(i) * K + l]) /
                         ds;
        lo = std::min(lo, b);
        hi = std::max(hi, b);
      }
  for (int it = 0; it < 200; ++it) {
    if (hi - lo <= 1e-13 * std::max(1.0, std::abs(lo) + std::abs(hi))) break;
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (F(m1) < F(m2))
      hi = m2;
    else
      lo = m1;
  }
  return std::min(F(0.5 * (lo + hi)), F(x[jc]));
}

int apply_k_rule(const std::string& rule, int N) {
  if (rule == "log") return k_rule_log(N);
  if (rule == "pow09") return k_rule_pow09(N);
  if (rule == "sqrt") return k_rule_sqrt(N);
  throw DimensionMismatch("unknown K-rule: " + rule);
}

BaselineResult solve_method(const std::string& name,
                            const EmpiricalSample& sample,
                            const ConditioningEvent& event, double param,
                            const ExperimentConfig& cfg) {
  const int K = apply_k_rule(cfg.k_rule, sample.size());
  if (name == "DROTRIMM") {
    TrimmedAmbiguitySpec spec;
    if (cfg.alpha_mode == "knn") {
      // Tuned quantity is the budget excess on top of the K/N minimum.
      spec = drknn_budget(sample, event, K, param);
    } else {
      double alpha = cfg.alpha_mode == "fixed"
                         ? cfg.alpha_fixed
                         : alpha_hat_empirical(sample, event);
      if (alpha <= 0.0) alpha = 1.0 / sample.size();
      const double eps = minimum_transport_budget(sample, event, alpha, 1.0);
      spec.alpha = alpha;
      spec.min_budget = eps;
      spec.rho = eps + param;
    }
    DroProblem prob{sample, event, spec, cfg.loss, cfg.decisions};
    DroSolution sol = drotrim::solve(prob);
    return {sol.x_hat, sol.J_hat};
  }
  if (name == "KNN")
    return saa_solve(knn_weights(sample, event, K), cfg.loss, cfg.decisions);
  if (name == "KNNDRO")
    return knndro_solve(sample, event, K, param, cfg.loss, cfg.decisions);
  if (name == "KNNROBUST")
    return knnrobust_solve(sample, event, K, param, cfg.loss, cfg.decisions);
  if (name == "SAA")
    return saa_solve(interior_weights(sample, event), cfg.loss,
                     cfg.decisions);
  if (name == "SAADRO")
    return saadro_solve(sample, event, param, cfg.loss, cfg.decisions);
  throw DimensionMismatch("unknown method: " + name);
}

TuneResult bootstrap_tune(const MethodSpec& method,
                          const EmpiricalSample& sample,
                          const ConditioningEvent& event,
                          const ExperimentConfig& cfg,
                          std::uint64_t seed_base) {
  const auto& grid = method.grid;
  if (grid.size() == 1) {
    // Nothing to tune; solve directly at the single candidate.
    BaselineResult res = solve_method(method.name, sample, event, grid[0],
                                      cfg);
    return {grid[0], false, std::move(res)};
  }
  const int N = sample.size();
  const int C = static_cast<int>(grid.size());
  int retained = 0;
  std::vector<int> reliable(C, 0);
  std::vector<double> sum_val(C, 0.0);
  std::vector<char> solvable(C, 1);
  for (int r = 0; r < cfg.kboot; ++r) {
    CounterRng rng(derive_stream(seed_base, 1000 + static_cast<unsigned>(r)));
    std::vector<char> drawn(N, 0);
    std::vector<int> idx(N);
    for (int t = 0; t < N; ++t) {
      idx[t] = static_cast<int>(rng.next_u64() % N);
      drawn[idx[t]] = 1;
    }
    std::vector<int> heldout;
    for (int i = 0; i < N; ++i)
      if (!drawn[i]) heldout.push_back(i);
    if (heldout.empty()) continue;  // no validation set: drop the resample
    EmpiricalSample val_sample = take_rows(sample, heldout);
    WeightedConditionalSample val;
    try {
      val = conditional_weights(val_sample, event, cfg.proxy_mode,
                                cfg.k_rule);
    } catch (const NoInteriorPoints&) {
      continue;  // out-of-resample points all miss the event
    }
    EmpiricalSample resample = take_rows(sample, idx);
    ++retained;
    for (int c = 0; c < C; ++c) {
      try {
        BaselineResult res =
            solve_method(method.name, resample, event, grid[c], cfg);
        const double J_val =
            out_of_sample(res.x, cfg.loss, val, cfg.eval_reoptimize);
        if (res.value >= J_val - 1e-9) ++reliable[c];
        sum_val[c] += J_val;
      } catch (const std::exception&) {
        solvable[c] = 0;  // never reliable, never selectable
      }
    }
  }
  if (retained == 0)
    throw InsufficientData("no bootstrap resample admitted a validation set");
  const double threshold = (1.0 - cfg.beta) * retained - 1e-9;
  int best = -1;
  double best_mean = 0.0;
  for (int c = 0; c < C; ++c) {  // ascending grid: ties keep the smaller
    if (!solvable[c] || reliable[c] < threshold) continue;
    const double mean = sum_val[c] / retained;
    if (best < 0 || mean < best_mean - 1e-12) {
      best = c;
      best_mean = mean;
    }
  }
  bool fallback = false;
  if (best < 0) {  // most conservative visible choice
    best = C - 1;
    fallback = true;
  }
  BaselineResult final_res =
      solve_method(method.name, sample, event, grid[best], cfg);
  return {grid[best], fallback, std::move(final_res)};
}

namespace {

// Everything all methods of one replication cell share: the training sample,
// the event in working units, and the evaluation proxy.
struct CellData {
  EmpiricalSample sample;
  ConditioningEvent event;
  WeightedConditionalSample proxy;
};

CellData make_cell(const ExperimentConfig& cfg, int iN, int run) {
  const int N = cfg.Ns[static_cast<size_t>(iN)];
  EmpiricalSample raw = cfg.generator.draw(
      N, derive_stream(cfg.seed, 1, static_cast<unsigned>(iN),
                       static_cast<unsigned>(run)));
  Standardizer st;
  if (cfg.standardize) st = Standardizer::fit(raw);
  EmpiricalSample sample = st.apply(raw);
  ConditioningEvent event = build_event(cfg, sample, st);
  EmpiricalSample proxy_sample = st.apply(cfg.generator.draw(
      cfg.proxy_draws, derive_stream(cfg.seed, 2, static_cast<unsigned>(iN),
                                     static_cast<unsigned>(run))));
  WeightedConditionalSample proxy =
      conditional_weights(proxy_sample, event, cfg.proxy_mode, cfg.k_rule);
  return {std::move(sample), std::move(event), std::move(proxy)};
}

void fill_failure(RunRecord& rec, int n_decision) {
  rec.failed = true;
  rec.param = kNan;
  rec.J_hat = kNan;
  rec.J = kNan;
  rec.disappointment = kNan;
  rec.x_hat = Eigen::VectorXd::Constant(n_decision, kNan);
}

std::string summarize(const std::vector<RunRecord>& records,
                      bool group_by_param) {
  // Group keys in first-appearance order (records are already emitted in a
  // deterministic order).
  struct Key {
    std::string method;
    int N;
    double param;
  };
  std::vector<Key> keys;
  std::vector<std::vector<const RunRecord*>> groups;
  for (const auto& r : records) {
    const double p = group_by_param ? r.param : 0.0;
    int g = -1;
    for (size_t k = 0; k < keys.size(); ++k)
      if (keys[k].method == r.method && keys[k].N == r.N &&
          (!group_by_param || keys[k].param == p)) {
        g = static_cast<int>(k);
        break;
      }
    if (g < 0) {
      keys.push_back({r.method, r.N, p});
      groups.emplace_back();
      g = static_cast<int>(keys.size()) - 1;
    }
    groups[g].push_back(&r);
  }
  nlohmann::json cells = nlohmann::json::array();
  for (size_t g = 0; g < groups.size(); ++g) {
    std::vector<double> J, dis, wall;
    int fallbacks = 0, failures = 0, favorable = 0, ok = 0;
    for (const RunRecord* r : groups[g]) {
      wall.push_back(r->wall_ms);
      if (r->failed) {
        ++failures;
        continue;
      }
      ++ok;
      J.push_back(r->J);
      dis.push_back(r->disappointment);
      if (r->fallback) ++fallbacks;
      if (r->disappointment <= 1e-12) ++favorable;
    }
    nlohmann::json cell;
    cell["method"] = keys[g].method;
    cell["N"] = keys[g].N;
    if (group_by_param) cell["param"] = keys[g].param;
    cell["runs"] = static_cast<int>(groups[g].size());
    cell["failed"] = failures;
    cell["fallbacks"] = fallbacks;
    cell["J_mean"] = J.empty() ? kNan
                               : std::accumulate(J.begin(), J.end(), 0.0) /
                                     static_cast<double>(J.size());
    cell["J_p15"] = percentile(J, 0.15);
    cell["J_p85"] = percentile(J, 0.85);
    cell["disappointment_mean"] =
        dis.empty() ? kNan
                    : std::accumulate(dis.begin(), dis.end(), 0.0) /
                          static_cast<double>(dis.size());
    cell["disappointment_p15"] = percentile(dis, 0.15);
    cell["disappointment_p85"] = percentile(dis, 0.85);
    cell["frac_disappointment_le0"] =
        ok > 0 ? static_cast<double>(favorable) / ok : kNan;
    cell["wall_ms_mean"] =
        wall.empty() ? kNan
                     : std::accumulate(wall.begin(), wall.end(), 0.0) /
                           static_cast<double>(wall.size());
    cells.push_back(std::move(cell));
  }
  nlohmann::json out;
  out["cells"] = std::move(cells);
  return out.dump(2);
}

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads) {
  const int num_cells = static_cast<int>(cfg.Ns.size()) * cfg.runs;
  const int M = static_cast<int>(cfg.methods.size());
  std::vector<RunRecord> records(static_cast<size_t>(num_cells) * M);
  if (threads < 1) threads = 1;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
  for (int cell = 0; cell < num_cells; ++cell) {
    const int iN = cell / cfg.runs;
    const int run = cell % cfg.runs;
    for (int m = 0; m < M; ++m) {
      RunRecord& rec = records[static_cast<size_t>(cell) * M + m];
      rec.method = cfg.methods[m].name;
      rec.N = cfg.Ns[static_cast<size_t>(iN)];
      rec.run = run;
    }
    const Clock::time_point cell_t0 = Clock::now();
    std::unique_ptr<CellData> data;
    try {
      data = std::make_unique<CellData>(make_cell(cfg, iN, run));
    } catch (const std::exception&) {
      for (int m = 0; m < M; ++m) {
        fill_failure(records[static_cast<size_t>(cell) * M + m],
                     cfg.decisions.n);
        records[static_cast<size_t>(cell) * M + m].wall_ms =
            ms_since(cell_t0);
      }
      continue;
    }
    for (int m = 0; m < M; ++m) {
      RunRecord& rec = records[static_cast<size_t>(cell) * M + m];
      const Clock::time_point t0 = Clock::now();
      try {
        TuneResult tune = bootstrap_tune(
            cfg.methods[m], data->sample, data->event, cfg,
            derive_stream(cfg.seed, 100 + static_cast<unsigned>(m),
                          static_cast<unsigned>(iN),
                          static_cast<unsigned>(run)));
        rec.param = tune.param;
        rec.fallback = tune.fallback;
        rec.x_hat = tune.result.x;
        rec.J_hat = tune.result.value;
        rec.J = out_of_sample(tune.result.x, cfg.loss, data->proxy,
                              cfg.eval_reoptimize);
        rec.disappointment = rec.J - rec.J_hat;
      } catch (const std::exception&) {
        fill_failure(rec, cfg.decisions.n);
      }
      rec.wall_ms = ms_since(t0);
    }
  }
  ExperimentResult out;
  out.records = std::move(records);
  out.summary_json = summarize(out.records, /*group_by_param=*/false);
  return out;
}

ExperimentResult sweep_experiment(const ExperimentConfig& cfg, int threads) {
  const int num_cells = static_cast<int>(cfg.Ns.size()) * cfg.runs;
  const int M = static_cast<int>(cfg.methods.size());
  std::vector<int> offsets(M + 1, 0);  // record slots per method (grid sizes)
  for (int m = 0; m < M; ++m)
    offsets[m + 1] =
        offsets[m] + static_cast<int>(cfg.methods[m].grid.size());
  const int per_cell = offsets[M];
  std::vector<RunRecord> records(static_cast<size_t>(num_cells) * per_cell);
  if (threads < 1) threads = 1;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
  for (int cell = 0; cell < num_cells; ++cell) {
    const int iN = cell / cfg.runs;
    const int run = cell % cfg.runs;
    std::unique_ptr<CellData> data;
    try {
      data = std::make_unique<CellData>(make_cell(cfg, iN, run));
    } catch (const std::exception&) {
      // leave all records of the cell marked failed below
    }
    for (int m = 0; m < M; ++m) {
      const auto& grid = cfg.methods[m].grid;
      for (size_t c = 0; c < grid.size(); ++c) {
        RunRecord& rec = records[static_cast<size_t>(cell) * per_cell +
                                 offsets[m] + static_cast<int>(c)];
        rec.method = cfg.methods[m].name;
        rec.N = cfg.Ns[static_cast<size_t>(iN)];
        rec.run = run;
        rec.param = grid[c];
        const Clock::time_point t0 = Clock::now();
        if (!data) {
          fill_failure(rec, cfg.decisions.n);
          rec.param = grid[c];
          rec.wall_ms = ms_since(t0);
          continue;
        }
        try {
          BaselineResult res = solve_method(cfg.methods[m].name, data->sample,
                                            data->event, grid[c], cfg);
          rec.x_hat = res.x;
          rec.J_hat = res.value;
          rec.J = out_of_sample(res.x, cfg.loss, data->proxy,
                                cfg.eval_reoptimize);
          rec.disappointment = rec.J - rec.J_hat;
        } catch (const std::exception&) {
          fill_failure(rec, cfg.decisions.n);
          rec.param = grid[c];
        }
        rec.wall_ms = ms_since(t0);
      }
    }
  }
  ExperimentResult out;
  out.records = std::move(records);
  out.summary_json = summarize(out.records, /*group_by_param=*/true);
  return out;
}

void write_records_csv(const std::vector<RunRecord>& records,
                       std::ostream& os) {
  os << "method,N,run,param,fallback,failed,J_hat,J,disappointment,wall_ms,"
        "x_hat\n";
  for (const auto& r : records) {
    os << r.method << ',' << r.N << ',' << r.run << ',' << fmt(r.param) << ','
       << (r.fallback ? 1 : 0) << ',' << (r.failed ? 1 : 0) << ','
       << fmt(r.J_hat) << ',' << fmt(r.J) << ',' << fmt(r.disappointment)
       << ',' << fmt(r.wall_ms) << ',';
    for (int j = 0; j < r.x_hat.size(); ++j) {
      if (j) os << ';';
      os << fmt(r.x_hat[j]);
    }
    os << '\n';
  }
}

}  // namespace drotrim
