#pragma once

// Seeded Monte-Carlo campaigns over G(n, p): per-trial search runs, the
// threshold-bound curve, the leading-eigenvalue distribution study and the
// infinity-norm scaling study, with CSV and JSON persistence.
//
// Every trial is a pure function of (master_seed, n, trial_index). Workers
// write into a preallocated slot per trial, so the merged output is ordered
// by (n, trial_index) whatever the thread count or completion order.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "qwsearch/bounds.hpp"
#include "qwsearch/csv.hpp"
#include "qwsearch/error.hpp"
#include "qwsearch/graph.hpp"
#include "qwsearch/lambertw.hpp"
#include "qwsearch/rng.hpp"
#include "qwsearch/search.hpp"
#include "qwsearch/spectral.hpp"

namespace qwsearch {

inline constexpr const char* kToolVersion = "1.0.0";

// ---------------------------------------------------------------------------
// Configuration

/// Edge probability per size: a fixed p, or p0 ln(n) / n.
struct ProbabilityRule {
  enum class Kind { fixed, threshold };
  Kind kind = Kind::threshold;
  double value = 2.0;

  double at(std::size_t n) const {
    if (kind == Kind::fixed) return value;
    const double nd = static_cast<double>(n);
    return std::min(1.0, value * std::log(nd) / nd);
  }
};

enum class CalibrationMode { none, eq3, empirical };

inline std::string calibration_name(CalibrationMode m) {
  switch (m) {
    case CalibrationMode::none: return "none";
    case CalibrationMode::eq3: return "eq3";
    case CalibrationMode::empirical: return "empirical";
  }
  return "?";
}

inline CalibrationMode parse_calibration(const std::string& s) {
  if (s == "none") return CalibrationMode::none;
  if (s == "eq3") return CalibrationMode::eq3;
  if (s == "empirical") return CalibrationMode::empirical;
  throw InvalidArgument(fmt::format("unknown calibration '{}' (none, eq3, empirical)", s));
}

struct CampaignConfig {
  std::vector<std::size_t> sizes{128, 256, 512, 1024};
  ProbabilityRule p_rule{};
  std::size_t trials_per_size = 30;
  std::string kind = "lap-threshold";  ///< adj, lap or lap-threshold
  double threshold_p0 = 2.0;           ///< constants for lap-threshold under a fixed p rule
  CalibrationMode calibration = CalibrationMode::empirical;
  double t_factor = std::numbers::pi / 2.0;
  std::uint64_t master_seed = 1;
  std::string output_path;
  unsigned threads = 1;
  bool run_search = true;  ///< false: graph and leading-eigenvector statistics only
  SearchOptions search_options{};

  void validate() const {
    detail::require(!sizes.empty(), "campaign: sizes must be nonempty");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      detail::require(sizes[i] >= 2, "campaign: sizes must be at least 2");
      detail::require(i == 0 || sizes[i] > sizes[i - 1], "campaign: sizes must be strictly increasing");
    }
    detail::require(trials_per_size >= 1, "campaign: trials_per_size must be at least 1");
    detail::require(threads >= 1, "campaign: threads must be at least 1");
    detail::require(std::isfinite(t_factor) && t_factor >= 0.0, "campaign: t_factor must be non-negative");
    if (p_rule.kind == ProbabilityRule::Kind::fixed)
      detail::require(p_rule.value >= 0.0 && p_rule.value <= 1.0, "campaign: fixed p must lie in [0, 1]");
    else
      detail::require(p_rule.value > 0.0, "campaign: p0 must be positive");
    (void)matrix_kind();
  }

  /// Constants of the threshold matrix come from the p0 of the rule when
  /// the rule is p0 ln(n)/n.
  double kind_p0() const {
    return p_rule.kind == ProbabilityRule::Kind::threshold ? p_rule.value : threshold_p0;
  }

  MatrixKind matrix_kind() const { return parse_kind(kind, kind_p0()); }
};

inline void to_json(nlohmann::json& j, const CampaignConfig& c) {
  j = nlohmann::json{
      {"sizes", c.sizes},
      {"p_rule",
       {{"kind", c.p_rule.kind == ProbabilityRule::Kind::fixed ? "fixed" : "threshold"},
        {"value", c.p_rule.value}}},
      {"trials_per_size", c.trials_per_size},
      {"kind", c.kind},
      {"threshold_p0", c.threshold_p0},
      {"calibration", calibration_name(c.calibration)},
      {"t_factor", c.t_factor},
      {"master_seed", c.master_seed},
      {"output_path", c.output_path},
      {"threads", c.threads},
      {"run_search", c.run_search},
      {"unit_frame", c.search_options.unit_frame},
      {"scaling", c.search_options.scaling == Scaling::nominal ? "nominal" : "mean_degree"},
  };
}

/// Applies the keys present in `j` on top of `c`; unknown keys are rejected.
inline void merge_config(CampaignConfig& c, const nlohmann::json& j) {
  detail::require(j.is_object(), "config: expected a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "sizes") c.sizes = v.get<std::vector<std::size_t>>();
      else if (key == "p_rule") {
        const auto kind = v.at("kind").get<std::string>();
        detail::require(kind == "fixed" || kind == "threshold", "config: p_rule.kind must be fixed or threshold");
        c.p_rule.kind = kind == "fixed" ? ProbabilityRule::Kind::fixed : ProbabilityRule::Kind::threshold;
        c.p_rule.value = v.at("value").get<double>();
      } else if (key == "trials_per_size") c.trials_per_size = v.get<std::size_t>();
      else if (key == "kind") c.kind = v.get<std::string>();
      else if (key == "threshold_p0") c.threshold_p0 = v.get<double>();
      else if (key == "calibration") c.calibration = parse_calibration(v.get<std::string>());
      else if (key == "t_factor") c.t_factor = v.get<double>();
      else if (key == "master_seed") c.master_seed = v.get<std::uint64_t>();
      else if (key == "output_path") c.output_path = v.get<std::string>();
      else if (key == "threads") c.threads = v.get<unsigned>();
      else if (key == "run_search") c.run_search = v.get<bool>();
      else if (key == "unit_frame") c.search_options.unit_frame = v.get<bool>();
      else if (key == "scaling") {
        const auto s = v.get<std::string>();
        detail::require(s == "nominal" || s == "mean_degree", "config: scaling must be nominal or mean_degree");
        c.search_options.scaling = s == "nominal" ? Scaling::nominal : Scaling::mean_degree;
      } else {
        throw InvalidArgument(fmt::format("config: unknown key '{}'", key));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(fmt::format("config: {}", e.what()));
  }
}

// ---------------------------------------------------------------------------
// Trial records

struct TrialRecord {
  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  std::size_t n = 0;
  double p = 0.0;
  std::size_t trial_index = 0;
  std::uint64_t seed = 0;
  bool connected = false;
  std::size_t delta_min = 0;
  std::size_t delta_max = 0;
  double lambda1_normalized = kNaN;  ///< lambda_1(A) / (np)
  double c = kNaN;
  double r = kNaN;
  double bound = kNaN;  ///< (1 - c)/(1 + c), clipped at 0
  double p_at_t = kNaN;
  double p_peak = kNaN;
  double t_peak = kNaN;
  double infnorm_scaled = kNaN;  ///< sqrt(n) * ||lambda_1 - s||_inf
  std::size_t marked_vertex = 0;
  std::string status = "ok";  ///< "ok" or '|'-separated flags
};

inline const std::vector<std::string>& trial_columns() {
  static const std::vector<std::string> cols{
      "n", "p", "trial_index", "seed", "connected", "delta_min", "delta_max", "lambda1_normalized", "c",
      "r", "bound", "p_at_t", "p_peak", "t_peak", "infnorm_scaled", "marked_vertex", "status"};
  return cols;
}

/// Stream for the marked vertex, separate from the graph sampler's stream.
inline std::size_t marked_vertex_for(std::uint64_t trial_seed_value, std::size_t n) {
  constexpr std::uint64_t kMarkedStream = 0x6d61726b6564ULL;
  Engine eng(derive_seed(trial_seed_value, {kMarkedStream}));
  return static_cast<std::size_t>(uniform_index(eng, n));
}

namespace detail {

inline void add_flag(std::string& status, const std::string& flag) {
  if (status == "ok") status = flag;
  else status += "|" + flag;
}

// Commas and line breaks would break the row; everything else passes.
inline std::string sanitize(std::string s) {
  for (char& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  return s;
}

inline void search_part(TrialRecord& rec, const Graph& g, const CampaignConfig& cfg) {
  const auto basis = make_search_basis(g, cfg.matrix_kind(), cfg.search_options);
  const auto w = static_cast<Vertex>(rec.marked_vertex);
  rec.c = basis->c;
  rec.bound = std::max(0.0, (1.0 - rec.c) / (1.0 + rec.c));

  double r = 0.0;
  if (!basis->gap_ok()) {
    add_flag(rec.status, "gap_not_below_one");
  } else if (cfg.calibration == CalibrationMode::eq3) {
    const auto cal = calibrate_r_eq3(basis->spectrum, w);
    if (cal.found) {
      r = cal.r;
    } else {
      add_flag(rec.status, "eq3_fallback");
      r = calibrate_r_empirical(*basis, w).r;
    }
  } else if (cfg.calibration == CalibrationMode::empirical) {
    r = calibrate_r_empirical(*basis, w).r;
  }
  rec.r = r;

  const auto setup = make_search_setup(basis, r, w);
  const double sqrt_n = std::sqrt(static_cast<double>(rec.n));
  const double t = cfg.t_factor * sqrt_n;
  rec.p_at_t = success_probability(setup, t);
  const EmpiricalCalibrationOptions scan{};
  const auto peak = peak_scan(setup, std::max(scan.t_max_factor * sqrt_n, t), scan.t_steps);
  rec.p_peak = peak.p;
  rec.t_peak = peak.t;
  if (rec.p_at_t > rec.p_peak) {
    rec.p_peak = rec.p_at_t;
    rec.t_peak = t;
  }
}

}  // namespace detail

/// One trial of a campaign. Math failures are recorded in `status`.
inline TrialRecord run_trial(const CampaignConfig& cfg, std::size_t n, std::size_t trial_index) {
  TrialRecord rec;
  rec.n = n;
  rec.p = cfg.p_rule.at(n);
  rec.trial_index = trial_index;
  rec.seed = trial_seed(cfg.master_seed, n, trial_index);
  rec.marked_vertex = marked_vertex_for(rec.seed, n);
  try {
    const Graph g = sample_gnp(n, rec.p, rec.seed);
    rec.connected = is_connected(g);
    const auto prof = degree_profile(g);
    rec.delta_min = prof.delta_min;
    rec.delta_max = prof.delta_max;

    const auto top = top_eigenpairs(adjacency(g), 2);
    const double np = static_cast<double>(n) * rec.p;
    rec.lambda1_normalized = np > 0.0 ? top.eigenvalues(0) / np : TrialRecord::kNaN;
    const auto pv = principal_vector(top);
    if (pv.status == PrincipalStatus::degenerate) detail::add_flag(rec.status, "lambda1_degenerate");
    if (pv.status == PrincipalStatus::mixed_sign) detail::add_flag(rec.status, "principal_mixed_sign");
    rec.infnorm_scaled = std::sqrt(static_cast<double>(n)) * infnorm_deviation(pv.vector, static_cast<Eigen::Index>(n));

    if (cfg.run_search) detail::search_part(rec, g, cfg);
    else detail::add_flag(rec.status, "spectral_only");
  } catch (const std::exception& e) {
    detail::add_flag(rec.status, detail::sanitize(fmt::format("error: {}", e.what())));
  }
  return rec;
}

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Runs `job(i)` for i in [0, count) on `threads` workers with BLAS pinned
/// to one thread, then restores the previous BLAS setting.
template <typename Job>
void parallel_for(std::size_t count, unsigned threads, Job&& job, const ProgressFn& progress = {}) {
  const int saved = blas_threads();
  set_blas_threads(1);
  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      job(i);
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(++done, count);
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < workers; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  set_blas_threads(saved);
}

inline std::vector<TrialRecord> run_campaign(const CampaignConfig& cfg, const ProgressFn& progress = {}) {
  cfg.validate();
  const std::size_t total = cfg.sizes.size() * cfg.trials_per_size;
  std::vector<TrialRecord> out(total);
  parallel_for(
      total, cfg.threads,
      [&](std::size_t i) {
        out[i] = run_trial(cfg, cfg.sizes[i / cfg.trials_per_size], i % cfg.trials_per_size);
      },
      progress);
  return out;
}

// ---------------------------------------------------------------------------
// Studies

struct CurvePoint {
  double p0 = 0.0;
  double p_bound = 0.0;
};

/// `points` values from lo to hi inclusive.
inline std::vector<double> linspace(double lo, double hi, std::size_t points) {
  detail::require(points >= 1, "linspace: need at least one point");
  if (points == 1) return {hi};
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i)
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  out.back() = hi;
  return out;
}

inline std::vector<CurvePoint> figure1_curve(const std::vector<double>& p0_grid) {
  std::vector<CurvePoint> out;
  out.reserve(p0_grid.size());
  for (double p0 : p0_grid) out.push_back({p0, p_bound(p0)});
  return out;
}

struct ZSummary {
  double mean_z = 0.0;
  double sd_z = 0.0;
  double ks_distance = 0.0;  ///< sup |F_empirical - Phi|
  std::vector<double> z;
};

inline double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline ZSummary summarize_z(std::vector<double> z) {
  detail::require(z.size() >= 2, "summarize_z: need at least two values");
  ZSummary s;
  const double m = static_cast<double>(z.size());
  double sum = 0.0;
  for (double v : z) sum += v;
  s.mean_z = sum / m;
  double ss = 0.0;
  for (double v : z) ss += (v - s.mean_z) * (v - s.mean_z);
  s.sd_z = std::sqrt(ss / (m - 1.0));
  std::vector<double> sorted = z;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = standard_normal_cdf(sorted[i]);
    s.ks_distance = std::max({s.ks_distance, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
  }
  s.z = std::move(z);
  return s;
}

inline CampaignConfig spectral_study_config(std::vector<std::size_t> sizes, double p, std::size_t trials,
                                            std::uint64_t master_seed, unsigned threads) {
  CampaignConfig cfg;
  cfg.sizes = std::move(sizes);
  cfg.p_rule = {ProbabilityRule::Kind::fixed, p};
  cfg.trials_per_size = trials;
  cfg.kind = "adj";
  cfg.calibration = CalibrationMode::none;
  cfg.master_seed = master_seed;
  cfg.threads = threads;
  cfg.run_search = false;
  return cfg;
}

struct Lambda1Study {
  ZSummary summary;
  std::vector<TrialRecord> records;
};

/// z-scores of lambda_1(A/(np)) over `trials` samples of G(n, p).
inline Lambda1Study lambda1_distribution_study(std::size_t n, double p, std::size_t trials,
                                               std::uint64_t master_seed, unsigned threads = 1,
                                               const ProgressFn& progress = {}) {
  detail::require(trials >= 30, "lambda1_distribution_study: need at least 30 trials");
  detail::require(p > 0.0 && p < 1.0, "lambda1_distribution_study: need 0 < p < 1");
  Lambda1Study study;
  study.records = run_campaign(spectral_study_config({n}, p, trials, master_seed, threads), progress);
  std::vector<double> z;
  z.reserve(trials);
  for (const auto& rec : study.records) {
    if (!std::isfinite(rec.lambda1_normalized))
      throw NumericalError(fmt::format("lambda1 study: trial {} failed ({})", rec.trial_index, rec.status));
    z.push_back(standardized_lambda1(n, p, rec.lambda1_normalized));
  }
  study.summary = summarize_z(std::move(z));
  return study;
}

struct MedianRow {
  std::size_t n = 0;
  double median = 0.0;
  std::size_t count = 0;
};

inline double median(std::vector<double> v) {
  detail::require(!v.empty(), "median: empty input");
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

/// Median of infnorm_scaled per size over the finite values.
inline std::vector<MedianRow> infnorm_medians(const std::vector<TrialRecord>& records) {
  std::map<std::size_t, std::vector<double>> by_n;
  for (const auto& rec : records)
    if (std::isfinite(rec.infnorm_scaled)) by_n[rec.n].push_back(rec.infnorm_scaled);
  std::vector<MedianRow> out;
  for (auto& [n, values] : by_n) out.push_back({n, median(values), values.size()});
  return out;
}

struct InfnormStudy {
  std::vector<MedianRow> medians;
  std::vector<TrialRecord> records;
};

inline InfnormStudy infnorm_study(const std::vector<std::size_t>& sizes, double p, std::size_t trials,
                                  std::uint64_t master_seed, unsigned threads = 1,
                                  const ProgressFn& progress = {}) {
  InfnormStudy study;
  study.records = run_campaign(spectral_study_config(sizes, p, trials, master_seed, threads), progress);
  study.medians = infnorm_medians(study.records);
  return study;
}

// ---------------------------------------------------------------------------
// Aggregation

struct SizeSummary {
  std::size_t n = 0;
  double bound_min = 0.0, bound_max = 0.0, bound_mean = 0.0;
  double p_min = 0.0, p_max = 0.0, p_mean = 0.0;
};

/// Per-size min/max/mean of bound and p_at_t. Rows whose value is not
/// finite (failed trials) are left out of that statistic.
inline std::vector<SizeSummary> aggregate(const std::vector<TrialRecord>& records) {
  detail::require(!records.empty(), "aggregate: empty input");
  struct Acc {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    std::size_t count = 0;
    void add(double v) {
      if (!std::isfinite(v)) return;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
      ++count;
    }
    double mean() const { return count ? sum / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN(); }
    double min() const { return count ? lo : std::numeric_limits<double>::quiet_NaN(); }
    double max() const { return count ? hi : std::numeric_limits<double>::quiet_NaN(); }
  };
  std::map<std::size_t, std::pair<Acc, Acc>> groups;
  for (const auto& rec : records) {
    auto& [bound, prob] = groups[rec.n];
    bound.add(rec.bound);
    prob.add(rec.p_at_t);
  }
  std::vector<SizeSummary> out;
  for (const auto& [n, acc] : groups) {
    const auto& [b, q] = acc;
    out.push_back({n, b.min(), b.max(), b.mean(), q.min(), q.max(), q.mean()});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bound sweeps

struct BoundRow {
  std::size_t n = 0;
  double p = 0.0;
  std::size_t trial_index = 0;
  std::uint64_t seed = 0;
  BoundReport report;
};

/// All bound checks on one graph. Degree extremes are compared against the
/// threshold constants of p0 = np / ln n whenever that p0 exceeds 1.
inline std::vector<BoundReport> all_bound_checks(const Graph& g) {
  std::vector<BoundReport> out;
  out.push_back(check_operator_deviation(g));
  auto bands = check_eigenvalue_bands(g);
  out.push_back(std::move(bands.leading));
  out.push_back(std::move(bands.bulk));
  out.push_back(check_degree_concentration(g));
  out.push_back(check_alpha(g));
  out.push_back(check_laplacian_norm(g));
  out.push_back(check_mu1_vs_maxdeg(g));
  if (g.n() >= 2) out.push_back(check_algebraic_connectivity(g));
  const double p0 = static_cast<double>(g.n()) * g.p_nominal() / std::log(static_cast<double>(g.n()));
  if (g.n() >= 2 && p0 > 1.0 && std::isfinite(p0))
    out.push_back(degree_extremes_vs_lambert(g, threshold_constants(p0)));
  return out;
}

inline std::vector<BoundRow> bounds_sweep(std::size_t n, double p, std::size_t trials, std::uint64_t master_seed,
                                          unsigned threads = 1, const ProgressFn& progress = {}) {
  detail::require(n >= 2, "bounds_sweep: need n >= 2");
  detail::require(trials >= 1, "bounds_sweep: need at least one trial");
  std::vector<std::vector<BoundRow>> per_trial(trials);
  parallel_for(
      trials, threads,
      [&](std::size_t t) {
        const std::uint64_t seed = trial_seed(master_seed, n, t);
        const Graph g = sample_gnp(n, p, seed);
        for (auto& rep : all_bound_checks(g)) per_trial[t].push_back({n, p, t, seed, std::move(rep)});
      },
      progress);
  std::vector<BoundRow> out;
  for (auto& rows : per_trial)
    for (auto& row : rows) out.push_back(std::move(row));
  return out;
}

// ---------------------------------------------------------------------------
// CSV

inline void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
  using csv::format_double;
  os << csv::join_header(trial_columns()) << '\n';
  for (const auto& r : records) {
    os << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.n, format_double(r.p),
                      r.trial_index, r.seed, r.connected ? 1 : 0, r.delta_min, r.delta_max,
                      format_double(r.lambda1_normalized), format_double(r.c), format_double(r.r),
                      format_double(r.bound), format_double(r.p_at_t), format_double(r.p_peak),
                      format_double(r.t_peak), format_double(r.infnorm_scaled), r.marked_vertex,
                      detail::sanitize(r.status));
  }
}

inline std::vector<TrialRecord> read_trials_csv(std::istream& is) {
  std::vector<TrialRecord> out;
  csv::read_file(is, trial_columns(), [&](const csv::Row& row) {
    TrialRecord r;
    r.n = row.integer<std::size_t>(0);
    r.p = row.number(1);
    r.trial_index = row.integer<std::size_t>(2);
    r.seed = row.integer<std::uint64_t>(3);
    r.connected = row.flag(4);
    r.delta_min = row.integer<std::size_t>(5);
    r.delta_max = row.integer<std::size_t>(6);
    r.lambda1_normalized = row.number(7);
    r.c = row.number(8);
    r.r = row.number(9);
    r.bound = row.number(10);
    r.p_at_t = row.number(11);
    r.p_peak = row.number(12);
    r.t_peak = row.number(13);
    r.infnorm_scaled = row.number(14);
    r.marked_vertex = row.integer<std::size_t>(15);
    r.status = std::string(row.text(16));
    out.push_back(std::move(r));
  });
  return out;
}

inline const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> cols{"n", "bound_min", "bound_max", "bound_mean", "p_min", "p_max", "p_mean"};
  return cols;
}

inline void write_summary_csv(std::ostream& os, const std::vector<SizeSummary>& rows) {
  using csv::format_double;
  os << csv::join_header(summary_columns()) << '\n';
  for (const auto& s : rows)
    os << fmt::format("{},{},{},{},{},{},{}\n", s.n, format_double(s.bound_min), format_double(s.bound_max),
                      format_double(s.bound_mean), format_double(s.p_min), format_double(s.p_max),
                      format_double(s.p_mean));
}

inline std::vector<SizeSummary> read_summary_csv(std::istream& is) {
  std::vector<SizeSummary> out;
  csv::read_file(is, summary_columns(), [&](const csv::Row& row) {
    out.push_back({row.integer<std::size_t>(0), row.number(1), row.number(2), row.number(3), row.number(4),
                   row.number(5), row.number(6)});
  });
  return out;
}

inline const std::vector<std::string>& curve_columns() {
  static const std::vector<std::string> cols{"p0", "p_bound"};
  return cols;
}

inline void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve) {
  os << csv::join_header(curve_columns()) << '\n';
  for (const auto& pt : curve) os << csv::format_double(pt.p0) << ',' << csv::format_double(pt.p_bound) << '\n';
}

inline std::vector<CurvePoint> read_curve_csv(std::istream& is) {
  std::vector<CurvePoint> out;
  csv::read_file(is, curve_columns(), [&](const csv::Row& row) { out.push_back({row.number(0), row.number(1)}); });
  return out;
}

inline const std::vector<std::string>& bound_columns() {
  static const std::vector<std::string> cols{"n", "p", "trial_index", "seed", "name", "lhs", "rhs",
                                             "holds", "report_only", "aux"};
  return cols;
}

// aux is written as key=value pairs separated by ';', keys in sorted order.
inline void write_bounds_csv(std::ostream& os, const std::vector<BoundRow>& rows) {
  using csv::format_double;
  os << csv::join_header(bound_columns()) << '\n';
  for (const auto& row : rows) {
    std::string aux;
    for (const auto& [k, v] : row.report.aux) {
      if (!aux.empty()) aux += ';';
      aux += k + "=" + format_double(v);
    }
    os << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", row.n, format_double(row.p), row.trial_index, row.seed,
                      row.report.name, format_double(row.report.lhs), format_double(row.report.rhs),
                      row.report.holds ? 1 : 0, row.report.report_only ? 1 : 0, aux);
  }
}

inline std::vector<BoundRow> read_bounds_csv(std::istream& is) {
  std::vector<BoundRow> out;
  csv::read_file(is, bound_columns(), [&](const csv::Row& row) {
    BoundRow b;
    b.n = row.integer<std::size_t>(0);
    b.p = row.number(1);
    b.trial_index = row.integer<std::size_t>(2);
    b.seed = row.integer<std::uint64_t>(3);
    b.report.name = std::string(row.text(4));
    b.report.lhs = row.number(5);
    b.report.rhs = row.number(6);
    b.report.holds = row.flag(7);
    b.report.report_only = row.flag(8);
    const std::string aux(row.text(9));
    std::size_t start = 0;
    while (start < aux.size()) {
      std::size_t end = aux.find(';', start);
      if (end == std::string::npos) end = aux.size();
      const std::string item = aux.substr(start, end - start);
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw IoError(fmt::format("csv line {}: malformed aux entry '{}'", row.line(), item));
      char* tail = nullptr;
      const std::string value = item.substr(eq + 1);
      const double v = std::strtod(value.c_str(), &tail);
      if (value.empty() || tail != value.c_str() + value.size())
        throw IoError(fmt::format("csv line {}: malformed aux value '{}'", row.line(), item));
      b.report.aux[item.substr(0, eq)] = v;
      start = end + 1;
    }
    out.push_back(std::move(b));
  });
  return out;
}

/// Path-based wrappers: write_csv(path, rows) / read_*_csv(path).
template <typename Rows, typename Writer>
void write_csv_file(const std::string& path, const Rows& rows, Writer&& writer) {
  auto os = csv::open_for_writing(path);
  writer(os, rows);
  csv::finish(os, path);
}

inline void write_csv(const std::string& path, const std::vector<TrialRecord>& rows) {
  write_csv_file(path, rows, [](std::ostream& os, const auto& r) { write_trials_csv(os, r); });
}
inline void write_csv(const std::string& path, const std::vector<SizeSummary>& rows) {
  write_csv_file(path, rows, [](std::ostream& os, const auto& r) { write_summary_csv(os, r); });
}
inline void write_csv(const std::string& path, const std::vector<CurvePoint>& rows) {
  write_csv_file(path, rows, [](std::ostream& os, const auto& r) { write_curve_csv(os, r); });
}
inline void write_csv(const std::string& path, const std::vector<BoundRow>& rows) {
  write_csv_file(path, rows, [](std::ostream& os, const auto& r) { write_bounds_csv(os, r); });
}

inline std::vector<TrialRecord> read_trials_csv(const std::string& path) {
  auto is = csv::open_for_reading(path);
  return read_trials_csv(is);
}
inline std::vector<SizeSummary> read_summary_csv(const std::string& path) {
  auto is = csv::open_for_reading(path);
  return read_summary_csv(is);
}
inline std::vector<CurvePoint> read_curve_csv(const std::string& path) {
  auto is = csv::open_for_reading(path);
  return read_curve_csv(is);
}
inline std::vector<BoundRow> read_bounds_csv(const std::string& path) {
  auto is = csv::open_for_reading(path);
  return read_bounds_csv(is);
}

// ---------------------------------------------------------------------------
// Manifest

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                     tm.tm_hour, tm.tm_min, tm.tm_sec);
}

/// Config echo, tool version, timestamp and master seed. Under a threshold
/// probability rule the limiting bound p_bound(p0) is included for plotting.
inline nlohmann::json campaign_manifest(const CampaignConfig& cfg, const std::map<std::string, std::string>& outputs = {}) {
  nlohmann::json j;
  j["tool"] = "qwsearch";
  j["tool_version"] = kToolVersion;
  j["timestamp"] = utc_timestamp();
  j["master_seed"] = cfg.master_seed;
  j["config"] = cfg;
  if (cfg.p_rule.kind == ProbabilityRule::Kind::threshold && cfg.p_rule.value > 1.0) {
    j["p0"] = cfg.p_rule.value;
    j["p_bound"] = p_bound(cfg.p_rule.value);
  } else {
    j["p_bound"] = nullptr;
  }
  j["outputs"] = outputs;
  return j;
}

inline void write_manifest(const std::string& path, const nlohmann::json& manifest) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << manifest.dump(2) << '\n';
  csv::finish(os, path);
}

}  // namespace qwsearch
