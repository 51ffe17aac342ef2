#pragma once

// Command-line front end. Every subcommand resolves its parameters, calls
// the library, and writes results; exit codes are 0 success, 1 usage error,
// 2 numerical failure, 3 I/O failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "qwsearch/error.hpp"
#include "qwsearch/experiments.hpp"
#include "qwsearch/graph.hpp"
#include "qwsearch/search.hpp"

namespace qwsearch::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2, kIo = 3 };

namespace detail {

inline std::filesystem::path prepare_out_dir(const std::string& dir) {
  qwsearch::detail::require(!dir.empty(), "--out is required");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create output directory {}: {}", dir, ec.message()));
  return std::filesystem::path(dir);
}

inline nlohmann::json load_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config file " + path);
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(fmt::format("config file {}: {}", path, e.what()));
  }
}

inline ProgressFn progress_printer(std::ostream& err, bool quiet, const std::string& label) {
  if (quiet) return {};
  return [&err, label, last = std::size_t{0}](std::size_t done, std::size_t total) mutable {
    const std::size_t decile = done * 10 / total;
    if (done == total || decile != last) {
      err << fmt::format("[{}] {}/{}\n", label, done, total);
      last = decile;
    }
  };
}

// Options shared by the campaign-style subcommands. A flag only overrides
// the resolved config when it was given on the command line.
struct CampaignFlags {
  std::vector<std::size_t> sizes;
  std::size_t n = 0;
  double p = 0.0;
  double p0 = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::string matrix;
  std::string calibration;
  double t_factor = 0.0;
  std::string out;

  std::map<std::string, CLI::Option*> opts;

  bool given(const std::string& name) const {
    auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }
};

}  // namespace detail

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) { build(); }

  int run(int argc, const char* const* argv) {
    try {
      app_.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app_.exit(e, out_, err_);
      return code == 0 ? kOk : kUsage;
    }
    try {
      return execute();
    } catch (const InvalidArgument& e) {
      err_ << "error: " << e.what() << '\n';
      return kUsage;
    } catch (const IoError& e) {
      err_ << "I/O error: " << e.what() << '\n';
      return kIo;
    } catch (const std::exception& e) {
      err_ << "numerical failure: " << e.what() << '\n';
      return kNumerical;
    }
  }

 private:
  void build() {
    app_.name("qwsearch");
    app_.description("Quantum spatial search on Erdos-Renyi graphs: simulation, calibration and bound checks.");
    app_.require_subcommand(1);
    app_.fallthrough();
    app_.add_option("--threads", threads_, "Worker threads for campaigns")->check(CLI::PositiveNumber);
    app_.add_flag("--quiet", quiet_, "Suppress progress output");
    config_opt_ = app_.add_option("--config", config_path_, "JSON campaign config (flags override it)");

    build_gen();
    build_search();
    build_calibrate();
    build_fig1();
    build_campaign("fig2", "Threshold-regime search campaign (trials, summary, manifest)", fig2_);
    build_campaign("bounds", "Concentration-inequality checks on sampled graphs", bounds_);
    build_campaign("infnorm-study", "Scaling of sqrt(n) ||lambda_1 - s||_inf", infnorm_);
    build_campaign("lambda1-study", "Distribution of the leading adjacency eigenvalue", lambda1_);
  }

  // -- gen ---------------------------------------------------------------
  struct GenArgs {
    std::size_t n = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
    std::string out;
  } gen_;

  void build_gen() {
    auto* sub = app_.add_subcommand("gen", "Sample G(n, p) and write its edge list");
    sub->add_option("--n", gen_.n, "Vertex count")->required()->check(CLI::PositiveNumber);
    sub->add_option("--p", gen_.p, "Edge probability")->required()->check(CLI::Range(0.0, 1.0));
    sub->add_option("--seed", gen_.seed, "Sampling seed")->required();
    sub->add_option("--out", gen_.out, "Edge-list output file");
    subs_["gen"] = sub;
  }

  int run_gen() {
    const Graph g = sample_gnp(gen_.n, gen_.p, gen_.seed);
    nlohmann::json echo{{"n", gen_.n}, {"p", gen_.p}, {"seed", gen_.seed}, {"out", gen_.out}};
    echo_config("gen", echo);
    if (!gen_.out.empty()) save_edge_list(gen_.out, g);
    const auto prof = degree_profile(g);
    out_ << fmt::format("n={}\nedges={}\nconnected={}\ndelta_min={}\ndelta_max={}\n", g.n(), g.edge_count(),
                        is_connected(g) ? 1 : 0, prof.delta_min, prof.delta_max);
    return kOk;
  }

  // -- search / calibrate ------------------------------------------------
  struct GraphArgs {
    std::size_t n = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
    std::string graph_file;
    std::string matrix = "adj";
    std::optional<double> p0;
    std::string scaling = "nominal";
    bool raw_frame = false;
    Vertex w = 0;
  };

  void add_graph_options(CLI::App* sub, GraphArgs& a) {
    sub->add_option("--n", a.n, "Vertex count")->check(CLI::PositiveNumber);
    sub->add_option("--p", a.p, "Edge probability")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--seed", a.seed, "Sampling seed");
    sub->add_option("--graph", a.graph_file, "Read the graph from an edge-list file instead of sampling");
    sub->add_option("--matrix", a.matrix, "Search matrix")->check(CLI::IsMember({"adj", "lap", "lap-threshold"}));
    sub->add_option("--p0", a.p0, "p0 for lap-threshold constants (default n p / ln n)");
    sub->add_option("--scaling", a.scaling, "np normalization")->check(CLI::IsMember({"nominal", "mean_degree"}));
    sub->add_flag("--raw-frame", a.raw_frame, "Do not divide the search matrix by its leading eigenvalue");
    sub->add_option("--w", a.w, "Marked vertex");
  }

  struct SearchArgs {
    GraphArgs graph;
    std::optional<double> r;
    std::string calibrate;
    bool fallback = false;
    bool dense = false;
    double t_factor = std::numbers::pi / 2.0;
  } search_;

  struct CalibrateArgs {
    GraphArgs graph;
    std::string method = "both";
    bool fallback = false;
  } calibrate_;

  void build_search() {
    auto* sub = app_.add_subcommand("search", "Success probability of a single search instance");
    add_graph_options(sub, search_.graph);
    auto* r_opt = sub->add_option("--r", search_.r, "Jump parameter");
    sub->add_option("--calibrate", search_.calibrate, "Choose r by calibration")
        ->check(CLI::IsMember({"eq3", "empirical"}))
        ->excludes(r_opt);
    sub->add_flag("--fallback", search_.fallback, "Fall back to empirical when eq3 finds no root");
    sub->add_flag("--dense", search_.dense, "Diagonalize H directly instead of the rank-one update");
    sub->add_option("--t-factor", search_.t_factor, "Measurement time t = factor * sqrt(n)")
        ->check(CLI::NonNegativeNumber);
    subs_["search"] = sub;
  }

  void build_calibrate() {
    auto* sub = app_.add_subcommand("calibrate", "Jump parameter r for a marked vertex");
    add_graph_options(sub, calibrate_.graph);
    sub->add_option("--method", calibrate_.method, "Calibration method")
        ->check(CLI::IsMember({"eq3", "empirical", "both"}));
    sub->add_flag("--fallback", calibrate_.fallback, "Fall back to empirical when eq3 finds no root");
    subs_["calibrate"] = sub;
  }

  std::shared_ptr<const SearchBasis> resolve_basis(const GraphArgs& a, nlohmann::json& echo) const {
    Graph g;
    if (!a.graph_file.empty()) {
      g = load_edge_list(a.graph_file);
    } else {
      qwsearch::detail::require(a.n >= 1, "--n is required unless --graph is given");
      g = sample_gnp(a.n, a.p, a.seed);
    }
    double p0 = 0.0;
    if (a.matrix == "lap-threshold") {
      p0 = a.p0 ? *a.p0 : static_cast<double>(g.n()) * g.p_nominal() / std::log(static_cast<double>(g.n()));
    }
    SearchOptions opts;
    opts.unit_frame = !a.raw_frame;
    opts.scaling = a.scaling == "nominal" ? Scaling::nominal : Scaling::mean_degree;
    qwsearch::detail::require(a.w < g.n(), fmt::format("--w {} out of range for n = {}", a.w, g.n()));
    echo["n"] = g.n();
    echo["p"] = g.p_nominal();
    echo["seed"] = g.seed();
    echo["graph"] = a.graph_file;
    echo["matrix"] = a.matrix;
    if (a.matrix == "lap-threshold") echo["p0"] = p0;
    echo["scaling"] = a.scaling;
    echo["unit_frame"] = opts.unit_frame;
    echo["w"] = a.w;
    return make_search_basis(std::move(g), parse_kind(a.matrix, p0 > 1.0 ? p0 : 2.0), opts);
  }

  static void require_gap(const SearchBasis& basis) {
    if (!basis.gap_ok())
      throw NumericalError(fmt::format("spectral gap parameter c = {} is not below 1; calibration undefined", basis.c));
  }

  int run_search() {
    nlohmann::json echo;
    const auto basis = resolve_basis(search_.graph, echo);
    echo["t_factor"] = search_.t_factor;
    echo["calibrate"] = search_.calibrate.empty() ? "none" : search_.calibrate;
    if (search_.r) echo["r"] = *search_.r;
    echo["dense"] = search_.dense;
    echo_config("search", echo);

    const Vertex w = search_.graph.w;
    double r = search_.r.value_or(0.0);
    std::string note;
    if (search_.calibrate == "eq3") {
      require_gap(*basis);
      const auto cal = calibrate_r_eq3(basis->spectrum, w);
      if (cal.found) {
        r = cal.r;
      } else if (search_.fallback) {
        r = calibrate_r_empirical(*basis, w).r;
        note = "eq3_fallback";
      } else {
        throw NumericalError("eq3 calibration: " + cal.note);
      }
    } else if (search_.calibrate == "empirical") {
      require_gap(*basis);
      r = calibrate_r_empirical(*basis, w).r;
    }

    const auto setup = make_search_setup(basis, r, w, search_.dense ? Propagation::dense : Propagation::rank_one);
    const double sqrt_n = std::sqrt(static_cast<double>(basis->n()));
    const double t = search_.t_factor * sqrt_n;
    const double p_t = success_probability(setup, t);
    const EmpiricalCalibrationOptions scan{};
    auto peak = peak_scan(setup, std::max(scan.t_max_factor * sqrt_n, t), scan.t_steps);
    if (p_t > peak.p) peak = {t, p_t};
    const double bound = basis->gap_ok() ? (1.0 - basis->c) / (1.0 + basis->c) : 0.0;
    out_ << fmt::format("n={}\nw={}\nc={}\nbound={}\nr={}\nt={}\np_at_t={}\np_peak={}\nt_peak={}\n", basis->n(), w,
                        basis->c, bound, r, t, p_t, peak.p, peak.t);
    if (!note.empty()) out_ << "note=" << note << '\n';
    return kOk;
  }

  int run_calibrate() {
    nlohmann::json echo;
    const auto basis = resolve_basis(calibrate_.graph, echo);
    echo["method"] = calibrate_.method;
    echo_config("calibrate", echo);
    require_gap(*basis);
    const Vertex w = calibrate_.graph.w;
    const auto [lo, hi] = admissible_r(basis->c);
    out_ << fmt::format("c={}\nr_min={}\nr_max={}\n", basis->c, lo, hi);
    int code = kOk;
    if (calibrate_.method != "empirical") {
      const auto cal = calibrate_r_eq3(basis->spectrum, w);
      out_ << fmt::format("eq3_found={}\n", cal.found ? 1 : 0);
      if (cal.found) {
        out_ << fmt::format("eq3_r={}\neq3_residual={}\n", cal.r, cal.residual);
      } else {
        out_ << "eq3_note=" << cal.note << '\n';
        if (calibrate_.method == "eq3" && !calibrate_.fallback) {
          err_ << "numerical failure: eq3 calibration: " << cal.note << '\n';
          code = kNumerical;
        }
      }
    }
    if (calibrate_.method != "eq3" || (calibrate_.fallback && code == kOk)) {
      const auto cal = calibrate_r_empirical(*basis, w);
      out_ << fmt::format("empirical_r={}\nempirical_peak={}\n", cal.r, cal.peak);
    }
    return code;
  }

  // -- fig1 --------------------------------------------------------------
  struct Fig1Args {
    double p0_min = 1.1;
    double p0_max = 10.0;
    std::size_t points = 90;
    std::string out;
  } fig1_;

  void build_fig1() {
    auto* sub = app_.add_subcommand("fig1", "Success-probability bound p_bound(p0) over a p0 grid");
    sub->add_option("--p0-min", fig1_.p0_min, "Smallest p0 (> 1)");
    sub->add_option("--p0-max", fig1_.p0_max, "Largest p0");
    sub->add_option("--points", fig1_.points, "Grid points")->check(CLI::PositiveNumber);
    sub->add_option("--out", fig1_.out, "Output directory")->required();
    subs_["fig1"] = sub;
  }

  int run_fig1() {
    qwsearch::detail::require(fig1_.p0_max >= fig1_.p0_min, "--p0-max must not be below --p0-min");
    echo_config("fig1", {{"p0_min", fig1_.p0_min}, {"p0_max", fig1_.p0_max}, {"points", fig1_.points},
                         {"out", fig1_.out}});
    const auto curve = figure1_curve(linspace(fig1_.p0_min, fig1_.p0_max, fig1_.points));
    const auto dir = detail::prepare_out_dir(fig1_.out);
    write_csv((dir / "curve.csv").string(), curve);
    out_ << fmt::format("points={}\np_bound_first={}\np_bound_last={}\ncurve={}\n", curve.size(),
                        curve.front().p_bound, curve.back().p_bound, (dir / "curve.csv").string());
    return kOk;
  }

  // -- campaign-style subcommands ---------------------------------------
  detail::CampaignFlags fig2_, bounds_, infnorm_, lambda1_;

  void build_campaign(const std::string& name, const std::string& help, detail::CampaignFlags& f) {
    auto* sub = app_.add_subcommand(name, help);
    auto add = [&](const std::string& flag, auto& target, const std::string& text) {
      f.opts[flag] = sub->add_option("--" + flag, target, text);
      return f.opts[flag];
    };
    if (name == "fig2" || name == "infnorm-study") {
      add("sizes", f.sizes, "Comma-separated vertex counts")->delimiter(',');
    } else {
      add("n", f.n, "Vertex count")->check(CLI::PositiveNumber);
    }
    if (name == "fig2") {
      add("p0", f.p0, "p = p0 ln(n) / n")->check(CLI::PositiveNumber);
      add("matrix", f.matrix, "Search matrix")->check(CLI::IsMember({"adj", "lap", "lap-threshold"}));
      add("calibration", f.calibration, "r calibration")->check(CLI::IsMember({"none", "eq3", "empirical"}));
      add("t-factor", f.t_factor, "Measurement time t = factor * sqrt(n)")->check(CLI::NonNegativeNumber);
    } else {
      add("p", f.p, "Edge probability")->check(CLI::Range(0.0, 1.0));
    }
    add("trials", f.trials, "Trials per size")->check(CLI::PositiveNumber);
    add("seed", f.seed, "Master seed");
    add("out", f.out, "Output directory");
    subs_[name] = sub;
  }

  CampaignConfig resolve_campaign(const std::string& name, const detail::CampaignFlags& f) {
    CampaignConfig cfg;
    if (name == "fig2") {
      cfg.sizes = {128, 256, 512, 1024};
      cfg.p_rule = {ProbabilityRule::Kind::threshold, 2.0};
      cfg.trials_per_size = 30;
    } else if (name == "infnorm-study") {
      cfg = spectral_study_config({128, 256, 512, 1024, 2048}, 0.5, 20, 1, 1);
    } else if (name == "lambda1-study") {
      cfg = spectral_study_config({1500}, 0.1, 200, 1, 1);
    } else {
      cfg = spectral_study_config({512}, 0.3, 10, 1, 1);
    }
    if (!config_path_.empty()) merge_config(cfg, detail::load_json(config_path_));

    if (f.given("sizes")) cfg.sizes = f.sizes;
    if (f.given("n")) cfg.sizes = {f.n};
    if (f.given("p")) cfg.p_rule = {ProbabilityRule::Kind::fixed, f.p};
    if (f.given("p0")) cfg.p_rule = {ProbabilityRule::Kind::threshold, f.p0};
    if (f.given("matrix")) cfg.kind = f.matrix;
    if (f.given("calibration")) cfg.calibration = parse_calibration(f.calibration);
    if (f.given("t-factor")) cfg.t_factor = f.t_factor;
    if (f.given("trials")) cfg.trials_per_size = f.trials;
    if (f.given("seed")) cfg.master_seed = f.seed;
    if (f.given("out")) cfg.output_path = f.out;
    if (app_.get_option("--threads")->count() > 0) cfg.threads = threads_;
    cfg.validate();
    echo_config(name, nlohmann::json(cfg));
    return cfg;
  }

  int run_fig2() {
    const auto cfg = resolve_campaign("fig2", fig2_);
    const auto dir = detail::prepare_out_dir(cfg.output_path);
    const auto records = run_campaign(cfg, detail::progress_printer(err_, quiet_, "fig2"));
    const auto summary = aggregate(records);
    write_csv((dir / "trials.csv").string(), records);
    write_csv((dir / "summary.csv").string(), summary);
    write_manifest((dir / "manifest.json").string(),
                   campaign_manifest(cfg, {{"trials", "trials.csv"}, {"summary", "summary.csv"}}));
    out_ << "n,bound_mean,p_mean,bound_min,p_min\n";
    for (const auto& s : summary)
      out_ << fmt::format("{},{:.4f},{:.4f},{:.4f},{:.4f}\n", s.n, s.bound_mean, s.p_mean, s.bound_min, s.p_min);
    return kOk;
  }

  static double single_fixed_p(const CampaignConfig& cfg, const std::string& name) {
    qwsearch::detail::require(cfg.p_rule.kind == ProbabilityRule::Kind::fixed,
                              name + ": needs a fixed edge probability");
    return cfg.p_rule.value;
  }

  int run_bounds() {
    const auto cfg = resolve_campaign("bounds", bounds_);
    qwsearch::detail::require(cfg.sizes.size() == 1, "bounds: needs a single size");
    const double p = single_fixed_p(cfg, "bounds");
    const auto dir = detail::prepare_out_dir(cfg.output_path);
    const auto rows = bounds_sweep(cfg.sizes[0], p, cfg.trials_per_size, cfg.master_seed, cfg.threads,
                                   detail::progress_printer(err_, quiet_, "bounds"));
    write_csv((dir / "bounds.csv").string(), rows);
    write_manifest((dir / "manifest.json").string(), campaign_manifest(cfg, {{"bounds", "bounds.csv"}}));
    std::map<std::string, std::pair<std::size_t, std::size_t>> tally;
    for (const auto& row : rows) {
      auto& [holds, total] = tally[row.report.name];
      holds += row.report.holds ? 1 : 0;
      ++total;
    }
    out_ << "check,holds,trials\n";
    for (const auto& [check, t] : tally) out_ << fmt::format("{},{},{}\n", check, t.first, t.second);
    return kOk;
  }

  int run_infnorm() {
    const auto cfg = resolve_campaign("infnorm-study", infnorm_);
    const double p = single_fixed_p(cfg, "infnorm-study");
    const auto dir = detail::prepare_out_dir(cfg.output_path);
    const auto study = infnorm_study(cfg.sizes, p, cfg.trials_per_size, cfg.master_seed, cfg.threads,
                                     detail::progress_printer(err_, quiet_, "infnorm-study"));
    write_csv((dir / "trials.csv").string(), study.records);
    auto manifest = campaign_manifest(cfg, {{"trials", "trials.csv"}});
    for (const auto& m : study.medians)
      manifest["medians"].push_back({{"n", m.n}, {"median_infnorm_scaled", m.median}, {"count", m.count}});
    write_manifest((dir / "manifest.json").string(), manifest);
    out_ << "n,median_infnorm_scaled\n";
    for (const auto& m : study.medians) out_ << fmt::format("{},{}\n", m.n, m.median);
    return kOk;
  }

  int run_lambda1() {
    const auto cfg = resolve_campaign("lambda1-study", lambda1_);
    qwsearch::detail::require(cfg.sizes.size() == 1, "lambda1-study: needs a single size");
    const double p = single_fixed_p(cfg, "lambda1-study");
    const auto dir = detail::prepare_out_dir(cfg.output_path);
    const auto study = lambda1_distribution_study(cfg.sizes[0], p, cfg.trials_per_size, cfg.master_seed,
                                                  cfg.threads, detail::progress_printer(err_, quiet_, "lambda1-study"));
    write_csv((dir / "trials.csv").string(), study.records);
    auto manifest = campaign_manifest(cfg, {{"trials", "trials.csv"}});
    manifest["summary"] = {{"mean_z", study.summary.mean_z},
                           {"sd_z", study.summary.sd_z},
                           {"ks_distance", study.summary.ks_distance}};
    write_manifest((dir / "manifest.json").string(), manifest);
    out_ << fmt::format("mean_z={}\nsd_z={}\nks_distance={}\n", study.summary.mean_z, study.summary.sd_z,
                        study.summary.ks_distance);
    return kOk;
  }

  // -- dispatch ----------------------------------------------------------
  int execute() {
    static const std::vector<std::string> campaign_like{"fig2", "bounds", "infnorm-study", "lambda1-study"};
    std::string chosen;
    for (const auto& [name, sub] : subs_)
      if (sub->parsed()) chosen = name;
    if (config_opt_->count() > 0 &&
        std::find(campaign_like.begin(), campaign_like.end(), chosen) == campaign_like.end())
      throw InvalidArgument("--config applies only to fig2, bounds, infnorm-study and lambda1-study");

    if (chosen == "gen") return run_gen();
    if (chosen == "search") return run_search();
    if (chosen == "calibrate") return run_calibrate();
    if (chosen == "fig1") return run_fig1();
    if (chosen == "fig2") return run_fig2();
    if (chosen == "bounds") return run_bounds();
    if (chosen == "infnorm-study") return run_infnorm();
    if (chosen == "lambda1-study") return run_lambda1();
    throw InvalidArgument("no subcommand given");
  }

  void echo_config(const std::string& command, nlohmann::json resolved) {
    nlohmann::json j{{"command", command}, {"config", std::move(resolved)}};
    err_ << "resolved config: " << j.dump() << '\n';
  }

  std::ostream& out_;
  std::ostream& err_;
  CLI::App app_;
  std::map<std::string, CLI::App*> subs_;
  unsigned threads_ = 1;
  bool quiet_ = false;
  std::string config_path_;
  CLI::Option* config_opt_ = nullptr;
};

inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Cli cli(out, err);
  return cli.run(argc, argv);
}

inline int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"qwsearch"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace qwsearch::cli
