#pragma once

// Continuous-time quantum spatial search on a graph.
//
// The walk starts in the uniform superposition |s> and evolves under
// H = (1 + r) M + |w><w|, where M is a rescaled adjacency or Laplacian matrix
// whose leading eigenvalue is 1. The success probability at time t is
// P_w(t) = |<w| exp(-iHt) |s>|^2. Because H, |s> and |w> are real this equals
// the probability under exp(+iHt), so the sign convention -M - |w><w| gives
// identical numbers.

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "qwsearch/error.hpp"
#include "qwsearch/graph.hpp"
#include "qwsearch/lambertw.hpp"
#include "qwsearch/rank_one.hpp"
#include "qwsearch/spectral.hpp"

namespace qwsearch {

// ---------------------------------------------------------------------------
// Search matrices

struct AdjacencyNormalized {};   ///< A / (np)
struct LaplacianComplement {};   ///< I - L / (np)
struct LaplacianThreshold {      ///< I - 2L / ((a + b) ln n)
  ThresholdConstants constants;
};

using MatrixKind = std::variant<AdjacencyNormalized, LaplacianComplement, LaplacianThreshold>;

inline std::string kind_name(const MatrixKind& kind) {
  struct {
    std::string operator()(const AdjacencyNormalized&) const { return "adj"; }
    std::string operator()(const LaplacianComplement&) const { return "lap"; }
    std::string operator()(const LaplacianThreshold&) const { return "lap-threshold"; }
  } visitor;
  return std::visit(visitor, kind);
}

/// Parses "adj", "lap" or "lap-threshold"; the threshold kind needs p0.
inline MatrixKind parse_kind(const std::string& name, double p0 = 2.0) {
  if (name == "adj") return AdjacencyNormalized{};
  if (name == "lap") return LaplacianComplement{};
  if (name == "lap-threshold") return LaplacianThreshold{threshold_constants(p0)};
  throw InvalidArgument("unknown matrix kind '" + name + "' (expected adj, lap, lap-threshold)");
}

enum class Scaling {
  nominal,      ///< n * p_nominal
  mean_degree,  ///< 2|E| / n
};

inline double scale_np(const Graph& g, Scaling scaling) {
  const double np = scaling == Scaling::nominal
                        ? static_cast<double>(g.n()) * g.p_nominal()
                        : 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(g.n());
  detail::require(np > 0.0, "search matrix: n*p must be positive (zero edge probability)");
  return np;
}

inline SymmetricMatrix search_matrix(const Graph& g, const MatrixKind& kind,
                                     Scaling scaling = Scaling::nominal) {
  const auto n = static_cast<Eigen::Index>(g.n());
  if (std::holds_alternative<AdjacencyNormalized>(kind)) {
    return (1.0 / scale_np(g, scaling)) * adjacency(g);
  }
  if (std::holds_alternative<LaplacianComplement>(kind)) {
    return SymmetricMatrix::identity(n) - (1.0 / scale_np(g, scaling)) * laplacian(g);
  }
  const auto& c = std::get<LaplacianThreshold>(kind).constants;
  detail::require(g.n() >= 3, "LaplacianThreshold needs n >= 3");
  detail::require(c.a + c.b > 0.0, "LaplacianThreshold needs threshold constants");
  const double gamma = 2.0 / ((c.a + c.b) * std::log(static_cast<double>(g.n())));
  return SymmetricMatrix::identity(n) - gamma * laplacian(g);
}

/// max(|lambda_2|, |lambda_n|) / lambda_1.
inline double spectral_gap_c(const Eigen::VectorXd& eigenvalues_desc) {
  detail::require(eigenvalues_desc.size() >= 1, "spectral_gap_c: empty spectrum");
  const double top = eigenvalues_desc(0);
  if (!(top > 0.0)) {
    throw NumericalError(fmt::format("spectral_gap_c: leading eigenvalue {} is not positive", top));
  }
  const Eigen::Index n = eigenvalues_desc.size();
  if (n == 1) return 0.0;
  return std::max(std::abs(eigenvalues_desc(1)), std::abs(eigenvalues_desc(n - 1))) / top;
}

inline double spectral_gap_c(const SpectralDecomposition& d) {
  return spectral_gap_c(d.eigenvalues);
}

/// Admissible jump parameters [-c/(1+c), c/(1-c)].
inline std::pair<double, double> admissible_r(double c) {
  detail::require(c >= 0.0 && c < 1.0, fmt::format("admissible_r: need 0 <= c < 1, got {}", c));
  return {-c / (1.0 + c), c / (1.0 - c)};
}

/// Spectrum of (1 + r) m + |w><w|.
inline SpectralDecomposition assemble_hamiltonian(const SymmetricMatrix& m, double r, Vertex w) {
  detail::require(static_cast<Eigen::Index>(w) < m.size(), "assemble_hamiltonian: w out of range");
  Eigen::MatrixXd h = (1.0 + r) * m.dense();
  h(w, w) += 1.0;
  return eig_sym(SymmetricMatrix(std::move(h)));
}

/// exp(-iHt) |psi0> from the spectrum of H.
inline Eigen::VectorXcd evolve(const SpectralDecomposition& h, double t,
                               const Eigen::VectorXd& psi0) {
  detail::require(h.complete(), "evolve: need a complete decomposition");
  detail::require(psi0.size() == h.dimension(), "evolve: dimension mismatch");
  const Eigen::VectorXd coeff = h.eigenvectors.transpose() * psi0;
  Eigen::VectorXcd phased(coeff.size());
  for (Eigen::Index k = 0; k < coeff.size(); ++k)
    phased(k) = coeff(k) * std::polar(1.0, -h.eigenvalues(k) * t);
  return h.eigenvectors.cast<std::complex<double>>() * phased;
}

inline Eigen::VectorXcd evolve(const SpectralDecomposition& h, double t) {
  return evolve(h, t, uniform_superposition(h.dimension()));
}

/// Modes of <w| exp(-iHt) |s> read off a dense Hamiltonian spectrum.
inline ModeExpansion dense_modes(const SpectralDecomposition& h, Vertex w) {
  const Eigen::VectorXd s_coords = h.eigenvectors.transpose() * uniform_superposition(h.dimension());
  ModeExpansion m;
  m.frequencies.assign(h.eigenvalues.data(), h.eigenvalues.data() + h.eigenvalues.size());
  m.weights.resize(static_cast<std::size_t>(h.count()));
  for (Eigen::Index k = 0; k < h.count(); ++k)
    m.weights[static_cast<std::size_t>(k)] = h.eigenvectors(w, k) * s_coords(k);
  return m;
}

/// Approximate success probability for |lambda_1 - 1| <= delta.
inline double predicted_probability(double delta, std::size_t n, double t) {
  detail::require(n >= 1, "predicted_probability: n must be positive");
  const double nd = static_cast<double>(n);
  const double s = std::sin(std::sqrt(delta * delta / 4.0 + 1.0 / nd) * t);
  return s * s / (1.0 + nd * delta * delta / 4.0);
}

inline double default_measurement_time(std::size_t n, double factor = std::numbers::pi / 2.0) {
  return factor * std::sqrt(static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// Setups

struct SearchOptions {
  /// Divide M by its measured leading eigenvalue so that lambda_1 = 1.
  bool unit_frame = true;
  Scaling scaling = Scaling::nominal;
};

/// Everything about a search that does not depend on (r, w).
struct SearchBasis {
  Graph graph;
  MatrixKind kind;
  SearchOptions options;
  SymmetricMatrix matrix;           ///< M_G, in the unit-eigenvalue frame when enabled
  double lambda1_raw = 0.0;         ///< leading eigenvalue before normalization
  SpectralDecomposition spectrum;   ///< of `matrix`
  Eigen::VectorXd s_coords;         ///< U^T |s>
  double c = 0.0;                   ///< spectral gap parameter

  std::size_t n() const noexcept { return graph.n(); }
  bool gap_ok() const noexcept { return c < 1.0; }
};

inline std::shared_ptr<const SearchBasis> make_search_basis(Graph g, MatrixKind kind,
                                                            SearchOptions options = {}) {
  auto basis = std::make_shared<SearchBasis>();
  basis->matrix = search_matrix(g, kind, options.scaling);
  basis->spectrum = eig_sym(basis->matrix);
  basis->lambda1_raw = basis->spectrum.eigenvalues(0);
  if (options.unit_frame) {
    const double top = basis->lambda1_raw;
    if (!(top > 0.0)) throw NumericalError("unit-eigenvalue frame: leading eigenvalue is not positive");
    basis->matrix = (1.0 / top) * basis->matrix;
    basis->spectrum.eigenvalues /= top;
  }
  basis->s_coords = basis->spectrum.eigenvectors.transpose() * uniform_superposition(
                                                                   static_cast<Eigen::Index>(g.n()));
  basis->c = spectral_gap_c(basis->spectrum);
  basis->graph = std::move(g);
  basis->kind = std::move(kind);
  basis->options = options;
  return basis;
}

enum class Propagation {
  rank_one,  ///< secular equation on the basis spectrum, O(n^2)
  dense,     ///< full eigendecomposition of H, O(n^3)
};

struct SearchSetup {
  std::shared_ptr<const SearchBasis> basis;
  double r = 0.0;
  Vertex w = 0;
  std::optional<SpectralDecomposition> hamiltonian_spectrum;  ///< dense propagation only
  ModeExpansion modes;

  std::size_t n() const noexcept { return basis->n(); }
  double c() const noexcept { return basis->c; }
};

inline ModeExpansion search_modes(const SearchBasis& basis, double r, Vertex w) {
  return rank_one_modes(basis.spectrum.eigenvalues, basis.spectrum.eigenvectors, basis.s_coords,
                        1.0 + r, static_cast<Eigen::Index>(w));
}

/// Builds a setup; when c < 1 the jump parameter must be admissible.
inline SearchSetup make_search_setup(std::shared_ptr<const SearchBasis> basis, double r, Vertex w,
                                     Propagation propagation = Propagation::rank_one) {
  detail::require(basis != nullptr, "make_search_setup: null basis");
  detail::require(w < basis->n(), fmt::format("marked vertex {} out of range", w));
  if (basis->gap_ok()) {
    const auto [lo, hi] = admissible_r(basis->c);
    constexpr double kSlack = 1e-12;
    detail::require(r >= lo - kSlack && r <= hi + kSlack,
                    fmt::format("r = {} outside admissible [{}, {}]", r, lo, hi));
  }
  SearchSetup setup{basis, r, w, std::nullopt, {}};
  if (propagation == Propagation::dense) {
    setup.hamiltonian_spectrum = assemble_hamiltonian(basis->matrix, r, w);
    setup.modes = dense_modes(*setup.hamiltonian_spectrum, w);
  } else {
    setup.modes = search_modes(*basis, r, w);
  }
  return setup;
}

inline std::complex<double> marked_amplitude(const SearchSetup& setup, double t) {
  return setup.modes.amplitude(t);
}

inline double success_probability(const SearchSetup& setup, double t) {
  return setup.modes.probability(t);
}

// ---------------------------------------------------------------------------
// Peak search

struct Peak {
  double t = 0.0;
  double p = 0.0;
};

namespace detail {

inline constexpr double kInvPhi = 0.6180339887498949;

/// Golden-section maximization of f on [lo, hi]; returns (argmax, max).
template <typename F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, int iterations) {
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iterations; ++i) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 >= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace detail

/// Maximum of prob(t) over a uniform grid on [0, t_max], refined by a local
/// golden-section search around the best grid point. Ties within 1e-15 keep
/// the smallest t.
template <typename Prob>
  requires std::invocable<Prob&, double>
Peak peak_scan(Prob&& prob, double t_max, int steps, int refine_iterations = 40) {
  detail::require(steps >= 2, "peak_scan: need at least 2 grid points");
  detail::require(t_max >= 0.0, "peak_scan: t_max must be non-negative");
  constexpr double kTie = 1e-15;
  const double dt = t_max / (steps - 1);
  Peak best{0.0, prob(0.0)};
  int best_i = 0;
  for (int i = 1; i < steps; ++i) {
    const double t = dt * i;
    const double p = prob(t);
    if (p > best.p + kTie) {
      best = {t, p};
      best_i = i;
    }
  }
  if (dt > 0.0 && refine_iterations > 0) {
    const double lo = dt * std::max(0, best_i - 1);
    const double hi = dt * std::min(steps - 1, best_i + 1);
    const auto [t, p] = detail::golden_max(prob, lo, hi, refine_iterations);
    if (p > best.p + kTie) best = {t, p};
  }
  return best;
}

inline Peak peak_scan(const SearchSetup& setup, double t_max, int steps) {
  return peak_scan([&](double t) { return success_probability(setup, t); }, t_max, steps);
}

// ---------------------------------------------------------------------------
// Calibration of r

struct Calibration {
  double r = 0.0;
  bool found = false;
  double peak = 0.0;      ///< empirical calibration: peak probability at r
  double residual = 0.0;  ///< eq3 calibration: |lhs - rhs| at r
  std::string note;
};

/// Root of
///     sum_{i>=2} q_i / ((1 + r) lambda_i - r) = sum_{i>=2} q_i,  q_i = <w|lambda_i>^2,
/// inside [-c/(1+c), c/(1-c)]. The left side has a pole at every
/// r_i = lambda_i / (1 - lambda_i) with q_i > 0 and is increasing between
/// poles, so every pole-free sub-interval holds at most one root. Sub-intervals
/// are tried in order of distance from r = 0 and the first root meeting the
/// residual bound 1e-10 * sum q_i is returned.
inline Calibration calibrate_r_eq3(const SpectralDecomposition& base, Vertex w) {
  detail::require(base.complete(), "calibrate_r_eq3: need a complete decomposition");
  detail::require(static_cast<Eigen::Index>(w) < base.dimension(), "calibrate_r_eq3: w out of range");
  const Eigen::Index n = base.count();
  Calibration out;

  const double c = spectral_gap_c(base);
  if (!(c < 1.0)) {
    out.note = fmt::format("spectral gap parameter c = {} is not below 1", c);
    return out;
  }
  const auto [lo, hi] = admissible_r(c);

  std::vector<double> lambda, q;
  double total = 0.0;
  for (Eigen::Index i = 1; i < n; ++i) {
    const double qi = base.eigenvectors(w, i) * base.eigenvectors(w, i);
    lambda.push_back(base.eigenvalues(i) / base.eigenvalues(0));
    q.push_back(qi);
    total += qi;
  }
  if (total <= 0.0) {
    out.found = true;
    out.note = "marked vertex has no weight outside the leading eigenvector";
    return out;
  }

  auto lhs_minus_rhs = [&](double r) {
    double s = 0.0;
    for (std::size_t i = 0; i < lambda.size(); ++i) s += q[i] / ((1.0 + r) * lambda[i] - r);
    return s - total;
  };

  // Breakpoints: admissible ends plus poles of non-negligible weight.
  struct Break {
    double r;
    bool pole;
  };
  std::vector<Break> breaks{{lo, false}, {hi, false}};
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (q[i] <= 1e-14 * total || lambda[i] >= 1.0) continue;
    const double pole = lambda[i] / (1.0 - lambda[i]);
    if (pole >= lo && pole <= hi) breaks.push_back({pole, true});
  }
  std::sort(breaks.begin(), breaks.end(), [](const Break& a, const Break& b) {
    return a.r < b.r || (a.r == b.r && a.pole > b.pole);
  });
  // Collapse coincident breakpoints; a pole dominates an end point.
  std::vector<Break> merged;
  for (const auto& b : breaks) {
    if (!merged.empty() && b.r == merged.back().r) {
      merged.back().pole = merged.back().pole || b.pole;
    } else {
      merged.push_back(b);
    }
  }

  struct Bracket {
    double a, b;
  };
  std::vector<Bracket> candidates;
  for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
    const auto& left = merged[i];
    const auto& right = merged[i + 1];
    // Just right of a pole the function is -inf, just left of one +inf.
    if (!left.pole && lhs_minus_rhs(left.r) > 0.0) continue;
    if (!right.pole && lhs_minus_rhs(right.r) < 0.0) continue;
    candidates.push_back({left.r, right.r});
  }
  auto distance_to_zero = [](const Bracket& br) {
    if (br.a <= 0.0 && br.b >= 0.0) return 0.0;
    return std::min(std::abs(br.a), std::abs(br.b));
  };
  std::stable_sort(candidates.begin(), candidates.end(), [&](const Bracket& x, const Bracket& y) {
    return distance_to_zero(x) < distance_to_zero(y);
  });

  const double tolerance = 1e-10 * total;
  double best_residual = std::numeric_limits<double>::infinity();
  for (const auto& br : candidates) {
    double a = br.a, b = br.b;
    double r = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
      r = 0.5 * (a + b);
      if (r <= a || r >= b) break;
      const double f = lhs_minus_rhs(r);
      if (f == 0.0) break;
      if (f < 0.0) a = r; else b = r;
    }
    const double residual = std::abs(lhs_minus_rhs(r));
    best_residual = std::min(best_residual, residual);
    if (residual <= tolerance) {
      out.r = r;
      out.found = true;
      out.residual = residual;
      return out;
    }
  }
  out.note = candidates.empty()
                 ? "no root in admissible interval"
                 : fmt::format("no root in admissible interval met the residual bound (best {})",
                               best_residual);
  return out;
}

struct EmpiricalCalibrationOptions {
  int grid_points = 17;
  double t_max_factor = 4.0;  ///< scan t in [0, factor * sqrt(n)]
  int t_steps = 200;
  int golden_iterations = 40;
};

/// Maximizes objective(r) over [lo, hi]: uniform grid bootstrap (plus r = 0
/// when admissible), then golden-section between the best point's neighbours.
template <typename Objective>
std::pair<double, double> maximize_over_r(Objective&& objective, double lo, double hi,
                                          const EmpiricalCalibrationOptions& opt) {
  detail::require(opt.grid_points >= 2, "calibration grid needs at least 2 points");
  std::vector<double> grid;
  for (int i = 0; i < opt.grid_points; ++i)
    grid.push_back(lo + (hi - lo) * i / (opt.grid_points - 1));
  if (lo < 0.0 && hi > 0.0) grid.push_back(0.0);
  std::sort(grid.begin(), grid.end());

  std::size_t best_i = 0;
  double best_r = grid[0], best_v = objective(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double v = objective(grid[i]);
    if (v > best_v) {
      best_v = v;
      best_r = grid[i];
      best_i = i;
    }
  }
  const double a = grid[best_i == 0 ? 0 : best_i - 1];
  const double b = grid[std::min(grid.size() - 1, best_i + 1)];
  if (b > a) {
    const auto [r, v] = detail::golden_max(objective, a, b, opt.golden_iterations);
    if (v > best_v) {
      best_r = r;
      best_v = v;
    }
  }
  return {best_r, best_v};
}

/// r maximizing the peak success probability over t in [0, 4 sqrt(n)].
inline Calibration calibrate_r_empirical(const SearchBasis& basis, Vertex w,
                                         const EmpiricalCalibrationOptions& opt = {}) {
  detail::require(w < basis.n(), "calibrate_r_empirical: w out of range");
  detail::require(basis.gap_ok(), fmt::format("calibrate_r_empirical: c = {} is not below 1", basis.c));
  const auto [lo, hi] = admissible_r(basis.c);
  const double t_max = opt.t_max_factor * std::sqrt(static_cast<double>(basis.n()));
  auto objective = [&](double r) {
    const ModeExpansion modes = search_modes(basis, r, w);
    return peak_scan([&](double t) { return modes.probability(t); }, t_max, opt.t_steps).p;
  };
  const auto [r, peak] = maximize_over_r(objective, lo, hi, opt);
  Calibration out;
  out.r = r;
  out.peak = peak;
  out.found = true;
  return out;
}

}  // namespace qwsearch
