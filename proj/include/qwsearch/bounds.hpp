#pragma once

// Numerical checks of the spectral concentration inequalities for G(n, p):
// operator-norm deviation of A, eigenvalue bands, degree concentration, the
// overlap bound on alpha = <s|lambda_1>, Laplacian norm and algebraic
// connectivity, and the degree extremes near the connectivity threshold.
//
// Natural logarithms throughout. Degenerate p (0 or 1) never throws; such
// rows are marked report_only.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "qwsearch/error.hpp"
#include "qwsearch/graph.hpp"
#include "qwsearch/lambertw.hpp"
#include "qwsearch/spectral.hpp"

namespace qwsearch {

struct BoundReport {
  static constexpr double kSlack = 1e-12;

  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;        ///< lhs <= rhs + 1e-12
  bool report_only = false;  ///< parameters outside the inequality's regime
  std::map<std::string, double> aux;

  static BoundReport make(std::string name, double lhs, double rhs) {
    BoundReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.holds = lhs <= rhs + kSlack;
    return r;
  }
};

namespace detail {

inline double nominal_np(const Graph& g) { return static_cast<double>(g.n()) * g.p_nominal(); }

inline bool interior_p(const Graph& g) { return g.p_nominal() > 0.0 && g.p_nominal() < 1.0; }

inline double log_n(const Graph& g) { return std::log(static_cast<double>(g.n())); }

// p (J - I)
inline SymmetricMatrix expected_adjacency(std::size_t n, double p) {
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd e = Eigen::MatrixXd::Constant(m, m, p);
  e.diagonal().setZero();
  return SymmetricMatrix(std::move(e));
}

// (n - 1) p on the diagonal, -p elsewhere.
inline SymmetricMatrix expected_laplacian(std::size_t n, double p) {
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd e = Eigen::MatrixXd::Constant(m, m, -p);
  e.diagonal().setConstant(static_cast<double>(n - 1) * p);
  return SymmetricMatrix(std::move(e));
}

inline double extreme_abs(const Eigen::VectorXd& eig_desc) {
  return std::max(std::abs(eig_desc(0)), std::abs(eig_desc(eig_desc.size() - 1)));
}

}  // namespace detail

/// ||A - E(A)|| <= sqrt(8 np ln n).
inline BoundReport check_operator_deviation(const Graph& g) {
  const double np = detail::nominal_np(g);
  const SymmetricMatrix dev = adjacency(g) - detail::expected_adjacency(g.n(), g.p_nominal());
  auto rep = BoundReport::make("operator_deviation", detail::extreme_abs(eigenvalues_sym(dev)),
                               std::sqrt(8.0 * np * detail::log_n(g)));
  rep.report_only = !detail::interior_p(g);
  return rep;
}

struct EigenvalueBands {
  BoundReport leading;  ///< |lambda_1 - np| <= sqrt(8 np ln(sqrt(2) n))
  BoundReport bulk;     ///< max_{i>=2} |lambda_i| <= same
};

inline EigenvalueBands check_eigenvalue_bands(const Graph& g) {
  const double np = detail::nominal_np(g);
  const double rhs = std::sqrt(8.0 * np * std::log(std::sqrt(2.0) * static_cast<double>(g.n())));
  const Eigen::VectorXd ev = eigenvalues_sym(adjacency(g));
  const Eigen::Index n = ev.size();
  const double bulk = n >= 2 ? std::max(std::abs(ev(1)), std::abs(ev(n - 1))) : 0.0;
  EigenvalueBands out{BoundReport::make("lambda1_band", std::abs(ev(0) - np), rhs),
                      BoundReport::make("bulk_band", bulk, rhs)};
  out.leading.aux["lambda1"] = ev(0);
  out.leading.report_only = out.bulk.report_only = !detail::interior_p(g);
  return out;
}

/// max_v |deg(v) - np| <= 2 sqrt(ln(n) np (1 - p)).
inline BoundReport check_degree_concentration(const Graph& g) {
  const double np = detail::nominal_np(g);
  const auto prof = degree_profile(g);
  double worst = 0.0;
  for (std::size_t d : prof.degrees) worst = std::max(worst, std::abs(static_cast<double>(d) - np));
  auto rep = BoundReport::make("degree_concentration", worst,
                               2.0 * std::sqrt(detail::log_n(g) * np * (1.0 - g.p_nominal())));
  rep.aux["delta_min"] = static_cast<double>(prof.delta_min);
  rep.aux["delta_max"] = static_cast<double>(prof.delta_max);
  rep.report_only = !detail::interior_p(g);
  return rep;
}

/// 1 - 16 / sqrt(np / ln n); requires np > ln n.
inline double alpha_lower_bound(std::size_t n, double p) {
  const double np = static_cast<double>(n) * p;
  const double ln_n = std::log(static_cast<double>(n));
  detail::require(np > ln_n, fmt::format("alpha_lower_bound: np = {} must exceed ln n = {}", np, ln_n));
  return 1.0 - 16.0 / std::sqrt(np / ln_n);
}

/// Compares the measured overlap alpha = <s|lambda_1> of the Perron vector
/// against alpha_lower_bound: lhs = bound, rhs = alpha.
inline BoundReport check_alpha(const Graph& g) {
  const auto top = top_eigenpairs(adjacency(g), std::min<Eigen::Index>(2, g.n()));
  const auto pv = principal_vector(top);
  const double alpha = overlap_split(pv.vector).alpha;
  const double np = detail::nominal_np(g);
  const bool in_regime = np > detail::log_n(g);
  auto rep = BoundReport::make("alpha", in_regime ? alpha_lower_bound(g.n(), g.p_nominal())
                                                  : -std::numeric_limits<double>::infinity(),
                               alpha);
  rep.aux["perron_ok"] = pv.ok() ? 1.0 : 0.0;
  rep.report_only = !in_regime || !pv.ok();
  return rep;
}

/// Quantities of the entrywise argument: d and u bracket the normalized
/// degrees, l is the power applied to A / lambda_1, and c_const = l / y with
/// y = ln n / ln(sqrt(np / ln n) / 4) is the factor that rounds y up to l.
struct DulQuantities {
  double d = 0.0;
  double u = 0.0;
  long l = 0;
  double c_const = 0.0;
};

inline DulQuantities dul_quantities(std::size_t n, double p) {
  const double np = static_cast<double>(n) * p;
  const double ln_n = std::log(static_cast<double>(n));
  detail::require(np > 0.0 && ln_n > 0.0, "dul_quantities: need n >= 2 and p > 0");
  const double ratio = std::sqrt(np / ln_n);
  detail::require(ratio > 4.0,
                  fmt::format("dul_quantities: sqrt(np / ln n) = {} must exceed 4", ratio));
  const double x = 1.0 / ratio;  // sqrt(ln n / np)
  const double y = ln_n / std::log(ratio / 4.0);
  DulQuantities q;
  q.d = (1.0 - 2.0 * x) / (1.0 + 4.0 * x);
  q.u = (1.0 + 2.0 * x) / (1.0 - 4.0 * x);
  q.l = static_cast<long>(std::ceil(y));
  q.c_const = static_cast<double>(q.l) / y;
  return q;
}

/// c / sqrt(n) * ln^{3/2}(n) / (sqrt(np) ln(np)).
inline double infnorm_bound(std::size_t n, double p, double c_const) {
  const double nd = static_cast<double>(n);
  const double np = nd * p;
  detail::require(np > 1.0, "infnorm_bound: need np > 1");
  return c_const / std::sqrt(nd) * std::pow(std::log(nd), 1.5) / (std::sqrt(np) * std::log(np));
}

/// P(|lambda_1(A/(np)) - 1| <= delta) in the Gaussian limit.
inline double lambda1_band_probability(std::size_t n, double p, double delta) {
  detail::require(p > 0.0 && p < 1.0, "lambda1_band_probability: need 0 < p < 1");
  detail::require(delta >= 0.0, "lambda1_band_probability: delta must be non-negative");
  if (std::isinf(delta)) return 1.0;
  return 1.0 - std::erfc(static_cast<double>(n) * std::sqrt(p) * delta / (2.0 * std::sqrt(1.0 - p)));
}

/// |mu_1 / np - 1| <= tolerance, with ||L - E(L)|| / sqrt(2 np (1-p) ln n) in aux.
inline BoundReport check_laplacian_norm(const Graph& g, double tolerance = 0.1) {
  const double np = detail::nominal_np(g);
  const SymmetricMatrix lap = laplacian(g);
  const Eigen::Index n = lap.size();
  const double mu1 = eigenvalues_in_range(lap, n, n)(0);
  auto rep = BoundReport::make("laplacian_norm", np > 0.0 ? std::abs(mu1 / np - 1.0)
                                                          : std::numeric_limits<double>::infinity(),
                               tolerance);
  rep.aux["mu1"] = mu1;
  if (np > 0.0) rep.aux["mu1_over_np"] = mu1 / np;
  if (detail::interior_p(g)) {
    const double dev = detail::extreme_abs(
        eigenvalues_sym(lap - detail::expected_laplacian(g.n(), g.p_nominal())));
    rep.aux["centered_norm_ratio"] =
        dev / std::sqrt(2.0 * np * (1.0 - g.p_nominal()) * detail::log_n(g));
  }
  rep.report_only = !detail::interior_p(g);
  return rep;
}

/// Delta <= mu_1 <= Delta + C sqrt(np). Encoded as a violation amount:
/// lhs = max(Delta - mu_1, mu_1 - Delta - C sqrt(np)), rhs = 0.
inline BoundReport check_mu1_vs_maxdeg(const Graph& g, double c_const = 3.0) {
  const double np = detail::nominal_np(g);
  const SymmetricMatrix lap = laplacian(g);
  const Eigen::Index n = lap.size();
  const double mu1 = eigenvalues_in_range(lap, n, n)(0);
  const double delta_max = static_cast<double>(degree_profile(g).delta_max);
  const double upper = delta_max + c_const * std::sqrt(std::max(0.0, np));
  auto rep = BoundReport::make("mu1_vs_maxdeg", std::max(delta_max - mu1, mu1 - upper), 0.0);
  rep.aux["mu1"] = mu1;
  rep.aux["delta_max"] = delta_max;
  rep.aux["upper"] = upper;
  return rep;
}

/// |mu_{n-1} - np| / sqrt(np ln n) <= constant. Disconnected graphs are
/// flagged (mu_{n-1} = 0) and report-only.
inline BoundReport check_algebraic_connectivity(const Graph& g, double constant = 4.0) {
  const double np = detail::nominal_np(g);
  detail::require(g.n() >= 2, "check_algebraic_connectivity: need n >= 2");
  const double mu = eigenvalues_in_range(laplacian(g), 2, 2)(0);
  const double scale = std::sqrt(np * detail::log_n(g));
  const double ratio = scale > 0.0 ? (mu - np) / scale : std::numeric_limits<double>::infinity();
  auto rep = BoundReport::make("algebraic_connectivity", std::abs(ratio), constant);
  const bool connected = is_connected(g);
  rep.aux["mu_n_minus_1"] = connected ? mu : 0.0;
  rep.aux["ratio"] = ratio;
  rep.aux["disconnected"] = connected ? 0.0 : 1.0;
  rep.report_only = !connected || !detail::interior_p(g);
  return rep;
}

/// Relative deviations of Delta / ln n from a and delta_min / ln n from b.
/// lhs = max(dev_max - tol_max, dev_min - tol_min), rhs = 0.
inline BoundReport degree_extremes_vs_lambert(const Graph& g, const ThresholdConstants& tc,
                                              double tol_max = 0.25, double tol_min = 0.35) {
  const auto prof = degree_profile(g);
  const double ln_n = detail::log_n(g);
  const double max_ratio = static_cast<double>(prof.delta_max) / ln_n;
  const double min_ratio = static_cast<double>(prof.delta_min) / ln_n;
  const double dev_max = std::abs(max_ratio - tc.a) / tc.a;
  const double dev_min = std::abs(min_ratio - tc.b) / tc.b;
  auto rep = BoundReport::make("degree_extremes_vs_lambert",
                               std::max(dev_max - tol_max, dev_min - tol_min), 0.0);
  rep.aux["delta_max_over_log"] = max_ratio;
  rep.aux["delta_min_over_log"] = min_ratio;
  rep.aux["a"] = tc.a;
  rep.aux["b"] = tc.b;
  rep.aux["rel_dev_max"] = dev_max;
  rep.aux["rel_dev_min"] = dev_min;
  return rep;
}

}  // namespace qwsearch
