#pragma once

// Dense symmetric eigendecomposition (LAPACK divide-and-conquer / MRRR on the
// tridiagonal form) and the principal-eigenvector deviation metrics.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <lapacke.h>

#include "qwsearch/error.hpp"
#include "qwsearch/graph.hpp"

extern "C" void openblas_set_num_threads(int);
extern "C" int openblas_get_num_threads(void);

namespace qwsearch {

/// Eigenvalues sorted descending, column k of `eigenvectors` paired with
/// eigenvalue k. A partial decomposition holds only the leading columns.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  Eigen::Index dimension() const noexcept { return eigenvectors.rows(); }
  Eigen::Index count() const noexcept { return eigenvalues.size(); }
  bool complete() const noexcept { return count() == dimension(); }

  Eigen::MatrixXd reconstruct() const {
    return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
  }
};

/// Caps BLAS-internal threading; campaign workers call this with 1 so a
/// result never depends on how BLAS splits its work.
inline void set_blas_threads(int threads) { openblas_set_num_threads(std::max(1, threads)); }

inline int blas_threads() { return openblas_get_num_threads(); }

namespace detail {

inline void check_lapack(lapack_int info, const char* routine) {
  if (info != 0) throw NumericalError(fmt::format("{} failed with info = {}", routine, info));
}

inline SpectralDecomposition reverse_ascending(Eigen::VectorXd w, Eigen::MatrixXd z) {
  SpectralDecomposition d;
  d.eigenvalues = w.reverse();
  d.eigenvectors = z.rowwise().reverse();
  return d;
}

}  // namespace detail

/// Full decomposition of a symmetric matrix.
inline SpectralDecomposition eig_sym(const SymmetricMatrix& m) {
  const auto n = static_cast<lapack_int>(m.size());
  if (n == 0) return {};
  Eigen::MatrixXd a = m.dense();
  Eigen::VectorXd w(n);
  detail::check_lapack(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, w.data()),
                       "dsyevd");
  return detail::reverse_ascending(std::move(w), std::move(a));
}

/// All eigenvalues, descending.
inline Eigen::VectorXd eigenvalues_sym(const SymmetricMatrix& m) {
  const auto n = static_cast<lapack_int>(m.size());
  if (n == 0) return {};
  Eigen::MatrixXd a = m.dense();
  Eigen::VectorXd w(n);
  detail::check_lapack(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', n, a.data(), n, w.data()),
                       "dsyevd");
  return w.reverse();
}

/// The k largest eigenpairs, descending.
inline SpectralDecomposition top_eigenpairs(const SymmetricMatrix& m, Eigen::Index k) {
  const auto n = static_cast<lapack_int>(m.size());
  detail::require(k >= 1 && k <= n, "top_eigenpairs: k out of range");
  Eigen::MatrixXd a = m.dense();
  Eigen::VectorXd w(n);
  Eigen::MatrixXd z(n, k);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(k));
  lapack_int found = 0;
  const auto il = static_cast<lapack_int>(n - k + 1);
  detail::check_lapack(LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', n, a.data(), n, 0.0, 0.0,
                                      il, n, 0.0, &found, w.data(), z.data(), n, support.data()),
                       "dsyevr");
  if (found != k) throw NumericalError("dsyevr returned the wrong number of eigenpairs");
  return detail::reverse_ascending(w.head(k), std::move(z));
}

/// Eigenvalues with ascending indices [il, iu] (1-based, LAPACK convention),
/// returned descending.
inline Eigen::VectorXd eigenvalues_in_range(const SymmetricMatrix& m, Eigen::Index il,
                                            Eigen::Index iu) {
  const auto n = static_cast<lapack_int>(m.size());
  detail::require(il >= 1 && il <= iu && iu <= n, "eigenvalues_in_range: bad index range");
  Eigen::MatrixXd a = m.dense();
  Eigen::VectorXd w(n);
  lapack_int found = 0;
  lapack_int dummy_support[2];
  double dummy_z = 0.0;
  detail::check_lapack(LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'N', 'I', 'U', n, a.data(), n, 0.0, 0.0,
                                      static_cast<lapack_int>(il), static_cast<lapack_int>(iu),
                                      0.0, &found, w.data(), &dummy_z, 1, dummy_support),
                       "dsyevr");
  return Eigen::VectorXd(w.head(found).reverse());
}

inline double spectral_norm(const SymmetricMatrix& m) {
  const auto n = m.size();
  if (n == 0) return 0.0;
  const double top = eigenvalues_in_range(m, n, n)(0);
  const double bottom = eigenvalues_in_range(m, 1, 1)(0);
  return std::max(std::abs(top), std::abs(bottom));
}

inline Eigen::VectorXd uniform_superposition(Eigen::Index n) {
  return Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
}

enum class PrincipalStatus {
  ok,
  mixed_sign,      ///< entries of both signs beyond tolerance: not a Perron vector
  degenerate,      ///< leading eigenvalue tied with the next one
};

struct PrincipalVector {
  Eigen::VectorXd vector;
  PrincipalStatus status = PrincipalStatus::ok;

  bool ok() const noexcept { return status == PrincipalStatus::ok; }
};

/// Leading eigenvector with the Perron–Frobenius sign fixed (positive entry
/// sum). Needs at least the two leading pairs to detect a tie.
inline PrincipalVector principal_vector(const SpectralDecomposition& d) {
  constexpr double kTieTolerance = 1e-12;
  constexpr double kNegativeTolerance = 1e-10;
  detail::require(d.count() >= 1, "principal_vector: empty decomposition");
  PrincipalVector out{d.eigenvectors.col(0), PrincipalStatus::ok};
  if (out.vector.sum() < 0.0) out.vector = -out.vector;
  if (d.count() >= 2 &&
      d.eigenvalues(0) - d.eigenvalues(1) <= kTieTolerance * std::max(1.0, std::abs(d.eigenvalues(0)))) {
    out.status = PrincipalStatus::degenerate;
  } else if (out.vector.minCoeff() < -kNegativeTolerance) {
    out.status = PrincipalStatus::mixed_sign;
  }
  return out;
}

/// |s> = alpha |v> + beta |v_perp>.
struct OverlapSplit {
  double alpha = 0.0;
  double beta = 0.0;
};

inline OverlapSplit overlap_split(const Eigen::VectorXd& v) {
  constexpr double kUnitTolerance = 1e-8;
  detail::require(v.size() >= 1, "overlap_split: empty vector");
  detail::require(std::abs(v.norm() - 1.0) <= kUnitTolerance, "overlap_split: vector is not unit");
  const double alpha = v.sum() / std::sqrt(static_cast<double>(v.size()));
  return {alpha, std::sqrt(std::max(0.0, 1.0 - alpha * alpha))};
}

/// max_i |v_i - 1/sqrt(n)|.
inline double infnorm_deviation(const Eigen::VectorXd& v, Eigen::Index n) {
  detail::require(v.size() == n, "infnorm_deviation: dimension mismatch");
  return (v.array() - 1.0 / std::sqrt(static_cast<double>(n))).abs().maxCoeff();
}

/// Unit vector with mass 1/(n sqrt k) on the first k coordinates and the rest
/// spread evenly, so its overlap with |s> tends to 1 while the first k entries
/// are a factor sqrt(n/k) too small.
inline Eigen::VectorXd hidden_mass_state(Eigen::Index n, Eigen::Index k) {
  detail::require(k >= 1 && k < n, "hidden_mass_state: need 1 <= k < n");
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  Eigen::VectorXd v(n);
  v.head(k).setConstant(1.0 / (nd * std::sqrt(kd)));
  v.tail(n - k).setConstant(std::sqrt(nd * nd - 1.0) / (nd * std::sqrt(nd - kd)));
  return v;
}

/// Mean and standard deviation of lambda_1(A/(np)) in the Gaussian limit.
struct Lambda1Law {
  double mean = 0.0;
  double sd = 0.0;
};

inline Lambda1Law lambda1_law(std::size_t n, double p) {
  detail::require(p > 0.0 && p < 1.0, "lambda1 law needs 0 < p < 1");
  const double nd = static_cast<double>(n);
  return {1.0 + (1.0 - p) / (nd * p), std::sqrt(2.0 * (1.0 - p) / p) / nd};
}

/// z-score of an observed lambda_1(A/(np)).
inline double standardized_lambda1(std::size_t n, double p, double lambda1_normalized) {
  const auto law = lambda1_law(n, p);
  return (lambda1_normalized - law.mean) / law.sd;
}

}  // namespace qwsearch
