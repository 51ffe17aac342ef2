#pragma once

// Marked-vertex amplitude <w| exp(-iHt) |s> for H = scale * M + |w><w|,
// computed from a precomputed eigendecomposition M = U diag(lambda) U^T.
//
// In the eigenbasis of M the Hamiltonian is D + z z^T with D = scale*lambda
// and z = U^T e_w, so its spectrum follows from the secular equation
//
//     1 + sum_j z_j^2 / (d_j - theta) = 0,
//
// one root strictly between consecutive poles. The eigenvector of root theta
// is proportional to (theta - D)^{-1} z, which gives closed forms for both
// overlaps <w|v> and <v|s> without forming any n x n matrix. Directions
// orthogonal to z inside a repeated pole have zero overlap with |w> and drop
// out of the amplitude entirely.
//
// Roots are located in a coordinate shifted to the nearer pole and iterated
// with the two-pole rational model of Bunch, Nielsen and Sorensen inside a
// bisection bracket.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "qwsearch/error.hpp"

namespace qwsearch {

/// amplitude(t) = sum_k weights[k] * exp(-i * frequencies[k] * t).
struct ModeExpansion {
  std::vector<double> frequencies;
  std::vector<double> weights;

  std::complex<double> amplitude(double t) const {
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k < frequencies.size(); ++k) {
      const double phase = frequencies[k] * t;
      re += weights[k] * std::cos(phase);
      im -= weights[k] * std::sin(phase);
    }
    return {re, im};
  }

  double probability(double t) const { return std::norm(amplitude(t)); }
};

namespace detail {

struct SecularPole {
  double d;
  double zeta;  // coupling to |w>
  double eta;   // overlap with |s> along the coupled direction
};

struct SecularRoot {
  std::size_t origin;  // index of the pole the shift is measured from
  double tau;          // theta - d[origin]
};

class SecularSolver {
 public:
  explicit SecularSolver(const std::vector<SecularPole>& poles) : poles_(poles) {
    rho_ = 0.0;
    for (const auto& p : poles_) rho_ += p.zeta * p.zeta;
  }

  SecularRoot solve(std::size_t k) const {
    const std::size_t m = poles_.size();
    const bool last = (k + 1 == m);
    if (last) return iterate(k, k, 0.0, rho_);
    const double gap = poles_[k + 1].d - poles_[k].d;
    // g is increasing on the interval; its sign at the midpoint picks the
    // nearer pole as origin.
    const double g_mid = evaluate(k, 0.5 * gap).g;
    if (g_mid >= 0.0) return iterate(k, k, 0.0, 0.5 * gap);
    return iterate(k, k + 1, -0.5 * gap, 0.0);
  }

  /// Weight <w|v><v|s> of the eigenvector belonging to `root`.
  double weight(const SecularRoot& root) const {
    const double d0 = poles_[root.origin].d;
    double num = 0.0, den = 0.0;
    for (const auto& p : poles_) {
      const double diff = root.tau - (p.d - d0);
      num += p.zeta * p.eta / diff;
      den += p.zeta * p.zeta / (diff * diff);
    }
    return num / den;
  }

  double theta(const SecularRoot& root) const { return poles_[root.origin].d + root.tau; }

 private:
  struct Eval {
    double g;      // 1 + psi + phi
    double psi, dpsi, phi, dphi;
    double scale;  // sum of |terms|, for the stopping test
  };

  // Terms with pole index <= k go to psi, the rest to phi; shift measured
  // from pole `origin`.
  Eval evaluate(std::size_t k, double tau, std::size_t origin) const {
    const double d0 = poles_[origin].d;
    Eval e{1.0, 0.0, 0.0, 0.0, 0.0, 1.0};
    for (std::size_t j = 0; j < poles_.size(); ++j) {
      const double diff = (poles_[j].d - d0) - tau;
      const double z2 = poles_[j].zeta * poles_[j].zeta;
      const double term = z2 / diff;
      const double dterm = term / diff;
      if (j <= k) {
        e.psi += term;
        e.dpsi += dterm;
      } else {
        e.phi += term;
        e.dphi += dterm;
      }
      e.scale += std::abs(term);
    }
    e.g = 1.0 + e.psi + e.phi;
    return e;
  }
  Eval evaluate(std::size_t k, double tau) const { return evaluate(k, tau, k); }

  SecularRoot iterate(std::size_t k, std::size_t origin, double lo, double hi) const {
    constexpr double kEps = std::numeric_limits<double>::epsilon();
    constexpr int kMaxIterations = 200;
    constexpr int kModelIterations = 40;
    const double d0 = poles_[origin].d;
    const bool last = (k + 1 == poles_.size());
    const double left = poles_[k].d - d0;
    const double right = last ? 0.0 : poles_[k + 1].d - d0;

    double tau = 0.5 * (lo + hi);
    for (int it = 0; it < kMaxIterations; ++it) {
      const Eval e = evaluate(k, tau, origin);
      if (std::abs(e.g) <= 8.0 * kEps * e.scale) break;
      if (e.g < 0.0) lo = tau; else hi = tau;
      if (hi - lo <= 2.0 * kEps * std::max(std::abs(lo), std::abs(hi))) {
        tau = 0.5 * (lo + hi);
        break;
      }

      double next = std::numeric_limits<double>::quiet_NaN();
      if (it < kModelIterations) {
        const double q = e.dpsi * (left - tau) * (left - tau);
        const double c_left = e.psi - e.dpsi * (left - tau);
        if (last) {
          const double c = 1.0 + c_left;
          if (c > 0.0) next = left + q / c;
        } else {
          const double qr = e.dphi * (right - tau) * (right - tau);
          const double c = 1.0 + c_left + e.phi - e.dphi * (right - tau);
          next = model_root(c, q, qr, left, right, lo, hi);
        }
      }
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      tau = next;
    }
    return {origin, tau};
  }

  // Root in (lo, hi) of c + q/(left - y) + qr/(right - y) = 0, where one of
  // left/right is exactly 0 (the origin).
  static double model_root(double c, double q, double qr, double left, double right, double lo,
                           double hi) {
    const double b = c * (left + right) + q + qr;
    const double c0 = c * left * right + q * right + qr * left;
    auto inside = [&](double y) { return y > lo && y < hi; };
    if (c == 0.0) {
      return b != 0.0 ? c0 / b : std::numeric_limits<double>::quiet_NaN();
    }
    const double disc = b * b - 4.0 * c * c0;
    if (disc < 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double s = b >= 0.0 ? b + std::sqrt(disc) : b - std::sqrt(disc);
    const double y1 = s / (2.0 * c);
    const double y2 = s != 0.0 ? 2.0 * c0 / s : std::numeric_limits<double>::quiet_NaN();
    if (inside(y2)) return y2;
    if (inside(y1)) return y1;
    return std::numeric_limits<double>::quiet_NaN();
  }

  const std::vector<SecularPole>& poles_;
  double rho_ = 0.0;
};

}  // namespace detail

/// Mode expansion of <w| exp(-i (scale*M + |w><w|) t) |s>.
///
/// `eigenvalues`/`eigenvectors` are the full decomposition of M, and
/// `s_coords` = U^T |s>.
inline ModeExpansion rank_one_modes(const Eigen::VectorXd& eigenvalues,
                                    const Eigen::MatrixXd& eigenvectors,
                                    const Eigen::VectorXd& s_coords, double scale,
                                    Eigen::Index w) {
  const Eigen::Index n = eigenvalues.size();
  detail::require(eigenvectors.rows() == n && eigenvectors.cols() == n,
                  "rank_one_modes: need a complete decomposition");
  detail::require(w >= 0 && w < n, "rank_one_modes: marked vertex out of range");

  constexpr double kEps = std::numeric_limits<double>::epsilon();
  constexpr double kDeflate = 1e-15;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::vector<double> d(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = scale * eigenvalues(i);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return d[a] < d[b]; });
  const double d_scale = std::max(1.0, std::max(std::abs(d[order.front()]), std::abs(d[order.back()])));
  const double tie = 64.0 * kEps * d_scale;

  ModeExpansion out;
  std::vector<detail::SecularPole> poles;
  for (std::size_t i = 0; i < order.size();) {
    // Merge a run of (numerically) equal poles into one coupled direction.
    const double d_first = d[order[i]];
    double z2 = 0.0, zy = 0.0, d_sum = 0.0;
    std::size_t j = i;
    for (; j < order.size() && d[order[j]] - d_first <= tie; ++j) {
      const double z = eigenvectors(w, order[j]);
      z2 += z * z;
      zy += z * s_coords(order[j]);
      d_sum += d[order[j]];
    }
    const double d_group = d_sum / static_cast<double>(j - i);
    const double zeta = std::sqrt(z2);
    if (zeta <= kDeflate) {
      if (zy != 0.0) {
        out.frequencies.push_back(d_group);
        out.weights.push_back(zy);
      }
    } else {
      poles.push_back({d_group, zeta, zy / zeta});
    }
    i = j;
  }

  if (!poles.empty()) {
    detail::SecularSolver solver(poles);
    for (std::size_t k = 0; k < poles.size(); ++k) {
      const auto root = solver.solve(k);
      out.frequencies.push_back(solver.theta(root));
      out.weights.push_back(solver.weight(root));
    }
  }
  return out;
}

}  // namespace qwsearch
