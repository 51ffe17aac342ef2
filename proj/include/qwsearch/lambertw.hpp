#pragma once

// Real branches of the Lambert W function and the constants of the
// p ~ p0 log(n)/n regime that are expressed through them.

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "qwsearch/error.hpp"

namespace qwsearch {

inline constexpr double kBranchPoint = -0.36787944117144233;  // -1/e

namespace detail {

// e = kEHi + kELo to ~107 bits, so 1 + e*x keeps its digits near -1/e.
inline constexpr double kEHi = 2.718281828459045;
inline constexpr double kELo = 1.4456468917292502e-16;

inline double one_plus_e_x(double x) { return std::fma(kEHi, x, 1.0) + kELo * x; }

// Series around the branch point in p = ±sqrt(2(1 + e x)).
inline double branch_point_series(double p) {
  return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))));
}

inline double snap_to_branch_point(double x) {
  constexpr double kSnap = 1e-15;
  return (x < kBranchPoint && x >= kBranchPoint - kSnap) ? kBranchPoint : x;
}

inline double halley(double x, double w) {
  constexpr int kMaxIterations = 100;
  for (int it = 0; it < kMaxIterations; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double fp = ew * (w + 1.0);
    if (f == 0.0 || fp == 0.0) break;
    const double step = f / (fp - (w + 2.0) * f / (2.0 * (w + 1.0)));
    const double next = w - step;
    if (!std::isfinite(next)) break;
    w = next;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w))) break;
  }
  return w;
}

}  // namespace detail

/// Principal branch: w >= -1 with w e^w = x, for x >= -1/e.
inline double lambert_w0(double x) {
  x = detail::snap_to_branch_point(x);
  detail::require(std::isfinite(x) && x >= kBranchPoint,
                  fmt::format("lambert_w0: x = {} outside [-1/e, inf)", x));
  if (x == 0.0) return 0.0;
  if (x == kBranchPoint) return -1.0;

  double guess;
  if (x < -0.25) {
    guess = detail::branch_point_series(std::sqrt(2.0 * detail::one_plus_e_x(x)));
  } else if (x < 3.0) {
    // Winitzki's uniform approximation.
    const double l = std::log1p(x);
    guess = l * (1.0 - std::log1p(l) / (2.0 + l));
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    guess = l1 - l2 + l2 / l1;
  }
  return std::max(-1.0, detail::halley(x, guess));
}

/// Lower branch: w <= -1 with w e^w = x, for -1/e <= x < 0.
inline double lambert_wm1(double x) {
  x = detail::snap_to_branch_point(x);
  detail::require(std::isfinite(x) && x >= kBranchPoint && x < 0.0,
                  fmt::format("lambert_wm1: x = {} outside [-1/e, 0)", x));
  if (x == kBranchPoint) return -1.0;

  double guess;
  if (x < -0.25) {
    guess = detail::branch_point_series(-std::sqrt(2.0 * detail::one_plus_e_x(x)));
  } else {
    const double l1 = std::log(-x);
    const double l2 = std::log(-l1);
    guess = l1 - l2 + l2 / l1;
  }
  return std::min(-1.0, detail::halley(x, guess));
}

/// Degree/eigenvalue constants for G(n, p0 log(n)/n): the largest Laplacian
/// eigenvalue grows like a log n and the algebraic connectivity like b log n.
struct ThresholdConstants {
  double p0 = 0.0;
  double a = 0.0;
  double b = 0.0;
};

inline double threshold_argument(double p0) {
  return (1.0 - p0) / (detail::kEHi * p0);
}

inline ThresholdConstants threshold_constants(double p0) {
  detail::require(std::isfinite(p0) && p0 > 1.0,
                  fmt::format("threshold_constants: p0 = {} must exceed 1", p0));
  const double arg = threshold_argument(p0);
  return {p0, (1.0 - p0) / lambert_w0(arg), (1.0 - p0) / lambert_wm1(arg)};
}

/// Asymptotic success bound (1 - c)/(1 + c) with c = (a - b)/(a + b), i.e.
/// W0(x)/W-1(x) at x = (1 - p0)/(e p0).
inline double p_bound(double p0) {
  detail::require(std::isfinite(p0) && p0 > 1.0,
                  fmt::format("p_bound: p0 = {} must exceed 1", p0));
  const double arg = threshold_argument(p0);
  return lambert_w0(arg) / lambert_wm1(arg);
}

}  // namespace qwsearch
