// Copyright (c) 2026 The hcr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "hcr/errors.hpp"

namespace hcr {

/// Tolerances for bracketed scalar root finding.
template <typename Scalar = double>
struct RootConfig {
  Scalar abs_tol = Scalar(1e-10);  ///< absolute tolerance on the root location
  int max_iter = 100;
};

/// Bracket expansion stops once the upper end exceeds this multiple of the
/// initial upper end; a miss means the function never changes sign along the
/// ray within any reasonable distance.
inline constexpr double kEscapeBoundFactor = 1e12;

/// Expands `[t_lo, t_hi]` by doubling `t_hi` until g(t_lo) < 0 <= g(t_hi).
///
/// Throws NoSignChange when g(t_lo) >= 0 and EscapeBoundExceeded when the
/// doubling schedule passes `kEscapeBoundFactor * t_hi` without a sign change.
template <typename Scalar, typename F>
std::pair<Scalar, Scalar> bracket_root(F&& g, Scalar t_lo, Scalar t_hi) {
  if (!(t_lo < t_hi)) {
    throw std::invalid_argument("bracket_root: t_lo must be < t_hi");
  }
  const Scalar escape = Scalar(kEscapeBoundFactor) * t_hi;
  if (!(g(t_lo) < Scalar(0))) {
    throw NoSignChange("bracket_root: g(t_lo) must be negative");
  }
  Scalar hi = t_hi;
  while (true) {
    if (g(hi) >= Scalar(0)) return {t_lo, hi};
    if (hi > escape) {
      throw EscapeBoundExceeded(
          "bracket_root: no sign change before the escape bound");
    }
    hi *= Scalar(2);
  }
}

/// Brent's method on a sign-changing bracket. Returns a root location within
/// `cfg.abs_tol` of the true crossing; for a convex g that is negative at the
/// bracket's left end this is the unique crossing.
template <typename Scalar, typename F>
Scalar brent_root(F&& g, Scalar t_lo, Scalar t_hi,
                  const RootConfig<Scalar>& cfg = {}) {
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  Scalar a = t_lo, b = t_hi;
  Scalar fa = g(a), fb = g(b);
  if (fa == Scalar(0)) return a;
  if (fb == Scalar(0)) return b;
  if ((fa > Scalar(0)) == (fb > Scalar(0))) {
    throw NoSignChange("brent_root: bracket endpoints have the same sign");
  }
  Scalar c = b, fc = fb;
  Scalar d = b - a, e = d;
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    if ((fb > Scalar(0)) == (fc > Scalar(0))) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    // Quarter of abs_tol here: convergence leaves |b - root| within twice
    // this value, so the returned location stays inside abs_tol.
    const Scalar tol1 = Scalar(2) * eps * std::abs(b) + cfg.abs_tol / Scalar(4);
    const Scalar xm = (c - b) / Scalar(2);
    if (std::abs(xm) <= tol1 || fb == Scalar(0)) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      // Inverse quadratic interpolation, falling back to the secant step.
      const Scalar s = fb / fa;
      Scalar p, q;
      if (a == c) {
        p = Scalar(2) * xm * s;
        q = Scalar(1) - s;
      } else {
        const Scalar qq = fa / fc;
        const Scalar r = fb / fc;
        p = s * (Scalar(2) * xm * qq * (qq - r) - (b - a) * (r - Scalar(1)));
        q = (qq - Scalar(1)) * (r - Scalar(1)) * (s - Scalar(1));
      }
      if (p > Scalar(0)) q = -q;
      p = std::abs(p);
      const Scalar min1 = Scalar(3) * xm * q - std::abs(tol1 * q);
      const Scalar min2 = std::abs(e * q);
      if (Scalar(2) * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    if (std::abs(d) > tol1) {
      b += d;
    } else {
      b += xm > Scalar(0) ? tol1 : -tol1;
    }
    fb = g(b);
  }
  throw MaxIterExceeded("brent_root: no convergence within max_iter");
}

template <typename Scalar, typename F>
Scalar brent_root(F&& g, std::pair<Scalar, Scalar> bracket,
                  const RootConfig<Scalar>& cfg = {}) {
  return brent_root(std::forward<F>(g), bracket.first, bracket.second, cfg);
}

}  // namespace hcr
