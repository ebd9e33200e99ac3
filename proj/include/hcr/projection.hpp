// Copyright (c) 2026 The hcr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <string>
#include <type_traits>
#include <vector>

#include "hcr/constraint.hpp"
#include "hcr/errors.hpp"
#include "hcr/types.hpp"

namespace hcr {

/// Nearest point of a ball. Points strictly inside pass through unchanged;
/// outside (or boundary) points are pulled radially to radius*(1 - margin).
/// A positive margin yields strictly interior output.
template <typename Scalar>
VectorX<Scalar> project_ball(const VectorX<Scalar>& y,
                             const VectorX<Scalar>& center, Scalar radius,
                             Scalar strict_margin = Scalar(0)) {
  const VectorX<Scalar> gap = y - center;
  const Scalar dist = gap.norm();
  if (dist < radius) return y;
  return center + gap * (radius * (Scalar(1) - strict_margin) / dist);
}

/// Sweep budget and stop tolerance for the alternating-projection solver.
struct DykstraConfig {
  int max_sweeps = 1000;
  double tol = 1e-9;
};

/// Euclidean projection onto an intersection of halfspaces via Dykstra's
/// alternating projections. Every constraint must be of halfspace kind.
/// Throws NotConverged when the iterate still moves after max_sweeps.
template <typename Scalar>
VectorX<Scalar> project_polytope(
    const std::type_identity_t<VectorX<Scalar>>& y,
    const std::vector<ConstraintFunction<Scalar>>& halfspaces,
    const DykstraConfig& cfg = {}) {
  using Vector = VectorX<Scalar>;
  const std::size_t m = halfspaces.size();
  if (m == 0) throw InvalidRegion("project_polytope: empty constraint list");
  std::vector<const typename ConstraintFunction<Scalar>::Halfspace*> hs;
  hs.reserve(m);
  std::vector<Scalar> normal_sq(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!halfspaces[i].is_halfspace()) {
      throw std::invalid_argument(
          "project_polytope: constraint " + std::to_string(i) +
          " is not a halfspace");
    }
    hs.push_back(&halfspaces[i].as_halfspace());
    normal_sq[i] = hs[i]->normal.squaredNorm();
  }

  Vector x = y;
  Vector previous(x.size());
  std::vector<Vector> increment(m, Vector::Zero(y.size()));
  Vector w(y.size());
  for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    previous = x;
    for (std::size_t i = 0; i < m; ++i) {
      w = x + increment[i];
      const Scalar violation = hs[i]->normal.dot(w) - hs[i]->offset;
      if (violation > Scalar(0)) {
        x = w - (violation / normal_sq[i]) * hs[i]->normal;
        increment[i] = w - x;
      } else {
        x = w;
        increment[i].setZero();
      }
    }
    if ((x - previous).template lpNorm<Eigen::Infinity>() <=
        Scalar(cfg.tol)) {
      return x;
    }
  }
  throw NotConverged("project_polytope: still moving after " +
                     std::to_string(cfg.max_sweeps) + " sweeps");
}

namespace detail {

/// Feasible point on the segment [origin, y], as close to y as bisection on
/// the membership predicate allows. Requires a valid region.
template <typename Scalar>
VectorX<Scalar> pull_inside(const FeasibleRegion<Scalar>& region,
                            const VectorX<Scalar>& y) {
  if (region.is_feasible(y)) return y;
  Scalar lo = Scalar(0), hi = Scalar(1);  // origin feasible, y not
  VectorX<Scalar> point(y.size());
  for (int iter = 0; iter < 80; ++iter) {
    const Scalar mid = (lo + hi) / Scalar(2);
    point = region.origin() + mid * (y - region.origin());
    (region.is_feasible(point) ? lo : hi) = mid;
  }
  return region.origin() + lo * (y - region.origin());
}

/// Subgradient of one constraint. Analytic for ball and halfspace kinds,
/// central finite differences otherwise.
template <typename Scalar>
VectorX<Scalar> constraint_subgradient(const ConstraintFunction<Scalar>& c,
                                       const VectorX<Scalar>& y) {
  using Vector = VectorX<Scalar>;
  if (c.is_halfspace()) return c.as_halfspace().normal;
  if (c.is_ball()) {
    const Vector gap = y - c.as_ball().center;
    const Scalar dist = gap.norm();
    if (dist > Scalar(0)) return gap / dist;
    return Vector::Zero(y.size());
  }
  Vector grad(y.size());
  Vector probe = y;
  for (Index j = 0; j < y.size(); ++j) {
    const Scalar h = Scalar(1e-6) * (Scalar(1) + std::abs(y[j]));
    probe[j] = y[j] + h;
    const Scalar up = c.evaluate(probe);
    probe[j] = y[j] - h;
    const Scalar down = c.evaluate(probe);
    probe[j] = y[j];
    grad[j] = (up - down) / (Scalar(2) * h);
  }
  return grad;
}

/// Alternating subgradient scheme for regions with mixed or generic
/// constraints: walk toward y while feasible, step off the most violated
/// constraint otherwise. Keeps the best feasible iterate seen.
template <typename Scalar>
VectorX<Scalar> project_subgradient(const FeasibleRegion<Scalar>& region,
                                    const VectorX<Scalar>& y, int max_iters) {
  using Vector = VectorX<Scalar>;
  const Scalar tol = region.feasibility_tol();
  Vector x = pull_inside(region, y);
  Vector best = x;
  Scalar best_dist = (x - y).norm();
  const Scalar step_scale =
      std::max(Scalar(1), (y - region.origin()).norm()) / Scalar(10);
  for (int k = 1; k <= max_iters; ++k) {
    Scalar worst = -std::numeric_limits<Scalar>::infinity();
    Index worst_index = 0;
    for (Index i = 0; i < region.constraint_count(); ++i) {
      const Scalar v = region.evaluate(i, x);
      if (v > worst) {
        worst = v;
        worst_index = i;
      }
    }
    const Scalar step = step_scale / Scalar(k);
    if (worst > tol) {
      Vector g = constraint_subgradient(region.constraint(worst_index), x);
      const Scalar gn = g.norm();
      if (gn > Scalar(0)) x -= (step / gn) * g;
    } else {
      const Scalar dist = (x - y).norm();
      if (dist < best_dist) {
        best = x;
        best_dist = dist;
      }
      if (dist <= tol) break;
      x -= (step / dist) * (x - y);
    }
  }
  return best;
}

}  // namespace detail

/// Euclidean projection onto the region. Feasible input passes through;
/// single-ball and all-halfspace regions use the dedicated solvers, anything
/// else the subgradient scheme. The result is always feasible: iterates that
/// end up marginally outside are pulled back along the ray to the origin.
template <typename Scalar>
VectorX<Scalar> project(const FeasibleRegion<Scalar>& region,
                        const std::type_identity_t<VectorX<Scalar>>& y,
                        const DykstraConfig& cfg = {}) {
  if (region.is_feasible(y)) return y;

  VectorX<Scalar> result;
  if (region.constraint_count() == 1 && region.constraint(0).is_ball()) {
    const auto& ball = region.constraint(0).as_ball();
    result = project_ball(y, ball.center, ball.radius,
                          region.strict_margin());
  } else {
    bool all_halfspace = true;
    for (const auto& c : region.constraints()) {
      if (!c.is_halfspace()) {
        all_halfspace = false;
        break;
      }
    }
    if (all_halfspace) {
      result = project_polytope(y, region.constraints(), cfg);
    } else {
      result = detail::project_subgradient(region, y, 10000);
    }
  }
  if (!region.is_feasible(result)) {
    result = detail::pull_inside(region, result);
  }
  return result;
}

}  // namespace hcr
