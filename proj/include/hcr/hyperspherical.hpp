// Copyright (c) 2026 The hcr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <type_traits>
#include <vector>

#include "hcr/constraint.hpp"
#include "hcr/errors.hpp"
#include "hcr/rootfind.hpp"
#include "hcr/types.hpp"

namespace hcr {

/// A point expressed relative to a region: unit direction from the origin and
/// the fraction (in [0, 1]) of the distance to the frontier along it.
template <typename Scalar = double>
struct HypersphericalCoord {
  VectorX<Scalar> direction;
  Scalar radius = Scalar(0);
};

/// Frontier crossing along a ray: distance from the origin and the index of
/// the constraint attaining it.
template <typename Scalar = double>
struct FrontierHit {
  Scalar distance;
  Index constraint;
};

inline constexpr double kDirectionEps = 1e-12;

/// Accepts any dense vector or vector expression of the right scalar while
/// letting Scalar be pinned by the region argument.
template <typename Scalar>
using VectorArg = std::type_identity_t<VectorX<Scalar>>;

/// v / ||v|| when the norm exceeds kDirectionEps, otherwise the first basis
/// vector. Total: never fails, always returns a unit vector.
template <typename Derived>
VectorX<typename Derived::Scalar> normalize_direction(
    const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Scalar norm = v.norm();
  if (norm > Scalar(kDirectionEps)) return v / norm;
  VectorX<Scalar> e1 = VectorX<Scalar>::Zero(v.size());
  e1[0] = Scalar(1);
  return e1;
}

namespace detail {

/// Crossing distance of one constraint along the ray, +inf when the ray
/// never meets it.
template <typename Scalar>
Scalar crossing_distance(const FeasibleRegion<Scalar>& region, Index i,
                         const VectorX<Scalar>& d, Scalar bracket_hint,
                         const RootConfig<Scalar>& root_cfg) {
  if (const auto analytic = region.analytic_crossing(i, d)) return *analytic;
  VectorX<Scalar> point(region.dimension());
  auto g = [&](Scalar s) {
    point = region.origin() + s * d;
    return region.evaluate(i, point);
  };
  const auto bracket = bracket_root(g, Scalar(0), bracket_hint);
  return brent_root(g, bracket, root_cfg);
}

template <typename Scalar>
[[noreturn]] void throw_unbounded_ray() {
  throw EscapeBoundExceeded(
      "frontier search found no crossing: region is unbounded along the "
      "queried ray");
}

/// Minimum positive crossing over an explicit candidate list. Candidates must
/// be in ascending order so that ties resolve to the lowest index.
template <typename Scalar>
FrontierHit<Scalar> frontier_over(const FeasibleRegion<Scalar>& region,
                                  const std::vector<Index>& candidates,
                                  const VectorX<Scalar>& d, Scalar bracket_hint,
                                  const RootConfig<Scalar>& root_cfg) {
  Scalar best = std::numeric_limits<Scalar>::infinity();
  Index best_index = -1;
  for (Index i : candidates) {
    const Scalar t = crossing_distance(region, i, d, bracket_hint, root_cfg);
    if (t < best) {
      best = t;
      best_index = i;
    }
  }
  if (!(best < std::numeric_limits<Scalar>::infinity())) {
    throw_unbounded_ray<Scalar>();
  }
  return {best, best_index};
}

template <typename Scalar>
std::vector<Index> all_indices(const FeasibleRegion<Scalar>& region) {
  std::vector<Index> all(static_cast<std::size_t>(region.constraint_count()));
  std::iota(all.begin(), all.end(), Index(0));
  return all;
}

}  // namespace detail

/// Reference frontier search that checks every constraint. The restricted
/// search below must always agree with it; tests and the radial-length
/// estimate use this route.
template <typename Scalar>
FrontierHit<Scalar> frontier_distance_full_scan(
    const FeasibleRegion<Scalar>& region, const VectorArg<Scalar>& d,
    Scalar bracket_hint = Scalar(1), const RootConfig<Scalar>& root_cfg = {}) {
  return detail::frontier_over(region, detail::all_indices(region), d,
                               bracket_hint, root_cfg);
}

/// Mean frontier distance over the 2n signed axis directions, via the full
/// scan. Used as the default probe scale for the restricted search.
template <typename Scalar>
Scalar estimate_radial_length(const FeasibleRegion<Scalar>& region) {
  const Index n = region.dimension();
  VectorX<Scalar> d = VectorX<Scalar>::Zero(n);
  Scalar sum = Scalar(0);
  for (Index j = 0; j < n; ++j) {
    for (const Scalar sign : {Scalar(1), Scalar(-1)}) {
      d[j] = sign;
      sum += frontier_distance_full_scan(region, d).distance;
    }
    d[j] = Scalar(0);
  }
  return sum / Scalar(2 * n);
}

/// Probe schedule for the restricted frontier search. `base_multiplier`
/// should be near the region's radial length; the factory measures it.
template <typename Scalar = double>
struct AccelConfig {
  Scalar base_multiplier = Scalar(1);
  int max_iterations = 20;

  static AccelConfig for_region(const FeasibleRegion<Scalar>& region) {
    return AccelConfig{estimate_radial_length(region), 20};
  }
};

/// Walks outward along `d` in steps of base_multiplier * (1 + 0.5 i) and
/// returns the constraints violated at the first infeasible probe. Falls back
/// to every index after max_iterations probes, so the result is always a
/// usable candidate set.
template <typename Scalar>
std::vector<Index> restrict_constraints(const FeasibleRegion<Scalar>& region,
                                        const VectorArg<Scalar>& d,
                                        const AccelConfig<Scalar>& accel) {
  VectorX<Scalar> probe(region.dimension());
  for (int i = 0; i < accel.max_iterations; ++i) {
    const Scalar mult = accel.base_multiplier * (Scalar(1) + Scalar(0.5) * i);
    probe = region.origin() + d * mult;
    std::vector<Index> violated = region.violated_constraints(probe);
    if (!violated.empty()) return violated;
  }
  return detail::all_indices(region);
}

/// Frontier distance s(d): smallest t > 0 with some c_i(origin + t d) = 0,
/// plus the constraint index attaining it (lowest index on ties). `d` must be
/// unit length. Candidates come from the restricted search; ball and
/// halfspace crossings are analytic, generic ones go through Brent.
template <typename Scalar>
FrontierHit<Scalar> frontier_distance(const FeasibleRegion<Scalar>& region,
                                      const VectorArg<Scalar>& d,
                                      const AccelConfig<Scalar>& accel,
                                      const RootConfig<Scalar>& root_cfg = {}) {
  assert(std::abs(d.norm() - Scalar(1)) <= Scalar(1e-9));
  if (region.constraint_count() == 1) {
    // Restricting a singleton is the identity; skip the probes.
    const Scalar t = detail::crossing_distance(region, Index(0), d,
                                               accel.base_multiplier,
                                               root_cfg);
    if (!(t < std::numeric_limits<Scalar>::infinity())) {
      detail::throw_unbounded_ray<Scalar>();
    }
    return {t, Index(0)};
  }
  return detail::frontier_over(region, restrict_constraints(region, d, accel),
                               d, accel.base_multiplier, root_cfg);
}

/// Euclidean -> hyperspherical. The input must be feasible; callers with
/// possibly infeasible data project first.
template <typename Scalar>
HypersphericalCoord<Scalar> to_hyperspherical(
    const FeasibleRegion<Scalar>& region, const VectorArg<Scalar>& y,
    const AccelConfig<Scalar>& accel) {
  if (!region.is_feasible(y)) {
    throw InfeasibleInput(
        "to_hyperspherical: point is outside the region; project it first");
  }
  const VectorX<Scalar> gap = y - region.origin();
  const Scalar rho = gap.norm();
  if (rho <= Scalar(kDirectionEps)) {
    VectorX<Scalar> e1 = VectorX<Scalar>::Zero(region.dimension());
    e1[0] = Scalar(1);
    return {std::move(e1), Scalar(0)};
  }
  const VectorX<Scalar> d = gap / rho;
  const Scalar s = frontier_distance(region, d, accel).distance;
  // Clamp away the root-finder tolerance so frontier points keep r <= 1.
  const Scalar r = std::clamp(rho / s, Scalar(0), Scalar(1));
  return {d, r};
}

/// Hyperspherical -> Euclidean: origin + d * r * s(d). Feasible for every
/// unit d and r in [0, 1]; r is clamped to that interval.
template <typename Scalar>
VectorX<Scalar> from_hyperspherical(const FeasibleRegion<Scalar>& region,
                                    const HypersphericalCoord<Scalar>& coord,
                                    const AccelConfig<Scalar>& accel) {
  assert(std::abs(coord.direction.norm() - Scalar(1)) <= Scalar(1e-9));
  const Scalar r = std::clamp(coord.radius, Scalar(0), Scalar(1));
  const Scalar s = frontier_distance(region, coord.direction, accel).distance;
  return region.origin() + coord.direction * (r * s);
}

}  // namespace hcr
