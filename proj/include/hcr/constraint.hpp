// Copyright (c) 2026 The hcr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hcr/errors.hpp"
#include "hcr/types.hpp"

namespace hcr {

/// One convex scalar constraint c(y) <= 0.
///
/// Ball and Halfspace carry their geometry explicitly so that frontier
/// crossings and projections have analytic fast paths; GenericConvex wraps an
/// arbitrary evaluator. Convexity of a generic evaluator is the caller's
/// contract and is not checked.
template <typename Scalar = double>
class ConstraintFunction {
 public:
  using Vector = VectorX<Scalar>;
  using Evaluator = std::function<Scalar(const Vector&)>;

  /// ||y - center||_2 - radius <= 0
  struct Ball {
    Vector center;
    Scalar radius;
  };

  /// normal . y - offset <= 0
  struct Halfspace {
    Vector normal;
    Scalar offset;
  };

  struct GenericConvex {
    Evaluator evaluate;
    Index dim;
  };

  static ConstraintFunction ball(Vector center, Scalar radius) {
    if (!(radius > Scalar(0))) {
      throw InvalidRegion("ball constraint: radius must be positive");
    }
    return ConstraintFunction(Ball{std::move(center), radius});
  }

  static ConstraintFunction halfspace(Vector normal, Scalar offset) {
    if (normal.norm() == Scalar(0)) {
      throw InvalidRegion("halfspace constraint: normal must be nonzero");
    }
    return ConstraintFunction(Halfspace{std::move(normal), offset});
  }

  static ConstraintFunction generic(Evaluator evaluate, Index dim) {
    if (!evaluate) {
      throw InvalidRegion("generic constraint: evaluator must be callable");
    }
    if (dim <= 0) {
      throw InvalidRegion("generic constraint: dimension must be positive");
    }
    return ConstraintFunction(GenericConvex{std::move(evaluate), dim});
  }

  /// c(y); <= 0 means satisfied. Throws DimensionMismatch on a size mismatch
  /// and rejects non-finite evaluator output.
  Scalar evaluate(const Vector& y) const {
    if (y.size() != dimension()) {
      throw DimensionMismatch("constraint evaluated at a point of dimension " +
                              std::to_string(y.size()) + ", expected " +
                              std::to_string(dimension()));
    }
    Scalar value;
    if (const Ball* b = std::get_if<Ball>(&kind_)) {
      value = (y - b->center).norm() - b->radius;
    } else if (const Halfspace* h = std::get_if<Halfspace>(&kind_)) {
      value = h->normal.dot(y) - h->offset;
    } else {
      value = std::get<GenericConvex>(kind_).evaluate(y);
      if (!std::isfinite(value)) {
        throw InvalidRegion("generic constraint returned a non-finite value");
      }
    }
    return value;
  }

  Scalar operator()(const Vector& y) const { return evaluate(y); }

  Index dimension() const {
    if (const Ball* b = std::get_if<Ball>(&kind_)) return b->center.size();
    if (const Halfspace* h = std::get_if<Halfspace>(&kind_)) {
      return h->normal.size();
    }
    return std::get<GenericConvex>(kind_).dim;
  }

  /// Position in the owning region's constraint list; 0 until adopted.
  Index index() const { return index_; }

  bool is_ball() const { return std::holds_alternative<Ball>(kind_); }
  bool is_halfspace() const { return std::holds_alternative<Halfspace>(kind_); }
  bool is_generic() const {
    return std::holds_alternative<GenericConvex>(kind_);
  }

  const Ball& as_ball() const { return std::get<Ball>(kind_); }
  const Halfspace& as_halfspace() const { return std::get<Halfspace>(kind_); }
  const GenericConvex& as_generic() const {
    return std::get<GenericConvex>(kind_);
  }

 private:
  template <typename Kind>
  explicit ConstraintFunction(Kind kind) : kind_(std::move(kind)) {}

  std::variant<Ball, Halfspace, GenericConvex> kind_;
  Index index_ = 0;

  template <typename S>
  friend class FeasibleRegion;
};

/// Intersection of convex constraints c_i(y) <= 0 with a strictly feasible
/// anchor point from which directions and radii are measured.
///
/// Immutable after construction; all queries are const and safe to call
/// concurrently. Boundedness cannot be verified statically for generic
/// constraints and is enforced lazily: a frontier search that escapes its
/// bound reports the offending ray via EscapeBoundExceeded.
template <typename Scalar = double>
class FeasibleRegion {
 public:
  using Vector = VectorX<Scalar>;
  using Constraint = ConstraintFunction<Scalar>;

  static constexpr Scalar default_strict_margin() { return Scalar(1e-9); }
  static constexpr Scalar default_feasibility_tol() { return Scalar(1e-12); }

  FeasibleRegion(std::vector<Constraint> constraints, Vector origin,
                 Scalar strict_margin = default_strict_margin(),
                 Scalar feasibility_tol = default_feasibility_tol())
      : constraints_(std::move(constraints)),
        origin_(std::move(origin)),
        strict_margin_(strict_margin),
        feasibility_tol_(feasibility_tol) {
    if (constraints_.empty()) {
      throw InvalidRegion("region needs at least one constraint");
    }
    if (strict_margin_ < Scalar(0)) {
      throw InvalidRegion("strict margin must be nonnegative");
    }
    ray_.reserve(constraints_.size());
    for (Index i = 0; i < static_cast<Index>(constraints_.size()); ++i) {
      Constraint& c = constraints_[static_cast<std::size_t>(i)];
      c.index_ = i;
      if (c.dimension() != origin_.size()) {
        throw DimensionMismatch(
            "constraint " + std::to_string(i) + " has dimension " +
            std::to_string(c.dimension()) + ", origin has " +
            std::to_string(origin_.size()));
      }
      RayConstants rc;
      if (c.is_ball()) {
        rc.ball_gap = origin_ - c.as_ball().center;
        rc.ball_gap_sq = rc.ball_gap.squaredNorm();
        rc.value_at_origin = std::sqrt(rc.ball_gap_sq) - c.as_ball().radius;
      } else if (c.is_halfspace()) {
        rc.slack = c.as_halfspace().normal.dot(origin_) -
                   c.as_halfspace().offset;
        rc.value_at_origin = rc.slack;
      } else {
        rc.value_at_origin = c.evaluate(origin_);
      }
      if (!(rc.value_at_origin < Scalar(0))) {
        throw InvalidRegion("origin is not strictly feasible: constraint " +
                            std::to_string(i) + " evaluates to " +
                            std::to_string(rc.value_at_origin));
      }
      ray_.push_back(std::move(rc));
    }
  }

  Index dimension() const { return origin_.size(); }
  Index constraint_count() const {
    return static_cast<Index>(constraints_.size());
  }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const Constraint& constraint(Index i) const {
    return constraints_[static_cast<std::size_t>(i)];
  }
  const Vector& origin() const { return origin_; }
  Scalar strict_margin() const { return strict_margin_; }
  Scalar feasibility_tol() const { return feasibility_tol_; }

  Scalar evaluate(Index i, const Vector& y) const {
    return constraints_[static_cast<std::size_t>(i)].evaluate(y);
  }

  /// c_i(origin); strictly negative by construction.
  Scalar value_at_origin(Index i) const {
    return ray_[static_cast<std::size_t>(i)].value_at_origin;
  }

  /// True iff c_i(y) <= feasibility_tol for every constraint.
  bool is_feasible(const Vector& y) const {
    check_dimension(y);
    for (const Constraint& c : constraints_) {
      if (c.evaluate(y) > feasibility_tol_) return false;
    }
    return true;
  }

  /// Indices with c_i(y) > feasibility_tol, in ascending order.
  std::vector<Index> violated_constraints(const Vector& y) const {
    check_dimension(y);
    std::vector<Index> out;
    for (Index i = 0; i < constraint_count(); ++i) {
      if (constraints_[static_cast<std::size_t>(i)].evaluate(y) >
          feasibility_tol_) {
        out.push_back(i);
      }
    }
    return out;
  }

  /// Smallest t > 0 with c_i(origin + t d) = 0 for the analytic constraint
  /// kinds (`d` must be unit length). Returns +inf when the ray never
  /// crosses, nullopt when the kind requires a numeric root finder.
  std::optional<Scalar> analytic_crossing(Index i, const Vector& d) const {
    const Constraint& c = constraints_[static_cast<std::size_t>(i)];
    const RayConstants& rc = ray_[static_cast<std::size_t>(i)];
    if (c.is_ball()) {
      const Scalar radius = c.as_ball().radius;
      if (rc.ball_gap_sq == Scalar(0)) return radius;  // centered on origin
      const Scalar q = rc.ball_gap.dot(d);
      const Scalar disc = q * q + radius * radius - rc.ball_gap_sq;
      return -q + std::sqrt(disc);
    }
    if (c.is_halfspace()) {
      const Scalar speed = c.as_halfspace().normal.dot(d);
      if (speed <= Scalar(0)) {
        return std::numeric_limits<Scalar>::infinity();
      }
      return -rc.slack / speed;
    }
    return std::nullopt;
  }

 private:
  struct RayConstants {
    Vector ball_gap;                 // origin - center, ball kind only
    Scalar ball_gap_sq = Scalar(0);  // squared norm of ball_gap
    Scalar slack = Scalar(0);        // normal . origin - offset, halfspaces
    Scalar value_at_origin = Scalar(0);
  };

  void check_dimension(const Vector& y) const {
    if (y.size() != origin_.size()) {
      throw DimensionMismatch("point has dimension " +
                              std::to_string(y.size()) + ", region has " +
                              std::to_string(origin_.size()));
    }
  }

  std::vector<Constraint> constraints_;
  Vector origin_;
  Scalar strict_margin_;
  Scalar feasibility_tol_;
  std::vector<RayConstants> ray_;  // origin-relative constants, fixed at build
};

}  // namespace hcr
