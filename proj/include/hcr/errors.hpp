// Copyright (c) 2026 The hcr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace hcr {

/// Base class of every recoverable error thrown by the library.
///
/// `category()` is a stable, lowercase identifier; the CLI maps it to an
/// exit code and prefixes error messages with it.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& what)
      : std::runtime_error(what), category_(std::move(category)) {}

  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

/// A vector argument does not match the dimension expected by a constraint,
/// region or model.
struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& what)
      : Error("dimension-mismatch", what) {}
};

/// A region failed a construction-time validity check (empty constraint
/// list, invalid constraint parameters, origin not strictly feasible).
struct InvalidRegion : Error {
  explicit InvalidRegion(const std::string& what)
      : Error("invalid-region", what) {}
};

/// A frontier search walked past its escape bound without crossing any
/// constraint: the region is unbounded along the queried ray.
struct EscapeBoundExceeded : Error {
  explicit EscapeBoundExceeded(const std::string& what)
      : Error("escape-bound", what) {}
};

/// The supplied bracket does not straddle a sign change.
struct NoSignChange : Error {
  explicit NoSignChange(const std::string& what)
      : Error("no-sign-change", what) {}
};

/// The root finder hit its iteration cap before converging.
struct MaxIterExceeded : Error {
  explicit MaxIterExceeded(const std::string& what)
      : Error("max-iter", what) {}
};

/// A point that must lie inside the feasible region does not.
struct InfeasibleInput : Error {
  explicit InfeasibleInput(const std::string& what)
      : Error("infeasible-input", what) {}
};

/// Training targets were not feasible; they must be projected first.
struct InfeasibleTargets : Error {
  explicit InfeasibleTargets(const std::string& what)
      : Error("infeasible-targets", what) {}
};

/// The training loss became NaN or infinite.
struct NonFiniteLoss : Error {
  explicit NonFiniteLoss(const std::string& what)
      : Error("non-finite-loss", what) {}
};

/// An iterative solver exhausted its sweep budget.
struct NotConverged : Error {
  explicit NotConverged(const std::string& what)
      : Error("not-converged", what) {}
};

/// A data-derived region collapsed (e.g. an upper bound equals the matching
/// lower bound) and has no interior.
struct DegenerateRegion : Error {
  explicit DegenerateRegion(const std::string& what)
      : Error("degenerate-region", what) {}
};

/// Malformed input file. `line()` is 1-based and 0 when not applicable.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::size_t line = 0)
      : Error("parse", what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace hcr
