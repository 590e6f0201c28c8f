#pragma once

#include "adaopt/feasible_set.hpp"
#include "adaopt/regularizer.hpp"

#include <optional>
#include <vector>

namespace adaopt {

/// B_r(x, at) term of a mirror-descent objective.
struct BregmanAnchor {
  Regularizer r;
  Point at;
};

/// <linear, x> + regularizer(x) + B_anchor(x) + sum smooth_i(x), over set.
struct Objective {
  Point linear;
  Regularizer regularizer;
  std::optional<BregmanAnchor> anchor;
  std::vector<FunctionHandle> smooth;  // need gradients and a strong-convexity modulus
  FeasibleSet set;

  double value(const Point& x) const;
};

struct SolverOptions {
  double tol = 1e-10;
  int max_iter = 10000;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact where the structure allows (unconstrained quadratics, isotropic
/// quadratics on any set, separable diagonal problems on boxes); otherwise
/// delegates to argmin_numeric.
Point argmin(const Objective& obj, const SolverOptions& opts = {});

/// Quadratic-family path of argmin (no L1, no custom terms).
Point argmin_quadratic(const Objective& obj, const SolverOptions& opts = {});

/// argmin <g, x> + 0.5 ||x||_S^2 + alpha ||x||_1 for diagonal S, over an
/// unconstrained set or a box.
Point argmin_l1_composite(const Point& g, const Metric& diag_metric, double alpha, const FeasibleSet& set);

/// Accelerated proximal gradient with backtracking and restarts. The returned
/// point is within tol of the minimizer, certified by strong convexity.
Point argmin_numeric(const Objective& obj, const SolverOptions& opts = {});

/// Whether argmin() will take an exact path for this objective.
bool has_exact_path(const Objective& obj);

}  // namespace adaopt
