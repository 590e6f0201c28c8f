#pragma once

#include "adaopt/core.hpp"

#include <random>
#include <string>
#include <variant>

namespace adaopt {

/// Closed convex feasible set.
class FeasibleSet {
 public:
  struct Unconstrained {
    Index dim = 0;
    bool operator==(const Unconstrained&) const = default;
  };
  struct Box {
    Point lo, hi;
    bool operator==(const Box& o) const { return lo == o.lo && hi == o.hi; }
  };
  struct Ball {
    Point center;
    double radius = 1.0;
    bool operator==(const Ball& o) const { return center == o.center && radius == o.radius; }
  };
  /// {x >= 0, sum(x) = scale}
  struct Simplex {
    Index dim = 0;
    double scale = 1.0;
    bool operator==(const Simplex&) const = default;
  };
  using Variant = std::variant<Unconstrained, Box, Ball, Simplex>;

  FeasibleSet() : v_(Unconstrained{0}) {}

  static FeasibleSet unconstrained(Index dim);
  static FeasibleSet box(Point lo, Point hi);
  static FeasibleSet box(Index dim, double lo, double hi);
  static FeasibleSet ball(Point center, double radius);
  static FeasibleSet ball(Index dim, double radius);
  static FeasibleSet simplex(Index dim, double scale = 1.0);

  const Variant& variant() const { return v_; }
  template <typename T>
  bool is() const { return std::holds_alternative<T>(v_); }
  template <typename T>
  const T& as() const { return std::get<T>(v_); }

  Index dim() const;
  bool bounded() const { return !is<Unconstrained>(); }
  std::string kind_name() const;

  bool contains(const Point& x, double tol = 1e-9) const;
  /// sup_{x,y} ||x - y||; +inf when unbounded.
  double diameter() const;
  Point center() const;
  /// Default initial point: 0 when feasible, otherwise the center.
  Point default_start() const;
  /// Random feasible point (probes for certificates).
  Point sample(std::mt19937_64& rng) const;
  /// True when x + a z stays feasible for all small a > 0 (x assumed feasible).
  bool tangent_feasible(const Point& x, const Point& z) const;
  /// argmin_{x in set} <g, x>; requires a bounded set.
  Point minimize_linear(const Point& g) const;
  /// max_{x in set} ||x - a||^2; requires a bounded set.
  double max_sq_distance(const Point& a) const;

  bool operator==(const FeasibleSet& o) const { return v_ == o.v_; }

 private:
  explicit FeasibleSet(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// Euclidean projection onto the set.
Point project(const FeasibleSet& set, const Point& y);

/// Euclidean projection onto {x >= 0, sum x = s}.
Point project_simplex(const Point& y, double s);

}  // namespace adaopt
