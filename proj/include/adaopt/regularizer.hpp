#pragma once

#include "adaopt/core.hpp"
#include "adaopt/feasible_set.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace adaopt {

/// Tagged regularizer value. Immutable; cheap to copy for the compact forms
/// produced by merge().
class Regularizer {
 public:
  /// 0.5 * scale * ||x - center||_M^2. Negative scales are allowed (they make
  /// the strong-convexity certificate unavailable).
  struct Quadratic {
    Point center;
    Metric metric;
    double scale = 1.0;
  };
  /// <v, x> + w
  struct Linear {
    Point v;
    double w = 0.0;
  };
  /// alpha * ||x||_1
  struct L1 {
    Index dim = 0;
    double alpha = 0.0;
  };
  struct Indicatrix {
    FeasibleSet set;
  };
  /// Arbitrary convex function given by a handle with closed-form directional
  /// derivative and gradient (e.g. B_l(., x_t) for implicit updates).
  struct Custom {
    Index dim = 0;
    FunctionHandle fn;
  };
  struct Sum {
    std::vector<Regularizer> terms;
  };
  using Variant = std::variant<Quadratic, Linear, L1, Indicatrix, Custom, Sum>;

  Regularizer() : v_(Sum{}) {}

  static Regularizer zero() { return Regularizer(); }
  static Regularizer quadratic(Point center, Metric metric, double scale = 1.0);
  /// 0.5 * scale * ||x - center||^2
  static Regularizer half_sq_norm(const Point& center, double scale);
  static Regularizer half_sq_norm(Index dim, double scale) { return half_sq_norm(Point::Zero(dim), scale); }
  static Regularizer linear(Point v, double w = 0.0);
  static Regularizer l1(Index dim, double alpha);
  static Regularizer indicatrix(FeasibleSet set);
  static Regularizer custom(Index dim, FunctionHandle fn);
  static Regularizer sum(std::vector<Regularizer> terms);

  const Variant& variant() const { return v_; }
  template <typename T>
  bool is() const { return std::holds_alternative<T>(v_); }
  template <typename T>
  const T& as() const { return std::get<T>(v_); }

  /// Value, +inf outside the domain.
  double value(const Point& x) const;
  ExtReal dir_derivative(const Point& x, const Point& z) const;
  bool has_closed_form() const { return true; }
  bool is_zero() const;
  /// Dimension, or -1 for the empty sum.
  Index dim() const;

  /// Leaves of the Sum tree, in order.
  std::vector<const Regularizer*> leaves() const;

  friend Regularizer operator+(const Regularizer& a, const Regularizer& b);
  Regularizer scaled(double c) const;
  /// -r for quadratic/linear parts only.
  Regularizer negated() const;

  FunctionHandle handle() const;
  std::string describe() const;

 private:
  explicit Regularizer(Variant v) : v_(std::move(v)) {}
  void collect(std::vector<const Regularizer*>& out) const;
  Variant v_;
};

/// Compact normal form: 0.5 x^T (A+ - A-) x + <b, x> + c + alpha ||x||_1
/// + indicatrices + custom terms.
struct CanonicalForm {
  Index dim = 0;
  std::optional<Metric> pos;
  std::optional<Metric> neg;
  Point b;
  double c = 0.0;
  double alpha = 0.0;
  std::vector<FeasibleSet> sets;
  std::vector<FunctionHandle> customs;

  bool has_quadratic() const { return pos.has_value() || neg.has_value(); }
};

CanonicalForm canonicalize(const Regularizer& r, Index dim);
Regularizer from_canonical(const CanonicalForm& c);

/// a + b brought to canonical form, so repeated accumulation stays O(d) terms.
Regularizer merge(const Regularizer& a, const Regularizer& b);

struct MetricCertificate {
  Metric metric;
  bool certified = true;
};

/// Metric M with B_r(x, y) >= 0.5 ||x - y||_M^2. Negative-scale quadratics
/// make the certificate "uncertified".
MetricCertificate certified_metric(const Regularizer& r, Index dim);

}  // namespace adaopt
