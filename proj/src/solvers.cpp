#include "adaopt/solvers.hpp"

#include <sstream>

namespace adaopt {

namespace {

/// Objective reduced to 0.5 x^T A x + <b, x> + alpha ||x||_1 + sum h_i(x) + I_set(x).
struct Reduced {
  Index d = 0;
  std::optional<Metric> pos;
  std::optional<Metric> neg;
  Point b;
  double alpha = 0.0;
  FeasibleSet set;
  std::vector<FunctionHandle> smooth;

  bool has_neg() const { return neg.has_value() && !neg->is_zero(); }

  Point apply(const Point& x) const {
    Point y = pos ? pos->apply(x) : Point::Zero(d);
    if (neg) y -= neg->apply(x);
    return y;
  }
  double quad_min_eig() const {
    if (!has_neg()) return pos ? pos->min_eigenvalue() : 0.0;
    Matrix a = (pos ? pos->dense() : Matrix::Zero(d, d)) - neg->dense();
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    return es.eigenvalues().minCoeff();
  }
  double quad_max_eig() const { return pos ? pos->max_eigenvalue() : 0.0; }
  double sigma() const {
    double s = quad_min_eig();
    for (const auto& h : smooth) s += h.strong_convexity;
    return s;
  }
  double smooth_value(const Point& x) const {
    double v = 0.5 * x.dot(apply(x)) + b.dot(x);
    for (const auto& h : smooth) v += h.value(x);
    return v;
  }
  Point smooth_grad(const Point& x) const {
    Point g = apply(x) + b;
    for (const auto& h : smooth) g += h.gradient(x);
    return g;
  }
};

void add_metric(std::optional<Metric>& acc, const Metric& m) { acc = acc ? (*acc + m) : m; }

FeasibleSet resolve_set(const FeasibleSet& base, const std::vector<FeasibleSet>& extra) {
  FeasibleSet out = base;
  for (const auto& s : extra) {
    if (out.is<FeasibleSet::Unconstrained>()) {
      out = s;
    } else if (!(out == s)) {
      throw SolverError("argmin: intersection of distinct feasible sets is not supported");
    }
  }
  return out;
}

FunctionHandle anchored_custom(const FunctionHandle& f, const Point& at) {
  if (!f.has_gradient()) throw SolverError("argmin: custom term in a Bregman anchor needs a gradient");
  const Point ga = f.gradient(at);
  FunctionHandle h([f, ga](const Point& x) { return f.value(x) - ga.dot(x); },
                   [f, ga](const Point& x, const Point& z) { return f.dir_derivative(x, z) + ExtReal(-ga.dot(z)); },
                   [f, ga](const Point& x) -> Point { return f.gradient(x) - ga; });
  h.strong_convexity = f.strong_convexity;
  h.label = "anchored(" + f.label + ")";
  return h;
}

Reduced reduce(const Objective& obj) {
  Reduced red;
  red.d = obj.set.dim();
  require_same_dim(red.d, obj.linear.size(), "argmin: linear term");
  red.b = obj.linear;
  std::vector<FeasibleSet> sets;

  const CanonicalForm c = canonicalize(obj.regularizer, red.d);
  if (c.pos) add_metric(red.pos, *c.pos);
  if (c.neg) add_metric(red.neg, *c.neg);
  red.b += c.b;
  red.alpha += c.alpha;
  sets.insert(sets.end(), c.sets.begin(), c.sets.end());
  for (const auto& f : c.customs) {
    if (!f.has_gradient()) throw SolverError("argmin: custom regularizer term needs a gradient");
    red.smooth.push_back(f);
  }

  if (obj.anchor) {
    const Point& a = obj.anchor->at;
    require_same_dim(red.d, a.size(), "argmin: anchor");
    const CanonicalForm ca = canonicalize(obj.anchor->r, red.d);
    if (ca.alpha != 0.0) throw SolverError("argmin: L1 term inside a Bregman anchor is not supported");
    if (ca.pos) {
      add_metric(red.pos, *ca.pos);
      red.b -= ca.pos->apply(a);
    }
    if (ca.neg) {
      add_metric(red.neg, *ca.neg);
      red.b += ca.neg->apply(a);
    }
    sets.insert(sets.end(), ca.sets.begin(), ca.sets.end());
    for (const auto& f : ca.customs) red.smooth.push_back(anchored_custom(f, a));
  }
  for (const auto& f : obj.smooth) {
    if (!f.has_gradient()) throw SolverError("argmin: smooth term needs a gradient");
    red.smooth.push_back(f);
  }
  red.set = resolve_set(obj.set, sets);
  return red;
}

Point soft_threshold(const Point& v, double thr) {
  return (v.array().sign() * (v.array().abs() - thr).max(0.0)).matrix();
}

Point prox(const Reduced& red, const Point& v, double step) {
  if (red.alpha == 0.0) return project(red.set, v);
  const double thr = step * red.alpha;
  if (red.set.is<FeasibleSet::Unconstrained>() || red.set.is<FeasibleSet::Box>()) {
    return project(red.set, soft_threshold(v, thr));
  }
  if (red.set.is<FeasibleSet::Simplex>()) return project(red.set, v);  // L1 is constant there
  if (red.set.is<FeasibleSet::Ball>() && red.set.as<FeasibleSet::Ball>().center.squaredNorm() == 0.0) {
    return project(red.set, soft_threshold(v, thr));
  }
  throw SolverError("argmin: L1 term on an off-center ball is not supported");
}

[[noreturn]] void ill_posed(double sigma) {
  std::ostringstream os;
  os << "ill-posed argmin: objective is not strictly convex (modulus " << sigma << ")";
  throw SolverError(os.str());
}

enum class Path { UnconstrainedSolve, IsotropicProject, SeparableBox, L1Composite, Numeric };

Path choose_path(const Reduced& red) {
  if (!red.smooth.empty() || red.has_neg() || !red.pos) return Path::Numeric;
  const Metric& a = *red.pos;
  const bool separable = a.kind() != MetricKind::Full;
  const bool box_like = red.set.is<FeasibleSet::Unconstrained>() || red.set.is<FeasibleSet::Box>();
  if (red.alpha > 0.0) return separable && box_like ? Path::L1Composite : Path::Numeric;
  if (red.set.is<FeasibleSet::Unconstrained>()) return Path::UnconstrainedSolve;
  if (a.kind() == MetricKind::ScaledIdentity) return Path::IsotropicProject;
  if (separable && red.set.is<FeasibleSet::Box>()) return Path::SeparableBox;
  return Path::Numeric;
}

Point exact(const Reduced& red, Path path) {
  const Metric& a = *red.pos;
  if (!a.positive_definite()) ill_posed(a.min_eigenvalue());
  switch (path) {
    case Path::UnconstrainedSolve:
      switch (a.kind()) {
        case MetricKind::ScaledIdentity: return -red.b / a.gamma();
        case MetricKind::Diagonal: return -red.b.cwiseQuotient(a.weights());
        case MetricKind::Full: {
          Eigen::LLT<Matrix> llt(a.dense());
          if (llt.info() != Eigen::Success) ill_posed(a.min_eigenvalue());
          return llt.solve(-red.b);
        }
      }
      break;
    case Path::IsotropicProject: return project(red.set, Point(-red.b / a.gamma()));
    case Path::SeparableBox: return project(red.set, Point(-red.b.cwiseQuotient(a.diag())));
    case Path::L1Composite: return argmin_l1_composite(red.b, a, red.alpha, red.set);
    case Path::Numeric: break;
  }
  throw SolverError("argmin: no exact path");
}

Point numeric(const Reduced& red, const Objective& obj, const SolverOptions& opts) {
  const double sigma = red.sigma();
  if (!(sigma > 0.0)) ill_posed(sigma);
  Point x0 = obj.anchor ? obj.anchor->at : red.set.center();
  Point x = prox(red, x0, 0.0);
  Point y = x;
  double theta = 1.0;
  double step = 1.0 / std::max({red.quad_max_eig(), sigma, 1e-300});
  const double eps = std::numeric_limits<double>::epsilon();
  for (int it = 0; it < opts.max_iter; ++it) {
    const Point gy = red.smooth_grad(y);
    const double sy = red.smooth_value(y);
    Point xn;
    for (;;) {
      xn = prox(red, Point(y - step * gy), step);
      const Point diff = xn - y;
      const double lhs = red.smooth_value(xn);
      const double rhs = sy + gy.dot(diff) + diff.squaredNorm() / (2.0 * step);
      if (lhs <= rhs + 1e-14 * (1.0 + std::abs(sy))) break;
      step *= 0.5;
      if (step < 1e-300) throw SolverError("argmin_numeric: line search failed");
    }
    const Point gx = red.smooth_grad(xn);
    const Point u = (y - xn) / step - gy + gx;
    // rounding floor of the certificate
    const double floor = 64.0 * eps * (gx.norm() + xn.norm() / step + red.b.norm()) / sigma;
    const double bound = u.norm() / sigma;
    if (bound <= std::max(opts.tol, floor)) return xn;
    // restart when momentum points uphill
    if ((y - xn).dot(xn - x) > 0.0) {
      theta = 1.0;
      y = xn;
    } else {
      const double theta_n = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
      y = xn + ((theta - 1.0) / theta_n) * (xn - x);
      theta = theta_n;
    }
    x = xn;
  }
  std::ostringstream os;
  os << "argmin_numeric: no certificate within " << opts.max_iter << " iterations";
  throw SolverError(os.str());
}

}  // namespace

double Objective::value(const Point& x) const {
  double v = linear.dot(x) + regularizer.value(x);
  if (anchor) {
    const ExtReal b = bregman(anchor->r, x, anchor->at);
    if (b.is_inf()) return kInf;
    v += b.value();
  }
  for (const auto& h : smooth) v += h.value(x);
  if (!set.contains(x)) return kInf;
  return v;
}

Point argmin_l1_composite(const Point& g, const Metric& diag_metric, double alpha, const FeasibleSet& set) {
  require_same_dim(g.size(), diag_metric.dim(), "argmin_l1_composite");
  if (diag_metric.kind() == MetricKind::Full) throw SolverError("argmin_l1_composite: metric must be diagonal");
  if (!diag_metric.positive_definite()) ill_posed(diag_metric.min_eigenvalue());
  if (!(set.is<FeasibleSet::Unconstrained>() || set.is<FeasibleSet::Box>())) {
    throw SolverError("argmin_l1_composite: set must be unconstrained or a box");
  }
  if (!(alpha >= 0.0)) throw DomainError("argmin_l1_composite: alpha must be >= 0");
  const Point w = diag_metric.diag();
  Point x(g.size());
  for (Index j = 0; j < g.size(); ++j) {
    const double m = std::max(0.0, std::abs(g[j]) - alpha);
    x[j] = m == 0.0 ? 0.0 : -std::copysign(m, g[j]) / w[j];
  }
  return project(set, x);
}

bool has_exact_path(const Objective& obj) { return choose_path(reduce(obj)) != Path::Numeric; }

Point argmin_quadratic(const Objective& obj, const SolverOptions& opts) {
  const Reduced red = reduce(obj);
  const Path p = choose_path(red);
  if (p == Path::Numeric) return numeric(red, obj, opts);
  return exact(red, p);
}

Point argmin(const Objective& obj, const SolverOptions& opts) { return argmin_quadratic(obj, opts); }

Point argmin_numeric(const Objective& obj, const SolverOptions& opts) {
  return numeric(reduce(obj), obj, opts);
}

}  // namespace adaopt
