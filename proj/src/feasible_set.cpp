#include "adaopt/feasible_set.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace adaopt {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

FeasibleSet FeasibleSet::unconstrained(Index dim) { return FeasibleSet(Unconstrained{dim}); }

FeasibleSet FeasibleSet::box(Point lo, Point hi) {
  require_same_dim(lo.size(), hi.size(), "FeasibleSet::box");
  if (!lo.allFinite() || !hi.allFinite()) throw DomainError("FeasibleSet::box: bounds must be finite");
  if ((lo.array() > hi.array()).any()) throw DomainError("FeasibleSet::box: lo > hi");
  return FeasibleSet(Box{std::move(lo), std::move(hi)});
}

FeasibleSet FeasibleSet::box(Index dim, double lo, double hi) {
  return box(Point::Constant(dim, lo), Point::Constant(dim, hi));
}

FeasibleSet FeasibleSet::ball(Point center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("FeasibleSet::ball: radius must be > 0");
  if (!center.allFinite()) throw DomainError("FeasibleSet::ball: center must be finite");
  return FeasibleSet(Ball{std::move(center), radius});
}

FeasibleSet FeasibleSet::ball(Index dim, double radius) { return ball(Point::Zero(dim), radius); }

FeasibleSet FeasibleSet::simplex(Index dim, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("FeasibleSet::simplex: scale must be > 0");
  if (dim < 1) throw DimensionError("FeasibleSet::simplex: dim must be >= 1");
  return FeasibleSet(Simplex{dim, scale});
}

Index FeasibleSet::dim() const {
  return std::visit(Overloaded{[](const Unconstrained& u) { return u.dim; },
                               [](const Box& b) { return b.lo.size(); },
                               [](const Ball& b) { return b.center.size(); },
                               [](const Simplex& s) { return s.dim; }},
                    v_);
}

std::string FeasibleSet::kind_name() const {
  return std::visit(Overloaded{[](const Unconstrained&) { return std::string("unconstrained"); },
                               [](const Box&) { return std::string("box"); },
                               [](const Ball&) { return std::string("ball"); },
                               [](const Simplex&) { return std::string("simplex"); }},
                    v_);
}

bool FeasibleSet::contains(const Point& x, double tol) const {
  require_same_dim(dim(), x.size(), "FeasibleSet::contains");
  if (!x.allFinite()) return false;
  return std::visit(
      Overloaded{[](const Unconstrained&) { return true; },
                 [&](const Box& b) {
                   return ((x - b.lo).array() >= -tol).all() && ((b.hi - x).array() >= -tol).all();
                 },
                 [&](const Ball& b) { return (x - b.center).norm() <= b.radius * (1.0 + tol) + tol; },
                 [&](const Simplex& s) {
                   return (x.array() >= -tol).all() &&
                          std::abs(x.sum() - s.scale) <= tol * (1.0 + s.scale);
                 }},
      v_);
}

double FeasibleSet::diameter() const {
  return std::visit(Overloaded{[](const Unconstrained&) { return kInf; },
                               [](const Box& b) { return (b.hi - b.lo).norm(); },
                               [](const Ball& b) { return 2.0 * b.radius; },
                               [](const Simplex& s) { return s.dim > 1 ? s.scale * std::sqrt(2.0) : 0.0; }},
                    v_);
}

Point FeasibleSet::center() const {
  return std::visit(Overloaded{[](const Unconstrained& u) -> Point { return Point::Zero(u.dim); },
                               [](const Box& b) -> Point { return 0.5 * (b.lo + b.hi); },
                               [](const Ball& b) -> Point { return b.center; },
                               [](const Simplex& s) -> Point {
                                 return Point::Constant(s.dim, s.scale / double(s.dim));
                               }},
                    v_);
}

Point FeasibleSet::default_start() const {
  Point z = Point::Zero(dim());
  return contains(z, 0.0) ? z : center();
}

Point FeasibleSet::sample(std::mt19937_64& rng) const {
  const Index d = dim();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return std::visit(
      Overloaded{[&](const Unconstrained&) -> Point {
                   Point x(d);
                   for (Index j = 0; j < d; ++j) x[j] = 3.0 * normal(rng);
                   return x;
                 },
                 [&](const Box& b) -> Point {
                   Point x(d);
                   for (Index j = 0; j < d; ++j) x[j] = b.lo[j] + unif(rng) * (b.hi[j] - b.lo[j]);
                   return x;
                 },
                 [&](const Ball& b) -> Point {
                   Point u(d);
                   for (Index j = 0; j < d; ++j) u[j] = normal(rng);
                   const double n = u.norm();
                   if (n == 0.0) return b.center;
                   const double rad = b.radius * std::pow(unif(rng), 1.0 / double(d));
                   return b.center + (rad / n) * u;
                 },
                 [&](const Simplex& s) -> Point {
                   std::exponential_distribution<double> expo(1.0);
                   Point x(d);
                   for (Index j = 0; j < d; ++j) x[j] = expo(rng);
                   return s.scale * x / x.sum();
                 }},
      v_);
}

bool FeasibleSet::tangent_feasible(const Point& x, const Point& z) const {
  require_same_dim(dim(), z.size(), "FeasibleSet::tangent_feasible");
  if (z.squaredNorm() == 0.0) return true;
  constexpr double tol = 1e-12;
  return std::visit(
      Overloaded{[](const Unconstrained&) { return true; },
                 [&](const Box& b) {
                   for (Index j = 0; j < x.size(); ++j) {
                     const double w = tol * (1.0 + std::abs(b.hi[j] - b.lo[j]));
                     if (z[j] < 0.0 && x[j] <= b.lo[j] + w) return false;
                     if (z[j] > 0.0 && x[j] >= b.hi[j] - w) return false;
                   }
                   return true;
                 },
                 [&](const Ball& b) {
                   const Point u = x - b.center;
                   if (u.norm() < b.radius * (1.0 - 1e-12)) return true;
                   return u.dot(z) < 0.0;
                 },
                 [&](const Simplex& s) {
                   if (std::abs(z.sum()) > 1e-10 * (1.0 + z.lpNorm<1>())) return false;
                   for (Index j = 0; j < x.size(); ++j) {
                     if (z[j] < 0.0 && x[j] <= tol * s.scale) return false;
                   }
                   return true;
                 }},
      v_);
}

Point FeasibleSet::minimize_linear(const Point& g) const {
  require_same_dim(dim(), g.size(), "FeasibleSet::minimize_linear");
  return std::visit(
      Overloaded{[](const Unconstrained&) -> Point {
                   throw DomainError("minimize_linear: unbounded set");
                 },
                 [&](const Box& b) -> Point {
                   Point x(g.size());
                   for (Index j = 0; j < g.size(); ++j) {
                     x[j] = g[j] > 0.0 ? b.lo[j] : (g[j] < 0.0 ? b.hi[j] : 0.5 * (b.lo[j] + b.hi[j]));
                   }
                   return x;
                 },
                 [&](const Ball& b) -> Point {
                   const double n = g.norm();
                   if (n == 0.0) return b.center;
                   return b.center - (b.radius / n) * g;
                 },
                 [&](const Simplex& s) -> Point {
                   Index j;
                   g.minCoeff(&j);
                   Point x = Point::Zero(g.size());
                   x[j] = s.scale;
                   return x;
                 }},
      v_);
}

double FeasibleSet::max_sq_distance(const Point& a) const {
  require_same_dim(dim(), a.size(), "FeasibleSet::max_sq_distance");
  return std::visit(
      Overloaded{[](const Unconstrained&) -> double { return kInf; },
                 [&](const Box& b) {
                   double s = 0.0;
                   for (Index j = 0; j < a.size(); ++j) {
                     const double m = std::max(std::abs(a[j] - b.lo[j]), std::abs(a[j] - b.hi[j]));
                     s += m * m;
                   }
                   return s;
                 },
                 [&](const Ball& b) {
                   const double r = (a - b.center).norm() + b.radius;
                   return r * r;
                 },
                 [&](const Simplex& s) {
                   // convex function: maximized at a vertex
                   double best = 0.0;
                   const double base = a.squaredNorm();
                   for (Index j = 0; j < a.size(); ++j) {
                     const double v = base - a[j] * a[j] + (s.scale - a[j]) * (s.scale - a[j]);
                     best = std::max(best, v);
                   }
                   return best;
                 }},
      v_);
}

Point project_simplex(const Point& y, double s) {
  const Index d = y.size();
  std::vector<double> u(y.data(), y.data() + d);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (Index j = 0; j < d; ++j) {
    cum += u[j];
    const double t = (cum - s) / double(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  return (y.array() - theta).max(0.0).matrix();
}

Point project(const FeasibleSet& set, const Point& y) {
  require_same_dim(set.dim(), y.size(), "project");
  return std::visit(Overloaded{[&](const FeasibleSet::Unconstrained&) -> Point { return y; },
                               [&](const FeasibleSet::Box& b) -> Point {
                                 return y.cwiseMax(b.lo).cwiseMin(b.hi);
                               },
                               [&](const FeasibleSet::Ball& b) -> Point {
                                 const Point u = y - b.center;
                                 const double n = u.norm();
                                 if (n <= b.radius) return y;
                                 return b.center + (b.radius / n) * u;
                               },
                               [&](const FeasibleSet::Simplex& s) -> Point {
                                 return project_simplex(y, s.scale);
                               }},
                    set.variant());
}

}  // namespace adaopt
