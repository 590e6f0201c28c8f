#include "adaopt/regularizer.hpp"

#include <sstream>

namespace adaopt {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

ExtReal l1_dir(const Point& x, const Point& z, double alpha) {
  double s = 0.0;
  for (Index j = 0; j < x.size(); ++j) {
    s += x[j] > 0.0 ? z[j] : (x[j] < 0.0 ? -z[j] : std::abs(z[j]));
  }
  return ExtReal(alpha * s);
}

void add_metric(std::optional<Metric>& acc, const Metric& m) {
  acc = acc ? (*acc + m) : m;
}

}  // namespace

Regularizer Regularizer::quadratic(Point center, Metric metric, double scale) {
  require_same_dim(center.size(), metric.dim(), "Regularizer::quadratic");
  if (!std::isfinite(scale)) throw DomainError("Regularizer::quadratic: scale must be finite");
  return Regularizer(Quadratic{std::move(center), std::move(metric), scale});
}

Regularizer Regularizer::half_sq_norm(const Point& center, double scale) {
  return quadratic(center, Metric::scaled_identity(center.size(), 1.0), scale);
}

Regularizer Regularizer::linear(Point v, double w) {
  if (!v.allFinite() || !std::isfinite(w)) throw DomainError("Regularizer::linear: non-finite coefficients");
  return Regularizer(Linear{std::move(v), w});
}

Regularizer Regularizer::l1(Index dim, double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("Regularizer::l1: alpha must be >= 0");
  return Regularizer(L1{dim, alpha});
}

Regularizer Regularizer::indicatrix(FeasibleSet set) { return Regularizer(Indicatrix{std::move(set)}); }

Regularizer Regularizer::custom(Index dim, FunctionHandle fn) { return Regularizer(Custom{dim, std::move(fn)}); }

Regularizer Regularizer::sum(std::vector<Regularizer> terms) {
  Regularizer r;
  for (auto& t : terms) r = r + t;
  return r;
}

double Regularizer::value(const Point& x) const {
  return std::visit(
      Overloaded{[&](const Quadratic& q) {
                   const Point u = x - q.center;
                   return 0.5 * q.scale * quad_norm_sq(q.metric, u);
                 },
                 [&](const Linear& l) { return dot(l.v, x) + l.w; },
                 [&](const L1& l) {
                   require_same_dim(l.dim, x.size(), "L1::value");
                   return l.alpha * x.lpNorm<1>();
                 },
                 [&](const Indicatrix& i) { return i.set.contains(x) ? 0.0 : kInf; },
                 [&](const Custom& c) { return c.fn.value(x); },
                 [&](const Sum& s) {
                   double v = 0.0;
                   for (const auto& t : s.terms) {
                     const double tv = t.value(x);
                     if (tv == kInf) return kInf;
                     v += tv;
                   }
                   return v;
                 }},
      v_);
}

ExtReal Regularizer::dir_derivative(const Point& x, const Point& z) const {
  return std::visit(
      Overloaded{[&](const Quadratic& q) {
                   return ExtReal(q.scale * dot(q.metric.apply(Point(x - q.center)), z));
                 },
                 [&](const Linear& l) { return ExtReal(dot(l.v, z)); },
                 [&](const L1& l) {
                   require_same_dim(l.dim, z.size(), "L1::dir_derivative");
                   return l1_dir(x, z, l.alpha);
                 },
                 [&](const Indicatrix& i) {
                   return i.set.tangent_feasible(x, z) ? ExtReal(0.0) : ExtReal::infinity();
                 },
                 [&](const Custom& c) { return c.fn.dir_derivative(x, z); },
                 [&](const Sum& s) {
                   ExtReal v(0.0);
                   for (const auto& t : s.terms) v = v + t.dir_derivative(x, z);
                   return v;
                 }},
      v_);
}

bool Regularizer::is_zero() const {
  return std::visit(Overloaded{[](const Quadratic& q) { return q.scale == 0.0 || q.metric.is_zero(); },
                               [](const Linear& l) { return l.w == 0.0 && l.v.squaredNorm() == 0.0; },
                               [](const L1& l) { return l.alpha == 0.0; },
                               [](const Indicatrix& i) { return i.set.is<FeasibleSet::Unconstrained>(); },
                               [](const Custom&) { return false; },
                               [](const Sum& s) {
                                 for (const auto& t : s.terms) {
                                   if (!t.is_zero()) return false;
                                 }
                                 return true;
                               }},
                    v_);
}

Index Regularizer::dim() const {
  return std::visit(Overloaded{[](const Quadratic& q) { return q.center.size(); },
                               [](const Linear& l) { return l.v.size(); },
                               [](const L1& l) { return l.dim; },
                               [](const Indicatrix& i) { return i.set.dim(); },
                               [](const Custom& c) { return c.dim; },
                               [](const Sum& s) -> Index {
                                 for (const auto& t : s.terms) {
                                   const Index d = t.dim();
                                   if (d >= 0) return d;
                                 }
                                 return -1;
                               }},
                    v_);
}

void Regularizer::collect(std::vector<const Regularizer*>& out) const {
  if (const auto* s = std::get_if<Sum>(&v_)) {
    for (const auto& t : s->terms) t.collect(out);
  } else {
    out.push_back(this);
  }
}

std::vector<const Regularizer*> Regularizer::leaves() const {
  std::vector<const Regularizer*> out;
  collect(out);
  return out;
}

Regularizer operator+(const Regularizer& a, const Regularizer& b) {
  const Index da = a.dim(), db = b.dim();
  if (da >= 0 && db >= 0) require_same_dim(da, db, "Regularizer::operator+");
  Regularizer::Sum s;
  for (const auto* r : {&a, &b}) {
    if (const auto* inner = std::get_if<Regularizer::Sum>(&r->v_)) {
      s.terms.insert(s.terms.end(), inner->terms.begin(), inner->terms.end());
    } else {
      s.terms.push_back(*r);
    }
  }
  if (s.terms.size() == 1) return s.terms.front();
  return Regularizer(std::move(s));
}

Regularizer Regularizer::scaled(double c) const {
  if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("Regularizer::scaled: factor must be finite and >= 0");
  if (c == 0.0) return zero();
  return std::visit(
      Overloaded{[&](const Quadratic& q) { return quadratic(q.center, q.metric, c * q.scale); },
                 [&](const Linear& l) { return linear(c * l.v, c * l.w); },
                 [&](const L1& l) { return l1(l.dim, c * l.alpha); },
                 [&](const Indicatrix&) { return *this; },
                 [&](const Custom& cu) {
                   FunctionHandle src = cu.fn;
                   FunctionHandle h(
                       [src, c](const Point& x) { return c * src.value(x); },
                       [src, c](const Point& x, const Point& z) { return c * src.dir_derivative(x, z); },
                       src.has_gradient() ? FunctionHandle::GradFn([src, c](const Point& x) -> Point {
                         return c * src.gradient(x);
                       })
                                          : FunctionHandle::GradFn{});
                   h.strong_convexity = c * src.strong_convexity;
                   h.label = src.label;
                   return custom(cu.dim, std::move(h));
                 },
                 [&](const Sum& s) {
                   Sum out;
                   for (const auto& t : s.terms) out.terms.push_back(t.scaled(c));
                   return Regularizer(std::move(out));
                 }},
      v_);
}

Regularizer Regularizer::negated() const {
  return std::visit(
      Overloaded{[&](const Quadratic& q) { return quadratic(q.center, q.metric, -q.scale); },
                 [&](const Linear& l) { return linear(-l.v, -l.w); },
                 [&](const L1& l) -> Regularizer {
                   if (l.alpha == 0.0) return zero();
                   throw DomainError("Regularizer::negated: L1 term cannot be negated");
                 },
                 [&](const Indicatrix& i) -> Regularizer {
                   if (i.set.is<FeasibleSet::Unconstrained>()) return zero();
                   throw DomainError("Regularizer::negated: indicatrix cannot be negated");
                 },
                 [&](const Custom&) -> Regularizer {
                   throw DomainError("Regularizer::negated: custom term cannot be negated");
                 },
                 [&](const Sum& s) {
                   Sum out;
                   for (const auto& t : s.terms) out.terms.push_back(t.negated());
                   return Regularizer(std::move(out));
                 }},
      v_);
}

FunctionHandle Regularizer::handle() const {
  Regularizer self = *this;
  FunctionHandle h([self](const Point& x) { return self.value(x); },
                   [self](const Point& x, const Point& z) { return self.dir_derivative(x, z); });
  h.label = describe();
  return h;
}

std::string Regularizer::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{[&](const Quadratic& q) { os << "quadratic(scale=" << q.scale << ")"; },
                        [&](const Linear&) { os << "linear"; },
                        [&](const L1& l) { os << "l1(alpha=" << l.alpha << ")"; },
                        [&](const Indicatrix& i) { os << "indicatrix(" << i.set.kind_name() << ")"; },
                        [&](const Custom& c) { os << "custom(" << c.fn.label << ")"; },
                        [&](const Sum& s) {
                          os << "sum[";
                          for (std::size_t i = 0; i < s.terms.size(); ++i) {
                            os << (i ? "," : "") << s.terms[i].describe();
                          }
                          os << "]";
                        }},
             v_);
  return os.str();
}

CanonicalForm canonicalize(const Regularizer& r, Index dim) {
  CanonicalForm c;
  c.dim = dim;
  c.b = Point::Zero(dim);
  for (const Regularizer* leaf : r.leaves()) {
    const Index ld = leaf->dim();
    if (ld >= 0) require_same_dim(dim, ld, "canonicalize");
    std::visit(Overloaded{[&](const Regularizer::Quadratic& q) {
                            if (q.scale == 0.0 || q.metric.is_zero()) return;
                            const Metric m = q.metric.scaled(std::abs(q.scale));
                            const Point mc = m.apply(q.center);
                            const double sign = q.scale > 0.0 ? 1.0 : -1.0;
                            add_metric(q.scale > 0.0 ? c.pos : c.neg, m);
                            c.b -= sign * mc;
                            c.c += sign * 0.5 * q.center.dot(mc);
                          },
                          [&](const Regularizer::Linear& l) {
                            c.b += l.v;
                            c.c += l.w;
                          },
                          [&](const Regularizer::L1& l) { c.alpha += l.alpha; },
                          [&](const Regularizer::Indicatrix& i) {
                            if (i.set.is<FeasibleSet::Unconstrained>()) return;
                            for (const auto& s : c.sets) {
                              if (s == i.set) return;
                            }
                            c.sets.push_back(i.set);
                          },
                          [&](const Regularizer::Custom& cu) { c.customs.push_back(cu.fn); },
                          [&](const Regularizer::Sum&) {}},
               leaf->variant());
  }
  return c;
}

Regularizer from_canonical(const CanonicalForm& c) {
  Regularizer r;
  const Point zero = Point::Zero(c.dim);
  if (c.pos) r = r + Regularizer::quadratic(zero, *c.pos, 1.0);
  if (c.neg) r = r + Regularizer::quadratic(zero, *c.neg, -1.0);
  if (c.b.squaredNorm() != 0.0 || c.c != 0.0) r = r + Regularizer::linear(c.b, c.c);
  if (c.alpha != 0.0) r = r + Regularizer::l1(c.dim, c.alpha);
  for (const auto& s : c.sets) r = r + Regularizer::indicatrix(s);
  for (const auto& f : c.customs) r = r + Regularizer::custom(c.dim, f);
  return r;
}

Regularizer merge(const Regularizer& a, const Regularizer& b) {
  Index d = a.dim();
  if (d < 0) d = b.dim();
  if (d < 0) return Regularizer::zero();
  return from_canonical(canonicalize(a + b, d));
}

MetricCertificate certified_metric(const Regularizer& r, Index dim) {
  const CanonicalForm c = canonicalize(r, dim);
  Metric pos = c.pos ? *c.pos : Metric::zero(dim);
  double custom_mod = 0.0;
  for (const auto& f : c.customs) custom_mod += f.strong_convexity;
  if (custom_mod > 0.0) pos = pos + Metric::scaled_identity(dim, custom_mod);
  if (!c.neg) return {pos, true};
  try {
    return {difference(pos, *c.neg), false};
  } catch (const DomainError&) {
    return {Metric::zero(dim), false};
  }
}

}  // namespace adaopt
