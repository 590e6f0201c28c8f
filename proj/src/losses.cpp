#include "adaopt/losses.hpp"

#include <algorithm>

namespace adaopt {

Loss::Loss(Index dim, ValueFn value, GradFn grad, DirFn dir, Metadata meta)
    : dim_(dim),
      value_(std::make_shared<const ValueFn>(std::move(value))),
      grad_(std::make_shared<const GradFn>(std::move(grad))),
      dir_(std::make_shared<const DirFn>(std::move(dir))),
      meta_(std::move(meta)) {}

Loss Loss::scaled(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("Loss::scaled: factor must be > 0");
  auto v = value_;
  auto g = grad_;
  auto d = dir_;
  Metadata m = meta_;
  m.name = meta_.name + "*" + std::to_string(c);
  if (m.smoothness) *m.smoothness *= c;
  if (m.strong_convexity) *m.strong_convexity *= c;
  if (m.lipschitz) *m.lipschitz *= c;
  if (m.linear) m.linear_coef *= c;
  return Loss(
      dim_, [v, c](const Point& x) { return c * (*v)(x); },
      [g, c](const Point& x) -> Point { return c * (*g)(x); },
      [d, c](const Point& x, const Point& z) { return c * (*d)(x, z); }, std::move(m));
}

FunctionHandle Loss::handle() const {
  Loss self = *this;
  FunctionHandle h([self](const Point& x) { return self.value(x); },
                   [self](const Point& x, const Point& z) { return self.dir_derivative(x, z); },
                   [self](const Point& x) { return self.gradient(x); });
  h.strong_convexity = meta_.strong_convexity.value_or(0.0);
  h.label = meta_.name;
  return h;
}

namespace losses {

namespace {

double sgn(double u) { return u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0); }

/// Sum over coordinates of a separable one-dimensional directional derivative.
template <typename Dir1>
ExtReal separable_dir(const Point& x, const Point& a, const Point& z, Dir1 dir1) {
  require_same_dim(x.size(), z.size(), "dir_derivative");
  ExtReal s(0.0);
  for (Index j = 0; j < x.size(); ++j) {
    if (z[j] == 0.0) continue;
    s = s + dir1(x[j] - a[j], z[j]);
  }
  return s;
}

}  // namespace

Loss linear(const Point& g) {
  Loss::Metadata m;
  m.name = "linear";
  m.smoothness = 0.0;
  m.lipschitz = g.norm();
  m.linear = true;
  m.linear_coef = g;
  return Loss(
      g.size(), [g](const Point& x) { return dot(g, x); }, [g](const Point&) { return g; },
      [g](const Point&, const Point& z) { return ExtReal(dot(g, z)); }, std::move(m));
}

Loss quadratic(const Point& a, double mu) {
  if (!(mu > 0.0)) throw DomainError("losses::quadratic: mu must be > 0");
  Loss::Metadata m;
  m.name = "quadratic";
  m.smoothness = mu;
  m.strong_convexity = mu;
  m.star_center = a;
  m.tau = 1.0;
  m.quad_center = a;
  return Loss(
      a.size(), [a, mu](const Point& x) { return 0.5 * mu * (x - a).squaredNorm(); },
      [a, mu](const Point& x) -> Point { return mu * (x - a); },
      [a, mu](const Point& x, const Point& z) { return ExtReal(mu * dot(Point(x - a), z)); }, std::move(m));
}

Loss abs_l1(const Point& a, double w) {
  if (!(w > 0.0)) throw DomainError("losses::abs_l1: weight must be > 0");
  Loss::Metadata m;
  m.name = "abs";
  m.star_center = a;
  m.tau = 1.0;
  m.lipschitz = w * std::sqrt(double(a.size()));
  m.differentiable = false;
  return Loss(
      a.size(), [a, w](const Point& x) { return w * (x - a).lpNorm<1>(); },
      [a, w](const Point& x) -> Point { return w * (x - a).unaryExpr([](double u) { return sgn(u); }); },
      [a, w](const Point& x, const Point& z) {
        return w * separable_dir(x, a, z, [](double u, double zj) {
                 return ExtReal(u != 0.0 ? sgn(u) * zj : std::abs(zj));
               });
      },
      std::move(m));
}

Loss star_piecewise(const Point& a) {
  Loss::Metadata m;
  m.name = "star-piecewise";
  m.star_center = a;
  m.tau = 1.0;
  m.lipschitz = 2.0 * std::sqrt(double(a.size()));
  m.convex = false;
  m.differentiable = false;
  auto phi = [](double u) { return std::abs(u) <= 1.0 ? std::abs(u) : 2.0 * std::abs(u); };
  return Loss(
      a.size(),
      [a, phi](const Point& x) {
        double s = 0.0;
        for (Index j = 0; j < x.size(); ++j) s += phi(x[j] - a[j]);
        return s;
      },
      [a](const Point& x) -> Point {
        return (x - a).unaryExpr([](double u) { return std::abs(u) <= 1.0 ? sgn(u) : 2.0 * sgn(u); });
      },
      [a](const Point& x, const Point& z) {
        return separable_dir(x, a, z, [](double u, double zj) {
          const double au = std::abs(u);
          if (u == 0.0) return ExtReal(std::abs(zj));
          if (au < 1.0) return ExtReal(sgn(u) * zj);
          if (au > 1.0) return ExtReal(2.0 * sgn(u) * zj);
          // on the jump: outward moves are infinitely steep
          if (sgn(u) * zj > 0.0) return ExtReal::infinity();
          return ExtReal(sgn(u) * zj);
        });
      },
      std::move(m));
}

Loss sqrt_abs(const Point& a) {
  Loss::Metadata m;
  m.name = "sqrt-abs";
  m.star_center = a;
  m.tau = 0.5;
  m.convex = false;
  m.differentiable = false;
  return Loss(
      a.size(),
      [a](const Point& x) { return (x - a).cwiseAbs().cwiseSqrt().sum(); },
      [a](const Point& x) -> Point {
        return (x - a).unaryExpr([](double u) { return u == 0.0 ? 0.0 : sgn(u) / (2.0 * std::sqrt(std::abs(u))); });
      },
      [a](const Point& x, const Point& z) {
        return separable_dir(x, a, z, [](double u, double zj) {
          if (u == 0.0) return ExtReal::infinity();
          return ExtReal(sgn(u) * zj / (2.0 * std::sqrt(std::abs(u))));
        });
      },
      std::move(m));
}

Loss product_power(const Point& p) {
  if ((p.array() <= 0.0).any()) throw DomainError("losses::product_power: powers must be > 0");
  Loss::Metadata m;
  m.name = "product-power";
  m.star_center = Point::Zero(p.size());
  m.tau = std::min(1.0, p.sum());
  m.convex = false;
  m.differentiable = false;
  auto value = [p](const Point& x) {
    double v = 1.0;
    for (Index i = 0; i < x.size(); ++i) v *= std::pow(std::abs(x[i]), p[i]);
    return v;
  };
  return Loss(
      p.size(), value,
      [p, value](const Point& x) -> Point {
        Point g = Point::Zero(x.size());
        if ((x.array() == 0.0).any()) return g;
        const double f = value(x);
        for (Index i = 0; i < x.size(); ++i) g[i] = p[i] * f / x[i];
        return g;
      },
      [p, value](const Point& x, const Point& z) {
        require_same_dim(x.size(), z.size(), "product_power::dir_derivative");
        double zero_power = 0.0, rest = 1.0, zprod = 1.0;
        bool any_zero = false;
        for (Index i = 0; i < x.size(); ++i) {
          if (x[i] == 0.0) {
            any_zero = true;
            if (z[i] == 0.0) return ExtReal(0.0);
            zero_power += p[i];
            zprod *= std::pow(std::abs(z[i]), p[i]);
          } else {
            rest *= std::pow(std::abs(x[i]), p[i]);
          }
        }
        if (!any_zero) {
          const double f = value(x);
          double s = 0.0;
          for (Index i = 0; i < x.size(); ++i) s += p[i] * f * z[i] / x[i];
          return ExtReal(s);
        }
        if (zero_power > 1.0) return ExtReal(0.0);
        if (zero_power == 1.0) return ExtReal(zprod * rest);
        return ExtReal::infinity();
      },
      std::move(m));
}

Loss huber(const Point& a, double delta) {
  if (!(delta > 0.0)) throw DomainError("losses::huber: delta must be > 0");
  Loss::Metadata m;
  m.name = "huber";
  m.smoothness = 1.0;
  m.star_center = a;
  m.tau = 1.0;
  m.lipschitz = delta * std::sqrt(double(a.size()));
  auto grad = [a, delta](const Point& x) -> Point { return (x - a).cwiseMax(-delta).cwiseMin(delta); };
  return Loss(
      a.size(),
      [a, delta](const Point& x) {
        double s = 0.0;
        for (Index j = 0; j < x.size(); ++j) {
          const double u = std::abs(x[j] - a[j]);
          s += u <= delta ? 0.5 * u * u : delta * (u - 0.5 * delta);
        }
        return s;
      },
      grad, [grad](const Point& x, const Point& z) { return ExtReal(dot(grad(x), z)); }, std::move(m));
}

Loss pl_sine(const Point& a) {
  Loss::Metadata m;
  m.name = "pl-sine";
  m.smoothness = 8.0;
  m.star_center = a;
  m.convex = false;
  auto grad = [a](const Point& x) -> Point {
    return (x - a).unaryExpr([](double u) { return 2.0 * u + 3.0 * std::sin(2.0 * u); });
  };
  return Loss(
      a.size(),
      [a](const Point& x) {
        double s = 0.0;
        for (Index j = 0; j < x.size(); ++j) {
          const double u = x[j] - a[j];
          s += u * u + 3.0 * std::sin(u) * std::sin(u);
        }
        return s;
      },
      grad, [grad](const Point& x, const Point& z) { return ExtReal(dot(grad(x), z)); }, std::move(m));
}

}  // namespace losses

FunctionHandle loss_bregman_handle(const Loss& l, const Point& anchor) {
  if (!l.meta().differentiable) throw DomainError("loss_bregman_handle: loss must be differentiable");
  const Point ga = l.gradient(anchor);
  const double fa = l.value(anchor);
  FunctionHandle h([l, ga, fa, anchor](const Point& x) { return l.value(x) - fa - ga.dot(x - anchor); },
                   [l, ga](const Point& x, const Point& z) { return l.dir_derivative(x, z) + ExtReal(-ga.dot(z)); },
                   [l, ga](const Point& x) -> Point { return l.gradient(x) - ga; });
  h.strong_convexity = l.meta().strong_convexity.value_or(0.0);
  h.label = "breg(" + l.meta().name + ")";
  return h;
}

LossSequence LossSequence::fixed(const Loss& f, int T) {
  LossSequence s;
  s.kind_ = Kind::Fixed;
  s.losses_.assign(static_cast<std::size_t>(T), f);
  return s;
}

LossSequence LossSequence::drifting_quadratic(const std::vector<Point>& centers, double mu) {
  LossSequence s;
  s.kind_ = Kind::Drifting;
  for (const auto& c : centers) s.losses_.push_back(losses::quadratic(c, mu));
  return s;
}

LossSequence LossSequence::adversarial_linear(const std::vector<Point>& gradients) {
  LossSequence s;
  s.kind_ = Kind::AdversarialLinear;
  // consecutive equal gradients share one loss object
  for (std::size_t t = 0; t < gradients.size(); ++t) {
    if (t > 0 && gradients[t] == gradients[t - 1]) {
      s.losses_.push_back(s.losses_.back());
    } else {
      s.losses_.push_back(losses::linear(gradients[t]));
    }
  }
  return s;
}

LossSequence LossSequence::stochastic(const Loss& f, int T, double sigma, NoiseModel model) {
  if (!(sigma >= 0.0)) throw DomainError("LossSequence::stochastic: sigma must be >= 0");
  LossSequence s = fixed(f, T);
  s.kind_ = Kind::Stochastic;
  s.sigma_ = sigma;
  s.model_ = model;
  return s;
}

LossSequence LossSequence::from_losses(std::vector<Loss> losses, Kind kind) {
  LossSequence s;
  s.kind_ = kind;
  s.losses_ = std::move(losses);
  return s;
}

const Loss& LossSequence::loss(int t) const {
  if (t < 1 || t > rounds()) throw std::out_of_range("LossSequence::loss: round out of range");
  return losses_[static_cast<std::size_t>(t - 1)];
}

bool LossSequence::all_linear() const {
  return std::all_of(losses_.begin(), losses_.end(), [](const Loss& l) { return l.meta().linear; });
}

LossSequence LossSequence::scaled(double c) const {
  LossSequence s = *this;
  for (std::size_t t = 0; t < losses_.size(); ++t) {
    if (t > 0 && losses_[t].same_function(losses_[t - 1])) {
      s.losses_[t] = s.losses_[t - 1];
    } else {
      s.losses_[t] = losses_[t].scaled(c);
    }
  }
  s.sigma_ = c * sigma_;
  return s;
}

Feedback stochastic_gradient(const LossSequence& seq, int t, const Point& x_t, Rng& rng) {
  const Point grad = seq.loss(t).gradient(x_t);
  Feedback fb{grad, Point::Zero(grad.size())};
  if (!seq.stochastic()) return fb;
  const double s = seq.noise_sigma();
  if (seq.noise_model() == NoiseModel::Gaussian) {
    std::normal_distribution<double> n(0.0, s);
    for (Index j = 0; j < grad.size(); ++j) fb.sigma[j] = n(rng);
  } else {
    const double w = s * std::sqrt(3.0);
    std::uniform_real_distribution<double> u(-w, w);
    for (Index j = 0; j < grad.size(); ++j) fb.sigma[j] = u(rng);
  }
  fb.g = grad + fb.sigma;
  return fb;
}

std::vector<Point> make_probes(const FeasibleSet& set, int count, Rng& rng) {
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(count) + 1);
  out.push_back(set.center());
  for (int i = 0; i < count; ++i) out.push_back(set.sample(rng));
  return out;
}

VariationEstimate variation_estimate(const LossSequence& seq, const FeasibleSet& set, int probes, Rng& rng) {
  VariationEstimate est;
  std::vector<Point> pts;
  auto probe_points = [&]() -> const std::vector<Point>& {
    if (pts.empty()) {
      pts = make_probes(set, probes, rng);
      est.probes = static_cast<int>(pts.size());
    }
    return pts;
  };
  for (int t = 1; t <= seq.rounds(); ++t) {
    const Loss& cur = seq.loss(t);
    double v = 0.0;
    if (t > 1 && cur.same_function(seq.loss(t - 1))) {
      v = 0.0;
    } else if (cur.meta().linear && (t == 1 || seq.loss(t - 1).meta().linear)) {
      const Point prev = t == 1 ? Point::Zero(cur.dim()) : seq.loss(t - 1).meta().linear_coef;
      v = (cur.meta().linear_coef - prev).squaredNorm();
    } else if (cur.meta().quad_center && t == 1 && set.bounded()) {
      const double mu = *cur.meta().strong_convexity;
      v = mu * mu * set.max_sq_distance(*cur.meta().quad_center);
    } else if (cur.meta().quad_center && t > 1 && seq.loss(t - 1).meta().quad_center &&
               *cur.meta().strong_convexity == *seq.loss(t - 1).meta().strong_convexity) {
      const double mu = *cur.meta().strong_convexity;
      v = mu * mu * (*cur.meta().quad_center - *seq.loss(t - 1).meta().quad_center).squaredNorm();
    } else {
      est.exact = false;
      for (const Point& p : probe_points()) {
        const Point prev = t == 1 ? Point::Zero(cur.dim()) : seq.loss(t - 1).gradient(p);
        v = std::max(v, (cur.gradient(p) - prev).squaredNorm());
      }
    }
    est.per_round.push_back(v);
    est.total += v;
  }
  return est;
}

namespace {

double min_value_gap(const Loss& f, const Point& x_star, const Point& p) {
  return f.value(p) - f.value(x_star);
}

}  // namespace

bool verify_star_convex(const Loss& f, const Point& x_star, const std::vector<Point>& probes) {
  const double fs = f.value(x_star);
  try {
    for (const Point& p : probes) {
      if (f.value(p) < fs - 1e-12) return false;
      if (p == x_star) continue;
      const ExtReal b = bregman(f, x_star, p);
      if (b.value() < -1e-9) return false;
    }
  } catch (const DomainError&) {
    return false;
  }
  return true;
}

double estimate_tau(const Loss& f, const Point& x_star, const std::vector<Point>& probes) {
  return verify_tau_star_strong(f, Regularizer::zero(), x_star, probes);
}

double verify_tau_star_strong(const Loss& f, const Regularizer& r, const Point& x_star,
                              const std::vector<Point>& probes) {
  double tau = kInf;
  for (const Point& p : probes) {
    if (p == x_star) continue;
    const double gap = min_value_gap(f, x_star, p);
    if (std::abs(gap) <= 1e-12) continue;
    const ExtReal d = f.dir_derivative(p, Point(x_star - p));
    if (d.is_inf()) return 0.0;
    double num = -d.value();
    if (!r.is_zero()) {
      const ExtReal b = bregman(r, x_star, p);
      if (b.is_inf()) return 0.0;
      num -= b.value();
    }
    const double ratio = num / gap;
    if (!(ratio > 0.0)) return 0.0;
    tau = std::min(tau, ratio);
  }
  return std::isfinite(tau) ? tau : 0.0;
}

bool check_pl(const Loss& f, double mu, const std::vector<Point>& probes) {
  if (!f.meta().star_center) throw DomainError("check_pl: loss has no known minimizer");
  const Point& xs = *f.meta().star_center;
  const double fs = f.value(xs);
  for (const Point& p : probes) {
    const double lhs = mu * (f.value(p) - fs);
    const double rhs = 0.5 * f.gradient(p).squaredNorm();
    if (lhs > rhs + 1e-9) return false;
  }
  return true;
}

bool certify_smooth(const Loss& f, double L, const std::vector<Point>& probes) {
  for (std::size_t i = 0; i + 1 < probes.size(); ++i) {
    const Point& x = probes[i];
    const Point& y = probes[i + 1];
    const double b = bregman(f, x, y).finite("certify_smooth");
    if (std::abs(b) > 0.5 * L * (x - y).squaredNorm() + 1e-9) return false;
  }
  return true;
}

bool certify_strong_convexity(const Loss& f, const Regularizer& r, const std::vector<Point>& probes) {
  for (std::size_t i = 0; i + 1 < probes.size(); ++i) {
    const Point& x = probes[i];
    const Point& y = probes[i + 1];
    const double bf = bregman(f, x, y).finite("certify_strong_convexity");
    const double br = bregman(r, x, y).finite("certify_strong_convexity");
    if (bf < br - 1e-9) return false;
  }
  return true;
}

}  // namespace adaopt
