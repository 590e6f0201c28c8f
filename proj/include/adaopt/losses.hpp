#pragma once

#include "adaopt/core.hpp"
#include "adaopt/feasible_set.hpp"
#include "adaopt/regularizer.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace adaopt {

using Rng = std::mt19937_64;

/// Loss with value, local sub-gradient, closed-form directional derivative
/// and curvature metadata.
class Loss {
 public:
  using ValueFn = std::function<double(const Point&)>;
  using GradFn = std::function<Point(const Point&)>;
  using DirFn = std::function<ExtReal(const Point&, const Point&)>;

  struct Metadata {
    std::string name;
    std::optional<double> smoothness;        // L
    std::optional<double> strong_convexity;  // modulus w.r.t. 0.5 ||.||_2^2
    std::optional<Point> star_center;        // global minimizer x*
    std::optional<double> tau;
    std::optional<double> lipschitz;         // G
    bool convex = true;
    bool linear = false;
    bool differentiable = true;
    Point linear_coef;                       // gradient when linear
    std::optional<Point> quad_center;        // (mu/2)||x - a||^2 family
  };

  Loss() = default;
  Loss(Index dim, ValueFn value, GradFn grad, DirFn dir, Metadata meta);

  Index dim() const { return dim_; }
  double value(const Point& x) const { return (*value_)(x); }
  Point gradient(const Point& x) const { return (*grad_)(x); }
  ExtReal dir_derivative(const Point& x, const Point& z) const { return (*dir_)(x, z); }
  bool has_closed_form() const { return true; }
  const Metadata& meta() const { return meta_; }
  /// Same underlying function object (copies of one loss).
  bool same_function(const Loss& o) const { return value_ == o.value_; }

  /// c * f
  Loss scaled(double c) const;
  FunctionHandle handle() const;

 private:
  Index dim_ = 0;
  std::shared_ptr<const ValueFn> value_;
  std::shared_ptr<const GradFn> grad_;
  std::shared_ptr<const DirFn> dir_;
  Metadata meta_;
};

namespace losses {

/// <g, x>
Loss linear(const Point& g);
/// (mu/2) ||x - a||^2
Loss quadratic(const Point& a, double mu);
/// w ||x - a||_1
Loss abs_l1(const Point& a, double w = 1.0);
/// sum_j phi(x_j - a_j), phi(u) = |u| for |u| <= 1 and 2|u| otherwise. Star-convex, not convex.
Loss star_piecewise(const Point& a);
/// sum_j sqrt|x_j - a_j|. tau-star-convex with tau = 1/2.
Loss sqrt_abs(const Point& a);
/// prod_i |x_i|^{p_i}
Loss product_power(const Point& p);
/// sum_j huber_delta(x_j - a_j); convex and 1-smooth.
Loss huber(const Point& a, double delta);
/// sum_j (u_j^2 + 3 sin^2 u_j), u = x - a. Non-convex, PL.
Loss pl_sine(const Point& a);

}  // namespace losses

/// B_l(., anchor) as a convex handle (implicit updates). Requires a gradient.
FunctionHandle loss_bregman_handle(const Loss& l, const Point& anchor);

enum class NoiseModel { Gaussian, Uniform };

/// Per-round losses plus an optional stochastic-gradient oracle.
class LossSequence {
 public:
  enum class Kind { Fixed, Drifting, AdversarialLinear, Stochastic };

  static LossSequence fixed(const Loss& f, int T);
  static LossSequence drifting_quadratic(const std::vector<Point>& centers, double mu);
  static LossSequence adversarial_linear(const std::vector<Point>& gradients);
  static LossSequence stochastic(const Loss& f, int T, double sigma, NoiseModel model = NoiseModel::Gaussian);
  static LossSequence from_losses(std::vector<Loss> losses, Kind kind);

  Kind kind() const { return kind_; }
  int rounds() const { return static_cast<int>(losses_.size()); }
  Index dim() const { return losses_.empty() ? 0 : losses_.front().dim(); }
  /// f_t for t = 1..T
  const Loss& loss(int t) const;
  const std::vector<Loss>& losses() const { return losses_; }
  bool all_linear() const;
  double noise_sigma() const { return sigma_; }
  NoiseModel noise_model() const { return model_; }
  bool stochastic() const { return kind_ == Kind::Stochastic && sigma_ > 0.0; }

  /// c * f_t for every t
  LossSequence scaled(double c) const;

 private:
  Kind kind_ = Kind::Fixed;
  std::vector<Loss> losses_;
  double sigma_ = 0.0;
  NoiseModel model_ = NoiseModel::Gaussian;
};

struct Feedback {
  Point g;
  Point sigma;  // g - grad f_t(x_t)
};

/// g_t = grad f_t(x_t) + xi, xi zero-mean with per-coordinate std sigma.
Feedback stochastic_gradient(const LossSequence& seq, int t, const Point& x_t, Rng& rng);

struct VariationEstimate {
  std::vector<double> per_round;
  double total = 0.0;
  bool exact = true;
  int probes = 0;
};

/// D = sum_t sup_x ||grad f_t(x) - grad f_{t-1}(x)||^2 with f_0 = 0.
VariationEstimate variation_estimate(const LossSequence& seq, const FeasibleSet& set, int probes, Rng& rng);

/// Probe points: the given anchors plus random feasible samples.
std::vector<Point> make_probes(const FeasibleSet& set, int count, Rng& rng);

bool verify_star_convex(const Loss& f, const Point& x_star, const std::vector<Point>& probes);
double estimate_tau(const Loss& f, const Point& x_star, const std::vector<Point>& probes);
double verify_tau_star_strong(const Loss& f, const Regularizer& r, const Point& x_star,
                              const std::vector<Point>& probes);
bool check_pl(const Loss& f, double mu, const std::vector<Point>& probes);

/// |B_f(x, y)| <= (L/2)||x - y||^2 on the pairs.
bool certify_smooth(const Loss& f, double L, const std::vector<Point>& probes);
/// B_f(x, y) >= B_r(x, y) on the pairs.
bool certify_strong_convexity(const Loss& f, const Regularizer& r, const std::vector<Point>& probes);

}  // namespace adaopt
