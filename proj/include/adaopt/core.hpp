#pragma once

// Finite-dimensional Hilbert-space primitives: inner products, quadratic
// metrics and their duals, extended reals, directional derivatives and the
// generalized Bregman divergence.

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace adaopt {

using Index = Eigen::Index;
using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Eigenvalues of a full metric at or above this (negative) threshold are
/// clamped to zero; below it the matrix is rejected as not PSD.
inline constexpr double kPsdTolerance = 1e-10;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a quantity that must be finite is not, or a metric is singular
/// where an inverse is needed.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline void require_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw DimensionError(os.str());
  }
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& x) {
  return x.allFinite();
}

// ---------------------------------------------------------------------------
// ExtReal
// ---------------------------------------------------------------------------

/// Real number or +inf. -inf and NaN are never stored: producing one throws.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  ExtReal(double v) : v_(v) {  // NOLINT(google-explicit-constructor)
    if (std::isnan(v)) throw DomainError("ExtReal: NaN");
    if (v == -kInf) throw DomainError("ExtReal: -inf is not representable");
  }

  static ExtReal infinity() { return ExtReal(kInf); }

  bool is_finite() const { return std::isfinite(v_); }
  bool is_inf() const { return v_ == kInf; }
  double value() const { return v_; }
  explicit operator double() const { return v_; }

  /// Finite value or throw, naming the context.
  double finite(const char* what) const {
    if (!is_finite()) throw DomainError(std::string(what) + ": value is +inf");
    return v_;
  }

  friend ExtReal operator+(ExtReal a, ExtReal b) { return ExtReal(a.v_ + b.v_); }
  friend ExtReal operator-(ExtReal a, ExtReal b) {
    if (a.is_inf() && b.is_inf()) {
      throw DomainError("ExtReal: (+inf) - (+inf) is undefined here");
    }
    if (b.is_inf()) throw DomainError("ExtReal: subtraction yields -inf");
    return ExtReal(a.v_ - b.v_);
  }
  friend ExtReal operator*(double c, ExtReal a) {
    if (c < 0.0 && a.is_inf()) throw DomainError("ExtReal: negative scaling of +inf");
    if (c == 0.0) return ExtReal(0.0);
    return ExtReal(c * a.v_);
  }

  friend bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }
  friend auto operator<=>(ExtReal a, ExtReal b) { return a.v_ <=> b.v_; }

 private:
  double v_ = 0.0;
};

/// p := r - q with the convention (+inf) - (+inf) = +inf.
inline ExtReal subtract_regularizers(ExtReal r, ExtReal q) {
  if (r.is_inf() && q.is_inf()) return ExtReal::infinity();
  return r - q;
}

// ---------------------------------------------------------------------------
// dot
// ---------------------------------------------------------------------------

template <typename A, typename B>
typename A::Scalar dot(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y) {
  require_same_dim(x.size(), y.size(), "dot");
  return x.dot(y);
}

// ---------------------------------------------------------------------------
// QuadMetric
// ---------------------------------------------------------------------------

enum class MetricKind { ScaledIdentity, Diagonal, Full };

/// Quadratic form x -> x^T A x with A symmetric PSD, stored as a scaled
/// identity, a diagonal, or a dense matrix.
template <typename Scalar>
class QuadMetric {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  QuadMetric() : QuadMetric(scaled_identity(0, Scalar(0))) {}

  static QuadMetric scaled_identity(Index dim, Scalar gamma) {
    if (!(gamma >= Scalar(0)) || !std::isfinite(double(gamma))) {
      throw DomainError("QuadMetric: scaled-identity weight must be finite and >= 0");
    }
    QuadMetric m(MetricKind::ScaledIdentity, dim);
    m.gamma_ = gamma;
    return m;
  }

  static QuadMetric diagonal(Vector weights) {
    for (Index j = 0; j < weights.size(); ++j) {
      if (!(weights[j] >= Scalar(0)) || !std::isfinite(double(weights[j]))) {
        std::ostringstream os;
        os << "QuadMetric: diagonal weight " << j << " is " << double(weights[j]);
        throw DomainError(os.str());
      }
    }
    QuadMetric m(MetricKind::Diagonal, weights.size());
    m.weights_ = std::move(weights);
    return m;
  }

  static QuadMetric full(const Dense& a) {
    if (a.rows() != a.cols()) throw DimensionError("QuadMetric: full matrix must be square");
    if (!a.allFinite()) throw DomainError("QuadMetric: full matrix has non-finite entries");
    QuadMetric m(MetricKind::Full, a.rows());
    Dense sym = (a + a.transpose()) / Scalar(2);
    Eigen::SelfAdjointEigenSolver<Dense> es(sym);
    if (es.info() != Eigen::Success) throw DomainError("QuadMetric: eigensolver failed");
    Vector ev = es.eigenvalues();
    for (Index j = 0; j < ev.size(); ++j) {
      if (ev[j] < Scalar(-kPsdTolerance)) {
        std::ostringstream os;
        os << "QuadMetric: matrix is not PSD (eigenvalue " << j << " = " << double(ev[j]) << ")";
        throw DomainError(os.str());
      }
      if (ev[j] < Scalar(0)) ev[j] = Scalar(0);
    }
    m.eigvecs_ = es.eigenvectors();
    m.eigvals_ = ev;
    m.matrix_ = m.eigvecs_ * ev.asDiagonal() * m.eigvecs_.transpose();
    return m;
  }

  static QuadMetric zero(Index dim) { return scaled_identity(dim, Scalar(0)); }

  MetricKind kind() const { return kind_; }
  Index dim() const { return dim_; }
  Scalar gamma() const { return gamma_; }
  const Vector& weights() const { return weights_; }
  const Vector& eigenvalues() const { return eigvals_; }
  const Dense& eigenvectors() const { return eigvecs_; }

  Dense dense() const {
    switch (kind_) {
      case MetricKind::ScaledIdentity: return gamma_ * Dense::Identity(dim_, dim_);
      case MetricKind::Diagonal: return weights_.asDiagonal();
      case MetricKind::Full: return matrix_;
    }
    return {};
  }

  /// Diagonal of A regardless of representation.
  Vector diag() const {
    switch (kind_) {
      case MetricKind::ScaledIdentity: return Vector::Constant(dim_, gamma_);
      case MetricKind::Diagonal: return weights_;
      case MetricKind::Full: return matrix_.diagonal();
    }
    return {};
  }

  template <typename Derived>
  Vector apply(const Eigen::MatrixBase<Derived>& x) const {
    require_same_dim(dim_, x.size(), "QuadMetric::apply");
    switch (kind_) {
      case MetricKind::ScaledIdentity: return gamma_ * x;
      case MetricKind::Diagonal: return weights_.cwiseProduct(x);
      case MetricKind::Full: return matrix_ * x;
    }
    return {};
  }

  Scalar min_eigenvalue() const {
    if (dim_ == 0) return Scalar(0);
    switch (kind_) {
      case MetricKind::ScaledIdentity: return gamma_;
      case MetricKind::Diagonal: return weights_.minCoeff();
      case MetricKind::Full: return eigvals_.minCoeff();
    }
    return Scalar(0);
  }

  Scalar max_eigenvalue() const {
    if (dim_ == 0) return Scalar(0);
    switch (kind_) {
      case MetricKind::ScaledIdentity: return gamma_;
      case MetricKind::Diagonal: return weights_.maxCoeff();
      case MetricKind::Full: return eigvals_.maxCoeff();
    }
    return Scalar(0);
  }

  bool positive_definite() const { return dim_ > 0 && min_eigenvalue() > Scalar(0); }
  bool is_zero() const { return dim_ == 0 || max_eigenvalue() == Scalar(0); }

  QuadMetric scaled(Scalar c) const {
    if (!(c >= Scalar(0))) throw DomainError("QuadMetric: negative scaling");
    QuadMetric m = *this;
    m.gamma_ *= c;
    m.weights_ *= c;
    m.matrix_ *= c;
    m.eigvals_ *= c;
    return m;
  }

  friend QuadMetric operator+(const QuadMetric& a, const QuadMetric& b) {
    require_same_dim(a.dim_, b.dim_, "QuadMetric::operator+");
    if (a.kind_ == MetricKind::ScaledIdentity && b.kind_ == MetricKind::ScaledIdentity) {
      return scaled_identity(a.dim_, a.gamma_ + b.gamma_);
    }
    if (a.kind_ != MetricKind::Full && b.kind_ != MetricKind::Full) {
      return diagonal(a.diag() + b.diag());
    }
    return full(a.dense() + b.dense());
  }

  /// a - b when the result is PSD (within tolerance); throws DomainError otherwise.
  friend QuadMetric difference(const QuadMetric& a, const QuadMetric& b) {
    require_same_dim(a.dim_, b.dim_, "QuadMetric difference");
    if (a.kind_ == MetricKind::ScaledIdentity && b.kind_ == MetricKind::ScaledIdentity) {
      Scalar g = a.gamma_ - b.gamma_;
      if (g < Scalar(0) && g >= Scalar(-kPsdTolerance)) g = Scalar(0);
      return scaled_identity(a.dim_, g);
    }
    if (a.kind_ != MetricKind::Full && b.kind_ != MetricKind::Full) {
      Vector w = a.diag() - b.diag();
      for (Index j = 0; j < w.size(); ++j) {
        if (w[j] < Scalar(0) && w[j] >= Scalar(-kPsdTolerance)) w[j] = Scalar(0);
      }
      return diagonal(std::move(w));
    }
    return full(a.dense() - b.dense());
  }

 private:
  QuadMetric(MetricKind k, Index dim) : kind_(k), dim_(dim) {}

  MetricKind kind_ = MetricKind::ScaledIdentity;
  Index dim_ = 0;
  Scalar gamma_ = Scalar(0);
  Vector weights_;
  Dense matrix_;
  Vector eigvals_;
  Dense eigvecs_;
};

using Metric = QuadMetric<double>;

/// x^T M x.
template <typename Scalar, typename Derived>
Scalar quad_norm_sq(const QuadMetric<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
  require_same_dim(m.dim(), x.size(), "quad_norm_sq");
  switch (m.kind()) {
    case MetricKind::ScaledIdentity: return m.gamma() * x.squaredNorm();
    case MetricKind::Diagonal: return (m.weights().array() * x.array().square()).sum();
    case MetricKind::Full: return x.dot(m.apply(x));
  }
  return Scalar(0);
}

/// g^T M^{-1} g. Requires M strictly positive definite.
template <typename Scalar, typename Derived>
Scalar dual_norm_sq(const QuadMetric<Scalar>& m, const Eigen::MatrixBase<Derived>& g) {
  require_same_dim(m.dim(), g.size(), "dual_norm_sq");
  switch (m.kind()) {
    case MetricKind::ScaledIdentity:
      if (!(m.gamma() > Scalar(0))) {
        if (g.squaredNorm() == Scalar(0)) return Scalar(0);
        throw DomainError("dual_norm_sq: singular scaled-identity metric (gamma = 0)");
      }
      return g.squaredNorm() / m.gamma();
    case MetricKind::Diagonal: {
      Scalar s(0);
      for (Index j = 0; j < g.size(); ++j) {
        if (g[j] == Scalar(0)) continue;
        if (!(m.weights()[j] > Scalar(0))) {
          std::ostringstream os;
          os << "dual_norm_sq: singular diagonal metric at coordinate " << j;
          throw DomainError(os.str());
        }
        s += g[j] * g[j] / m.weights()[j];
      }
      return s;
    }
    case MetricKind::Full: {
      const auto& ev = m.eigenvalues();
      typename QuadMetric<Scalar>::Vector proj = m.eigenvectors().transpose() * g;
      Scalar s(0);
      for (Index j = 0; j < ev.size(); ++j) {
        if (!(ev[j] > Scalar(0))) {
          if (std::abs(double(proj[j])) <= 1e-14 * (1.0 + double(g.norm()))) continue;
          std::ostringstream os;
          os << "dual_norm_sq: singular metric (eigenvalue " << j << " = " << double(ev[j]) << ")";
          throw DomainError(os.str());
        }
        s += proj[j] * proj[j] / ev[j];
      }
      return s;
    }
  }
  return Scalar(0);
}

/// dual_norm_sq, or +inf when the metric is singular along g.
template <typename Scalar, typename Derived>
double dual_norm_sq_or_inf(const QuadMetric<Scalar>& m, const Eigen::MatrixBase<Derived>& g) {
  try {
    return double(dual_norm_sq(m, g));
  } catch (const DomainError&) {
    return kInf;
  }
}

// ---------------------------------------------------------------------------
// Function handles, directional derivatives, Bregman divergences
// ---------------------------------------------------------------------------

/// Anything with a value (possibly +inf) and a directional derivative.
template <typename F>
concept DirectionallyDifferentiable = requires(const F& f, const Point& x) {
  { f.value(x) } -> std::convertible_to<double>;
  { f.dir_derivative(x, x) } -> std::convertible_to<ExtReal>;
};

/// Type-erased function. Without a closed-form directional derivative the
/// numeric one-sided limit is used (test-only path).
class FunctionHandle {
 public:
  using ValueFn = std::function<double(const Point&)>;
  using DirFn = std::function<ExtReal(const Point&, const Point&)>;
  using GradFn = std::function<Point(const Point&)>;

  FunctionHandle() = default;
  explicit FunctionHandle(ValueFn value, DirFn dir = {}, GradFn grad = {})
      : value_(std::move(value)), dir_(std::move(dir)), grad_(std::move(grad)) {}

  double value(const Point& x) const { return value_(x); }
  ExtReal dir_derivative(const Point& x, const Point& z) const;
  bool has_closed_form() const { return static_cast<bool>(dir_); }
  bool has_gradient() const { return static_cast<bool>(grad_); }
  Point gradient(const Point& x) const {
    if (!grad_) throw DomainError("FunctionHandle: no gradient available");
    return grad_(x);
  }

  /// Euclidean strong-convexity modulus claimed for this function (0 if none).
  double strong_convexity = 0.0;
  std::string label;

 private:
  ValueFn value_;
  DirFn dir_;
  GradFn grad_;
};

struct NumericDerivative {
  ExtReal value;
  bool numeric = true;
};

/// One-sided limit (f(x + a z) - f(x)) / a over a in {1e-4, 1e-5, 1e-6} with a
/// Richardson consistency check. Throws DomainError when the limit does not
/// settle.
template <typename ValueFn>
NumericDerivative numeric_dir_derivative(const ValueFn& f, const Point& x, const Point& z) {
  require_same_dim(x.size(), z.size(), "numeric_dir_derivative");
  const double fx = f(x);
  if (!std::isfinite(fx)) throw DomainError("numeric_dir_derivative: f(x) must be finite");
  if (z.squaredNorm() == 0.0) return {ExtReal(0.0), true};
  const double alphas[3] = {1e-4, 1e-5, 1e-6};
  double d[3];
  int inf_count = 0;
  for (int i = 0; i < 3; ++i) {
    const double fy = f(Point(x + alphas[i] * z));
    if (fy == kInf) {
      ++inf_count;
      d[i] = kInf;
    } else {
      d[i] = (fy - fx) / alphas[i];
    }
  }
  if (inf_count == 3) return {ExtReal::infinity(), true};
  if (inf_count > 0) throw DomainError("numeric_dir_derivative: domain boundary ambiguity");
  // First-order error terms cancel with step ratio 10.
  const double r1 = (10.0 * d[1] - d[0]) / 9.0;
  const double r2 = (10.0 * d[2] - d[1]) / 9.0;
  const double scale = 1.0 + std::abs(r2) + std::abs(fx) * 1e-4;
  if (std::abs(r1 - r2) > 1e-4 * scale && std::abs(d[2] - d[1]) > 1e-4 * scale) {
    std::ostringstream os;
    os << "numeric_dir_derivative: limit did not converge (" << d[0] << ", " << d[1] << ", "
       << d[2] << ")";
    throw DomainError(os.str());
  }
  return {ExtReal(r2), true};
}

inline ExtReal FunctionHandle::dir_derivative(const Point& x, const Point& z) const {
  if (dir_) return dir_(x, z);
  return numeric_dir_derivative(value_, x, z).value;
}

/// f'(x; z). Closed form where the function provides one.
template <DirectionallyDifferentiable F>
ExtReal dir_derivative(const F& f, const Point& x, const Point& z) {
  require_same_dim(x.size(), z.size(), "dir_derivative");
  const double fx = f.value(x);
  if (!std::isfinite(fx)) throw DomainError("dir_derivative: x must lie in dom(f)");
  return f.dir_derivative(x, z);
}

/// B_f(y, x) = f(y) - f(x) - f'(x; y - x) when f(y) is finite, +inf otherwise.
template <DirectionallyDifferentiable F>
ExtReal bregman(const F& f, const Point& y, const Point& x) {
  require_same_dim(x.size(), y.size(), "bregman");
  const double fx = f.value(x);
  if (!std::isfinite(fx)) throw DomainError("bregman: f(x) must be finite");
  const double fy = f.value(y);
  if (fy == kInf) return ExtReal::infinity();
  const ExtReal d = f.dir_derivative(x, Point(y - x));
  return ExtReal(fy - fx) - d;
}

/// delta_t = -f'(x_t; x* - x_t) + <g_t, x* - x_t>.
template <DirectionallyDifferentiable F>
double delta_term(const F& f, const Point& x_t, const Point& x_star, const Point& g_t) {
  require_same_dim(x_t.size(), g_t.size(), "delta_term");
  const Point z = x_star - x_t;
  const ExtReal d = dir_derivative(f, x_t, z);
  return -d.finite("delta_term: f'(x_t; x* - x_t)") + g_t.dot(z);
}

}  // namespace adaopt
