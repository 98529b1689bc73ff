#include "hflow/model_spaces.hpp"

#include <algorithm>
#include <cmath>

#include "hflow/errors.hpp"

namespace hflow {

double EuclideanSpace::distance(const Point& a, const Point& b) const {
  require_point(a);
  require_point(b);
  return vec::dist(a.data, b.data);
}

Point EuclideanSpace::interpolate(const Point& a, const Point& b, double s) const {
  require_point(a);
  require_point(b);
  if (s < 0.0 || s > 1.0) throw InputError("interpolate: s outside [0,1]");
  Point out = a;
  for (std::size_t i = 0; i < dim_; ++i) out[i] += s * (b[i] - a[i]);
  return out;
}

std::pair<int, double> TripodSpace::decode(const Point& p) {
  if (p.size() != 2 || !p.finite()) throw InputError("tripod: payload must be (branch, radius)");
  const int branch = static_cast<int>(std::lround(p[0]));
  if (std::abs(p[0] - branch) > 1e-9 || branch < 1 || branch > 3) {
    throw InputError("tripod: branch id must be 1, 2 or 3");
  }
  double r = p[1];
  if (r < 0.0) {
    if (r < -1e-12) throw InputError("tripod: radius must be nonnegative");
    r = 0.0;
  }
  return {branch, r};
}

double TripodSpace::distance(const Point& a, const Point& b) const {
  const auto [ba, ra] = decode(a);
  const auto [bb, rb] = decode(b);
  if (ba == bb || ra == 0.0 || rb == 0.0) return std::abs(ra - rb);
  return ra + rb;
}

Point TripodSpace::interpolate(const Point& a, const Point& b, double s) const {
  if (s < 0.0 || s > 1.0) throw InputError("interpolate: s outside [0,1]");
  const auto [ba, ra] = decode(a);
  const auto [bb, rb] = decode(b);
  if (ba == bb || ra == 0.0 || rb == 0.0) {
    // One line: walk along the branch that carries a nonzero endpoint.
    const int branch = ra > 0.0 ? ba : bb;
    const double r = ra + s * (rb - ra);
    return encode(branch, std::max(0.0, r));
  }
  const double arc = s * (ra + rb);
  if (arc <= ra) return encode(ba, ra - arc);
  return encode(bb, arc - ra);
}

namespace {

class LinearFunctional final : public Functional {
 public:
  LinearFunctional(SpacePtr space, std::vector<double> a) : space_(std::move(space)), a_(std::move(a)) {}

  std::string name() const override { return "linear"; }
  const SpacePtr& space() const override { return space_; }

  double value(const Point& x) const override {
    space_->require_point(x);
    return vec::dot(a_, x.data);
  }

  Point prox(const Point& x, double lambda) const override {
    space_->require_point(x);
    Point out = x;
    for (std::size_t i = 0; i < a_.size(); ++i) out[i] -= lambda * a_[i];
    return out;
  }

  std::optional<double> analytic_slope(const Point&) const override { return vec::norm(a_); }

 private:
  SpacePtr space_;
  std::vector<double> a_;
};

class QuadraticFunctional final : public Functional {
 public:
  explicit QuadraticFunctional(SpacePtr space) : space_(std::move(space)) {}

  std::string name() const override { return "quadratic"; }
  const SpacePtr& space() const override { return space_; }

  double value(const Point& x) const override {
    space_->require_point(x);
    const double n = vec::norm(x.data);
    return 0.5 * n * n;
  }

  Point prox(const Point& x, double lambda) const override {
    space_->require_point(x);
    Point out = x;
    for (double& v : out.data) v /= (1.0 + lambda);
    return out;
  }

  std::optional<double> analytic_slope(const Point& x) const override { return vec::norm(x.data); }

 private:
  SpacePtr space_;
};

class AbsFunctional final : public Functional {
 public:
  explicit AbsFunctional(SpacePtr space) : space_(std::move(space)) {}

  std::string name() const override { return "abs"; }
  const SpacePtr& space() const override { return space_; }

  double value(const Point& x) const override {
    space_->require_point(x);
    return vec::norm(x.data);
  }

  Point prox(const Point& x, double lambda) const override {
    space_->require_point(x);
    const double n = vec::norm(x.data);
    const double scale = n <= lambda ? 0.0 : 1.0 - lambda / n;
    Point out = x;
    for (double& v : out.data) v *= scale;
    return out;
  }

  std::optional<double> analytic_slope(const Point& x) const override {
    return vec::norm(x.data) > 1e-12 ? 1.0 : 0.0;
  }

 private:
  SpacePtr space_;
};

// G(x) = -x + c e^{-x} on the line; smooth, convex, infimum of |G'| = 1
// approached as x -> infinity but never attained.
class ExpLinearFunctional final : public Functional {
 public:
  ExpLinearFunctional(SpacePtr space, double c) : space_(std::move(space)), c_(c) {}

  std::string name() const override { return c_ == 1.0 ? "exp_linear" : "exp_linear(c=" + std::to_string(c_) + ")"; }
  const SpacePtr& space() const override { return space_; }

  double value(const Point& x) const override {
    space_->require_point(x);
    return -x[0] + c_ * std::exp(-x[0]);
  }

  Point prox(const Point& x, double lambda) const override {
    space_->require_point(x);
    // Solve v - x0 - lambda (1 + c e^{-v}) = 0; the left side is increasing.
    const double x0 = x[0];
    double lo = x0;
    double hi = x0 + lambda * (1.0 + c_ * std::exp(-x0));
    double v = hi;
    for (int it = 0; it < 100; ++it) {
      const double ev = c_ * std::exp(-v);
      const double f = v - x0 - lambda * (1.0 + ev);
      if (std::abs(f) <= 1e-14 * (1.0 + std::abs(v))) return Point{v};
      if (f > 0.0) hi = v; else lo = v;
      const double fp = 1.0 + lambda * ev;
      double next = v - f / fp;
      if (next <= lo || next >= hi) next = 0.5 * (lo + hi);
      v = next;
    }
    throw NumericalError("exp_linear prox: Newton did not converge", std::abs(v - x0));
  }

  std::optional<double> analytic_slope(const Point& x) const override {
    return 1.0 + c_ * std::exp(-x[0]);
  }

 private:
  SpacePtr space_;
  double c_;
};

// G(x) = max(|x| - 1, 0): flat unit-ball valley of minimizers.
class ValleyFunctional final : public Functional {
 public:
  explicit ValleyFunctional(SpacePtr space) : space_(std::move(space)) {}

  std::string name() const override { return "valley"; }
  const SpacePtr& space() const override { return space_; }

  double value(const Point& x) const override {
    space_->require_point(x);
    return std::max(vec::norm(x.data) - 1.0, 0.0);
  }

  Point prox(const Point& x, double lambda) const override {
    space_->require_point(x);
    const double n = vec::norm(x.data);
    double target = n;
    if (n > 1.0) target = std::max(1.0, n - lambda);
    const double scale = n > 0.0 ? target / n : 0.0;
    Point out = x;
    for (double& v : out.data) v *= scale;
    return out;
  }

  std::optional<double> analytic_slope(const Point& x) const override {
    return vec::norm(x.data) > 1.0 + 1e-12 ? 1.0 : 0.0;
  }

 private:
  SpacePtr space_;
};

class TripodFunctional final : public Functional {
 public:
  TripodFunctional(SpacePtr space, const std::array<double, 3>& alpha)
      : space_(std::move(space)), alpha_(alpha) {}

  std::string name() const override { return "tripod_linear"; }
  const SpacePtr& space() const override { return space_; }

  double value(const Point& x) const override {
    const auto [branch, r] = TripodSpace::decode(x);
    return alpha_[branch - 1] * r;
  }

  Point prox(const Point& x, double lambda) const override {
    const auto [branch, r] = TripodSpace::decode(x);
    // Per-branch closed forms; the cross-branch candidate pays the full path
    // through the origin.
    double best = 0.5 * r * r;  // stop at the origin
    Point best_pt = TripodSpace::encode(branch, 0.0);
    for (int j = 1; j <= 3; ++j) {
      const double aj = alpha_[j - 1];
      double rho;
      if (j == branch) {
        rho = std::max(0.0, r - lambda * aj);
      } else {
        rho = std::max(0.0, -r - lambda * aj);
      }
      if (rho == 0.0) continue;  // origin candidate already present
      const double d = (j == branch) ? std::abs(rho - r) : (r + rho);
      const double obj = 0.5 * d * d + lambda * aj * rho;
      if (obj < best - 1e-15 * (1.0 + std::abs(best))) {
        best = obj;
        best_pt = TripodSpace::encode(j, rho);
      }
    }
    return best_pt;
  }

  std::optional<double> analytic_slope(const Point& x) const override {
    const auto [branch, r] = TripodSpace::decode(x);
    if (r > 1e-12) return std::abs(alpha_[branch - 1]);
    const double m = std::min({alpha_[0], alpha_[1], alpha_[2]});
    return std::max(0.0, -m);
  }

 private:
  SpacePtr space_;
  std::array<double, 3> alpha_;
};

}  // namespace

ModelInstance make_euclidean(const std::string& tag, std::span<const double> params) {
  ModelInstance inst;
  if (tag == "linear") {
    if (params.empty()) throw InputError("make_euclidean: linear needs the gradient vector");
    auto space = std::make_shared<EuclideanSpace>(params.size());
    std::vector<double> a(params.begin(), params.end());
    const double norm_a = vec::norm(a);
    inst.space = space;
    inst.f = std::make_shared<LinearFunctional>(space, a);
    inst.g = inst.f;
    inst.analytic.limit_slope = norm_a;
    inst.analytic.escaping = norm_a > 0.0;
    inst.analytic.unstable = norm_a > 0.0;
    if (norm_a > 0.0) {
      Point dir;
      dir.data.resize(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) dir[i] = -a[i] / norm_a;
      inst.analytic.ray_direction = dir;
    }
    return inst;
  }

  const std::size_t dim = params.empty() ? 1 : static_cast<std::size_t>(params[0]);
  if (dim == 0) throw InputError("make_euclidean: dimension must be positive");
  auto space = std::make_shared<EuclideanSpace>(dim);
  inst.space = space;
  if (tag == "quadratic") {
    inst.f = std::make_shared<QuadraticFunctional>(space);
    inst.g = inst.f;
  } else if (tag == "abs") {
    inst.f = std::make_shared<AbsFunctional>(space);
    inst.g = inst.f;
  } else if (tag == "valley") {
    inst.f = std::make_shared<ValleyFunctional>(space);
    inst.g = inst.f;
  } else if (tag == "exp_linear" || tag == "pair") {
    if (dim != 1) throw InputError("make_euclidean: " + tag + " is one-dimensional");
    inst.f = std::make_shared<ExpLinearFunctional>(space, 1.0);
    inst.g = tag == "pair" ? std::make_shared<ExpLinearFunctional>(space, 2.0) : inst.f;
    inst.analytic.limit_slope = 1.0;
    inst.analytic.escaping = true;
    inst.analytic.unstable = true;
    inst.analytic.ray_direction = Point{1.0};
  } else {
    throw InputError("make_euclidean: unknown tag '" + tag + "'");
  }
  return inst;
}

ModelInstance make_tripod(const std::array<double, 3>& alpha, bool allow_tie) {
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (alpha[i] + alpha[j] < 0.0) {
        throw InputError("make_tripod: pairwise slope sums must be nonnegative, got alpha_" +
                         std::to_string(i + 1) + " + alpha_" + std::to_string(j + 1) + " < 0");
      }
    }
  }
  int min_idx = 0;
  for (int i = 1; i < 3; ++i) {
    if (alpha[i] < alpha[min_idx]) min_idx = i;
  }
  if (!allow_tie && alpha[min_idx] < 0.0) {
    int ties = 0;
    for (double a : alpha) {
      if (a == alpha[min_idx]) ++ties;
    }
    if (ties > 1) {
      throw InputError("make_tripod: tie between most negative slopes; pass allow_tie to keep it");
    }
  }
  ModelInstance inst;
  auto space = std::make_shared<TripodSpace>();
  inst.space = space;
  inst.f = std::make_shared<TripodFunctional>(space, alpha);
  inst.g = inst.f;
  inst.analytic.limit_slope = std::max(0.0, -alpha[min_idx]);
  inst.analytic.escaping = alpha[min_idx] < 0.0;
  inst.analytic.unstable = alpha[min_idx] < 0.0;
  if (inst.analytic.escaping) inst.analytic.ray_branch = min_idx + 1;
  return inst;
}

}  // namespace hflow
