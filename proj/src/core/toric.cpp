#include "hflow/toric.hpp"

#include <lapacke.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "hflow/errors.hpp"

namespace hflow {
namespace toric {

namespace {

double node_weight(int i, int N) { return (i == 0 || i == N) ? 0.5 : 1.0; }

// Weighted inner product of the flat metric: <f,g> = h sum tau_i f_i g_i.
double metric_dot(std::span<const double> f, std::span<const double> g, int N) {
  const double h = 1.0 / N;
  double s = 0.0;
  for (int i = 0; i <= N; ++i) s += node_weight(i, N) * f[i] * g[i];
  return h * s;
}

}  // namespace

std::vector<double> guillemin_samples(int N) {
  std::vector<double> u0(static_cast<std::size_t>(N) + 1);
  for (int i = 0; i <= N; ++i) u0[i] = guillemin_value(double(i) / N);
  return u0;
}

double integrate(std::span<const double> samples) {
  const int N = static_cast<int>(samples.size()) - 1;
  double s = 0.5 * (samples[0] + samples[N]);
  for (int i = 1; i < N; ++i) s += samples[i];
  return s / N;
}

CurvatureData curvature(std::span<const double> phi, int N) {
  const double h = 1.0 / N;
  CurvatureData data;
  data.u_second.resize(N - 1);
  data.w.resize(N - 1);
  for (int i = 1; i < N; ++i) {
    const double x = double(i) / N;
    const double phi_dd = (phi[i - 1] - 2.0 * phi[i] + phi[i + 1]) / (h * h);
    const double u_dd = guillemin_second(x) + phi_dd;
    if (!(u_dd > 0.0)) {
      throw InputError("toric: u'' is not positive at node " + std::to_string(i));
    }
    data.u_second[i - 1] = u_dd;
    data.w[i - 1] = 1.0 / u_dd;
  }
  data.S.resize(N - 1);
  for (int i = 1; i < N; ++i) {
    const double wm = i >= 2 ? data.w[i - 2] : 0.0;  // w(0) = 0 exactly
    const double wp = i <= N - 2 ? data.w[i] : 0.0;  // w(1) = 0 exactly
    data.S[i - 1] = -(wm - 2.0 * data.w[i - 1] + wp) / (h * h);
  }
  return data;
}

double mabuchi(std::span<const double> phi, int N, double a) {
  const CurvatureData data = curvature(phi, N);
  const double h = 1.0 / N;
  // Entropy: -int log u'' = -2 - int log(u''/u0''); the remainder vanishes on
  // the boundary, so the trapezoid rule reduces to the interior sum.
  double remainder = 0.0;
  for (int i = 1; i < N; ++i) {
    const double x = double(i) / N;
    remainder += std::log(data.u_second[i - 1] / guillemin_second(x));
  }
  const double entropy = -2.0 - h * remainder;

  std::vector<double> u = guillemin_samples(N);
  for (int i = 0; i <= N; ++i) u[i] += phi[i];
  return entropy + u[0] + u[N] - a * integrate(u);
}

double calabi_energy(std::span<const double> phi, int N, double a) {
  const CurvatureData data = curvature(phi, N);
  const double h = 1.0 / N;
  double s = 0.0;
  for (double Si : data.S) {
    const double d = Si - a;
    s += d * d;
  }
  return std::sqrt(h * s);
}

double linear_part(std::span<const double> f, int N, double a) {
  return f[0] + f[static_cast<std::size_t>(N)] - a * integrate(f);
}

std::vector<double> mabuchi_gradient(std::span<const double> phi, int N, double a) {
  const CurvatureData data = curvature(phi, N);
  const double h = 1.0 / N;
  std::vector<double> grad(static_cast<std::size_t>(N) + 1, 0.0);
  // Entropy part: -h * D2^T w, with w supported on the interior nodes.
  for (int i = 1; i < N; ++i) {
    const double wi = data.w[i - 1] / h;  // -h * wi / h^2 stencil entries
    grad[i - 1] -= wi;
    grad[i] += 2.0 * wi;
    grad[i + 1] -= wi;
  }
  // Boundary evaluations u(0) + u(1) and the -a * int u term.
  grad[0] += 1.0;
  grad[static_cast<std::size_t>(N)] += 1.0;
  for (int i = 0; i <= N; ++i) grad[i] -= a * h * node_weight(i, N);
  return grad;
}

double ray_ratio(std::span<const double> f, int N, double a) {
  double min_fdd = 0.0;
  const double h = 1.0 / N;
  for (int i = 1; i < N; ++i) {
    min_fdd = std::min(min_fdd, (f[i - 1] - 2.0 * f[i] + f[i + 1]) / (h * h));
  }
  if (min_fdd < -1e-6) {
    throw InputError("toric ray_ratio: direction is not discretely convex");
  }
  const double norm = std::sqrt(metric_dot(f, f, N));
  if (norm <= 1e-12) throw InputError("toric ray_ratio: direction must be nonzero");
  return -linear_part(f, N, a) / norm;
}

ToricSpace::ToricSpace(int N) : N_(N) {
  if (N < 16) throw InputError("toric: grid size must be at least 16");
}

double ToricSpace::distance(const Point& a, const Point& b) const {
  require_point(a);
  require_point(b);
  double s = 0.0;
  const double h = 1.0 / N_;
  for (int i = 0; i <= N_; ++i) {
    const double d = a[i] - b[i];
    s += node_weight(i, N_) * d * d;
  }
  return std::sqrt(h * s);
}

Point ToricSpace::interpolate(const Point& a, const Point& b, double s) const {
  require_point(a);
  require_point(b);
  if (s < 0.0 || s > 1.0) throw InputError("interpolate: s outside [0,1]");
  Point out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += s * (b[i] - a[i]);
  return out;
}

MabuchiFunctional::MabuchiFunctional(std::shared_ptr<const ToricSpace> space, double a)
    : space_(std::move(space)), a_(a) {
  N_ = static_cast<const ToricSpace&>(*space_).grid_size();
  if (a <= 0.0) throw InputError("toric: mean curvature parameter must be positive");
}

std::string MabuchiFunctional::name() const {
  return "mabuchi(a=" + std::to_string(a_) + ")";
}

double MabuchiFunctional::value(const Point& x) const {
  space_->require_point(x);
  try {
    return mabuchi(x.data, N_, a_);
  } catch (const InputError&) {
    return kPlusInfinity;  // outside Dom M: u'' <= 0 somewhere
  }
}

std::optional<double> MabuchiFunctional::analytic_slope(const Point& x) const {
  space_->require_point(x);
  return calabi_energy(x.data, N_, a_);
}

namespace {

// Pentadiagonal SPD solve via LAPACK dpbsv (upper band storage, col-major).
void solve_banded_spd(int n, int kd, std::vector<double>& ab, std::vector<double>& rhs) {
  const int info = LAPACKE_dpbsv(LAPACK_COL_MAJOR, 'U', n, kd, 1, ab.data(), kd + 1,
                                 rhs.data(), n);
  if (info != 0) {
    throw NumericalError("toric prox: banded Cholesky failed (info " + std::to_string(info) + ")",
                         double(info));
  }
}

}  // namespace

Point MabuchiFunctional::prox(const Point& x, double lambda) const {
  space_->require_point(x);
  if (lambda <= 0.0) throw InputError("prox: lambda must be positive");
  const int n = N_ + 1;
  const int kd = 2;
  const double h = 1.0 / N_;

  std::vector<double> v(x.data);
  // Objective: 1/2 ||v - x||_W^2 + lambda M_a(v), W = h diag(tau).
  const auto objective = [&](std::span<const double> y) {
    double quad = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = y[i] - x[i];
      quad += node_weight(i, N_) * d * d;
    }
    return 0.5 * h * quad + lambda * mabuchi(y, N_, a_);
  };

  double residual = kPlusInfinity;
  for (int it = 0; it < 100; ++it) {
    const CurvatureData data = curvature(v, N_);
    std::vector<double> grad = mabuchi_gradient(v, N_, a_);
    for (int i = 0; i < n; ++i) {
      grad[i] = lambda * grad[i] + h * node_weight(i, N_) * (v[i] - x[i]);
    }
    // Residual in the dual metric norm: sqrt(sum grad_i^2 / (h tau_i)).
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) r2 += grad[i] * grad[i] / (h * node_weight(i, N_));
    residual = std::sqrt(r2);
    if (residual <= 1e-10) return Point{std::move(v)};
    double move2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = v[i] - x[i];
      move2 += h * node_weight(i, N_) * d * d;
    }

    // Hessian: lambda h D2^T diag(w^2) D2 + W, pentadiagonal.
    std::vector<double> ab(static_cast<std::size_t>(kd + 1) * n, 0.0);
    const auto at = [&](int i, int j) -> double& { return ab[(kd + i - j) + j * (kd + 1)]; };
    const double c = lambda / (h * h * h);  // lambda h / h^4
    const auto w_at = [&](int i) { return (i >= 1 && i <= N_ - 1) ? data.w[i - 1] : 0.0; };
    for (int j = 0; j < n; ++j) {
      const double wm = w_at(j - 1), w0 = w_at(j), wp = w_at(j + 1);
      at(j, j) = c * (wm * wm + 4.0 * w0 * w0 + wp * wp) + h * node_weight(j, N_);
      if (j + 1 < n) at(j, j + 1) = -2.0 * c * (w0 * w0 + wp * wp);
      if (j + 2 < n) at(j, j + 2) = c * (wp * wp);
    }
    std::vector<double> step(grad);
    for (double& g : step) g = -g;
    solve_banded_spd(n, kd, ab, step);

    // For stiff systems (large lambda) the gradient residual bottoms out at
    // the rounding floor of the Hessian application; once the Newton
    // decrement is below machine scale the position cannot improve further.
    double step2 = 0.0;
    for (int i = 0; i < n; ++i) step2 += h * node_weight(i, N_) * step[i] * step[i];
    if (std::sqrt(step2) <= 1e-13 * (1.0 + std::sqrt(move2))) return Point{std::move(v)};

    // Fraction-to-boundary: keep u'' positive along the step.
    double alpha_max = 1.0;
    for (int i = 1; i < N_; ++i) {
      const double sdd = (step[i - 1] - 2.0 * step[i] + step[i + 1]) / (h * h);
      if (sdd < 0.0) {
        alpha_max = std::min(alpha_max, -0.99 * data.u_second[i - 1] / sdd);
      }
    }
    double alpha = std::min(1.0, alpha_max);
    const double f0 = objective(v);
    std::vector<double> trial(n);
    for (int bt = 0; bt < 60; ++bt) {
      for (int i = 0; i < n; ++i) trial[i] = v[i] + alpha * step[i];
      bool ok = true;
      double ft = kPlusInfinity;
      try {
        ft = objective(trial);
      } catch (const InputError&) {
        ok = false;
      }
      if (ok && ft <= f0 + 1e-14 * (1.0 + std::abs(f0))) {
        v.swap(trial);
        break;
      }
      alpha *= 0.5;
      if (bt == 59) {
        throw NumericalError("toric prox: line search failed", residual);
      }
    }
  }
  throw NumericalError("toric prox: Newton did not reach the residual tolerance", residual);
}

Snapshot snapshot(std::span<const double> phi, int N) {
  const CurvatureData data = curvature(phi, N);
  const std::vector<double> u0 = guillemin_samples(N);
  Snapshot snap;
  snap.x.resize(static_cast<std::size_t>(N) + 1);
  snap.u.resize(snap.x.size());
  snap.phi.assign(phi.begin(), phi.end());
  snap.S.resize(snap.x.size());
  snap.w.resize(snap.x.size());
  for (int i = 0; i <= N; ++i) {
    snap.x[i] = double(i) / N;
    snap.u[i] = u0[i] + phi[i];
    const int j = std::clamp(i, 1, N - 1);
    snap.S[i] = data.S[j - 1];
    snap.w[i] = (i == 0 || i == N) ? 0.0 : data.w[i - 1];
  }
  return snap;
}

}  // namespace toric
}  // namespace hflow
