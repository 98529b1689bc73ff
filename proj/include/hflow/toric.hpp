#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "hflow/functional.hpp"
#include "hflow/geometry.hpp"

namespace hflow {
namespace toric {

// Moment polytope [0,1] with unit boundary weights and unit volume; the
// canonical mean scalar curvature for it is a = 2. Potentials are sampled at
// x_i = i/N as offsets phi from the Guillemin potential u0, so the payload of
// a point is the N+1 vector of phi samples. u0'' = 1/(x(1-x)) is attached
// analytically; the grid quadrature is the trapezoid rule.

inline double guillemin_value(double x) {
  double v = 0.0;
  if (x > 0.0) v += x * std::log(x);
  if (x < 1.0) v += (1.0 - x) * std::log(1.0 - x);
  return v;  // 0 at both endpoints by continuity
}

inline double guillemin_second(double x) { return 1.0 / (x * (1.0 - x)); }

// Samples of u0 at x_i = i/N.
std::vector<double> guillemin_samples(int N);

// Trapezoid quadrature of N+1 nodal samples over [0,1].
double integrate(std::span<const double> samples);

// Interior-node data of a potential u = u0 + phi.
struct CurvatureData {
  std::vector<double> u_second;  // u'' at nodes 1..N-1
  std::vector<double> w;         // 1/u'' at nodes 1..N-1 (w = 0 on the boundary)
  std::vector<double> S;         // -w'' at nodes 1..N-1, boundary stencils use w=0
};

// Throws InputError when u'' <= 0 at some node (names the node).
CurvatureData curvature(std::span<const double> phi, int N);

// M_a(u) = -int log u'' + u(0) + u(1) - a int u, with the singular part
// int log u0'' = 2 evaluated exactly and the smooth remainder on the grid.
double mabuchi(std::span<const double> phi, int N, double a);

// L2 norm of S - a over the interior nodes; the slope of M_a in the flat
// metric up to discretization.
double calabi_energy(std::span<const double> phi, int N, double a);

// L_a(f) = f(0) + f(1) - a int f for a grid function f.
double linear_part(std::span<const double> f, int N, double a);

// Exact gradient of the discrete M_a (length N+1).
std::vector<double> mabuchi_gradient(std::span<const double> phi, int N, double a);

// -L_a(f)/||f||_{L2} for a discretely convex grid direction f != 0: the
// asymptotic Mabuchi slope per unit length along the ray u0 + t f.
double ray_ratio(std::span<const double> f, int N, double a);

// Flat space of potential offsets phi with the L2 quadrature metric.
class ToricSpace final : public Space {
 public:
  explicit ToricSpace(int N);

  std::string name() const override { return "toric(N=" + std::to_string(N_) + ")"; }
  std::size_t payload_size() const override { return static_cast<std::size_t>(N_) + 1; }
  double distance(const Point& a, const Point& b) const override;
  Point interpolate(const Point& a, const Point& b, double s) const override;

  int grid_size() const { return N_; }

 private:
  int N_;
};

// Mabuchi functional M_a on a ToricSpace; prox by damped Newton with the
// pentadiagonal Hessian, keeping u'' > 0 via fraction-to-boundary steps.
class MabuchiFunctional final : public Functional {
 public:
  MabuchiFunctional(std::shared_ptr<const ToricSpace> space, double a);

  std::string name() const override;
  const SpacePtr& space() const override { return space_; }
  double value(const Point& x) const override;
  Point prox(const Point& x, double lambda) const override;
  std::optional<double> analytic_slope(const Point& x) const override;
  std::string analytic_slope_label() const override { return "calabi_energy"; }

  double mean_curvature() const { return a_; }
  int grid_size() const { return N_; }

 private:
  SpacePtr space_;
  int N_;
  double a_;
};

// Snapshot row data for exports: x, u, phi, S, w per node (S and w take the
// nearest interior value at the boundary nodes, where w vanishes exactly).
struct Snapshot {
  std::vector<double> x, u, phi, S, w;
};
Snapshot snapshot(std::span<const double> phi, int N);

}  // namespace toric
}  // namespace hflow
