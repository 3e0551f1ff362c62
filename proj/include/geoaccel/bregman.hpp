#pragma once

#include <string>
#include <vector>

#include "geoaccel/linalg.hpp"
#include "geoaccel/objectives.hpp"

namespace geoaccel {

// A smooth strongly convex phi generating the Hessian-manifold structure.
// In the accelerated method phi = f* (see make_conjugate).
using Generator = Objective;

struct GeodesicSample {
  double t;
  Vector point;
};

// Path sampled on a uniform t grid over [0, 1], in primal coordinates.
struct GeodesicPath {
  Vector start;
  Vector end;
  std::vector<GeodesicSample> samples;
};

// Dense n x n x n array, indexed (k, i, j) for Gamma^k_ij.
class ConnectionCoefficients {
 public:
  explicit ConnectionCoefficients(int n) : n_(n), data_(static_cast<std::size_t>(n * n * n), 0.0) {}

  int dimension() const { return n_; }
  double& operator()(int k, int i, int j) { return data_[index(k, i, j)]; }
  double operator()(int k, int i, int j) const { return data_[index(k, i, j)]; }

  // Gamma(v, w)^k = sum_ij Gamma^k_ij v^i w^j
  Vector contract(const Vector& v, const Vector& w) const;
  double max_abs() const;
  // max_{k,i,j} |Gamma^k_ij - Gamma^k_ji|
  double lower_index_asymmetry() const;

 private:
  std::size_t index(int k, int i, int j) const {
    return static_cast<std::size_t>((k * n_ + i) * n_ + j);
  }

  int n_;
  std::vector<double> data_;
};

// B_phi(x, y) = phi(x) - phi(y) - <grad phi(y), x - y>
double divergence(const Generator& phi, const Vector& x, const Vector& y);

Vector to_dual_coords(const Generator& phi, const Vector& x);
Vector from_dual_coords(const Generator& phi, const Vector& y);

// u = hess phi(x) v
Vector tangent_to_dual(const Generator& phi, const Vector& x, const Vector& v);

// gamma(t) = grad phi*((1 - t) grad phi(x) + t grad phi(y)); t may lie outside [0, 1].
Vector dual_geodesic_point(const Generator& phi, const Vector& x, const Vector& y, double t);

// Dual-flat geodesic from x to y sampled at m >= 2 uniform points.
GeodesicPath dual_geodesic(const Generator& phi, const Vector& x, const Vector& y, int m = 101);

// Straight segment (1 - t) x + t y, the Euclidean-connection geodesic.
GeodesicPath euclidean_segment(const Vector& x, const Vector& y, int m = 101);

// Endpoint at t = 1 of the dual geodesic leaving x with initial velocity v.
Vector dual_exp(const Generator& phi, const Vector& x, const Vector& v);

// Gamma^k_ij(x) = [hess phi(x)^{-1} (d/dx_i hess phi(x))]_{kj}, with the
// Hessian derivative taken by central differences of width `step`.
ConnectionCoefficients dual_connection_coeffs(const Generator& phi, const Vector& x,
                                              double step = 1e-4);

// max over interior samples of || x'' + Gamma(x', x') || with x', x'' from
// central differences on the path grid. Requires >= 5 uniformly spaced samples.
double geodesic_ode_residual(const Generator& phi, const GeodesicPath& path);

// Path re-expressed in dual coordinates grad phi(gamma(t)).
GeodesicPath to_dual_path(const Generator& phi, const GeodesicPath& path);

struct BregmanProxOptions {
  double tolerance = 1e-12;
  int max_iterations = 100;
  int max_halvings = 60;
};

// argmin_x f(x) + rho B_phi(x, x_prev), solved from the stationarity
// condition -(1/rho) grad f(x) = grad phi(x) - grad phi(x_prev) by damped
// Newton with halving backtracking on the residual norm.
Vector bregman_prox(const Objective& f, const Generator& phi, double rho, const Vector& x_prev,
                    const BregmanProxOptions& options = {});

// || grad phi(x) - grad phi(x_prev) + (1/rho) grad f(x) ||
double bregman_prox_residual(const Objective& f, const Generator& phi, double rho,
                             const Vector& x_prev, const Vector& x);

// CSV with header t,x_1..x_n.
std::string geodesic_to_csv(const GeodesicPath& path);

}  // namespace geoaccel
