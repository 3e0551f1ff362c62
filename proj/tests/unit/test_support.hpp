#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "geoaccel/linalg.hpp"
#include "geoaccel/objectives.hpp"

namespace geoaccel::testing {

inline Matrix demo_matrix() {
  Matrix H(2, 2);
  H << 2, 1, 1, 3;
  return H;
}

inline Objective demo_quadratic() { return make_quadratic({demo_matrix(), Vector::Zero(2)}); }

inline Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

inline double demo_mu() { return (5.0 - std::sqrt(5.0)) / 2.0; }
inline double demo_L() { return (5.0 + std::sqrt(5.0)) / 2.0; }

// Central differences with step h scaled by max(1, |x_i|).
inline Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                          double h = 1e-5) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double s = h * std::max(1.0, std::abs(x[i]));
    Vector xp = x, xm = x;
    xp[i] += s;
    xm[i] -= s;
    g[i] = (f(xp) - f(xm)) / (2.0 * s);
  }
  return g;
}

inline Matrix fd_jacobian(const std::function<Vector(const Vector&)>& F, const Vector& x,
                          double h = 1e-5) {
  const Vector f0 = F(x);
  Matrix J(f0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double s = h * std::max(1.0, std::abs(x[i]));
    Vector xp = x, xm = x;
    xp[i] += s;
    xm[i] -= s;
    J.col(i) = (F(xp) - F(xm)) / (2.0 * s);
  }
  return J;
}

inline Vector random_vector(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

inline double relative_error(const Vector& a, const Vector& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace geoaccel::testing
