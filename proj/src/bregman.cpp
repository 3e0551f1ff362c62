#include "geoaccel/bregman.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "geoaccel/errors.hpp"
#include "geoaccel/io.hpp"

namespace geoaccel {

Vector ConnectionCoefficients::contract(const Vector& v, const Vector& w) const {
  Vector out = Vector::Zero(n_);
  for (int k = 0; k < n_; ++k) {
    double acc = 0.0;
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) acc += (*this)(k, i, j) * v[i] * w[j];
    }
    out[k] = acc;
  }
  return out;
}

double ConnectionCoefficients::max_abs() const {
  double m = 0.0;
  for (double d : data_) m = std::max(m, std::abs(d));
  return m;
}

double ConnectionCoefficients::lower_index_asymmetry() const {
  double m = 0.0;
  for (int k = 0; k < n_; ++k) {
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) m = std::max(m, std::abs((*this)(k, i, j) - (*this)(k, j, i)));
    }
  }
  return m;
}

double divergence(const Generator& phi, const Vector& x, const Vector& y) {
  return phi.value(x) - phi.value(y) - phi.gradient(y).dot(x - y);
}

Vector to_dual_coords(const Generator& phi, const Vector& x) { return phi.gradient(x); }

Vector from_dual_coords(const Generator& phi, const Vector& y) {
  return phi.conjugate_gradient(y);
}

Vector tangent_to_dual(const Generator& phi, const Vector& x, const Vector& v) {
  phi.check_domain(x);
  return phi.hessian(x) * v;
}

Vector dual_geodesic_point(const Generator& phi, const Vector& x, const Vector& y, double t) {
  const Vector dual = (1.0 - t) * phi.gradient(x) + t * phi.gradient(y);
  return phi.conjugate_gradient(dual);
}

GeodesicPath dual_geodesic(const Generator& phi, const Vector& x, const Vector& y, int m) {
  if (m < 2) throw std::invalid_argument("dual_geodesic: need at least 2 samples");
  phi.check_domain(x);
  phi.check_domain(y);
  const Vector dx = phi.gradient(x);
  const Vector dy = phi.gradient(y);

  GeodesicPath path{x, y, {}};
  path.samples.reserve(static_cast<std::size_t>(m));
  path.samples.push_back({0.0, x});
  Vector warm = x;
  for (int i = 1; i < m - 1; ++i) {
    const double t = static_cast<double>(i) / (m - 1);
    warm = phi.conjugate_gradient((1.0 - t) * dx + t * dy, warm);
    path.samples.push_back({t, warm});
  }
  path.samples.push_back({1.0, y});
  return path;
}

GeodesicPath euclidean_segment(const Vector& x, const Vector& y, int m) {
  if (m < 2) throw std::invalid_argument("euclidean_segment: need at least 2 samples");
  GeodesicPath path{x, y, {}};
  path.samples.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double t = static_cast<double>(i) / (m - 1);
    path.samples.push_back({t, i == m - 1 ? y : Vector((1.0 - t) * x + t * y)});
  }
  return path;
}

Vector dual_exp(const Generator& phi, const Vector& x, const Vector& v) {
  phi.check_domain(x);
  return phi.conjugate_gradient(phi.gradient(x) + phi.hessian(x) * v);
}

ConnectionCoefficients dual_connection_coeffs(const Generator& phi, const Vector& x,
                                              double step) {
  phi.check_domain(x);
  const int n = phi.dimension();
  const Eigen::FullPivLU<Matrix> lu(phi.hessian(x));
  if (!lu.isInvertible()) throw DomainError("dual_connection_coeffs: singular Hessian");

  ConnectionCoefficients gamma(n);
  for (int i = 0; i < n; ++i) {
    Vector xp = x, xm = x;
    xp[i] += step;
    xm[i] -= step;
    const Matrix dH = (phi.hessian(xp) - phi.hessian(xm)) / (2.0 * step);
    const Matrix G = lu.solve(dH);
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) gamma(k, i, j) = G(k, j);
    }
  }
  return gamma;
}

double geodesic_ode_residual(const Generator& phi, const GeodesicPath& path) {
  const auto& s = path.samples;
  if (s.size() < 5) throw std::invalid_argument("geodesic_ode_residual: need at least 5 samples");
  const double h = s[1].t - s[0].t;
  if (!(h > 0.0)) throw std::invalid_argument("geodesic_ode_residual: t must increase");
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (std::abs((s[i].t - s[i - 1].t) - h) > 1e-9 * std::max(1.0, h)) {
      throw std::invalid_argument("geodesic_ode_residual: t grid is not uniform");
    }
  }

  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const Vector vel = (s[i + 1].point - s[i - 1].point) / (2.0 * h);
    const Vector acc = (s[i + 1].point - 2.0 * s[i].point + s[i - 1].point) / (h * h);
    if (vel.squaredNorm() == 0.0 && acc.squaredNorm() == 0.0) continue;
    const ConnectionCoefficients gamma = dual_connection_coeffs(phi, s[i].point);
    worst = std::max(worst, (acc + gamma.contract(vel, vel)).norm());
  }
  return worst;
}

GeodesicPath to_dual_path(const Generator& phi, const GeodesicPath& path) {
  GeodesicPath out{phi.gradient(path.start), phi.gradient(path.end), {}};
  out.samples.reserve(path.samples.size());
  for (const auto& sample : path.samples) out.samples.push_back({sample.t, phi.gradient(sample.point)});
  return out;
}

double bregman_prox_residual(const Objective& f, const Generator& phi, double rho,
                             const Vector& x_prev, const Vector& x) {
  return (phi.gradient(x) - phi.gradient(x_prev) + f.gradient(x) / rho).norm();
}

Vector bregman_prox(const Objective& f, const Generator& phi, double rho, const Vector& x_prev,
                    const BregmanProxOptions& options) {
  if (!(rho > 0.0)) throw std::invalid_argument("bregman_prox: rho must be positive");
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  const Vector anchor = phi.gradient(x_prev);

  auto residual = [&](const Vector& x) -> Vector {
    return phi.gradient(x) - anchor + f.gradient(x) / rho;
  };

  Vector x = x_prev;
  Vector r = residual(x);
  double rn = r.norm();
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    const double scale = anchor.norm() + phi.gradient(x).norm() + f.gradient(x).norm() / rho;
    if (rn <= options.tolerance || rn <= 64.0 * kEps * scale) return x;

    const Matrix J = phi.hessian(x) + f.hessian(x) / rho;
    const Eigen::LDLT<Matrix> ldlt(J);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw SolverError("bregman_prox: Newton system not positive definite", rn, it);
    }
    const Vector dx = ldlt.solve(-r);

    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h, step *= 0.5) {
      const Vector xn = x + step * dx;
      Vector rnew;
      try {
        rnew = residual(xn);
      } catch (const DomainError&) {
        continue;
      }
      if (rnew.allFinite() && rnew.norm() < rn) {
        x = xn;
        r = std::move(rnew);
        rn = r.norm();
        accepted = true;
        break;
      }
    }
    if (!accepted) throw SolverError("bregman_prox: backtracking failed", rn, it);
  }
  if (rn <= options.tolerance) return x;
  throw SolverError("bregman_prox: Newton did not converge", rn, it);
}

std::string geodesic_to_csv(const GeodesicPath& path) {
  const int n = static_cast<int>(path.start.size());
  std::vector<std::string> header{"t"};
  for (auto& c : indexed_columns("x", n)) header.push_back(std::move(c));
  CsvWriter csv(std::move(header));
  for (const auto& s : path.samples) {
    csv.begin_row().add(s.t).add(s.point).end_row();
  }
  return csv.str();
}

}  // namespace geoaccel
