#include "geoaccel/continuous.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "geoaccel/errors.hpp"
#include "geoaccel/io.hpp"

namespace geoaccel {

std::string_view ode_kind_name(OdeKind kind) {
  switch (kind) {
    case OdeKind::ProxPoint:
      return "prox_point";
    case OdeKind::Agm:
      return "agm";
    case OdeKind::HeavyBall:
      return "heavy_ball";
  }
  throw std::logic_error("unknown ODE kind");
}

OdeKind ode_kind_from_name(std::string_view name) {
  if (name == "prox_point" || name == "prox") return OdeKind::ProxPoint;
  if (name == "agm") return OdeKind::Agm;
  if (name == "heavy_ball") return OdeKind::HeavyBall;
  throw ConfigError("unknown ODE kind '" + std::string(name) + "'");
}

OdeSystem make_ode_system(OdeKind kind, Objective obj, HyperParams params) {
  if (kind == OdeKind::HeavyBall && obj.quadratic() == nullptr) {
    throw UnsupportedError("heavy-ball ODE requires a quadratic objective");
  }
  if (kind != OdeKind::HeavyBall && (!(params.eta > 0.0) || !(params.tau > 0.0))) {
    throw std::invalid_argument("ODE system needs eta > 0 and tau > 0");
  }
  const auto x_star = obj.minimizer();
  if (!x_star) throw UnsupportedError("ODE system requires an objective with known minimizer");
  const int n = obj.dimension();
  Vector u_star = Vector::Zero(2 * n);
  u_star.head(n) = *x_star;
  return OdeSystem{kind, std::move(obj), params, std::move(u_star)};
}

Vector ode_initial_state(const OdeSystem& sys, const Vector& x0) {
  const int n = sys.dimension();
  if (x0.size() != n) throw std::invalid_argument("ode_initial_state: x0 size mismatch");
  Vector u(2 * n);
  if (sys.kind == OdeKind::HeavyBall) {
    u << x0, Vector::Zero(n);
    return u;
  }
  const Vector g = sys.obj.gradient(x0);
  u << x0 - (sys.params.alpha / sys.params.eta) * g, g;
  return u;
}

namespace {

void check_state(const OdeSystem& sys, const Vector& u) {
  if (u.size() != 2 * sys.dimension()) throw std::invalid_argument("ODE state size mismatch");
}

Vector assemble(const Vector& a, const Vector& b) {
  Vector u(a.size() + b.size());
  u << a, b;
  return u;
}

Vector z_dot(const HyperParams& p, const Vector& g, const Vector& g_dot) {
  return -g / p.eta - (p.alpha / p.eta) * g_dot;
}

}  // namespace

Vector prox_ode_rhs(const OdeSystem& sys, const Vector& u) {
  check_state(sys, u);
  const int n = sys.dimension();
  const Vector z = u.head(n), g = u.tail(n);
  const Vector g_dot = (z - sys.obj.conjugate_gradient(g)) / sys.params.tau;
  return assemble(z_dot(sys.params, g, g_dot), g_dot);
}

Vector agm_ode_rhs(const OdeSystem& sys, const Vector& u) {
  check_state(sys, u);
  const int n = sys.dimension();
  const Vector z = u.head(n), g = u.tail(n);
  const Vector y = sys.obj.conjugate_gradient(g);
  sys.obj.check_domain(y);
  const Vector g_dot = sys.obj.hessian(y) * ((z - y) / sys.params.tau);
  return assemble(z_dot(sys.params, g, g_dot), g_dot);
}

Vector heavy_ball_ode_rhs(const OdeSystem& sys, const Vector& u) {
  check_state(sys, u);
  const QuadraticSpec* q = sys.obj.quadratic();
  if (q == nullptr) throw UnsupportedError("heavy-ball ODE requires a quadratic objective");
  const int n = sys.dimension();
  const Vector x = u.head(n), p = u.tail(n);
  const Vector p_dot = -(1.0 - sys.params.beta) * p - sys.params.gamma * (q->H * (x - q->x_star));
  return assemble(p, p_dot);
}

Vector ode_rhs(const OdeSystem& sys, const Vector& u) {
  switch (sys.kind) {
    case OdeKind::ProxPoint:
      return prox_ode_rhs(sys, u);
    case OdeKind::Agm:
      return agm_ode_rhs(sys, u);
    case OdeKind::HeavyBall:
      return heavy_ball_ode_rhs(sys, u);
  }
  throw std::logic_error("unknown ODE kind");
}

double default_time_step(const HyperParams& params) {
  if (!(params.tau > 0.0) || !(params.eta > 0.0)) {
    throw std::invalid_argument("default_time_step: needs tau > 0 and eta > 0");
  }
  return 0.01 * std::min(params.tau, 1.0 / params.eta);
}

namespace {

void check_finite(const Vector& u, double t) {
  if (!u.allFinite()) throw DivergenceError("ODE state became non-finite", t);
}

std::size_t step_count(double dt, double t_max) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(t_max >= 0.0)) throw std::invalid_argument("t_max must be non-negative");
  return static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));
}

}  // namespace

ContinuousTrajectory integrate_rk4(const OdeSystem& sys, const Vector& u0, double dt,
                                   double t_max) {
  const std::size_t steps = step_count(dt, t_max);
  const HyperParams& p = sys.params;
  constexpr double kSlack = 1.0 + 1e-12;
  if (p.tau > 0.0 && dt > 0.1 * p.tau * kSlack) {
    throw std::invalid_argument("integrate_rk4: dt exceeds 0.1 tau");
  }
  if (p.eta > 0.0 && dt > 0.1 / p.eta * kSlack) {
    throw std::invalid_argument("integrate_rk4: dt exceeds 0.1/eta");
  }
  check_state(sys, u0);
  check_finite(u0, 0.0);

  ContinuousTrajectory traj{sys.kind, {}, dt, "rk4"};
  traj.samples.reserve(steps + 1);
  traj.samples.push_back({0.0, u0});
  Vector u = u0;
  for (std::size_t i = 0; i < steps; ++i) {
    const Vector k1 = ode_rhs(sys, u);
    const Vector k2 = ode_rhs(sys, u + 0.5 * dt * k1);
    const Vector k3 = ode_rhs(sys, u + 0.5 * dt * k2);
    const Vector k4 = ode_rhs(sys, u + dt * k3);
    u += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double t_next = static_cast<double>(i + 1) * dt;
    check_finite(u, t_next);
    traj.samples.push_back({t_next, u});
  }
  return traj;
}

Vector block_implicit_euler_step(const OdeSystem& sys, const Vector& u, double h) {
  if (sys.kind != OdeKind::Agm) {
    throw UnsupportedError("block_implicit_euler_step: requires the AGM system");
  }
  if (!(h > 0.0)) throw std::invalid_argument("block_implicit_euler_step: h must be positive");
  check_state(sys, u);
  const HyperParams& p = sys.params;
  const int n = sys.dimension();
  const Vector z = u.head(n), g = u.tail(n);
  // Stationarity of argmin f*(g) - <g, z> + (tau/h) B_{f*}(g, g_old) in closed form.
  const Vector y = (p.tau * sys.obj.conjugate_gradient(g) + h * z) / (p.tau + h);
  const Vector g_new = sys.obj.gradient(y);
  const Vector z_new = z - (h / p.eta) * g_new - (p.alpha / p.eta) * (g_new - g);
  return assemble(z_new, g_new);
}

ContinuousTrajectory integrate_block_implicit_euler(const OdeSystem& sys, const Vector& u0,
                                                    double h, int steps) {
  if (steps < 0) throw std::invalid_argument("steps must be non-negative");
  ContinuousTrajectory traj{sys.kind, {}, h, "block_implicit_euler"};
  traj.samples.reserve(static_cast<std::size_t>(steps) + 1);
  traj.samples.push_back({0.0, u0});
  Vector u = u0;
  for (int i = 0; i < steps; ++i) {
    u = block_implicit_euler_step(sys, u, h);
    check_finite(u, (i + 1) * h);
    traj.samples.push_back({(i + 1) * h, u});
  }
  return traj;
}

DecayEstimate decay_rate_estimate(const ContinuousTrajectory& traj, const Vector& u_star) {
  if (traj.samples.empty()) throw std::invalid_argument("decay_rate_estimate: empty trajectory");
  const double e0 = (traj.samples.front().u - u_star).norm();
  if (e0 == 0.0) return {0.0, false};
  const double t0 = traj.samples.front().t;
  const double t_max = traj.samples.back().t - t0;
  double rho = std::numeric_limits<double>::infinity();
  for (const auto& s : traj.samples) {
    const double t = s.t - t0;
    if (t <= 0.0 || t < 0.05 * t_max) continue;
    const double e = (s.u - u_star).norm();
    if (e == 0.0) continue;
    rho = std::min(rho, -std::log(e / e0) / t);
  }
  if (!std::isfinite(rho)) rho = rho > 0 ? rho : 0.0;
  return {rho, rho > 0.0};
}

double envelope_ratio(const ContinuousTrajectory& traj, const Vector& u_star, double rho) {
  if (traj.samples.empty()) throw std::invalid_argument("envelope_ratio: empty trajectory");
  const double e0 = (traj.samples.front().u - u_star).norm();
  const double t0 = traj.samples.front().t;
  double worst = 0.0;
  for (const auto& s : traj.samples) {
    const double e = (s.u - u_star).norm();
    const double bound = std::exp(-rho * (s.t - t0)) * e0;
    if (bound == 0.0) {
      if (e > 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    worst = std::max(worst, e / bound);
  }
  return worst;
}

std::string continuous_to_csv(const ContinuousTrajectory& traj) {
  if (traj.samples.empty()) throw std::invalid_argument("continuous_to_csv: empty trajectory");
  const int n = static_cast<int>(traj.samples.front().u.size() / 2);
  const bool hb = traj.kind == OdeKind::HeavyBall;
  std::vector<std::string> header{"t"};
  for (auto& c : indexed_columns(hb ? "x" : "z", n)) header.push_back(std::move(c));
  for (auto& c : indexed_columns(hb ? "p" : "g", n)) header.push_back(std::move(c));
  CsvWriter csv(std::move(header));
  for (const auto& s : traj.samples) csv.begin_row().add(s.t).add(s.u).end_row();
  return csv.str();
}

nlohmann::json continuous_to_json(const ContinuousTrajectory& traj) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : traj.samples) samples.push_back({{"t", s.t}, {"u", to_json(s.u)}});
  return {{"kind", std::string(ode_kind_name(traj.kind))},
          {"integrator", traj.integrator},
          {"dt", traj.dt},
          {"layout", traj.kind == OdeKind::HeavyBall ? "x,p" : "z,g"},
          {"samples", std::move(samples)}};
}

}  // namespace geoaccel
