#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "geoaccel/linalg.hpp"
#include "geoaccel/methods.hpp"
#include "geoaccel/objectives.hpp"

namespace geoaccel {

enum class OdeKind { ProxPoint, Agm, HeavyBall };

std::string_view ode_kind_name(OdeKind kind);
// Accepts "prox_point"/"prox", "agm", "heavy_ball". Throws ConfigError otherwise.
OdeKind ode_kind_from_name(std::string_view name);

// u = [z; g] for the prox-point and AGM systems, u = [x; p] for heavy ball.
struct OdeSystem {
  OdeKind kind;
  Objective obj;
  HyperParams params;
  Vector u_star;

  int dimension() const { return obj.dimension(); }
};

// u* = [x*; 0]. Requires an objective with a known minimizer; the heavy-ball
// system additionally requires a quadratic.
OdeSystem make_ode_system(OdeKind kind, Objective obj, HyperParams params);

// Prox/AGM: g0 = grad f(x0), z0 = x0 - (alpha/eta) g0. Heavy ball: [x0; 0].
Vector ode_initial_state(const OdeSystem& sys, const Vector& x0);

// gdot = (z - grad f*(g))/tau; zdot = -g/eta - (alpha/eta) gdot
Vector prox_ode_rhs(const OdeSystem& sys, const Vector& u);
// As prox_ode_rhs, with gdot = hess f(grad f*(g)) (z - grad f*(g))/tau
Vector agm_ode_rhs(const OdeSystem& sys, const Vector& u);
// xdot = p; pdot = -(1 - beta) p - gamma H (x - x*)
Vector heavy_ball_ode_rhs(const OdeSystem& sys, const Vector& u);
Vector ode_rhs(const OdeSystem& sys, const Vector& u);

struct ContinuousSample {
  double t;
  Vector u;
};

struct ContinuousTrajectory {
  OdeKind kind;
  std::vector<ContinuousSample> samples;
  double dt = 0.0;
  std::string integrator;
};

// 0.01 min(tau, 1/eta)
double default_time_step(const HyperParams& params);

// Classical RK4 on t = 0, dt, ..., up to the first grid point >= t_max.
// Requires dt <= 0.1 tau and dt <= 0.1/eta (when those are positive).
// Throws DivergenceError on a non-finite state.
ContinuousTrajectory integrate_rk4(const OdeSystem& sys, const Vector& u0, double dt,
                                   double t_max);

// One step of size h for the AGM system: g solved implicitly as the Bregman
// prox of f* against z, grad f*(g_new) = (tau grad f*(g) + h z)/(tau + h),
// then z_new = z - (h/eta) g_new - (alpha/eta)(g_new - g).
Vector block_implicit_euler_step(const OdeSystem& sys, const Vector& u, double h);

ContinuousTrajectory integrate_block_implicit_euler(const OdeSystem& sys, const Vector& u0,
                                                    double h, int steps);

struct DecayEstimate {
  double rho;
  bool decaying;  // false when rho <= 0
};

// min over samples with t >= 0.05 t_max (and t > 0) of
// -log(|u(t) - u*| / |u(0) - u*|) / t.
DecayEstimate decay_rate_estimate(const ContinuousTrajectory& traj, const Vector& u_star);

// max over samples of |u(t) - u*| / (exp(-rho t) |u(0) - u*|).
double envelope_ratio(const ContinuousTrajectory& traj, const Vector& u_star, double rho);

// Header t,z_1..z_n,g_1..g_n (t,x_1..,p_1.. for heavy ball).
std::string continuous_to_csv(const ContinuousTrajectory& traj);
nlohmann::json continuous_to_json(const ContinuousTrajectory& traj);

}  // namespace geoaccel
