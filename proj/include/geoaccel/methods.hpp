#pragma once

#include <array>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "geoaccel/linalg.hpp"
#include "geoaccel/objectives.hpp"

namespace geoaccel {

enum class Form {
  NesterovI,
  NesterovII,
  Sutskever,
  ModernMomentum,
  AuslenderTeboulle,
  Lan,
  BregmanAgm,
  PrimalDualProxPoint,
  InertialProxPoint,
  HeavyBall,
  ProxPoint,
};

// The seven mutually equivalent accelerated forms, in table order.
inline constexpr std::array<Form, 7> kAcceleratedForms = {
    Form::NesterovI,         Form::NesterovII, Form::Sutskever,  Form::ModernMomentum,
    Form::AuslenderTeboulle, Form::Lan,        Form::BregmanAgm,
};

inline constexpr std::array<Form, 11> kAllForms = {
    Form::NesterovI,  Form::NesterovII,          Form::Sutskever,
    Form::ModernMomentum, Form::AuslenderTeboulle, Form::Lan,
    Form::BregmanAgm, Form::PrimalDualProxPoint, Form::InertialProxPoint,
    Form::HeavyBall,  Form::ProxPoint,
};

std::string_view form_name(Form form);
// Throws ConfigError for unknown names.
Form form_from_name(std::string_view name);

// Constants shared across method forms. Each form reads only its own subset:
//   Nesterov I        alpha, gamma, mu, L
//   Nesterov II       beta, L
//   Sutskever         beta, L
//   Modern momentum   beta, L
//   Auslender-Teboulle theta, gamma
//   Lan, Bregman AGM  eta, tau, alpha
//   primal-dual / inertial prox point   eta, tau, alpha
//   heavy ball        beta, gamma (step size)
struct HyperParams {
  double mu = 0.0;
  double L = 0.0;
  double eta = 0.0;
  double tau = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double theta = 0.0;
};

nlohmann::json to_json(const HyperParams& p);
// Overrides only the keys present in `j`.
void apply_overrides(HyperParams& p, const nlohmann::json& j);

// Per-form iterate tuples. Every state holds quantities at one common index k
// (the index of the Nesterov II hub it maps to), except where noted.
struct NesterovIState {
  Vector x, v, y;  // y = (alpha gamma v + gamma x) / (alpha mu + gamma)
};
struct NesterovIIState {
  Vector x, x_prev, y;
};
struct SutskeverState {
  Vector x, p;
};
struct ModernState {
  Vector x, p;
};
struct AuslenderTeboulleState {
  Vector x_hat, z, y;
};
// Lan's x^k, x^{k-1} and the underlined iterate; these sit one evaluation
// behind the Auslender-Teboulle index (x = z_AT^k, x_under = y_AT^{k-1}).
struct LanState {
  Vector x, x_prev, x_under;
};
struct BregmanAgmState {
  Vector x, y, g;
};
struct PrimalDualState {
  Vector x, g;
};
struct InertialState {
  Vector z, g;
};
struct HeavyBallState {
  Vector y, y_prev;
};
struct ProxPointState {
  Vector x;
};

// Alternatives are in Form order.
using MethodState =
    std::variant<NesterovIState, NesterovIIState, SutskeverState, ModernState,
                 AuslenderTeboulleState, LanState, BregmanAgmState, PrimalDualState,
                 InertialState, HeavyBallState, ProxPointState>;

Form form_of(const MethodState& state);

// (name, vector) pairs in declaration order, for serialization.
std::vector<std::pair<std::string, Vector>> state_fields(const MethodState& state);

// The point at which a form's progress is measured (f and ||grad f|| in traces).
Vector primary_iterate(const MethodState& state, const HyperParams& params);

enum class ProxGeometry { Euclidean, Bregman };

// Default constants for a form given 0 < mu <= L. Throws std::invalid_argument
// otherwise.
HyperParams default_params(Form form, double mu, double L);

// Constants under which all seven accelerated forms generate the same
// iterates. Identical to default_params except for the Bregman AGM, which
// takes Lan's constants (eta = theta L, tau = (1 - theta)/theta, alpha = 1 - theta).
HyperParams equivalence_params(Form form, double mu, double L);

// Nesterov II constants generating the same iterates as a Bregman AGM with
// (eta, tau, alpha): step 1/(eta (1 + tau)) and beta = tau/(1 + tau). Requires
// alpha = tau/(1 + tau).
HyperParams form_ii_params_for_bregman(const HyperParams& bregman);

// Heavy-ball constants of the alpha = 0 Bregman AGM: beta = tau/(1 + tau),
// step (1 - beta)/eta.
HyperParams heavy_ball_params_for_bregman(double eta, double tau);

// ---------------------------------------------------------------------------
// Steppers. Pure state -> state functions.

// argmin_x f(x) + eta/2 ||x - x_prev||^2
Vector prox_point_step(const Objective& obj, double eta, const Vector& x_prev);

PrimalDualState primal_dual_pp_step(const Objective& obj, double eta, const PrimalDualState& s);

BregmanAgmState bregman_agm_step(const Objective& obj, const HyperParams& p,
                                 const BregmanAgmState& s);

InertialState inertial_pp_step(const Objective& obj, const HyperParams& p, const InertialState& s,
                               ProxGeometry geometry = ProxGeometry::Euclidean);

HeavyBallState heavy_ball_step(const Objective& obj, double beta, double step,
                               const HeavyBallState& s);

NesterovIState nesterov_form_i_step(const Objective& obj, const HyperParams& p,
                                    const NesterovIState& s);
NesterovIIState nesterov_form_ii_step(const Objective& obj, const HyperParams& p,
                                      const NesterovIIState& s);
SutskeverState sutskever_step(const Objective& obj, const HyperParams& p, const SutskeverState& s);
ModernState modern_momentum_step(const Objective& obj, const HyperParams& p, const ModernState& s);
AuslenderTeboulleState auslender_teboulle_step(const Objective& obj, const HyperParams& p,
                                               const AuslenderTeboulleState& s);
LanState lan_step(const Objective& obj, const HyperParams& p, const LanState& s);

// Dispatch on the state's form. The inertial form uses the Euclidean prox.
MethodState step(const Objective& obj, const HyperParams& p, const MethodState& s);

// ---------------------------------------------------------------------------
// State maps. Accelerated forms map through the Nesterov II hub; each side is
// read with its own constants. The primal-dual and inertial prox-point forms
// map to each other through z = x - (alpha/eta) g. Other pairs throw
// UnsupportedError.
//
// Lan's state carries one more vector than the hub determines; the hub -> Lan
// direction fixes the gauge x_prev = x, which leaves every future iterate
// unchanged.
MethodState map_state(const MethodState& state, const HyperParams& from_params, Form to,
                      const HyperParams& to_params);
MethodState map_state(const MethodState& state, Form to, const HyperParams& params);

NesterovIIState to_hub(const MethodState& state, const HyperParams& params);
MethodState from_hub(const NesterovIIState& hub, Form to, const HyperParams& params);

// Initial state for x0. Accelerated forms other than the Bregman AGM are the
// hub state (x0, x0, x0) mapped to the form; the Bregman AGM starts at
// y = x0, g = grad f(x0); the inertial form at z = x0 - (alpha/eta) grad f(x0).
MethodState initial_state(Form form, const Objective& obj, const HyperParams& params,
                          const Vector& x0);

// ---------------------------------------------------------------------------

struct TrajectoryRecord {
  int k;
  MethodState state;
  double f_value;
  double grad_norm;
};

struct Trajectory {
  Form form;
  HyperParams params;
  std::vector<TrajectoryRecord> records;
};

// Records the initial state at k = 0 and the state after each step at k + 1.
Trajectory run_from(const Objective& obj, const HyperParams& params, const MethodState& initial,
                    int k_max);
Trajectory run(Form form, const Objective& obj, const HyperParams& params, const Vector& x0,
               int k_max);

// max over common k of |x_a^k - x_b^k| between primary iterates.
double path_divergence(const Trajectory& a, const Trajectory& b);

// CSV: k,f,grad_norm,x_1..x_n, then each state field <name>_1..<name>_n.
std::string trajectory_to_csv(const Trajectory& traj);
nlohmann::json trajectory_to_json(const Trajectory& traj);

}  // namespace geoaccel
