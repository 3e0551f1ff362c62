#include "geoaccel/methods.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "geoaccel/bregman.hpp"
#include "geoaccel/errors.hpp"
#include "geoaccel/io.hpp"

namespace geoaccel {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

struct FormEntry {
  Form form;
  std::string_view name;
};

constexpr FormEntry kFormNames[] = {
    {Form::NesterovI, "nesterov_i"},
    {Form::NesterovII, "nesterov_ii"},
    {Form::Sutskever, "sutskever"},
    {Form::ModernMomentum, "modern_momentum"},
    {Form::AuslenderTeboulle, "auslender_teboulle"},
    {Form::Lan, "lan"},
    {Form::BregmanAgm, "bregman_agm"},
    {Form::PrimalDualProxPoint, "primal_dual_pp"},
    {Form::InertialProxPoint, "inertial_pp"},
    {Form::HeavyBall, "heavy_ball"},
    {Form::ProxPoint, "prox_point"},
};

double nesterov_beta(double mu, double L) {
  const double sm = std::sqrt(mu), sl = std::sqrt(L);
  return (sl - sm) / (sl + sm);
}

void check_mu_L(double mu, double L) {
  if (!(mu > 0.0) || !(L > 0.0) || !std::isfinite(L)) {
    throw std::invalid_argument("mu and L must be positive and finite");
  }
  if (mu > L) throw std::invalid_argument("mu must not exceed L");
}

Vector form_i_y(const HyperParams& p, const Vector& x, const Vector& v) {
  return (p.alpha * p.gamma * v + p.gamma * x) / (p.alpha * p.mu + p.gamma);
}

// (x + (H + eta I)^{-1} H (b - x*)) style solves share this factorization.
Matrix shifted(const QuadraticSpec& q, double shift) {
  return q.H + shift * Matrix::Identity(q.H.rows(), q.H.cols());
}

// g solving grad f*(g) + (g - g_prev)/eta = c, i.e. the Euclidean prox of f*.
Vector dual_prox(const Objective& obj, double eta, const Vector& c, const Vector& g_prev) {
  if (const QuadraticSpec* q = obj.quadratic()) {
    // x* + H^{-1} g + g/eta = c + g_prev/eta  =>  (H + eta I) g = H (eta (c - x*) + g_prev)
    const Vector rhs = q->H * (eta * (c - q->x_star) + g_prev);
    return shifted(*q, eta).llt().solve(rhs);
  }
  const Objective tilted = make_tilted(make_conjugate(obj), c);
  BregmanProxOptions opts;
  opts.tolerance = 1e-12;
  return bregman_prox(tilted, make_euclidean(obj.dimension()), 1.0 / eta, g_prev, opts);
}

}  // namespace

std::string_view form_name(Form form) {
  for (const auto& e : kFormNames) {
    if (e.form == form) return e.name;
  }
  throw std::logic_error("unknown form");
}

Form form_from_name(std::string_view name) {
  for (const auto& e : kFormNames) {
    if (e.name == name) return e.form;
  }
  throw ConfigError("unknown method form '" + std::string(name) + "'");
}

nlohmann::json to_json(const HyperParams& p) {
  return {{"mu", p.mu},       {"L", p.L},         {"eta", p.eta},     {"tau", p.tau},
          {"alpha", p.alpha}, {"beta", p.beta},   {"gamma", p.gamma}, {"theta", p.theta}};
}

void apply_overrides(HyperParams& p, const nlohmann::json& j) {
  if (j.is_null()) return;
  if (!j.is_object()) throw ConfigError("params must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw ConfigError("param '" + key + "' must be a number");
    const double v = value.get<double>();
    if (key == "mu") p.mu = v;
    else if (key == "L") p.L = v;
    else if (key == "eta") p.eta = v;
    else if (key == "tau") p.tau = v;
    else if (key == "alpha") p.alpha = v;
    else if (key == "beta") p.beta = v;
    else if (key == "gamma") p.gamma = v;
    else if (key == "theta") p.theta = v;
    else throw ConfigError("unknown param '" + key + "'");
  }
}

Form form_of(const MethodState& state) { return kAllForms[state.index()]; }

std::vector<std::pair<std::string, Vector>> state_fields(const MethodState& state) {
  using Fields = std::vector<std::pair<std::string, Vector>>;
  return std::visit(
      Overloaded{
          [](const NesterovIState& s) { return Fields{{"x", s.x}, {"v", s.v}, {"y", s.y}}; },
          [](const NesterovIIState& s) {
            return Fields{{"x", s.x}, {"x_prev", s.x_prev}, {"y", s.y}};
          },
          [](const SutskeverState& s) { return Fields{{"x", s.x}, {"p", s.p}}; },
          [](const ModernState& s) { return Fields{{"x", s.x}, {"p", s.p}}; },
          [](const AuslenderTeboulleState& s) {
            return Fields{{"x_hat", s.x_hat}, {"z", s.z}, {"y", s.y}};
          },
          [](const LanState& s) {
            return Fields{{"x", s.x}, {"x_prev", s.x_prev}, {"x_under", s.x_under}};
          },
          [](const BregmanAgmState& s) { return Fields{{"x", s.x}, {"y", s.y}, {"g", s.g}}; },
          [](const PrimalDualState& s) { return Fields{{"x", s.x}, {"g", s.g}}; },
          [](const InertialState& s) { return Fields{{"z", s.z}, {"g", s.g}}; },
          [](const HeavyBallState& s) { return Fields{{"y", s.y}, {"y_prev", s.y_prev}}; },
          [](const ProxPointState& s) { return Fields{{"x", s.x}}; },
      },
      state);
}

Vector primary_iterate(const MethodState& state, const HyperParams& /*params*/) {
  return std::visit(
      Overloaded{
          [](const NesterovIState& s) { return s.x; },
          [](const NesterovIIState& s) { return s.x; },
          [](const SutskeverState& s) { return s.x; },
          [](const ModernState& s) { return s.x; },
          [](const AuslenderTeboulleState& s) { return s.x_hat; },
          [](const LanState& s) { return s.x; },
          [](const BregmanAgmState& s) { return s.x; },
          [](const PrimalDualState& s) { return s.x; },
          [](const InertialState& s) { return s.z; },
          [](const HeavyBallState& s) { return s.y; },
          [](const ProxPointState& s) { return s.x; },
      },
      state);
}

HyperParams default_params(Form form, double mu, double L) {
  check_mu_L(mu, L);
  HyperParams p;
  p.mu = mu;
  p.L = L;
  const double beta = nesterov_beta(mu, L);
  const double theta = 1.0 - beta;
  const double eta = std::sqrt(mu * L);
  switch (form) {
    case Form::NesterovI:
      p.alpha = std::sqrt(mu / L);
      p.gamma = mu;
      p.beta = beta;
      p.theta = theta;
      break;
    case Form::NesterovII:
    case Form::Sutskever:
    case Form::ModernMomentum:
      p.beta = beta;
      p.theta = theta;
      break;
    case Form::AuslenderTeboulle:
      p.beta = beta;
      p.theta = theta;
      p.gamma = 1.0 / L;
      break;
    case Form::Lan:
      p.beta = beta;
      p.theta = theta;
      p.gamma = 1.0 / L;
      p.eta = theta / p.gamma;
      p.tau = (1.0 - theta) / theta;
      p.alpha = 1.0 - theta;
      break;
    case Form::BregmanAgm:
      p.eta = eta;
      p.tau = L / eta;
      p.alpha = p.tau / (1.0 + p.tau);
      // Auslender-Teboulle constants of the same iteration.
      p.beta = p.alpha;
      p.theta = 1.0 / (1.0 + p.tau);
      break;
    case Form::PrimalDualProxPoint:
    case Form::InertialProxPoint:
    case Form::ProxPoint:
      p.eta = eta;
      p.tau = 1.0 / eta;
      p.alpha = 1.0;
      break;
    case Form::HeavyBall: {
      const double s = std::sqrt(L) + std::sqrt(mu);
      p.beta = beta;
      p.gamma = 4.0 / (s * s);
      p.eta = eta;
      p.tau = 1.0 / eta;
      break;
    }
  }
  return p;
}

HyperParams equivalence_params(Form form, double mu, double L) {
  if (form == Form::BregmanAgm) {
    HyperParams p = default_params(Form::Lan, mu, L);
    return p;
  }
  return default_params(form, mu, L);
}

HyperParams form_ii_params_for_bregman(const HyperParams& b) {
  if (!(b.eta > 0.0) || !(b.tau >= 0.0)) {
    throw std::invalid_argument("form_ii_params_for_bregman: need eta > 0 and tau >= 0");
  }
  const double beta = b.tau / (1.0 + b.tau);
  if (std::abs(b.alpha - beta) > 1e-12 * std::max(1.0, std::abs(beta))) {
    throw std::invalid_argument("form_ii_params_for_bregman: requires alpha = tau/(1 + tau)");
  }
  HyperParams p;
  p.mu = b.mu;
  p.L = b.eta * (1.0 + b.tau);
  p.beta = beta;
  p.theta = 1.0 - beta;
  p.gamma = 1.0 / p.L;
  return p;
}

HyperParams heavy_ball_params_for_bregman(double eta, double tau) {
  HyperParams p;
  p.eta = eta;
  p.tau = tau;
  p.beta = tau / (1.0 + tau);
  p.gamma = (1.0 - p.beta) / eta;
  return p;
}

// ---------------------------------------------------------------------------

Vector prox_point_step(const Objective& obj, double eta, const Vector& x_prev) {
  if (!(eta > 0.0)) throw std::invalid_argument("prox_point_step: eta must be positive");
  if (const QuadraticSpec* q = obj.quadratic()) {
    return shifted(*q, eta).llt().solve(eta * x_prev + q->H * q->x_star);
  }
  BregmanProxOptions opts;
  opts.tolerance = 1e-12;
  return bregman_prox(obj, make_euclidean(obj.dimension()), eta, x_prev, opts);
}

PrimalDualState primal_dual_pp_step(const Objective& obj, double eta, const PrimalDualState& s) {
  if (!(eta > 0.0)) throw std::invalid_argument("primal_dual_pp_step: eta must be positive");
  // argmin f*(g) - <g, x_prev - g_prev/eta> + |g - g_prev|^2/(2 eta)
  const Vector g = dual_prox(obj, eta, s.x - s.g / eta, s.g);
  return {s.x - g / eta, g};
}

BregmanAgmState bregman_agm_step(const Objective& obj, const HyperParams& p,
                                 const BregmanAgmState& s) {
  const Vector y = (s.x - (p.alpha / p.eta) * s.g + p.tau * s.y) / (1.0 + p.tau);
  Vector g = obj.gradient(y);
  Vector x = s.x - g / p.eta;
  return {std::move(x), y, std::move(g)};
}

InertialState inertial_pp_step(const Objective& obj, const HyperParams& p, const InertialState& s,
                               ProxGeometry geometry) {
  Vector g;
  if (geometry == ProxGeometry::Euclidean) {
    g = dual_prox(obj, p.eta, s.z, s.g);
  } else {
    // argmin f*(g) - <g, z> + tau B_{f*}(g, g_prev)
    const Vector y = (s.z + p.tau * obj.conjugate_gradient(s.g)) / (1.0 + p.tau);
    g = obj.gradient(y);
  }
  Vector z = s.z - g / p.eta - (p.alpha / p.eta) * (g - s.g);
  return {std::move(z), std::move(g)};
}

HeavyBallState heavy_ball_step(const Objective& obj, double beta, double step,
                               const HeavyBallState& s) {
  Vector y = s.y - step * obj.gradient(s.y) + beta * (s.y - s.y_prev);
  return {std::move(y), s.y};
}

NesterovIState nesterov_form_i_step(const Objective& obj, const HyperParams& p,
                                    const NesterovIState& s) {
  const Vector y = form_i_y(p, s.x, s.v);
  const Vector g = obj.gradient(y);
  Vector x = y - g / p.L;
  Vector v = (1.0 - p.alpha) * s.v + (p.alpha * p.mu / p.gamma) * y - (p.alpha / p.gamma) * g;
  Vector y_next = form_i_y(p, x, v);
  return {std::move(x), std::move(v), std::move(y_next)};
}

NesterovIIState nesterov_form_ii_step(const Objective& obj, const HyperParams& p,
                                      const NesterovIIState& s) {
  Vector x = s.y - obj.gradient(s.y) / p.L;
  Vector y = x + p.beta * (x - s.x);
  return {std::move(x), s.x, std::move(y)};
}

SutskeverState sutskever_step(const Objective& obj, const HyperParams& p, const SutskeverState& s) {
  Vector pn = p.beta * s.p - obj.gradient(s.x + p.beta * s.p) / p.L;
  Vector x = s.x + pn;
  return {std::move(x), std::move(pn)};
}

ModernState modern_momentum_step(const Objective& obj, const HyperParams& p, const ModernState& s) {
  const Vector g = obj.gradient(s.x);
  Vector pn = p.beta * s.p + g;
  Vector x = s.x - (g + p.beta * pn) / p.L;
  return {std::move(x), std::move(pn)};
}

AuslenderTeboulleState auslender_teboulle_step(const Objective& obj, const HyperParams& p,
                                               const AuslenderTeboulleState& s) {
  const double th = p.theta;
  const Vector y = (1.0 - th) * s.x_hat + th * s.z;
  Vector z = s.z - (p.gamma / th) * obj.gradient(y);
  Vector x_hat = (1.0 - th) * s.x_hat + th * z;
  Vector y_next = (1.0 - th) * x_hat + th * z;
  return {std::move(x_hat), std::move(z), std::move(y_next)};
}

LanState lan_step(const Objective& obj, const HyperParams& p, const LanState& s) {
  const Vector x_tilde = p.alpha * (s.x - s.x_prev) + s.x;
  Vector x_under = (x_tilde + p.tau * s.x_under) / (1.0 + p.tau);
  Vector x = s.x - obj.gradient(x_under) / p.eta;
  return {std::move(x), s.x, std::move(x_under)};
}

MethodState step(const Objective& obj, const HyperParams& p, const MethodState& s) {
  return std::visit(
      Overloaded{
          [&](const NesterovIState& v) -> MethodState { return nesterov_form_i_step(obj, p, v); },
          [&](const NesterovIIState& v) -> MethodState { return nesterov_form_ii_step(obj, p, v); },
          [&](const SutskeverState& v) -> MethodState { return sutskever_step(obj, p, v); },
          [&](const ModernState& v) -> MethodState { return modern_momentum_step(obj, p, v); },
          [&](const AuslenderTeboulleState& v) -> MethodState {
            return auslender_teboulle_step(obj, p, v);
          },
          [&](const LanState& v) -> MethodState { return lan_step(obj, p, v); },
          [&](const BregmanAgmState& v) -> MethodState { return bregman_agm_step(obj, p, v); },
          [&](const PrimalDualState& v) -> MethodState {
            return primal_dual_pp_step(obj, p.eta, v);
          },
          [&](const InertialState& v) -> MethodState { return inertial_pp_step(obj, p, v); },
          [&](const HeavyBallState& v) -> MethodState {
            return heavy_ball_step(obj, p.beta, p.gamma, v);
          },
          [&](const ProxPointState& v) -> MethodState {
            return ProxPointState{prox_point_step(obj, p.eta, v.x)};
          },
      },
      s);
}

// ---------------------------------------------------------------------------

namespace {

bool is_accelerated(Form f) {
  for (Form a : kAcceleratedForms) {
    if (a == f) return true;
  }
  return false;
}

double lan_theta(const HyperParams& p) { return 1.0 / (1.0 + p.tau); }


NesterovIIState lan_to_hub(const LanState& s, double theta) {
  const Vector x_hat = s.x_under + theta * (s.x - s.x_prev);
  Vector y = (1.0 - theta) * x_hat + theta * s.x;
  Vector x_prev = theta < 1.0 ? Vector((s.x_under - theta * s.x_prev) / (1.0 - theta)) : x_hat;
  return {x_hat, std::move(x_prev), std::move(y)};
}

LanState hub_to_lan(const NesterovIIState& h, double theta) {
  const Vector z = (h.y - (1.0 - theta) * h.x) / theta;
  Vector x_under = (1.0 - theta) * h.x_prev + theta * z;
  return {z, z, std::move(x_under)};
}

}  // namespace

NesterovIIState to_hub(const MethodState& state, const HyperParams& p) {
  return std::visit(
      Overloaded{
          [&](const NesterovIState& s) -> NesterovIIState {
            Vector y = form_i_y(p, s.x, s.v);
            Vector x_prev = p.alpha < 1.0 ? Vector((s.x - p.alpha * s.v) / (1.0 - p.alpha)) : s.x;
            return {s.x, std::move(x_prev), std::move(y)};
          },
          [&](const NesterovIIState& s) -> NesterovIIState { return s; },
          [&](const SutskeverState& s) -> NesterovIIState {
            return {s.x, s.x - s.p, s.x + p.beta * s.p};
          },
          [&](const ModernState& s) -> NesterovIIState {
            const Vector p_sut = -s.p / p.L;
            const Vector x = s.x - p.beta * p_sut;
            return {x, x - p_sut, s.x};
          },
          [&](const AuslenderTeboulleState& s) -> NesterovIIState {
            const double th = p.theta;
            Vector y = (1.0 - th) * s.x_hat + th * s.z;
            Vector x_prev = th < 1.0 ? Vector((s.x_hat - th * s.z) / (1.0 - th)) : s.x_hat;
            return {s.x_hat, std::move(x_prev), std::move(y)};
          },
          [&](const LanState& s) -> NesterovIIState { return lan_to_hub(s, lan_theta(p)); },
          [&](const BregmanAgmState& s) -> NesterovIIState {
            return lan_to_hub(LanState{s.x, s.x + s.g / p.eta, s.y}, lan_theta(p));
          },
          [&](const auto&) -> NesterovIIState {
            throw UnsupportedError("to_hub: " + std::string(form_name(form_of(state))) +
                                   " has no Nesterov II counterpart");
          },
      },
      state);
}

MethodState from_hub(const NesterovIIState& h, Form to, const HyperParams& p) {
  switch (to) {
    case Form::NesterovI: {
      Vector v = h.x_prev + (h.x - h.x_prev) / p.alpha;
      Vector y = form_i_y(p, h.x, v);
      return NesterovIState{h.x, std::move(v), std::move(y)};
    }
    case Form::NesterovII:
      return h;
    case Form::Sutskever:
      return SutskeverState{h.x, h.x - h.x_prev};
    case Form::ModernMomentum: {
      const Vector p_sut = h.x - h.x_prev;
      return ModernState{h.x + p.beta * p_sut, -p.L * p_sut};
    }
    case Form::AuslenderTeboulle:
      return AuslenderTeboulleState{h.x, (h.y - (1.0 - p.theta) * h.x) / p.theta, h.y};
    case Form::Lan:
      return hub_to_lan(h, lan_theta(p));
    case Form::BregmanAgm: {
      const LanState l = hub_to_lan(h, lan_theta(p));
      return BregmanAgmState{l.x, l.x_under, p.eta * (l.x_prev - l.x)};
    }
    default:
      throw UnsupportedError("from_hub: " + std::string(form_name(to)) +
                             " has no Nesterov II counterpart");
  }
}

MethodState map_state(const MethodState& state, const HyperParams& from_params, Form to,
                      const HyperParams& to_params) {
  const Form from = form_of(state);
  if (from == to) return state;
  if (is_accelerated(from) && is_accelerated(to)) {
    return from_hub(to_hub(state, from_params), to, to_params);
  }
  if (from == Form::PrimalDualProxPoint && to == Form::InertialProxPoint) {
    const auto& s = std::get<PrimalDualState>(state);
    return InertialState{s.x - (from_params.alpha / from_params.eta) * s.g, s.g};
  }
  if (from == Form::InertialProxPoint && to == Form::PrimalDualProxPoint) {
    const auto& s = std::get<InertialState>(state);
    return PrimalDualState{s.z + (from_params.alpha / from_params.eta) * s.g, s.g};
  }
  throw UnsupportedError("map_state: no map from " + std::string(form_name(from)) + " to " +
                         std::string(form_name(to)));
}

MethodState map_state(const MethodState& state, Form to, const HyperParams& params) {
  return map_state(state, params, to, params);
}

MethodState initial_state(Form form, const Objective& obj, const HyperParams& p,
                          const Vector& x0) {
  if (x0.size() != obj.dimension()) throw std::invalid_argument("initial_state: x0 size mismatch");
  switch (form) {
    case Form::BregmanAgm:
      return BregmanAgmState{x0, x0, obj.gradient(x0)};
    case Form::PrimalDualProxPoint:
      return PrimalDualState{x0, obj.gradient(x0)};
    case Form::InertialProxPoint: {
      Vector g = obj.gradient(x0);
      return InertialState{x0 - (p.alpha / p.eta) * g, std::move(g)};
    }
    case Form::HeavyBall:
      return HeavyBallState{x0, x0};
    case Form::ProxPoint:
      return ProxPointState{x0};
    default:
      return from_hub(NesterovIIState{x0, x0, x0}, form, p);
  }
}

// ---------------------------------------------------------------------------

Trajectory run_from(const Objective& obj, const HyperParams& params, const MethodState& initial,
                    int k_max) {
  if (k_max < 1) throw std::invalid_argument("run: k_max must be at least 1");
  Trajectory traj{form_of(initial), params, {}};
  traj.records.reserve(static_cast<std::size_t>(k_max) + 1);
  auto record = [&](int k, MethodState s) {
    const Vector x = primary_iterate(s, params);
    traj.records.push_back({k, std::move(s), obj.value(x), obj.gradient(x).norm()});
  };
  record(0, initial);
  for (int k = 0; k < k_max; ++k) {
    record(k + 1, step(obj, params, traj.records.back().state));
  }
  return traj;
}

Trajectory run(Form form, const Objective& obj, const HyperParams& params, const Vector& x0,
               int k_max) {
  return run_from(obj, params, initial_state(form, obj, params, x0), k_max);
}

double path_divergence(const Trajectory& a, const Trajectory& b) {
  const std::size_t m = std::min(a.records.size(), b.records.size());
  double d = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    d = std::max(d, (primary_iterate(a.records[i].state, a.params) -
                     primary_iterate(b.records[i].state, b.params))
                        .norm());
  }
  return d;
}

std::string trajectory_to_csv(const Trajectory& traj) {
  if (traj.records.empty()) throw std::invalid_argument("trajectory_to_csv: empty trajectory");
  const auto& first = traj.records.front();
  const int n = static_cast<int>(primary_iterate(first.state, traj.params).size());
  std::vector<std::string> header{"k", "f", "grad_norm"};
  for (auto& c : indexed_columns("x", n)) header.push_back(std::move(c));
  for (const auto& [name, v] : state_fields(first.state)) {
    for (auto& c : indexed_columns(name, static_cast<int>(v.size()))) {
      header.push_back("state_" + c);
    }
  }
  CsvWriter csv(std::move(header));
  for (const auto& r : traj.records) {
    csv.begin_row()
        .add(static_cast<long long>(r.k))
        .add(r.f_value)
        .add(r.grad_norm)
        .add(primary_iterate(r.state, traj.params));
    for (const auto& field : state_fields(r.state)) csv.add(field.second);
    csv.end_row();
  }
  return csv.str();
}

nlohmann::json trajectory_to_json(const Trajectory& traj) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : traj.records) {
    nlohmann::json state = nlohmann::json::object();
    for (const auto& [name, v] : state_fields(r.state)) state[name] = to_json(v);
    records.push_back({{"k", r.k},
                       {"f", r.f_value},
                       {"grad_norm", r.grad_norm},
                       {"x", to_json(primary_iterate(r.state, traj.params))},
                       {"state", std::move(state)}});
  }
  return {{"form", std::string(form_name(traj.form))},
          {"params", to_json(traj.params)},
          {"records", std::move(records)}};
}

}  // namespace geoaccel
