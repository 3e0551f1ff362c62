#include "geoaccel/commands.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "geoaccel/bregman.hpp"
#include "geoaccel/continuous.hpp"
#include "geoaccel/equivalence.hpp"
#include "geoaccel/errors.hpp"
#include "geoaccel/io.hpp"
#include "geoaccel/methods.hpp"
#include "geoaccel/objectives.hpp"
#include "geoaccel/random.hpp"
#include "geoaccel/spectral.hpp"

namespace geoaccel {

namespace {

using nlohmann::json;

constexpr std::uint64_t kDefaultSeed = 1;

// Name of the step in progress, reported with any failure.
thread_local std::string g_stage;

void stage(std::string name) { g_stage = std::move(name); }

std::uint64_t resolve_seed(const json& config, const CommandOptions& options) {
  if (options.seed) return *options.seed;
  if (config.contains("seed")) {
    if (!config["seed"].is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
    return config["seed"].get<std::uint64_t>();
  }
  return kDefaultSeed;
}

const char* extension(OutputFormat f) { return f == OutputFormat::Json ? ".json" : ".csv"; }

json provenance(const std::string& command, const json& config, std::uint64_t seed,
                const CommandOptions& options) {
  return {{"command", command},
          {"config", config},
          {"seed", seed},
          {"format", options.format == OutputFormat::Json ? "json" : "csv"}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// Writes `contents` to `path` (stdout when empty). CSV files get a sidecar
// <path>.config.json holding the provenance record.
void emit(const std::string& path, const std::string& contents, const json& prov,
          OutputFormat format, std::ostream& out, std::vector<std::string>* written = nullptr) {
  if (path.empty()) {
    out << contents;
    return;
  }
  write_text_file(path, contents);
  if (format == OutputFormat::Csv) write_text_file(path + ".config.json", dump(prov));
  if (written) written->push_back(path);
}

template <class T>
T get_or(const json& config, const char* key, T fallback) {
  if (!config.contains(key)) return fallback;
  try {
    return config.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

const json& require(const json& config, const char* key) {
  if (!config.contains(key)) throw ConfigError(std::string("config field '") + key + "' is required");
  return config.at(key);
}

Vector require_vector(const json& config, const char* key, int n) {
  const Vector v = vector_from_json(require(config, key));
  if (n >= 0 && v.size() != n) {
    throw ConfigError(std::string("config field '") + key + "' must have length " +
                      std::to_string(n));
  }
  return v;
}

// (mu, L) for parameter defaults: the spectrum of a quadratic, or params.mu/L.
std::pair<double, double> problem_constants(const Objective& obj, const json& overrides) {
  if (obj.quadratic()) return strong_convexity_bounds(obj);
  if (overrides.is_object() && overrides.contains("mu") && overrides.contains("L")) {
    return {overrides["mu"].get<double>(), overrides["L"].get<double>()};
  }
  throw ConfigError("params.mu and params.L are required for non-quadratic objectives");
}

HyperParams resolve_params(HyperParams base, const json& config) {
  if (config.contains("params")) apply_overrides(base, config["params"]);
  return base;
}

double suboptimality(const Objective& obj, const Vector& x) {
  const auto x_star = obj.minimizer();
  return x_star ? obj.value(x) - obj.value(*x_star) : std::nan("");
}

int run_discrete(const json& config, const CommandOptions& options, const Objective& obj,
                 std::uint64_t seed, std::ostream& out, std::ostream& log) {
  stage("resolving parameters");
  const Form form = form_from_name(require(config, "method").get<std::string>());
  const json overrides = config.value("params", json::object());
  const auto [mu, L] = problem_constants(obj, overrides);
  const HyperParams params = resolve_params(default_params(form, mu, L), config);
  const Vector x0 = require_vector(config, "x0", obj.dimension());
  const int k_max = get_or<int>(config, "k_max", 100);
  if (k_max < 1) throw ConfigError("k_max must be at least 1");

  stage("iterating " + std::string(form_name(form)));
  const Trajectory traj = run(form, obj, params, x0, k_max);
  const auto& last = traj.records.back();
  if (!std::isfinite(last.f_value) || !std::isfinite(last.grad_norm)) {
    throw DivergenceError("iterates became non-finite", k_max);
  }

  stage("writing output");
  const json prov = provenance("run", config, seed, options);
  if (options.format == OutputFormat::Json) {
    json doc = prov;
    doc["trajectory"] = trajectory_to_json(traj);
    emit(options.out, dump(doc), prov, options.format, out);
  } else {
    emit(options.out, trajectory_to_csv(traj), prov, options.format, out);
  }
  const Vector x = primary_iterate(last.state, params);
  log << "run: " << form_name(form) << " iterations=" << k_max
      << " f-f*=" << format_double(suboptimality(obj, x))
      << " grad_norm=" << format_double(last.grad_norm) << "\n";
  return kExitOk;
}

ContinuousTrajectory integrate(const OdeSystem& sys, const Vector& u0, const json& config) {
  const double dt = get_or<double>(config, "dt", default_time_step(sys.params));
  const double t_max = get_or<double>(config, "t_max", 20.0);
  const std::string integrator = get_or<std::string>(config, "integrator", "rk4");
  if (integrator == "rk4") return integrate_rk4(sys, u0, dt, t_max);
  if (integrator == "block_implicit_euler") {
    const int steps = static_cast<int>(std::ceil(t_max / dt - 1e-9));
    return integrate_block_implicit_euler(sys, u0, dt, steps);
  }
  throw ConfigError("unknown integrator '" + integrator + "'");
}

HyperParams ode_base_params(OdeKind kind, double mu, double L) {
  return certification_params(kind, mu, L);
}

int run_ode(const json& config, const CommandOptions& options, const Objective& obj,
            std::uint64_t seed, std::ostream& out, std::ostream& log) {
  stage("resolving parameters");
  const OdeKind kind = ode_kind_from_name(require(config, "ode").get<std::string>());
  const json overrides = config.value("params", json::object());
  const auto [mu, L] = problem_constants(obj, overrides);
  const HyperParams params = resolve_params(ode_base_params(kind, mu, L), config);
  const OdeSystem sys = make_ode_system(kind, obj, params);
  const Vector x0 = require_vector(config, "x0", obj.dimension());

  stage("integrating " + std::string(ode_kind_name(kind)) + " ODE");
  const ContinuousTrajectory traj = integrate(sys, ode_initial_state(sys, x0), config);

  stage("writing output");
  const json prov = provenance("run", config, seed, options);
  if (options.format == OutputFormat::Json) {
    json doc = prov;
    doc["trajectory"] = continuous_to_json(traj);
    emit(options.out, dump(doc), prov, options.format, out);
  } else {
    emit(options.out, continuous_to_csv(traj), prov, options.format, out);
  }
  const auto& lastp = traj.samples.back();
  log << "run: " << ode_kind_name(kind) << " ODE samples=" << traj.samples.size()
      << " t=" << format_double(lastp.t)
      << " |u-u*|=" << format_double((lastp.u - sys.u_star).norm()) << "\n";
  return kExitOk;
}

int run_figure2(const json& config, const CommandOptions& options, const Objective& obj,
                std::uint64_t seed, std::ostream& log) {
  if (options.out.empty()) throw ConfigError("the figure2 bundle needs --out as a file stem");
  stage("resolving parameters");
  const auto [mu, L] = problem_constants(obj, config.value("params", json::object()));
  const Vector x0 = require_vector(config, "x0", obj.dimension());
  const int k_max = get_or<int>(config, "k_max", 100);
  if (k_max < 1) throw ConfigError("k_max must be at least 1");

  const HyperParams agm = default_params(Form::BregmanAgm, mu, L);
  const HyperParams prox = default_params(Form::ProxPoint, mu, L);

  stage("iterating discrete methods");
  const Trajectory agm_traj = run(Form::BregmanAgm, obj, agm, x0, k_max);
  const Trajectory prox_traj = run(Form::ProxPoint, obj, prox, x0, k_max);

  stage("integrating ODEs");
  const OdeSystem agm_sys = make_ode_system(OdeKind::Agm, obj, agm);
  const OdeSystem prox_sys = make_ode_system(OdeKind::ProxPoint, obj, prox);
  const ContinuousTrajectory agm_ode = integrate(agm_sys, ode_initial_state(agm_sys, x0), config);
  const ContinuousTrajectory prox_ode =
      integrate(prox_sys, ode_initial_state(prox_sys, x0), config);

  stage("writing output");
  const json prov = provenance("run", config, seed, options);
  const std::string ext = extension(options.format);
  const bool as_json = options.format == OutputFormat::Json;
  auto with_prov = [&](const char* key, json body) {
    json doc = prov;
    doc[key] = std::move(body);
    return dump(doc);
  };
  std::vector<std::string> written;
  auto write = [&](const std::string& name, const std::string& body) {
    emit(options.out + "_" + name + ext, body, prov, options.format, log, &written);
  };
  write("agm_discrete", as_json ? with_prov("trajectory", trajectory_to_json(agm_traj))
                                : trajectory_to_csv(agm_traj));
  write("prox_discrete", as_json ? with_prov("trajectory", trajectory_to_json(prox_traj))
                                 : trajectory_to_csv(prox_traj));
  write("agm_ode", as_json ? with_prov("trajectory", continuous_to_json(agm_ode))
                           : continuous_to_csv(agm_ode));
  write("prox_ode", as_json ? with_prov("trajectory", continuous_to_json(prox_ode))
                            : continuous_to_csv(prox_ode));
  log << "run: figure2 bundle, path divergence between discrete AGM and prox point = "
      << format_double(path_divergence(agm_traj, prox_traj)) << "\n";
  for (const auto& f : written) log << "  wrote " << f << "\n";
  return kExitOk;
}

}  // namespace

nlohmann::json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  const std::string text = read_text_file(path);
  try {
    json j = json::parse(text);
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw ConfigError("cannot parse '" + path + "': " + e.what());
  }
}

int cmd_run(const json& config, const CommandOptions& options, std::ostream& out,
            std::ostream& log) {
  const std::uint64_t seed = resolve_seed(config, options);
  stage("building objective");
  const Objective obj = objective_from_json(require(config, "objective"));

  const bool bundle = config.contains("bundle");
  const int selected = int(config.contains("method")) + int(config.contains("ode")) + int(bundle);
  if (selected != 1) throw ConfigError("set exactly one of 'method', 'ode' or 'bundle'");
  if (bundle) {
    if (config["bundle"] != "figure2") throw ConfigError("unknown bundle (expected \"figure2\")");
    return run_figure2(config, options, obj, seed, log);
  }
  if (config.contains("method")) return run_discrete(config, options, obj, seed, out, log);
  return run_ode(config, options, obj, seed, out, log);
}

int cmd_equivalence(const json& config, const CommandOptions& options, std::ostream& out,
                    std::ostream& log) {
  const std::uint64_t seed = resolve_seed(config, options);
  stage("building objective");
  const Objective obj = objective_from_json(require(config, "objective"));
  if (!obj.quadratic()) throw ConfigError("the equivalence suite requires a quadratic objective");

  stage("resolving parameters");
  const auto [mu, L] = strong_convexity_bounds(obj);
  FormParams params = equivalence_param_set(mu, L);
  if (config.contains("params")) {
    const json& per_form = config["params"];
    if (!per_form.is_object()) throw ConfigError("params must map form names to overrides");
    for (const auto& [name, overrides] : per_form.items()) {
      const Form f = form_from_name(name);
      bool found = false;
      for (std::size_t i = 0; i < kAcceleratedForms.size(); ++i) {
        if (kAcceleratedForms[i] == f) {
          apply_overrides(params[i], overrides);
          found = true;
        }
      }
      if (!found) throw ConfigError("form '" + name + "' is not part of the equivalence suite");
    }
  }
  if (config.contains("perturb")) {
    const json& p = config["perturb"];
    const Form f = form_from_name(get_or<std::string>(p, "form", "nesterov_ii"));
    const std::string key = get_or<std::string>(p, "param", "beta");
    const double delta = get_or<double>(p, "delta", 1e-3);
    for (std::size_t i = 0; i < kAcceleratedForms.size(); ++i) {
      if (kAcceleratedForms[i] != f) continue;
      json current = to_json(params[i]);
      if (!current.contains(key)) throw ConfigError("unknown param '" + key + "'");
      apply_overrides(params[i], json{{key, current[key].get<double>() + delta}});
    }
  }

  EquivalenceOptions eo;
  eo.k_max = get_or<int>(config, "k_max", 100);
  eo.tolerance = get_or<double>(config, "tolerance", 1e-9);
  if (eo.k_max < 1) throw ConfigError("k_max must be at least 1");
  const Vector x0 = require_vector(config, "x0", obj.dimension());

  stage("running the seven forms");
  const EquivalenceReport report = check_equivalence(obj, x0, params, eo);

  stage("writing output");
  const json prov = provenance("equivalence", config, seed, options);
  if (options.format == OutputFormat::Json) {
    json doc = prov;
    doc["report"] = to_json(report);
    emit(options.out, dump(doc), prov, options.format, out);
  } else {
    emit(options.out, deviation_matrix_csv(report), prov, options.format, out);
  }

  if (report.pass()) {
    log << "equivalence: pass, max deviation " << format_double(report.max_deviation) << " over "
        << eo.k_max << " iterations\n";
    return kExitOk;
  }
  const PairFailure& first = report.failures.front();
  log << "equivalence: FAIL, " << report.failures.size() << " pair(s) exceed "
      << format_double(eo.tolerance) << "; first: " << form_name(first.a) << " vs "
      << form_name(first.b) << " at k=" << first.first_failing_k
      << " (max deviation " << format_double(first.deviation) << "); outlier form: "
      << form_name(*report.outlier) << "\n";
  return kExitEquivalence;
}

int cmd_certify(const json& config, const CommandOptions& options, std::ostream& out,
                std::ostream& log) {
  const std::uint64_t seed = resolve_seed(config, options);
  stage("reading certification grid");
  std::vector<OdeKind> kinds;
  if (config.contains("kinds")) {
    for (const auto& k : config["kinds"]) kinds.push_back(ode_kind_from_name(k.get<std::string>()));
  } else if (config.contains("kind")) {
    kinds.push_back(ode_kind_from_name(config["kind"].get<std::string>()));
  } else {
    kinds = {OdeKind::ProxPoint, OdeKind::Agm, OdeKind::HeavyBall};
  }

  std::vector<Matrix> matrices;
  if (config.contains("H")) {
    matrices.push_back(matrix_from_json(config["H"]));
  } else {
    const json grid = config.value("grid", json::object());
    const auto mus = get_or<std::vector<double>>(grid, "mu", {0.1, 1.0});
    const auto ratios = get_or<std::vector<double>>(grid, "ratios", {1.0, 10.0, 100.0, 1e4});
    const int per_cell = get_or<int>(grid, "per_cell", 20);
    const int n_min = get_or<int>(grid, "n_min", 2);
    const int n_max = get_or<int>(grid, "n_max", 8);
    if (per_cell < 1 || n_min < 1 || n_max < n_min) throw ConfigError("invalid grid sizes");
    Rng rng(seed);
    std::uniform_int_distribution<int> dim(n_min, n_max);
    for (double mu : mus) {
      for (double ratio : ratios) {
        if (!(mu > 0.0) || !(ratio >= 1.0)) throw ConfigError("grid needs mu > 0 and ratio >= 1");
        for (int i = 0; i < per_cell; ++i) matrices.push_back(random_spd(rng, dim(rng), mu, mu * ratio));
      }
    }
  }

  const json overrides = config.value("params", json::object());
  std::vector<Certificate> certs;
  for (OdeKind kind : kinds) {
    stage(std::string("certifying ") + std::string(ode_kind_name(kind)));
    for (const Matrix& H : matrices) {
      const Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
      const double mu = es.eigenvalues().minCoeff();
      const double L = es.eigenvalues().maxCoeff();
      HyperParams p = certification_params(kind, mu, L);
      apply_overrides(p, overrides);
      if (kind == OdeKind::Agm && !(p.alpha >= 0.0 && p.alpha <= 1.0)) {
        throw ConfigError("agm certification needs alpha in [0, 1], got " + format_double(p.alpha));
      }
      certs.push_back(verify_decay_bound(kind, H, p));
    }
  }

  stage("writing output");
  std::size_t failed = 0;
  for (const auto& c : certs) failed += c.pass ? 0 : 1;
  const json prov = provenance("certify", config, seed, options);
  if (options.format == OutputFormat::Json) {
    json doc = prov;
    json arr = json::array();
    for (const auto& c : certs) arr.push_back(to_json(c));
    doc["certificates"] = std::move(arr);
    doc["pass"] = failed == 0;
    emit(options.out, dump(doc), prov, options.format, out);
  } else {
    std::string body = "kind,n,mu,L,rho_bound,abscissa,pass,worst_block_lambda\n";
    for (const auto& c : certs) {
      body += std::string(ode_kind_name(c.kind)) + "," + std::to_string(c.H.rows()) + "," +
              format_double(c.mu) + "," + format_double(c.L) + "," + format_double(c.rho_bound) +
              "," + format_double(c.abscissa) + "," + (c.pass ? "true" : "false") + "," +
              format_double(c.worst_block_lambda) + "\n";
    }
    emit(options.out, body, prov, options.format, out);
  }
  log << "certify: " << certs.size() - failed << "/" << certs.size() << " certificates pass\n";
  for (const auto& c : certs) {
    if (c.pass) continue;
    log << "  FAIL " << ode_kind_name(c.kind) << " mu=" << format_double(c.mu)
        << " L=" << format_double(c.L) << " abscissa=" << format_double(c.abscissa)
        << " bound=" << format_double(-c.rho_bound) << "\n";
  }
  return failed == 0 ? kExitOk : kExitCertificate;
}

int cmd_geodesic(const json& config, const CommandOptions& options, std::ostream& out,
                 std::ostream& log) {
  const std::uint64_t seed = resolve_seed(config, options);
  stage("building generator");
  const json& spec = config.contains("generator") ? config["generator"] : require(config, "objective");
  const Generator phi = objective_from_json(spec);
  const int n = phi.dimension();

  std::vector<std::pair<Vector, Vector>> pairs;
  if (config.contains("pairs")) {
    for (const auto& p : config["pairs"]) {
      pairs.emplace_back(require_vector(p, "x", n), require_vector(p, "y", n));
    }
  } else {
    pairs.emplace_back(require_vector(config, "x", n), require_vector(config, "y", n));
  }
  if (pairs.empty()) throw ConfigError("no endpoint pairs given");
  const int samples = get_or<int>(config, "samples", 101);
  if (samples < 5) throw ConfigError("samples must be at least 5");
  if (options.format == OutputFormat::Csv && options.out.empty()) {
    throw ConfigError("geodesic CSV output needs --out as a file stem");
  }

  const json prov = provenance("geodesic", config, seed, options);
  json doc = prov;
  doc["paths"] = json::array();
  std::vector<std::string> written;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    stage("computing geodesic " + std::to_string(i));
    const GeodesicPath primal = dual_geodesic(phi, pairs[i].first, pairs[i].second, samples);
    const GeodesicPath dual = to_dual_path(phi, primal);
    const GeodesicPath segment = euclidean_segment(pairs[i].first, pairs[i].second, samples);
    const double residual = geodesic_ode_residual(phi, primal);
    log << "geodesic " << i << ": ODE residual " << format_double(residual) << "\n";

    if (options.format == OutputFormat::Json) {
      auto points = [](const GeodesicPath& p) {
        json arr = json::array();
        for (const auto& s : p.samples) arr.push_back({{"t", s.t}, {"x", to_json(s.point)}});
        return arr;
      };
      doc["paths"].push_back({{"x", to_json(pairs[i].first)},
                              {"y", to_json(pairs[i].second)},
                              {"ode_residual", residual},
                              {"primal", points(primal)},
                              {"dual", points(dual)},
                              {"euclidean", points(segment)}});
    } else {
      stage("writing output");
      const std::string stem =
          pairs.size() == 1 ? options.out : options.out + "_" + std::to_string(i);
      emit(stem + "_primal.csv", geodesic_to_csv(primal), prov, options.format, out, &written);
      emit(stem + "_dual.csv", geodesic_to_csv(dual), prov, options.format, out, &written);
      emit(stem + "_euclidean.csv", geodesic_to_csv(segment), prov, options.format, out, &written);
    }
  }
  if (options.format == OutputFormat::Json) {
    stage("writing output");
    emit(options.out, dump(doc), prov, options.format, out);
  }
  for (const auto& f : written) log << "  wrote " << f << "\n";
  return kExitOk;
}

int run_command(const std::string& command, const json& config, const CommandOptions& options,
                std::ostream& out, std::ostream& log) {
  stage("starting");
  auto fail = [&](int code, const std::string& what) {
    log << "error: " << command << ": " << g_stage << ": " << what << "\n";
    return code;
  };
  try {
    if (command == "run") return cmd_run(config, options, out, log);
    if (command == "equivalence") return cmd_equivalence(config, options, out, log);
    if (command == "certify") return cmd_certify(config, options, out, log);
    if (command == "geodesic") return cmd_geodesic(config, options, out, log);
    return fail(kExitConfig, "unknown command");
  } catch (const SolverError& e) {
    return fail(kExitSolver, e.what());
  } catch (const DomainError& e) {
    return fail(kExitSolver, e.what());
  } catch (const DivergenceError& e) {
    return fail(kExitSolver, e.what());
  } catch (const Error& e) {
    return fail(kExitConfig, e.what());
  } catch (const json::exception& e) {
    return fail(kExitConfig, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kExitConfig, e.what());
  }
}

}  // namespace geoaccel
