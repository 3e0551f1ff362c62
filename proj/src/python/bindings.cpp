#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>

#include "geoaccel/bregman.hpp"
#include "geoaccel/commands.hpp"
#include "geoaccel/equivalence.hpp"
#include "geoaccel/errors.hpp"
#include "geoaccel/io.hpp"
#include "geoaccel/methods.hpp"
#include "geoaccel/objectives.hpp"
#include "geoaccel/spectral.hpp"

namespace py = pybind11;
using namespace geoaccel;

namespace {

py::dict params_dict(const HyperParams& p) {
  py::dict d;
  const nlohmann::json j = to_json(p);
  for (const auto& [k, v] : j.items()) {
    d[py::str(k)] = v.is_number() ? py::object(py::float_(v.get<double>())) : py::object(py::none());
  }
  return d;
}

HyperParams with_overrides(HyperParams p, const std::optional<py::dict>& overrides) {
  if (!overrides) return p;
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : *overrides) j[py::cast<std::string>(k)] = py::cast<double>(v);
  apply_overrides(p, j);
  return p;
}

Objective quadratic(const Matrix& H, const std::optional<Vector>& x_star) {
  return make_quadratic({H, x_star ? *x_star : Vector::Zero(H.rows())});
}

std::pair<double, double> bounds(const Matrix& H) {
  return strong_convexity_bounds(make_quadratic({H, Vector::Zero(H.rows())}));
}

py::dict run_method(const std::string& form_name_, const Matrix& H, const Vector& x0,
                    const std::optional<Vector>& x_star, const std::optional<py::dict>& params,
                    int k_max) {
  const Form form = form_from_name(form_name_);
  const auto [mu, L] = bounds(H);
  const HyperParams p = with_overrides(default_params(form, mu, L), params);
  const Trajectory traj = run(form, quadratic(H, x_star), p, x0, k_max);
  const auto rows = static_cast<Eigen::Index>(traj.records.size());
  Vector f(rows), grad(rows);
  Matrix x(rows, x0.size());
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& r = traj.records[static_cast<std::size_t>(i)];
    f[i] = r.f_value;
    grad[i] = r.grad_norm;
    x.row(i) = primary_iterate(r.state, p).transpose();
  }
  py::dict out;
  out["form"] = form_name_;
  out["params"] = params_dict(p);
  out["f"] = f;
  out["grad_norm"] = grad;
  out["x"] = x;
  return out;
}

py::dict equivalence(const Matrix& H, const Vector& x0, int k_max, double tolerance) {
  const auto [mu, L] = bounds(H);
  const EquivalenceReport r =
      check_equivalence(make_quadratic({H, Vector::Zero(H.rows())}), x0,
                        equivalence_param_set(mu, L), {k_max, tolerance});
  py::dict out;
  out["pass"] = r.pass();
  out["max_deviation"] = r.max_deviation;
  out["deviation"] = r.deviation;
  py::list forms;
  for (Form f : r.forms) forms.append(std::string(form_name(f)));
  out["forms"] = forms;
  return out;
}

py::dict certify(const std::string& kind_name, const Matrix& H,
                 const std::optional<py::dict>& params) {
  const OdeKind kind = ode_kind_from_name(kind_name);
  const auto [mu, L] = bounds(H);
  const Certificate c = verify_decay_bound(kind, H, with_overrides(certification_params(kind, mu, L), params));
  py::dict out;
  out["kind"] = std::string(ode_kind_name(kind));
  out["mu"] = c.mu;
  out["L"] = c.L;
  out["rho_bound"] = c.rho_bound;
  out["abscissa"] = c.abscissa;
  out["pass"] = c.pass;
  return out;
}

py::tuple geodesic(const std::string& spec_json, const Vector& x, const Vector& y, int samples) {
  const Generator phi = objective_from_json(nlohmann::json::parse(spec_json));
  const GeodesicPath path = dual_geodesic(phi, x, y, samples);
  Vector t(samples);
  Matrix points(samples, x.size());
  for (int i = 0; i < samples; ++i) {
    t[i] = path.samples[static_cast<std::size_t>(i)].t;
    points.row(i) = path.samples[static_cast<std::size_t>(i)].point.transpose();
  }
  return py::make_tuple(t, points, geodesic_ode_residual(phi, path));
}

py::tuple command(const std::string& name, const std::string& config_json, const std::string& out,
                  const std::string& format, std::optional<std::uint64_t> seed) {
  CommandOptions options;
  options.out = out;
  if (format == "json") {
    options.format = OutputFormat::Json;
  } else if (format != "csv") {
    throw ConfigError("format must be csv or json");
  }
  options.seed = seed;
  std::ostringstream stdout_buf, log_buf;
  const int code = run_command(name, nlohmann::json::parse(config_json), options, stdout_buf, log_buf);
  return py::make_tuple(code, stdout_buf.str(), log_buf.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Accelerated methods, their ODE limits and spectral certificates";

  // Later registrations are tried first, so the subclass goes last.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("default_params", [](const std::string& form, double mu, double L) {
    return params_dict(default_params(form_from_name(form), mu, L));
  }, py::arg("form"), py::arg("mu"), py::arg("L"));
  m.def("run", &run_method, py::arg("form"), py::arg("H"), py::arg("x0"),
        py::arg("x_star") = py::none(), py::arg("params") = py::none(), py::arg("k_max") = 100);
  m.def("equivalence", &equivalence, py::arg("H"), py::arg("x0"), py::arg("k_max") = 100,
        py::arg("tolerance") = 1e-9);
  m.def("certify", &certify, py::arg("kind"), py::arg("H"), py::arg("params") = py::none());
  m.def("_geodesic", &geodesic, py::arg("spec_json"), py::arg("x"), py::arg("y"),
        py::arg("samples") = 101);
  m.def("_command", &command, py::arg("name"), py::arg("config_json"), py::arg("out") = "",
        py::arg("format") = "csv", py::arg("seed") = py::none());
}
