#include "geoaccel/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geoaccel/io.hpp"

namespace geoaccel {

FormParams equivalence_param_set(double mu, double L) {
  FormParams out;
  for (std::size_t i = 0; i < kAcceleratedForms.size(); ++i) {
    out[i] = equivalence_params(kAcceleratedForms[i], mu, L);
  }
  return out;
}

EquivalenceReport check_equivalence(const Objective& obj, const Vector& x0, const FormParams& params,
                                    const EquivalenceOptions& options) {
  constexpr int kForms = static_cast<int>(kAcceleratedForms.size());
  EquivalenceReport report;
  report.deviation = Matrix::Zero(kForms, kForms);
  report.k_max = options.k_max;
  report.tolerance = options.tolerance;

  const NesterovIIState start{x0, x0, x0};
  std::vector<MethodState> states;
  for (int i = 0; i < kForms; ++i) {
    states.push_back(from_hub(start, kAcceleratedForms[i], params[i]));
  }

  Matrix first_fail = Matrix::Constant(kForms, kForms, -1.0);
  std::vector<Vector> xs(kForms), ys(kForms);
  for (int k = 0; k <= options.k_max; ++k) {
    if (k > 0) {
      for (int i = 0; i < kForms; ++i) states[i] = step(obj, params[i], states[i]);
    }
    for (int i = 0; i < kForms; ++i) {
      NesterovIIState h = to_hub(states[i], params[i]);
      xs[i] = std::move(h.x);
      ys[i] = std::move(h.y);
    }
    for (int i = 0; i < kForms; ++i) {
      for (int j = i + 1; j < kForms; ++j) {
        double d = std::max(max_abs_diff(xs[i], xs[j]), max_abs_diff(ys[i], ys[j]));
        if (!std::isfinite(d)) d = std::numeric_limits<double>::infinity();
        if (d > report.deviation(i, j)) {
          report.deviation(i, j) = report.deviation(j, i) = d;
        }
        if (d > options.tolerance && first_fail(i, j) < 0) first_fail(i, j) = k;
      }
    }
  }

  std::array<int, 7> involvement{};
  for (int i = 0; i < kForms; ++i) {
    for (int j = i + 1; j < kForms; ++j) {
      report.max_deviation = std::max(report.max_deviation, report.deviation(i, j));
      if (first_fail(i, j) >= 0) {
        report.failures.push_back({kAcceleratedForms[i], kAcceleratedForms[j], report.deviation(i, j),
                                   static_cast<int>(first_fail(i, j))});
        ++involvement[i];
        ++involvement[j];
      }
    }
  }
  std::sort(report.failures.begin(), report.failures.end(), [](const auto& a, const auto& b) {
    if (a.first_failing_k != b.first_failing_k) return a.first_failing_k < b.first_failing_k;
    return a.deviation > b.deviation;
  });
  if (!report.failures.empty()) {
    const auto it = std::max_element(involvement.begin(), involvement.end());
    report.outlier = kAcceleratedForms[static_cast<std::size_t>(it - involvement.begin())];
  }
  return report;
}

nlohmann::json to_json(const EquivalenceReport& report) {
  nlohmann::json forms = nlohmann::json::array();
  for (Form f : report.forms) forms.push_back(std::string(form_name(f)));
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : report.failures) {
    failures.push_back({{"a", std::string(form_name(f.a))},
                        {"b", std::string(form_name(f.b))},
                        {"deviation", f.deviation},
                        {"first_failing_k", f.first_failing_k}});
  }
  nlohmann::json out = {{"forms", forms},
                        {"deviation", to_json(report.deviation)},
                        {"max_deviation", report.max_deviation},
                        {"k_max", report.k_max},
                        {"tolerance", report.tolerance},
                        {"pass", report.pass()},
                        {"failures", failures}};
  out["outlier"] = report.outlier ? nlohmann::json(std::string(form_name(*report.outlier)))
                                  : nlohmann::json(nullptr);
  return out;
}

std::string deviation_matrix_csv(const EquivalenceReport& report) {
  std::vector<std::string> header{"form"};
  for (Form f : report.forms) header.emplace_back(form_name(f));
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += '\n';
  for (std::size_t i = 0; i < report.forms.size(); ++i) {
    out += std::string(form_name(report.forms[i]));
    for (std::size_t j = 0; j < report.forms.size(); ++j) {
      out += ',' + format_double(report.deviation(static_cast<Eigen::Index>(i),
                                                  static_cast<Eigen::Index>(j)));
    }
    out += '\n';
  }
  return out;
}

}  // namespace geoaccel
