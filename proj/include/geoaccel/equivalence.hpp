#pragma once

#include <array>
#include <optional>
#include <string>

#include <json.hpp>

#include "geoaccel/linalg.hpp"
#include "geoaccel/methods.hpp"
#include "geoaccel/objectives.hpp"

namespace geoaccel {

struct EquivalenceOptions {
  int k_max = 100;
  double tolerance = 1e-9;
};

struct PairFailure {
  Form a;
  Form b;
  double deviation;  // max over k
  int first_failing_k;
};

// Result of running the seven accelerated forms side by side. Deviations
// compare the hub (x, y) pair of every form at each k.
struct EquivalenceReport {
  std::array<Form, 7> forms = kAcceleratedForms;
  Matrix deviation;  // 7 x 7, max over k of the pairwise distance
  double max_deviation = 0.0;
  int k_max = 0;
  double tolerance = 0.0;
  std::vector<PairFailure> failures;  // sorted by first failing k, then deviation
  // Form involved in the most failing pairs, if any pair failed.
  std::optional<Form> outlier;

  bool pass() const { return failures.empty(); }
};

// Per-form constants indexed like kAcceleratedForms.
using FormParams = std::array<HyperParams, 7>;

FormParams equivalence_param_set(double mu, double L);

// Every form starts from the hub state (x0, x0, x0) mapped into its own
// variables, so all seven runs begin at the same point of the iteration.
EquivalenceReport check_equivalence(const Objective& obj, const Vector& x0, const FormParams& params,
                                    const EquivalenceOptions& options = {});

nlohmann::json to_json(const EquivalenceReport& report);
std::string deviation_matrix_csv(const EquivalenceReport& report);

}  // namespace geoaccel
