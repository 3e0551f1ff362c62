#include "geoaccel/equivalence.hpp"

#include <gtest/gtest.h>

#include <algorithm>

#include "geoaccel/random.hpp"
#include "test_support.hpp"

namespace geoaccel {
namespace {

using testing::demo_L;
using testing::demo_mu;
using testing::vec;

std::size_t index_of(Form f) {
  for (std::size_t i = 0; i < kAcceleratedForms.size(); ++i) {
    if (kAcceleratedForms[i] == f) return i;
  }
  return kAcceleratedForms.size();
}

TEST(EquivalenceTest, DemoAllFormsAgree) {
  const Objective f = testing::demo_quadratic();
  const EquivalenceReport r =
      check_equivalence(f, vec({1, 1}), equivalence_param_set(demo_mu(), demo_L()));
  EXPECT_TRUE(r.pass());
  EXPECT_LE(r.max_deviation, 1e-9);
  EXPECT_FALSE(r.outlier.has_value());
  EXPECT_EQ(r.deviation.rows(), 7);
  EXPECT_EQ(r.deviation, r.deviation.transpose());
}

TEST(EquivalenceTest, RandomQuadraticsAgree) {
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    const int n = 2 + i % 5;
    const double mu = log_uniform(rng, 0.1, 1.0);
    const double L = mu * log_uniform(rng, 1.0, 1e3);
    std::mt19937_64 vrng(i);
    const Objective f = make_quadratic({random_spd(rng, n, mu, L), testing::random_vector(vrng, n)});
    const EquivalenceReport r =
        check_equivalence(f, testing::random_vector(vrng, n), equivalence_param_set(mu, L));
    EXPECT_TRUE(r.pass()) << "max deviation " << r.max_deviation;
  }
}

TEST(EquivalenceTest, PerturbedFormIsFlagged) {
  FormParams params = equivalence_param_set(demo_mu(), demo_L());
  params[index_of(Form::NesterovII)].beta += 1e-3;
  const EquivalenceReport r = check_equivalence(testing::demo_quadratic(), vec({1, 1}), params);
  ASSERT_FALSE(r.pass());
  ASSERT_TRUE(r.outlier.has_value());
  EXPECT_EQ(*r.outlier, Form::NesterovII);
  EXPECT_EQ(r.failures.size(), 6u);
  for (const auto& fail : r.failures) {
    EXPECT_TRUE(fail.a == Form::NesterovII || fail.b == Form::NesterovII);
    EXPECT_GT(fail.deviation, 1e-9);
    EXPECT_GE(fail.first_failing_k, 1);
  }
}

TEST(EquivalenceTest, BregmanWithOwnDefaultsMatchesFormIIUnderItsMap) {
  // The Bregman AGM with its own defaults is a Nesterov II with matched constants.
  const HyperParams b = default_params(Form::BregmanAgm, demo_mu(), demo_L());
  const HyperParams ii = form_ii_params_for_bregman(b);
  FormParams params = equivalence_param_set(demo_mu(), demo_L());
  params[index_of(Form::BregmanAgm)] = b;
  params[index_of(Form::NesterovII)] = ii;
  const EquivalenceReport r = check_equivalence(testing::demo_quadratic(), vec({1, 1}), params);
  EXPECT_LE(r.deviation(static_cast<Eigen::Index>(index_of(Form::BregmanAgm)),
                        static_cast<Eigen::Index>(index_of(Form::NesterovII))),
            1e-9);
}

TEST(EquivalenceTest, Serialization) {
  const EquivalenceReport r = check_equivalence(testing::demo_quadratic(), vec({1, 1}),
                                                equivalence_param_set(demo_mu(), demo_L()),
                                                {10, 1e-9});
  const nlohmann::json j = to_json(r);
  EXPECT_EQ(j["forms"].size(), 7u);
  EXPECT_EQ(j["k_max"], 10);
  EXPECT_TRUE(j["pass"].get<bool>());
  const std::string csv = deviation_matrix_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "form,nesterov_i,nesterov_ii,sutskever,modern_momentum,auslender_teboulle,lan,bregman_agm");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 8);
}

}  // namespace
}  // namespace geoaccel
