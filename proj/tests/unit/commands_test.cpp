#include "geoaccel/commands.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "geoaccel/io.hpp"

namespace geoaccel {
namespace {

using nlohmann::json;

const json kDemoQuadratic = {{"kind", "quadratic"}, {"H", {{2, 1}, {1, 3}}}};

struct Result {
  int code;
  std::string out;
  std::string log;
};

Result invoke(const std::string& command, const json& config, CommandOptions options = {}) {
  std::ostringstream out, log;
  const int code = run_command(command, config, options, out, log);
  return {code, out.str(), log.str()};
}

std::filesystem::path scratch_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "geoaccel_commands_test";
  std::filesystem::create_directories(dir);
  return dir;
}

TEST(RunCommandTest, DiscreteMethodCsv) {
  const Result r = invoke("run", {{"objective", kDemoQuadratic}, {"method", "bregman_agm"}, {"x0", {1, 1}}});
  ASSERT_EQ(r.code, kExitOk) << r.log;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "k,f,grad_norm,x_1,x_2,state_x_1,state_x_2,state_y_1,"
                                               "state_y_2,state_g_1,state_g_2");
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 102);
}

TEST(RunCommandTest, OdeJsonCarriesProvenance) {
  CommandOptions opts;
  opts.format = OutputFormat::Json;
  opts.seed = 11;
  const json config = {{"objective", kDemoQuadratic}, {"ode", "agm"}, {"x0", {1, 1}}, {"t_max", 1.0}};
  const Result r = invoke("run", config, opts);
  ASSERT_EQ(r.code, kExitOk) << r.log;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["command"], "run");
  EXPECT_EQ(doc["seed"], 11);
  EXPECT_EQ(doc["config"], config);
  EXPECT_TRUE(doc.contains("trajectory"));
}

TEST(RunCommandTest, ConfigErrors) {
  EXPECT_EQ(invoke("run", json::object()).code, kExitConfig);
  EXPECT_EQ(invoke("run", {{"objective", kDemoQuadratic}, {"method", "nope"}, {"x0", {1, 1}}}).code,
            kExitConfig);
  EXPECT_EQ(invoke("run", {{"objective", kDemoQuadratic}, {"method", "lan"}, {"x0", {1, 1, 1}}}).code,
            kExitConfig);
  EXPECT_EQ(invoke("run", {{"objective", kDemoQuadratic},
                           {"method", "lan"},
                           {"x0", {1, 1}},
                           {"params", {{"bogus", 1}}}})
                .code,
            kExitConfig);
  const Result r = invoke("frobnicate", json::object());
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.log.find("error: frobnicate"), std::string::npos);
}

TEST(RunCommandTest, DivergingMethodIsSolverFailure) {
  const json config = {{"objective", kDemoQuadratic},
                       {"method", "heavy_ball"},
                       {"x0", {1, 1}},
                       {"k_max", 2000},
                       {"params", {{"gamma", 5.0}}}};
  EXPECT_EQ(invoke("run", config).code, kExitSolver);
}

TEST(RunCommandTest, DemoBundleWritesFourFiles) {
  const auto stem = (scratch_dir() / "fig2").string();
  CommandOptions opts;
  opts.out = stem;
  const Result r = invoke("run", {{"objective", kDemoQuadratic}, {"bundle", "figure2"}, {"x0", {1, 1}}}, opts);
  ASSERT_EQ(r.code, kExitOk) << r.log;
  for (const char* part : {"_agm_discrete", "_prox_discrete", "_agm_ode", "_prox_ode"}) {
    EXPECT_TRUE(std::filesystem::exists(stem + part + ".csv")) << part;
    EXPECT_TRUE(std::filesystem::exists(stem + part + ".csv.config.json")) << part;
  }
  EXPECT_NE(r.log.find("path divergence"), std::string::npos);
}

TEST(EquivalenceCommandTest, PassAndPerturbedFailure) {
  const json base = {{"objective", kDemoQuadratic}, {"x0", {1, 1}}};
  const Result ok = invoke("equivalence", base);
  EXPECT_EQ(ok.code, kExitOk) << ok.log;
  json perturbed = base;
  perturbed["perturb"] = {{"form", "nesterov_ii"}, {"param", "beta"}, {"delta", 1e-3}};
  const Result bad = invoke("equivalence", perturbed);
  EXPECT_EQ(bad.code, kExitEquivalence);
  EXPECT_NE(bad.log.find("outlier form: nesterov_ii"), std::string::npos) << bad.log;
}

TEST(EquivalenceCommandTest, RejectsNonQuadratic) {
  const json config = {{"objective", {{"kind", "quartic"}, {"A", {{1, 0}, {0, 1}}}}}, {"x0", {1, 1}}};
  EXPECT_EQ(invoke("equivalence", config).code, kExitConfig);
}

TEST(CertifyCommandTest, ExplicitMatrixAndBadAlpha) {
  const Result ok = invoke("certify", {{"H", {{2, 1}, {1, 3}}}});
  ASSERT_EQ(ok.code, kExitOk) << ok.log;
  EXPECT_EQ(ok.out.substr(0, ok.out.find('\n')), "kind,n,mu,L,rho_bound,abscissa,pass,worst_block_lambda");
  EXPECT_EQ(std::count(ok.out.begin(), ok.out.end(), '\n'), 4);
  const Result bad = invoke("certify", {{"H", {{2, 1}, {1, 3}}}, {"kind", "agm"}, {"params", {{"alpha", 1.5}}}});
  EXPECT_EQ(bad.code, kExitConfig);
}

TEST(CertifyCommandTest, FailingCertificateExitCode) {
  const Result r = invoke("certify", {{"H", {{2, 1}, {1, 3}}}, {"kind", "heavy_ball"}, {"params", {{"beta", 0.999}}}});
  EXPECT_EQ(r.code, kExitCertificate) << r.log;
}

TEST(CertifyCommandTest, SeededGridIsDeterministic) {
  const json config = {{"grid", {{"per_cell", 2}}}};
  CommandOptions opts;
  opts.seed = 42;
  const Result a = invoke("certify", config, opts);
  const Result b = invoke("certify", config, opts);
  ASSERT_EQ(a.code, kExitOk) << a.log;
  EXPECT_EQ(a.out, b.out);
  opts.seed = 43;
  EXPECT_NE(invoke("certify", config, opts).out, a.out);
}

TEST(GeodesicCommandTest, WritesThreeFiles) {
  const auto stem = (scratch_dir() / "geo").string();
  CommandOptions opts;
  opts.out = stem;
  const json config = {{"generator", {{"kind", "quartic"}, {"A", {{1, 0}, {0, 2}}}}},
                       {"x", {1, 0.5}},
                       {"y", {-0.5, 2}}};
  const Result r = invoke("geodesic", config, opts);
  ASSERT_EQ(r.code, kExitOk) << r.log;
  for (const char* part : {"_primal.csv", "_dual.csv", "_euclidean.csv"}) {
    const std::string body = read_text_file(stem + part);
    EXPECT_EQ(body.substr(0, body.find('\n')), "t,x_1,x_2");
    EXPECT_EQ(std::count(body.begin(), body.end(), '\n'), 102);
  }
}

TEST(GeodesicCommandTest, CsvNeedsOutputStem) {
  const json config = {{"generator", kDemoQuadratic}, {"x", {1, 0}}, {"y", {0, 1}}};
  EXPECT_EQ(invoke("geodesic", config).code, kExitConfig);
  CommandOptions opts;
  opts.format = OutputFormat::Json;
  EXPECT_EQ(invoke("geodesic", config, opts).code, kExitOk);
}

}  // namespace
}  // namespace geoaccel
