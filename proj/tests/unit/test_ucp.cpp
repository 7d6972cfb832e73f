#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "tentomo/errors.hpp"
#include "tentomo/ucp.hpp"

using namespace tentomo;

namespace {

const Check& find(const Report& r, const std::string& name) {
  for (const auto& c : r.checks())
    if (c.name == name) return c;
  throw std::runtime_error("missing check " + name);
}

std::string csv_of(const Report& r, bool timing = false) {
  std::ostringstream out;
  r.write_csv(out, timing);
  return out.str();
}

UcpConfig small(int n, int m) {
  UcpConfig c;
  c.n = n;
  c.m = m;
  c.samples = 6;
  c.rule_degree = 24;
  return c;
}

}  // namespace

TEST(CheckPasses, BoundsAndNan) {
  EXPECT_TRUE(check_passes(0.0, 0.0, false));
  EXPECT_FALSE(check_passes(1e-300, 0.0, false));
  EXPECT_TRUE(check_passes(2.0, 1.0, true));
  EXPECT_FALSE(check_passes(0.5, 1.0, true));
  EXPECT_FALSE(check_passes(std::numeric_limits<double>::quiet_NaN(), 1.0, false));
  EXPECT_FALSE(check_passes(std::numeric_limits<double>::quiet_NaN(), 1.0, true));
}

TEST(Report, VerdictIgnoresInformationalRows) {
  Report r("demo");
  r.add("a", "", 1e-12, 1e-9);
  r.add_info("b", "", 1.0, 1e-9);
  EXPECT_TRUE(r.passed());
  r.add("c", "", 1.0, 1e-9);
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.failures(), 1u);
}

TEST(Report, EmptyReportGivesHeaderOnlyCsv) {
  EXPECT_EQ(csv_of(Report("empty")), "check_name,parameters,residual,tolerance,pass,seconds\n");
}

TEST(Report, CsvRowFormat) {
  Report r("demo");
  r.add("x.y", param_string({{"n", 2}, {"tau", 0.25}}), 0.5, 1e-9).seconds = 1.25;
  EXPECT_EQ(csv_of(r), "check_name,parameters,residual,tolerance,pass,seconds\n"
                       "x.y,n=2;tau=0.25,5.000000000000e-01,1.000e-09,false,\n");
  EXPECT_NE(csv_of(r, true).find(",false,1.250\n"), std::string::npos);
}

TEST(Report, JsonSchema) {
  Report r("demo", R"({"suite":"demo","seed":3})");
  r.add("a", "n=2", 0.0, 0.0);
  r.add("ctl", "n=2", 5.0, 1.0, true);
  r.add("bad", "", std::numeric_limits<double>::quiet_NaN(), 1.0);
  const auto j = nlohmann::json::parse(r.to_json(false));
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["scenario"], "demo");
  EXPECT_EQ(j["config"]["seed"], 3);
  ASSERT_EQ(j["residuals"].size(), 3u);
  EXPECT_EQ(j["residuals"][1]["lower_bound"], true);
  EXPECT_TRUE(j["residuals"][2]["value"].is_null());
  EXPECT_EQ(j["passed"], false);
  EXPECT_FALSE(j.contains("timing"));
  EXPECT_TRUE(nlohmann::json::parse(r.to_json(true)).contains("timing"));
}

TEST(ParamString, IntegersAndFractions) {
  EXPECT_EQ(param_string({{"n", 2}, {"m", 1}}), "n=2;m=1");
  EXPECT_EQ(param_string({{"h", 0.125}, {"seed", 18446744073709.0}}), "h=0.125;seed=18446744073709");
  EXPECT_EQ(param_string({}), "");
}

TEST(UcpScenarioName, RoundTrip) {
  for (auto s : {UcpScenario::Ray, UcpScenario::Mrt, UcpScenario::Trt})
    EXPECT_EQ(parse_ucp_scenario(to_string(s)), s);
  EXPECT_FALSE(parse_ucp_scenario("tensor").has_value());
}

TEST(UcpValidate, RejectsUnsupportedCombinations) {
  auto c = small(2, 2);
  c.k = 2;
  EXPECT_THROW(validate(UcpScenario::Mrt, c), PreconditionError);
  c = small(4, 1);
  EXPECT_THROW(validate(UcpScenario::Ray, c), PreconditionError);
  c = small(2, 2);
  c.s = 3;
  EXPECT_THROW(validate(UcpScenario::Ray, c), PreconditionError);
  c = small(2, 1);
  c.samples = 0;
  EXPECT_THROW(ucp_experiment(UcpScenario::Trt, c), PreconditionError);
}

TEST(UcpRay, PotentialFieldsVanishAndControlsDoNot) {
  for (int m = 1; m <= 2; ++m) {
    const auto r = ucp_experiment(UcpScenario::Ray, small(2, m));
    EXPECT_TRUE(r.passed()) << "m=" << m;
    EXPECT_EQ(find(r, "ray.R_f_nonzero_entries").value, 0.0);
    EXPECT_LT(find(r, "ray.N_jet_on_U").value, 1e-9);
    EXPECT_GE(find(r, "control.R_g_nonzero_entries").value, 1.0);
    EXPECT_GT(find(r, "control.N_jet_on_U").value, 1e-4);
  }
}

TEST(UcpRay, NonPotentialFieldFailsTheVanishingAssertions) {
  auto c = small(2, 1);
  c.potential = false;
  const auto r = ucp_experiment(UcpScenario::Ray, c);
  EXPECT_FALSE(r.passed());
  EXPECT_FALSE(find(r, "ray.R_f_nonzero_entries").pass);
  EXPECT_FALSE(find(r, "ray.N_jet_on_U").pass);
}

TEST(UcpMrt, GeneralizedPotentialVanishes) {
  auto c = small(2, 2);
  c.k = 1;
  c.s = 5;
  const auto r = ucp_experiment(UcpScenario::Mrt, c);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(find(r, "mrt.Rk_f_nonzero_entries").value, 0.0);
  c.potential = false;
  EXPECT_FALSE(ucp_experiment(UcpScenario::Mrt, c).passed());
}

TEST(UcpTrt, RecoveryFromIndependentDirections) {
  for (int m = 1; m <= 2; ++m) {
    const auto r = ucp_experiment(UcpScenario::Trt, small(3, m));
    EXPECT_TRUE(r.passed()) << "m=" << m;
    EXPECT_EQ(find(r, "trt.sym_power_rank_deficit").value, 0.0);
    EXPECT_LT(find(r, "trt.pointwise_recovery").value, 1e-9);
    EXPECT_EQ(find(r, "control.singular_system_detected").value, 1.0);
  }
}

TEST(UcpDeterminism, SameSeedSameCsv) {
  const auto c = small(2, 1);
  for (auto s : {UcpScenario::Ray, UcpScenario::Trt}) {
    const auto a = csv_of(ucp_experiment(s, c));
    const auto b = csv_of(ucp_experiment(s, c));
    EXPECT_EQ(a, b);
  }
  auto d = c;
  d.seed = 2;
  EXPECT_NE(csv_of(ucp_experiment(UcpScenario::Ray, c)), csv_of(ucp_experiment(UcpScenario::Ray, d)));
}
