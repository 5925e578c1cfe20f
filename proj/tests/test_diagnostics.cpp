#include <gtest/gtest.h>

#include <cmath>

#include "centerward/diagnostics.hpp"
#include "centerward/errors.hpp"
#include "fixtures.hpp"

using namespace centerward;

namespace {

const CheckResult* find(const DiagnosticsReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

}  // namespace

TEST(Statistics, WeightedKs) {
  EXPECT_DOUBLE_EQ(ks_uniform({{0.5, 1.0}}), 0.5);
  std::vector<std::pair<double, double>> grid;
  for (int i = 0; i < 100; ++i) grid.emplace_back((i + 0.5) / 100, 1.0);
  EXPECT_NEAR(ks_uniform(grid), 0.005, 1e-12);
  // Weights matter: all mass near 0.
  EXPECT_NEAR(ks_uniform({{0.1, 9.0}, {0.9, 1.0}}), 0.8, 1e-12);
}

TEST(Statistics, ChiSquaredCriticalValues) {
  EXPECT_NEAR(chi2_critical(15, 0.01), 30.5779, 1e-4);
  EXPECT_NEAR(chi2_critical(1, 0.05), 3.84146, 1e-5);
}

TEST(Statistics, AnnulusSampler) {
  const PointSet p = sample_annulus(2, 5000, 0.3, 0.6, 4);
  ASSERT_EQ(p.size(), 5000u);
  double mean = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double r = norm(p[i]);
    EXPECT_GE(r, 0.3);
    EXPECT_LE(r, 0.6);
    mean += r / 5000;
  }
  EXPECT_NEAR(mean, 0.45, 0.01);
  EXPECT_EQ(sample_annulus(3, 10, 0.1, 0.2, 4).coords, sample_annulus(3, 10, 0.1, 0.2, 4).coords);
}

TEST(Thresholds, JsonRoundTripAndUnknownKeys) {
  Thresholds t = Thresholds::from_json({{"ks_max", 0.1}, {"sectors", 8}});
  EXPECT_DOUBLE_EQ(t.ks_max, 0.1);
  EXPECT_EQ(t.sectors, 8);
  EXPECT_DOUBLE_EQ(t.ma_median_max, 0.05);
  EXPECT_EQ(Thresholds::from_json(t.to_json()).to_json(), t.to_json());
  EXPECT_THROW(Thresholds::from_json({{"ks_maximum", 0.1}}), ConfigError);
  EXPECT_THROW(Thresholds::from_json({{"ks_max", "high"}}), ConfigError);
}

TEST(Suite, SemidiscreteMap) {
  const QuantileMap m = fixtures::semidiscrete_map("gaussian", 512);
  const auto d = builtin_density("gaussian");
  const DiagnosticsReport rep = run_suite(m, *d, {}, 7);
  const CheckResult* mass = find(rep, "pushforward.mass_residual");
  ASSERT_NE(mass, nullptr);
  EXPECT_EQ(mass->status, CheckStatus::Pass);
  const CheckResult* mono = find(rep, "monotonicity");
  ASSERT_NE(mono, nullptr);
  EXPECT_EQ(mono->status, CheckStatus::Pass);
  EXPECT_EQ(mono->details["violations"], 0);
  EXPECT_EQ(mono->threshold, 0.0);
  EXPECT_EQ(find(rep, "ma_identity")->status, CheckStatus::NotApplicable);
  EXPECT_EQ(find(rep, "injectivity")->status, CheckStatus::NotApplicable);
  EXPECT_EQ(find(rep, "roundtrip")->status, CheckStatus::NotApplicable);
  EXPECT_EQ(find(rep, "pushforward.ks_radius")->status, CheckStatus::Pass);
  EXPECT_EQ(rep.provenance["density"], "gaussian");
}

TEST(Suite, CorruptedSemidiscretePotentialFails) {
  const QuantileMap m = fixtures::semidiscrete_map("gaussian", 256);
  const QuantileMap bad = corrupt_potential(m, 0.1, 3);
  const DiagnosticsReport rep = run_suite(bad, *builtin_density("gaussian"), {}, 7);
  EXPECT_FALSE(rep.pass());
  EXPECT_EQ(find(rep, "pushforward.mass_residual")->status, CheckStatus::Fail);
}

TEST(Suite, EntropicMap) {
  const QuantileMap m = fixtures::entropic_map("gaussian", 24, 48);
  Thresholds t;
  t.pushforward_samples = 2000;
  t.monotonicity_pairs = 2000;
  t.injectivity_samples = 300;
  t.roundtrip_samples = 300;
  const DiagnosticsReport rep = run_suite(m, *builtin_density("gaussian"), t, 11);
  const CheckResult* mono = find(rep, "monotonicity");
  ASSERT_NE(mono, nullptr);
  EXPECT_DOUBLE_EQ(mono->threshold, -10.0 * m.epsilon());
  EXPECT_EQ(mono->status, CheckStatus::Pass);
  EXPECT_EQ(find(rep, "injectivity")->status, CheckStatus::Pass);
  EXPECT_EQ(find(rep, "pushforward.range")->status, CheckStatus::Pass);
  EXPECT_NE(find(rep, "ma_identity")->status, CheckStatus::NotApplicable);
  EXPECT_EQ(find(rep, "pushforward.mass_residual"), nullptr);
}

TEST(Suite, ErrorsBecomeErrorResults) {
  Thresholds t;
  t.ma_lo = 0.9;
  t.ma_hi = 0.5;
  const QuantileMap m = fixtures::entropic_map("gaussian", 12, 24);
  t.pushforward_samples = 200;
  t.monotonicity_pairs = 200;
  t.injectivity_samples = 50;
  t.roundtrip_samples = 50;
  const DiagnosticsReport rep = run_suite(m, *builtin_density("gaussian"), t, 1);
  const CheckResult* ma = find(rep, "ma_identity");
  ASSERT_NE(ma, nullptr);
  EXPECT_EQ(ma->status, CheckStatus::Error);
  EXPECT_FALSE(rep.pass());
  EXPECT_THROW(run_suite(QuantileMap{}, *builtin_density("gaussian"), t, 1), StateError);
}

TEST(Suite, StatusNames) {
  EXPECT_STREQ(status_name(CheckStatus::Pass), "pass");
  EXPECT_STREQ(status_name(CheckStatus::Fail), "fail");
  EXPECT_STREQ(status_name(CheckStatus::NotApplicable), "not-applicable");
  EXPECT_STREQ(status_name(CheckStatus::Error), "error");
}
