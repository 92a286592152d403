#include <doctest.h>

#include <cmath>

#include "exo/exotic_analyzer.hpp"

using namespace exo;

TEST_CASE("extension verdicts on F2") {
  auto m = free_group_model(2);
  const auto mu = MeasureContext::uniform(*m);
  const auto ext = extension_criteria(*m, mu, 0.65, 6.0, 64);
  CHECK(ext.verdict == ExtensionVerdict::Extends);
  CHECK(ext.critical_ratio == doctest::Approx(3 * std::pow(0.65, 6)));
  CHECK(ext.critical_ratio < 0.23);
  for (const auto& r : ext.cond4_grid) CHECK(r.converges);
  CHECK(ext.counts_verified_upto >= 8);

  const auto fail = extension_criteria(*m, mu, 0.65, 2.0, 64);
  CHECK(fail.verdict == ExtensionVerdict::FailsToExtend);
  REQUIRE(fail.divergence_from >= 1);
  // The certified minorant really holds on the computed trace.
  for (int k = fail.divergence_from; k < 64; ++k)
    CHECK(fail.cond2_trace[k + 1].second >= fail.divergence_rho * fail.cond2_trace[k].second * (1 - 1e-12));

  CHECK(extension_criteria(*m, mu, 0.05, 2.0, 16).verdict == ExtensionVerdict::Extends);
}

TEST_CASE("finite groups always extend and Z extends for every alpha") {
  auto z6 = cyclic_group_model(6);
  CHECK(extension_criteria(*z6, MeasureContext::uniform(*z6), 0.99, 2.0, 16).verdict == ExtensionVerdict::Extends);
  auto z = free_group_model(1);
  CHECK(extension_criteria(*z, MeasureContext::uniform(*z), 0.99, 2.0, 16).verdict == ExtensionVerdict::Extends);
}

TEST_CASE("verdicts are monotone in alpha") {
  auto m = free_group_model(2);
  const auto mu = MeasureContext::uniform(*m);
  bool seen_fail = false;
  for (int i = 1; i < 100; ++i) {
    const auto v = extension_criteria(*m, mu, i / 100.0, 4.0, 16).verdict;
    if (v == ExtensionVerdict::FailsToExtend) seen_fail = true;
    if (seen_fail) CHECK(v != ExtensionVerdict::Extends);
  }
  CHECK(seen_fail);
}

TEST_CASE("scaling identity and cross-path Lp norm") {
  auto m = random_free_action_model(2, 4, 3);
  const auto mu = MeasureContext::uniform(*m);
  for (int k = 0; k <= 5; ++k) {
    const double a = phi_chi_norm(*m, mu, 0.7, 3.0, k);
    CHECK(a == doctest::Approx(std::pow(0.7, k) * std::pow(m->backend().sphere_size(k), 1.0 / 3.0)).epsilon(1e-13));
    const auto f = CcFunction::sphere_indicator(m, k).scaled(std::pow(0.7, k));
    CHECK(std::abs(lp_norm(f, 3.0, mu).value - a) <= 1e-12 * a);
  }
}

TEST_CASE("threshold bands") {
  const auto g = growth_stats(*free_group_model(2), 8, 1);
  const auto b = threshold_band(g, 2.0, 4.0);
  CHECK(std::abs(b.lower - std::pow(3.0, -0.5)) < 1e-12);
  CHECK(std::abs(b.upper - std::pow(3.0, -0.25)) < 1e-12);
  CHECK(b.nonempty);
  CHECK_FALSE(threshold_band(g, 3.0, 3.0).nonempty);
  CHECK_THROWS_AS(threshold_band(growth_stats(*free_group_model(1), 8, 1), 2.0, 4.0), SubexponentialGrowth);
}

TEST_CASE("witness ratios") {
  auto m = free_group_model(2);
  const auto mu = MeasureContext::uniform(*m);
  CHECK(witness_ratio(*m, mu, 0.65, 2.0, 0, 5) == doctest::Approx(0.1));
  CHECK(witness_ratio(*m, mu, 0.65, 2.0, 60, 5) > 1.0);
  for (int k = 1; k < 40; ++k)
    CHECK(witness_ratio(*m, mu, 0.4, 2.0, k + 1, 5) < witness_ratio(*m, mu, 0.4, 2.0, k, 5));
}

TEST_CASE("certificate legs") {
  for (auto m : {free_group_model(2), random_free_action_model(2, 32, 1)}) {
    const auto mu = MeasureContext::uniform(*m);
    const auto g = growth_stats(*m, 6, 1);
    const auto c = certificate(*m, mu, g, 2.0, 6.0, 0.65, 64);
    CHECK(c.certified());
    CHECK(c.C == 5);
    CHECK(c.witness_k <= 60);
    CHECK(certificate(*m, mu, g, 2.0, 6.0, 0.5, 64).verdict == "Inconclusive");
  }
}
