#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_int.hpp>

#include "exo/spectral.hpp"

using namespace exo;

namespace {

// C(2m, m) as a double via exact integer arithmetic.
double central_binomial(int m) {
  boost::multiprecision::cpp_int c = 1;
  for (int i = 1; i <= m; ++i) c = c * (m + i) / i;
  return c.convert_to<double>();
}

CcFunction generators(const ModelPtr& m) { return CcFunction::sphere_indicator(m, 1); }

}  // namespace

TEST_CASE("delta functions have norm one") {
  auto m = random_free_action_model(2, 4, 1);
  const GroupoidElement g{UnitId{2}, parse_word(m->backend(), "a b")};
  CHECK(reduced_norm(CcFunction::delta(m, unit_element(UnitId{0})), 5).value == doctest::Approx(1.0));
  CHECK(reduced_norm(CcFunction::delta(m, g), 5).value == doctest::Approx(1.0));
}

TEST_CASE("Z: power sequence matches central binomials") {
  auto z = free_group_model(1);
  const auto mu = MeasureContext::uniform(*z);
  const auto seq = power_sequence_norm(generators(z), 5, mu);
  for (const auto& [n, v] : seq.entries) {
    const double oracle = std::pow(central_binomial(4 * n), 1.0 / (8.0 * n));
    CHECK(std::abs(v - oracle) <= 1e-12 * oracle);
  }
  CHECK(seq.entries[0].second == doctest::Approx(std::pow(70.0, 0.125)).epsilon(1e-12));
}

TEST_CASE("Z: truncated norms increase towards 2") {
  auto z = free_group_model(1);
  const auto est = reduced_norm_at_unit(generators(z), UnitId{0}, 32);
  CHECK(est.monotone);
  // Path graph on 65 vertices: 2 cos(pi / 66).
  CHECK(est.value == doctest::Approx(2.0 * std::cos(M_PI / 66.0)).epsilon(1e-6));
}

TEST_CASE("self-adjointness, C*-identity and submultiplicativity on samples") {
  auto m = free_group_model(2);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (int t = 0; t < 3; ++t) {
    CcFunction f(m), g(m);
    for (const auto& x : enumerate_ball(*m, UnitId{0}, 1)) {
      if (rng() % 2) f.set(x, Complex{val(rng), val(rng)});
      if (rng() % 2) g.set(x, Complex{val(rng), val(rng)});
    }
    const int L = 7;
    const double nf = reduced_norm(f, L).value;
    const double ng = reduced_norm(g, L).value;
    CHECK(std::abs(reduced_norm(involution(f), L).value - nf) < 1e-6 * std::max(1.0, nf));
    CHECK(reduced_norm(convolve(f, g), L).value <= nf * ng + 2e-10 + 0.02 * nf * ng);
    CHECK(reduced_norm(convolve(involution(f), f), L).value == doctest::Approx(nf * nf).epsilon(0.02));
  }
}

TEST_CASE("power sequence never exceeds the norm estimate by more than 5%") {
  auto m = free_group_model(2);
  const auto mu = MeasureContext::uniform(*m);
  const auto f = generators(m);
  const auto seq = power_sequence_norm(f, 2, mu);
  const double est = reduced_norm(f, 8).value;
  for (const auto& [n, v] : seq.entries) CHECK(v <= est * 1.05);
  CHECK(seq.entries[1].second > seq.entries[0].second);
}

TEST_CASE("two-unit model: the reduced norm takes the larger fiber") {
  auto m = build_model(GroupBackend::free_group(1), 2, {{0, 1}});  // trivial action
  CcFunction f(m);
  f.set(GroupoidElement{UnitId{1}, parse_word(m->backend(), "a")}, 3.0);
  f.set(GroupoidElement{UnitId{0}, parse_word(m->backend(), "a")}, 1.0);
  const auto est = reduced_norm(f, 6);
  CHECK(est.value == doctest::Approx(3.0));
  CHECK(est.unit == UnitId{1});
}

TEST_CASE("norm bound holds on small grids") {
  for (auto m : {free_group_model(2), free_group_model(1)}) {
    const auto mu = MeasureContext::uniform(*m);
    const int C = m->backend().generator_count() == 2 ? 5 : 3;
    for (int k : {0, 1, 2}) {
      const auto r = verify_norm_bound(0.5, k, 4.0, m, mu, C, 6);
      CHECK(r.pass);
      if (k == 0) CHECK(r.lhs == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("power sequence support guard") {
  auto m = free_group_model(2);
  CHECK_THROWS_AS(power_sequence_norm(generators(m), 3, MeasureContext::uniform(*m), 1000), BudgetExceeded);
}
