#include <doctest.h>

#include <cmath>
#include <random>

#include "exo/metric.hpp"

using namespace exo;

TEST_CASE("fiber distance is a metric on a ball") {
  auto m = random_free_action_model(2, 4, 6);
  const auto ball = enumerate_ball(*m, UnitId{2}, 2);
  for (std::size_t i = 0; i < ball.size(); i += 3)
    for (std::size_t j = 0; j < ball.size(); j += 5) {
      CHECK(fiber_distance(*m, ball[i], ball[j]) == fiber_distance(*m, ball[j], ball[i]));
      for (std::size_t k = 0; k < ball.size(); k += 7)
        CHECK(fiber_distance(*m, ball[i], ball[k]) <=
              fiber_distance(*m, ball[i], ball[j]) + fiber_distance(*m, ball[j], ball[k]));
    }
  CHECK(fiber_distance(*m, ball[4], ball[4]) == 0);
}

TEST_CASE("growth statistics on F2 are exactly geometric") {
  auto m = free_group_model(2);
  const auto g = growth_stats(*m, 6, 1);
  for (int k = 1; k <= 6; ++k) CHECK(g.rows[k].sup_sphere == 4 * std::pow(3, k - 1));
  CHECK(g.exact_geometric);
  CHECK(g.rate_upper == 3.0);
  CHECK(g.rate_lower == 3.0);
  CHECK(g.R >= 3.0);
  CHECK(g.R <= 4.0);
  CHECK_FALSE(g.subexponential);
  // Certified inequalities hold pointwise.
  for (int k = 1; k <= 6; ++k) {
    CHECK(g.rows[k].sup_sphere <= std::pow(g.R, k) * (1 + 1e-12));
    CHECK(g.rows[k].inf_ball >= g.D * std::pow(g.R_prime, k) * (1 - 1e-12));
  }
}

TEST_CASE("Z and finite groups are flagged subexponential") {
  CHECK(growth_stats(*free_group_model(1), 8, 1).subexponential);
  CHECK(growth_stats(*cyclic_group_model(6), 6, 1).subexponential);
}

TEST_CASE("four-point delta: trees give 0, a cycle does not") {
  CHECK(hyperbolicity_delta(*free_group_model(2), UnitId{0}, 2).delta == 0);
  CHECK(hyperbolicity_delta(*free_group_model(1), UnitId{0}, 4).delta == 0);
  // In Z6 the four points 0,1,3,4 give d(0,3)+d(1,4) = 6 and cross sums 4.
  const auto z6 = hyperbolicity_delta(*cyclic_group_model(6), UnitId{0}, 3);
  CHECK(z6.delta == 2);
  CHECK(z6.exhaustive);
  CHECK_THROWS_AS(hyperbolicity_delta(*free_group_model(2), UnitId{0}, 5), BudgetExceeded);
}

TEST_CASE("overlap constant is the ball size at ceil(2 delta + 1)") {
  CHECK(overlap_constant(*free_group_model(2), 0) == 5);
  CHECK(overlap_constant(*free_group_model(1), 0) == 3);
  CHECK(overlap_constant(*free_group_model(2), 0.5) == 17);
}

TEST_CASE("band bound on random pairs") {
  auto m = free_group_model(2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  const auto w3 = enumerate_sphere(*m, UnitId{0}, 3);
  const auto w2 = enumerate_sphere(*m, UnitId{0}, 2);
  for (int t = 0; t < 10; ++t) {
    CcFunction f(m), g(m);
    for (const auto& x : w3)
      if (rng() % 2) f.set(x, Complex{val(rng), val(rng)});
    for (const auto& x : w2)
      if (rng() % 2) g.set(x, Complex{val(rng), val(rng)} / std::sqrt(2.0));
    const auto rep = band_check(f, g, 3, 2, UnitId{0}, 5);
    CHECK(rep.pass());
  }
  CcFunction bad(m);
  bad.set(w2[0], 1.0);
  CHECK_THROWS_AS(band_check(bad, bad, 3, 2, UnitId{0}, 5), PreconditionViolation);
}

TEST_CASE("band_check reports l1 mass above C when g is a full sphere") {
  // A delta at a length-3 word times chi_{W_2} spreads over 9 words of
  // length 5, so the l1 mass at m = 5 is 9 |f|_1 > 5 |f|_1.
  auto m = free_group_model(2);
  const auto y = enumerate_sphere(*m, UnitId{0}, 3).front();
  const auto rep = band_check(CcFunction::delta(m, y), CcFunction::sphere_indicator(m, 2), 3, 2, UnitId{0}, 5);
  CHECK(rep.support_ok);
  CHECK_FALSE(rep.bound_ok);
  CHECK(rep.rows[5].mass == 9.0);
  CHECK(rep.rows[3].mass == 2.0);
  CHECK(rep.rows[1].mass == 1.0);
}
