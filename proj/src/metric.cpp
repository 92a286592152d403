#include "exo/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace exo {

int fiber_distance(const GroupoidModel& m, const GroupoidElement& g, const GroupoidElement& h) {
  if (g.range != h.range) throw PreconditionViolation("fiber_distance needs a common range unit");
  return length(compose(m, inverse(m, g), h));
}

// ---------------------------------------------------------------------------
// Growth

GrowthReport growth_stats(const GroupoidModel& m, int K, int k_min, std::size_t budget,
                          std::uint64_t seed) {
  if (k_min < 1 || K < k_min) throw PreconditionViolation("growth_stats needs K >= k_min >= 1");
  GrowthReport rep;
  rep.K = K;
  rep.k_min = k_min;
  rep.units = units_for_statistics(m, seed, &rep.sampled);

  const double need = ball_size(m, K) * static_cast<double>(rep.units.size());
  if (need > static_cast<double>(budget)) throw BudgetExceeded("growth_stats", need, budget);

  rep.rows.resize(static_cast<std::size_t>(K) + 1);
  std::vector<double> ball(rep.units.size(), 0.0);
  for (int k = 0; k <= K; ++k) {
    GrowthRow& row = rep.rows[static_cast<std::size_t>(k)];
    row.k = k;
    row.sup_sphere = 0;
    row.inf_sphere = std::numeric_limits<double>::infinity();
    row.inf_ball = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rep.units.size(); ++i) {
      const double s = static_cast<double>(enumerate_sphere(m, rep.units[i], k, budget).size());
      ball[i] += s;
      row.sup_sphere = std::max(row.sup_sphere, s);
      row.inf_sphere = std::min(row.inf_sphere, s);
      row.inf_ball = std::min(row.inf_ball, ball[i]);
    }
  }

  // Certified upper rate: max of k-th roots, never a regression.
  rep.R = 0;
  for (int k = k_min; k <= K; ++k)
    rep.R = std::max(rep.R, std::pow(rep.rows[static_cast<std::size_t>(k)].sup_sphere, 1.0 / k));

  // Least squares on log inf_ball, then D lowered until the bound holds
  // pointwise on the fit range.
  const int npts = K - k_min + 1;
  if (npts >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int k = k_min; k <= K; ++k) {
      const double y = std::log(rep.rows[static_cast<std::size_t>(k)].inf_ball);
      sx += k;
      sy += y;
      sxx += static_cast<double>(k) * k;
      sxy += k * y;
    }
    const double slope = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / npts;
    rep.R_prime = std::exp(slope);
    rep.D = std::exp(intercept);
  } else {
    rep.R_prime = std::pow(rep.rows[static_cast<std::size_t>(K)].inf_ball, 1.0 / K);
    rep.D = 1.0;
  }
  for (int k = k_min; k <= K; ++k)
    rep.D = std::min(rep.D, rep.rows[static_cast<std::size_t>(k)].inf_ball / std::pow(rep.R_prime, k));

  // Exact geometric sphere counts (same in every sampled fiber) pin the
  // growth rate exactly.
  bool uniform = true;
  for (int k = k_min; k <= K; ++k) {
    const auto& r = rep.rows[static_cast<std::size_t>(k)];
    uniform = uniform && r.sup_sphere == r.inf_sphere;
  }
  const double s0 = rep.rows[static_cast<std::size_t>(k_min)].sup_sphere;
  if (uniform && K > k_min && s0 > 0) {
    const double ratio = rep.rows[static_cast<std::size_t>(k_min) + 1].sup_sphere / s0;
    bool geometric = ratio == std::floor(ratio);
    for (int k = k_min; geometric && k < K; ++k)
      geometric = rep.rows[static_cast<std::size_t>(k) + 1].sup_sphere ==
                  ratio * rep.rows[static_cast<std::size_t>(k)].sup_sphere;
    if (geometric) {
      rep.exact_geometric = true;
      rep.rate_upper = rep.rate_lower = ratio;
    }
  }
  if (!rep.exact_geometric) {
    rep.rate_upper = rep.R;
    rep.rate_lower = rep.R_prime;
  }
  bool finite_fibers = false;
  for (int k = 1; k <= K; ++k) finite_fibers = finite_fibers || rep.rows[static_cast<std::size_t>(k)].inf_sphere == 0;
  rep.subexponential = finite_fibers || rep.rate_lower <= 1.0;
  return rep;
}

nlohmann::json GrowthReport::to_json() const {
  nlohmann::json j;
  j["k_min"] = k_min;
  j["K"] = K;
  auto arr = nlohmann::json::array();
  for (const auto& r : rows)
    arr.push_back({{"k", r.k}, {"sup_sphere", r.sup_sphere}, {"inf_sphere", r.inf_sphere}, {"inf_ball", r.inf_ball}});
  j["rows"] = arr;
  j["R"] = R;
  j["R_prime"] = R_prime;
  j["D"] = D;
  j["exact_geometric"] = exact_geometric;
  j["rate_upper"] = rate_upper;
  j["rate_lower"] = rate_lower;
  j["subexponential"] = subexponential;
  if (subexponential) j["note"] = "subexponential, growth hypotheses unmet";
  j["sampled"] = sampled;
  auto us = nlohmann::json::array();
  for (auto u : units) us.push_back(u.value);
  j["units"] = us;
  return j;
}

std::string GrowthReport::to_csv() const {
  std::ostringstream out;
  out << "k,sup_sphere,inf_ball\n";
  out.precision(17);
  for (const auto& r : rows) out << r.k << ',' << r.sup_sphere << ',' << r.inf_ball << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Four-point hyperbolicity

DeltaEstimate hyperbolicity_delta(const GroupoidModel& m, UnitId u, int radius,
                                  std::uint64_t quadruple_budget, std::size_t budget) {
  if (radius < 0) throw PreconditionViolation("radius must be nonnegative");
  const double n_est = ball_size(m, radius);
  if (std::pow(n_est, 4) > static_cast<double>(quadruple_budget))
    throw BudgetExceeded("hyperbolicity_delta quadruples (use a smaller radius)", std::pow(n_est, 4),
                         static_cast<double>(quadruple_budget));
  const auto ball = enumerate_ball(m, u, radius, budget);
  const std::size_t n = ball.size();
  std::vector<int> dist(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      dist[i * n + j] = dist[j * n + i] = fiber_distance(m, ball[i], ball[j]);

  // The three pair sums are permuted among themselves by any reordering of
  // the quadruple, and quadruples with a repeated point have defect 0 by the
  // triangle inequality, so 4-subsets suffice.
  int worst = 0;
  std::uint64_t count = 0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      const int dab = dist[a * n + b];
      for (std::size_t c = b + 1; c < n; ++c) {
        const int dac = dist[a * n + c], dbc = dist[b * n + c];
        for (std::size_t d = c + 1; d < n; ++d) {
          int s1 = dab + dist[c * n + d];
          int s2 = dac + dist[b * n + d];
          int s3 = dist[a * n + d] + dbc;
          if (s1 < s2) std::swap(s1, s2);
          if (s2 < s3) std::swap(s2, s3);
          if (s1 < s2) std::swap(s1, s2);
          worst = std::max(worst, s1 - s2);
          ++count;
        }
      }
    }
  DeltaEstimate est;
  est.delta = worst;
  est.radius = radius;
  est.units = {u};
  est.exhaustive = true;
  est.quadruples = count;
  return est;
}

DeltaEstimate hyperbolicity_delta_all(const GroupoidModel& m, int radius, std::uint64_t seed,
                                      std::uint64_t quadruple_budget, std::size_t budget) {
  bool sampled = false;
  auto units = units_for_statistics(m, seed, &sampled);
  DeltaEstimate total;
  total.radius = radius;
  total.exhaustive = !sampled;
  for (auto u : units) {
    auto e = hyperbolicity_delta(m, u, radius, quadruple_budget, budget);
    total.delta = std::max(total.delta, e.delta);
    total.quadruples += e.quadruples;
  }
  total.units = std::move(units);
  return total;
}

nlohmann::json DeltaEstimate::to_json() const {
  auto us = nlohmann::json::array();
  for (auto u : units) us.push_back(u.value);
  return {{"delta", delta}, {"radius", radius}, {"units", us}, {"exhaustive", exhaustive},
          {"quadruples", quadruples}};
}

int overlap_constant(const GroupoidModel& m, double delta, std::size_t budget) {
  if (delta < 0) throw PreconditionViolation("delta must be nonnegative");
  const int r = static_cast<int>(std::ceil(2.0 * delta + 1.0));
  // Fibers of an action groupoid are all copies of the Cayley graph, so the
  // ball size is the same for every unit.
  const double size = ball_size(m, r);
  if (size > static_cast<double>(budget)) throw BudgetExceeded("overlap_constant", size, budget);
  return static_cast<int>(enumerate_ball(m, UnitId{0}, r, budget).size());
}

// ---------------------------------------------------------------------------
// Band inequality

BandReport band_check(const CcFunction& f, const CcFunction& g, int k, int n, UnitId u, int C) {
  for (const auto& [x, v] : f.values())
    if (length(x) != k) throw PreconditionViolation("supp f is not contained in W_k");
  for (const auto& [x, v] : g.values()) {
    if (length(x) != n) throw PreconditionViolation("supp g is not contained in W_n");
    if (std::abs(v) > 1.0) throw PreconditionViolation("|g| <= 1 is violated");
  }
  const CcFunction h = convolve(f, g);

  BandReport rep;
  rep.k = k;
  rep.n = n;
  rep.unit = u;
  rep.C = C;
  rep.f_l1 = fiber_l1(f, u);

  std::map<int, double> mass;
  for (int m = 0; m <= k + n; ++m) mass[m] = 0.0;
  for (const auto& [x, v] : h.values())
    if (x.range == u) mass[length(x)] += std::abs(v);

  const int lo = std::abs(k - n), hi = k + n;
  for (const auto& [m, w] : mass) {
    BandRow row;
    row.m = m;
    row.mass = w;
    row.ratio = rep.f_l1 > 0 ? w / rep.f_l1 : 0.0;
    row.in_band = m >= lo && m <= hi;
    if (row.in_band)
      row.ok = w <= C * rep.f_l1 * (1.0 + kBandRelativeSlack);
    else
      row.ok = w == 0.0;
    if (!row.in_band && !row.ok) rep.support_ok = false;
    if (row.in_band && !row.ok) rep.bound_ok = false;
    rep.rows.push_back(row);
  }
  // Out-of-band support is checked on the support itself, not on rounded mass.
  for (const auto& [x, v] : h.values())
    if (x.range == u && (length(x) < lo || length(x) > hi)) rep.support_ok = false;
  return rep;
}

nlohmann::json BandReport::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& r : rows)
    arr.push_back({{"m", r.m}, {"mass", r.mass}, {"ratio", r.ratio}, {"in_band", r.in_band}, {"ok", r.ok}});
  return {{"k", k}, {"n", n}, {"unit", unit.value}, {"C", C}, {"f_l1", f_l1}, {"rows", arr},
          {"support_ok", support_ok}, {"bound_ok", bound_ok}, {"pass", pass()}};
}

}  // namespace exo
