#include "exo/exotic_analyzer.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace exo {

std::string to_string(ExtensionVerdict v) {
  switch (v) {
    case ExtensionVerdict::Extends: return "Extends";
    case ExtensionVerdict::FailsToExtend: return "FailsToExtend";
    case ExtensionVerdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

int default_extension_horizon(const GroupoidModel& m) { return m.backend().is_free() ? 64 : 16; }

namespace {

// sum_u mu(u) |W_k cap G^u|. Every fiber of an action groupoid is a copy of
// the Cayley graph, but the weights are applied anyway.
double weighted_sphere(const GroupoidModel& m, const MeasureContext& mu, int k) {
  const double s = m.backend().sphere_size(k);
  double total = 0;
  for (double w : mu.weights()) total += w * s;
  return total;
}

void check_exponent(double alpha, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw PreconditionViolation("exponent must be finite and >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw PreconditionViolation("alpha must lie in (0, 1)");
}

}  // namespace

double phi_chi_norm(const GroupoidModel& m, const MeasureContext& mu, double alpha, double p, int k) {
  check_exponent(alpha, p);
  if (k < 0) throw PreconditionViolation("k must be nonnegative");
  const double s = weighted_sphere(m, mu, k);
  if (s == 0.0) return 0.0;
  return std::exp(std::log(s) / p + k * std::log(alpha));
}

ExtensionReport extension_criteria(const GroupoidModel& m, const MeasureContext& mu, double alpha, double p,
                                   int K, const std::vector<double>& beta_grid, std::size_t budget) {
  check_exponent(alpha, p);
  if (p < 2.0) throw PreconditionViolation("extension_criteria needs p >= 2");
  if (K < 8) throw PreconditionViolation("extension_criteria needs K >= 8");
  for (double b : beta_grid)
    if (!(b > 0.0 && b < 1.0)) throw PreconditionViolation("beta values must lie in (0, 1)");

  ExtensionReport rep;
  rep.alpha = alpha;
  rep.p = p;
  rep.K = K;

  // Closed-form counts are cross-checked by enumeration while it is cheap.
  for (int k = 0; k <= K; ++k) {
    const double s = m.backend().sphere_size(k);
    if (s > 1e5 || ball_size(m, k) > static_cast<double>(budget)) break;
    if (static_cast<double>(enumerate_sphere(m, UnitId{0}, k, budget).size()) != s)
      throw Error("sphere count mismatch at k=" + std::to_string(k));
    rep.counts_verified_upto = k;
  }

  double partial = 0;
  for (int k = 0; k <= K; ++k) {
    const double a = phi_chi_norm(m, mu, alpha, p, k);
    rep.phi_chi.push_back(a);
    rep.cond2_trace.emplace_back(k, a / (k + 1));
    partial += std::pow(1.0 + k, -2.0) * std::pow(a / (1.0 + k), p);
    rep.cond3_partial.push_back(partial);
  }

  const GroupBackend& g = m.backend();
  if (!g.is_free()) {
    // Spheres vanish past the diameter: every series is a finite sum.
    rep.tail = "finite";
    rep.sphere_ratio = 0;
    rep.critical_ratio = 0;
    for (double b : beta_grid) rep.cond4_grid.push_back({b, 0.0, true});
    rep.verdict = ExtensionVerdict::Extends;
    return rep;
  }

  // Free group of rank d: |W_{k+1}| / |W_k| = 2d - 1 exactly for k >= 1.
  rep.tail = "geometric";
  rep.sphere_ratio = 2.0 * g.generator_count() - 1.0;
  rep.critical_ratio = rep.sphere_ratio * std::pow(alpha, p);
  for (double b : beta_grid) {
    const double r = rep.sphere_ratio * std::pow(alpha * b, p);
    rep.cond4_grid.push_back({b, r, r < 1.0});
  }
  if (rep.critical_ratio <= 1.0) {
    // (alpha beta)^p (2d-1) < 1 for every beta < 1: geometric majorant.
    rep.verdict = ExtensionVerdict::Extends;
    return rep;
  }
  // cond2 ratio c_{k+1}/c_k = critical_ratio^{1/p} (k+1)/(k+2), increasing
  // in k towards critical_ratio^{1/p} > 1. Pick rho halfway and the first k0
  // from which the bound holds.
  const double lim = std::pow(rep.critical_ratio, 1.0 / p);
  const double rho = 0.5 * (1.0 + lim);
  // lim (k+1)/(k+2) >= rho  <=>  k >= (2 rho - lim) / (lim - rho)
  const int k0 = std::max(1, static_cast<int>(std::ceil((2.0 * rho - lim) / (lim - rho))));
  rep.divergence_from = k0;
  rep.divergence_rho = rho;
  rep.verdict = ExtensionVerdict::FailsToExtend;
  return rep;
}

nlohmann::json ExtensionReport::to_json() const {
  auto c2 = nlohmann::json::array();
  for (const auto& [k, v] : cond2_trace) c2.push_back({{"k", k}, {"value", v}});
  auto grid = nlohmann::json::array();
  for (const auto& r : cond4_grid) grid.push_back({{"beta", r.beta}, {"ratio", r.ratio}, {"converges", r.converges}});
  nlohmann::json j = {{"alpha", alpha},
                      {"p", p},
                      {"K", K},
                      {"phi_chi_norms", phi_chi},
                      {"cond2_trace", c2},
                      {"cond3_partial", cond3_partial},
                      {"cond4_grid", grid},
                      {"tail", tail},
                      {"sphere_ratio", sphere_ratio},
                      {"critical_ratio", critical_ratio},
                      {"counts_verified_upto", counts_verified_upto},
                      {"verdict", to_string(verdict)}};
  if (divergence_from >= 0) j["divergence"] = {{"from_k", divergence_from}, {"rho", divergence_rho}};
  return j;
}

std::string ExtensionReport::csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "k,phi_chi_norm,cond2,cond3_partial\n";
  for (std::size_t i = 0; i < phi_chi.size(); ++i)
    out << i << ',' << phi_chi[i] << ',' << cond2_trace[i].second << ',' << cond3_partial[i] << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------

ThresholdBand threshold_band(const GrowthReport& growth, double q, double p) {
  if (!(q >= 2.0) || !(p >= q) || !std::isfinite(p)) throw PreconditionViolation("threshold_band needs 2 <= q <= p < inf");
  if (growth.subexponential || growth.rate_lower <= 1.0)
    throw SubexponentialGrowth("subexponential growth: growth hypotheses unmet (R' <= 1)");
  ThresholdBand b;
  b.q = q;
  b.p = p;
  b.lower = std::pow(growth.rate_lower, -1.0 / q);
  b.upper = std::pow(growth.rate_upper, -1.0 / p);
  b.nonempty = b.lower < b.upper;
  if (b.nonempty) b.sample_alpha = 0.5 * (b.lower + b.upper);
  return b;
}

nlohmann::json ThresholdBand::to_json() const {
  nlohmann::json j = {{"q", q}, {"p", p}, {"lower", lower}, {"upper", upper}, {"nonempty", nonempty}};
  j["sample_alpha"] = sample_alpha ? nlohmann::json(*sample_alpha) : nlohmann::json(nullptr);
  return j;
}

double witness_ratio(const GroupoidModel& m, const MeasureContext& mu, double alpha, double p, int k, int C) {
  if (C < 1) throw PreconditionViolation("overlap constant must be >= 1");
  return phi_chi_norm(m, mu, alpha, p, k) / (2.0 * C * (k + 1));
}

// ---------------------------------------------------------------------------

CertificateReport certificate(const GroupoidModel& m, const MeasureContext& mu, const GrowthReport& growth,
                              double q, double p, double alpha, int K, std::optional<int> C,
                              int delta_radius, std::size_t budget) {
  CertificateReport rep;
  rep.q = q;
  rep.p = p;
  rep.alpha = alpha;
  rep.K = K;
  rep.band = threshold_band(growth, q, p);
  if (C) {
    rep.C = *C;
  } else {
    rep.delta = hyperbolicity_delta(m, UnitId{0}, delta_radius, kDefaultQuadrupleBudget, budget).delta;
    rep.C = overlap_constant(m, rep.delta, budget);
  }
  rep.in_band = alpha > rep.band.lower && alpha < rep.band.upper;
  if (!rep.in_band) {
    rep.verdict = "Inconclusive";
    rep.reason = "alpha lies outside the threshold band";
    return rep;
  }
  rep.leg_extends = extension_criteria(m, mu, alpha, p, K, kDefaultBetaGrid, budget);
  rep.leg_fails = extension_criteria(m, mu, alpha, q, K, kDefaultBetaGrid, budget);
  for (int k = 0; k <= K; ++k) {
    const double w = witness_ratio(m, mu, alpha, q, k, rep.C);
    rep.witness.emplace_back(k, w);
    if (rep.witness_k < 0 && w > 1.0) rep.witness_k = k;
  }
  rep.leg1 = rep.leg_extends->verdict == ExtensionVerdict::Extends;
  rep.leg2 = rep.leg_fails->verdict == ExtensionVerdict::FailsToExtend && rep.witness_k >= 0;
  if (rep.leg1 && rep.leg2) {
    rep.verdict = "Certified";
    rep.reason = "omega_phi_alpha extends at exponent p and its witness ratio exceeds 1 at exponent q";
  } else {
    rep.verdict = "Inconclusive";
    rep.reason = !rep.leg1 ? "extension at exponent p is not certified"
                           : "no certified obstruction at exponent q within K";
  }
  return rep;
}

nlohmann::json CertificateReport::to_json() const {
  auto wit = nlohmann::json::array();
  for (const auto& [k, w] : witness) wit.push_back({{"k", k}, {"ratio", w}});
  nlohmann::json j = {{"q", q}, {"p", p}, {"alpha", alpha}, {"K", K}, {"C", C}, {"delta", delta},
                      {"band", band.to_json()}, {"in_band", in_band}, {"leg1_extends_at_p", leg1},
                      {"leg2_fails_at_q", leg2}, {"witness", wit}, {"witness_k", witness_k},
                      {"verdict", verdict}, {"reason", reason}};
  j["leg_extends"] = leg_extends ? leg_extends->to_json() : nlohmann::json(nullptr);
  j["leg_fails"] = leg_fails ? leg_fails->to_json() : nlohmann::json(nullptr);
  return j;
}

std::string CertificateReport::witness_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "k,witness_ratio\n";
  for (const auto& [k, w] : witness) out << k << ',' << w << '\n';
  return out.str();
}

}  // namespace exo
