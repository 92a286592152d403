#pragma once

// Extension criteria for omega_{phi_alpha} on the L^p_mu completion,
// threshold bands from growth rates and the two-leg separation certificate.
//
// Every verdict rests on exact sphere counts and a geometric majorant or
// minorant whose ratio is known in closed form; numerical partial sums are
// reported but never decide anything.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "exo/groupoid_model.hpp"
#include "exo/metric.hpp"

namespace exo {

enum class ExtensionVerdict { Extends, FailsToExtend, Inconclusive };
std::string to_string(ExtensionVerdict v);

struct BetaRow {
  double beta = 0;
  double ratio = 0;       // tail ratio of sum_k |W_k| (alpha beta)^{kp}
  bool converges = false; // certified by a geometric majorant (or a finite sum)
};

struct ExtensionReport {
  double alpha = 0;
  double p = 0;
  int K = 0;
  std::vector<double> phi_chi;                       // |phi_alpha chi_k|_p, k = 0..K
  std::vector<std::pair<int, double>> cond2_trace;   // (k, |phi_alpha chi_k|_p / (k+1))
  std::vector<double> cond3_partial;                 // partial sums up to k
  std::vector<BetaRow> cond4_grid;
  std::string tail;          // "finite", "geometric" or "unknown"
  double sphere_ratio = 0;   // exact |W_{k+1}| / |W_k| on the tail
  double critical_ratio = 0; // sphere_ratio * alpha^p, the beta -> 1 limit
  int divergence_from = -1;  // k0 with cond2 ratios >= rho > 1 from k0 on
  double divergence_rho = 0;
  int counts_verified_upto = -1;  // spheres enumerated against the closed form
  ExtensionVerdict verdict = ExtensionVerdict::Inconclusive;

  nlohmann::json to_json() const;
  std::string csv() const;
};

inline const std::vector<double> kDefaultBetaGrid{0.9, 0.99, 0.999};

/// K default: 64 for free backends, 16 for finite ones.
int default_extension_horizon(const GroupoidModel& m);

/// |phi_alpha chi_k|_p = alpha^k (sum_u mu(u) |W_k cap G^u|)^{1/p} from
/// exact counts.
double phi_chi_norm(const GroupoidModel& m, const MeasureContext& mu, double alpha, double p, int k);

ExtensionReport extension_criteria(const GroupoidModel& m, const MeasureContext& mu, double alpha, double p,
                                   int K, const std::vector<double>& beta_grid = kDefaultBetaGrid,
                                   std::size_t budget = kDefaultEnumerationBudget);

struct ThresholdBand {
  double q = 0;
  double p = 0;
  double lower = 0;  // rate_lower^{-1/q}
  double upper = 0;  // rate_upper^{-1/p}
  bool nonempty = false;
  std::optional<double> sample_alpha;

  nlohmann::json to_json() const;
};

/// Throws SubexponentialGrowth when the lower growth rate is <= 1.
ThresholdBand threshold_band(const GrowthReport& growth, double q, double p);

/// |phi_alpha chi_k|_p / (2C(k+1)).
double witness_ratio(const GroupoidModel& m, const MeasureContext& mu, double alpha, double p, int k, int C);

struct CertificateReport {
  double q = 0;
  double p = 0;
  double alpha = 0;
  int K = 0;
  int C = 0;
  double delta = 0;
  ThresholdBand band;
  bool in_band = false;
  std::optional<ExtensionReport> leg_extends;   // exponent p
  std::optional<ExtensionReport> leg_fails;     // exponent q
  std::vector<std::pair<int, double>> witness;  // (k, witness_ratio) for exponent q
  int witness_k = -1;                           // first k with ratio > 1
  bool leg1 = false;
  bool leg2 = false;
  std::string verdict;  // "Certified" or "Inconclusive"
  std::string reason;

  bool certified() const { return verdict == "Certified"; }
  nlohmann::json to_json() const;
  std::string witness_csv() const;
};

/// C is taken from the overlap constant at the measured delta when not given.
CertificateReport certificate(const GroupoidModel& m, const MeasureContext& mu, const GrowthReport& growth,
                              double q, double p, double alpha, int K, std::optional<int> C = std::nullopt,
                              int delta_radius = 3, std::size_t budget = kDefaultEnumerationBudget);

}  // namespace exo
