#pragma once

// Reduced-norm estimates: largest singular value of the left-convolution
// operator compressed to source-fiber balls, the power sequence
// |(f* f)^{*2n}|_2^{1/4n}, and the 2C(k+1)|f|_q upper bound.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "exo/conv_algebra.hpp"

namespace exo {

inline constexpr int kDefaultMaxIterations = 2000;
inline constexpr double kDefaultNormTolerance = 1e-10;
inline constexpr std::size_t kPowerSupportBudget = 10'000'000;

struct NormEstimate {
  double value = 0;
  int L = 0;
  UnitId unit;
  int iterations = 0;
  double residual = 0;
  bool converged = false;
  std::vector<std::pair<int, double>> trace;  // (L, value) over the ladder
  bool monotone = true;

  nlohmann::json to_json() const;
  std::string trace_csv() const;
};

/// Ladder {4,6,8,10,12} restricted to [1, L), followed by L.
std::vector<int> default_ladder(int L);

/// Largest singular value of M[y, y'] = f(y y'^{-1}) on B_L cap G_u for each
/// radius in `ladder` (the last entry is the reported one).
NormEstimate reduced_norm_at_unit(const CcFunction& f, UnitId u, const std::vector<int>& ladder,
                                  int max_iter = kDefaultMaxIterations, double tol = kDefaultNormTolerance,
                                  std::size_t budget = kDefaultEnumerationBudget);

NormEstimate reduced_norm_at_unit(const CcFunction& f, UnitId u, int L, int max_iter = kDefaultMaxIterations,
                                  double tol = kDefaultNormTolerance,
                                  std::size_t budget = kDefaultEnumerationBudget);

/// Maximum of reduced_norm_at_unit over every unit.
NormEstimate reduced_norm(const CcFunction& f, int L, int max_iter = kDefaultMaxIterations,
                          double tol = kDefaultNormTolerance, std::size_t budget = kDefaultEnumerationBudget);

struct PowerSeq {
  std::vector<std::pair<int, double>> entries;  // (n, value_n)
  std::vector<std::size_t> support_sizes;       // |supp (f* f)^{*2n}|
  bool truncated = false;                       // support budget hit
  int failed_at = 0;

  nlohmann::json to_json() const;
  std::string csv() const;
};

/// value_n = |(f* f)^{*2n}|_{2,mu}^{1/4n} for n = 1..n_max. Throws
/// BudgetExceeded naming n when a support exceeds `support_budget`.
PowerSeq power_sequence_norm(const CcFunction& f, int n_max, const MeasureContext& mu,
                             std::size_t support_budget = kPowerSupportBudget);

struct NormBoundReport {
  double alpha = 0;
  int k = 0;
  double p = 0;
  double q = 0;
  int C = 0;
  int L = 0;
  double lhs = 0;
  double rhs = 0;
  double slack = 0;
  bool pass = false;
  NormEstimate estimate;

  nlohmann::json to_json() const;
};

/// lhs = reduced norm estimate of phi_alpha chi_k, rhs = 2C(k+1)|phi_alpha chi_k|_q
/// with 1/p + 1/q = 1.
NormBoundReport verify_norm_bound(double alpha, int k, double p, ModelPtr m, const MeasureContext& mu, int C,
                                  int L = 8, std::size_t budget = kDefaultEnumerationBudget);

}  // namespace exo
