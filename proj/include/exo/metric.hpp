#pragma once

// Word length, fiber Cayley metrics, growth statistics, four-point
// hyperbolicity and the convolution band inequality.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "exo/conv_algebra.hpp"
#include "exo/groupoid_model.hpp"

namespace exo {

inline constexpr std::uint64_t kDefaultQuadrupleBudget = 100'000'000;

/// l_S: elements are stored in geodesic normal form, so this is the word size.
inline int length(const GroupoidElement& g) { return static_cast<int>(g.word.size()); }

/// d_{r(g)}(g, h) = l_S(g^{-1} h). Throws PreconditionViolation when the
/// ranges differ.
int fiber_distance(const GroupoidModel& m, const GroupoidElement& g, const GroupoidElement& h);

struct GrowthRow {
  int k = 0;
  double sup_sphere = 0;  // sup_u |W_k cap G^u|
  double inf_sphere = 0;
  double inf_ball = 0;    // inf_u |B_k cap G^u|
};

/// Sphere/ball statistics with certified constants on [k_min, K]:
///   sup_sphere(k) <= R^k   and   inf_ball(k) >= D * R_prime^k.
/// `rate_upper`/`rate_lower` are the exponential growth rates used for
/// threshold bands: the exact common ratio when the sphere counts are
/// exactly geometric on the fit range, otherwise the certified R and R'.
struct GrowthReport {
  int k_min = 1;
  int K = 1;
  std::vector<GrowthRow> rows;  // k = 0..K
  double R = 0;
  double R_prime = 0;
  double D = 0;
  bool exact_geometric = false;
  double rate_upper = 0;
  double rate_lower = 0;
  bool subexponential = false;
  bool sampled = false;
  std::vector<UnitId> units;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

GrowthReport growth_stats(const GroupoidModel& m, int K, int k_min,
                          std::size_t budget = kDefaultEnumerationBudget, std::uint64_t seed = 0);

struct DeltaEstimate {
  double delta = 0;
  int radius = 0;
  std::vector<UnitId> units;
  bool exhaustive = false;
  std::uint64_t quadruples = 0;  // unordered 4-subsets examined

  nlohmann::json to_json() const;
};

/// Smallest delta with d(x,y)+d(z,w) <= max(d(x,z)+d(y,w), d(x,w)+d(y,z)) + delta
/// for all quadruples in B_radius cap G^u.
DeltaEstimate hyperbolicity_delta(const GroupoidModel& m, UnitId u, int radius,
                                  std::uint64_t quadruple_budget = kDefaultQuadrupleBudget,
                                  std::size_t budget = kDefaultEnumerationBudget);

/// Maximum over units_for_statistics(); exhaustive only when no sampling.
DeltaEstimate hyperbolicity_delta_all(const GroupoidModel& m, int radius, std::uint64_t seed = 0,
                                      std::uint64_t quadruple_budget = kDefaultQuadrupleBudget,
                                      std::size_t budget = kDefaultEnumerationBudget);

/// C = sup_u |B_{ceil(2 delta + 1)} cap G^u|.
int overlap_constant(const GroupoidModel& m, double delta,
                     std::size_t budget = kDefaultEnumerationBudget);

struct BandRow {
  int m = 0;
  double mass = 0;   // |(f*g) chi_m|_{l^1(G^u)}
  double ratio = 0;  // mass / |f|_{l^1(G^u)}
  bool in_band = false;
  bool ok = false;
};

struct BandReport {
  int k = 0;
  int n = 0;
  UnitId unit;
  int C = 0;
  double f_l1 = 0;
  std::vector<BandRow> rows;
  bool support_ok = true;
  bool bound_ok = true;

  bool pass() const { return support_ok && bound_ok; }
  nlohmann::json to_json() const;
};

/// Relative slack allowed on the l^1 bound for floating-point summation.
inline constexpr double kBandRelativeSlack = 1e-12;

/// Checks (f*g) chi_m = 0 outside |k-n| <= m <= k+n and
/// |(f*g) chi_m|_{l^1(G^u)} <= C |f|_{l^1(G^u)} inside. Requires
/// supp f in W_k, supp g in W_n and |g| <= 1 (PreconditionViolation otherwise).
BandReport band_check(const CcFunction& f, const CcFunction& g, int k, int n, UnitId u, int C);

}  // namespace exo
