#pragma once

// Positive definite functions on a groupoid model: the exponential-length
// family phi_alpha = alpha^{l_S}, the Haagerup witnesses F_n = e^{-l_S/n},
// explicit tables, Gram-matrix PSD checks and a truncated GNS construction.

#include <complex>
#include <unordered_map>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "exo/conv_algebra.hpp"
#include "exo/groupoid_model.hpp"

namespace exo {

inline constexpr double kDefaultPsdTolerance = 1e-9;
inline constexpr double kDefaultNullTolerance = 1e-10;

struct ExpLength {
  double alpha = 1.0;  // in (0, 1]
};

struct HaagerupWitness {
  int n = 1;
};

/// Values on the ball of radius `radius` (over all units); missing entries
/// inside the ball are 0. Hermitian symmetry F(x^{-1}) = conj F(x) is
/// checked at construction.
class TableKernel {
 public:
  TableKernel(const GroupoidModel& m,
              std::unordered_map<GroupoidElement, Complex, GroupoidElementHash> values);

  int radius() const noexcept { return radius_; }
  Complex at(const GroupoidElement& g) const;
  const auto& values() const noexcept { return values_; }

 private:
  std::unordered_map<GroupoidElement, Complex, GroupoidElementHash> values_;
  int radius_ = 0;
};

class Kernel {
 public:
  using Variant = std::variant<ExpLength, HaagerupWitness, TableKernel>;

  static Kernel exp_length(double alpha);
  static Kernel haagerup(int n);
  static Kernel table(TableKernel t) { return Kernel(std::move(t)); }

  const Variant& variant() const noexcept { return v_; }
  Complex operator()(const GroupoidElement& g) const;
  std::string describe() const;

 private:
  explicit Kernel(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// Kernel descriptor: {"exp_length": a} | {"haagerup": n} | {"table": [...]}
Kernel kernel_from_json(const GroupoidModel& m, const nlohmann::json& j);
nlohmann::json kernel_to_json(const Kernel& k);

Complex eval_kernel(const Kernel& k, const GroupoidElement& g);

/// omega_K(f) with the kernel as weight.
Complex omega_pairing(const CcFunction& f, const Kernel& k, const MeasureContext& mu);

/// G_{ij} = F(x_i^{-1} x_j) over a tuple sharing one range unit.
Eigen::MatrixXcd gram_matrix(const GroupoidModel& m, const Kernel& k,
                             const std::vector<GroupoidElement>& tuple);

struct PsdResult {
  double min_eig = 0;
  bool pass = false;
};

PsdResult psd_check(const GroupoidModel& m, const Kernel& k, const std::vector<GroupoidElement>& tuple,
                    double tol = kDefaultPsdTolerance);

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const Eigen::MatrixXcd& h);

struct HaagerupRow {
  int n = 0;
  int k = 0;
  double sup_deviation = 0;  // sup over B_k of |1 - F_n|
  double bound = 0;          // 1 - e^{-k/n}
  bool ok = false;
};

struct HaagerupRadius {
  int n = 0;
  double eps = 0;
  int radius = 0;           // ceil(n ln(1/eps))
  double value_outside = 0; // F_n at length radius + 1
  double ball_size = 0;     // |B_radius cap G^u|, finite
  bool ok = false;
};

struct HaagerupReport {
  bool units_ok = true;         // (1) F_n = 1 on units
  bool convergence_ok = true;   // (2) deviation bounds, decreasing in n
  bool c0_ok = true;            // (3) eps-support radii
  std::vector<HaagerupRow> rows;
  std::vector<HaagerupRadius> radii;

  bool pass() const { return units_ok && convergence_ok && c0_ok; }
  nlohmann::json to_json() const;
};

HaagerupReport haagerup_witness_check(const GroupoidModel& m, const std::vector<int>& n_list,
                                      const std::vector<int>& k_list, const std::vector<double>& eps_list,
                                      std::size_t budget = kDefaultEnumerationBudget);

struct GnsData {
  UnitId unit;
  int radius = 0;
  std::vector<GroupoidElement> basis;  // B_k cap G^u, shortlex
  Eigen::MatrixXcd gram;               // gram(i, j) = F(x_i^{-1} x_j) = <delta_j, delta_i>
  Eigen::VectorXd eigenvalues;
  double null_tol = kDefaultNullTolerance;
  int null_dimension = 0;
  int quotient_dimension = 0;

  nlohmann::json to_json() const;
};

/// Pre-inner product <v, w> = w^dagger G v on finitely supported functions
/// on B_k cap G^u. Throws InvalidKernel if G has an eigenvalue below -psd_tol.
GnsData gns_build(const GroupoidModel& m, const Kernel& k, UnitId u, int radius,
                  double null_tol = kDefaultNullTolerance, double psd_tol = kDefaultPsdTolerance,
                  std::size_t budget = kDefaultEnumerationBudget);

struct GnsRepresentation {
  GnsData domain;    // radius k over G^{s(x)}
  GnsData codomain;  // radius k + |x| over G^{r(x)}
  Eigen::MatrixXcd matrix;  // delta_a -> delta_{x a}
  /// max |M^dagger G_cod M - G_dom|
  double isometry_defect() const;
};

GnsRepresentation gns_rep_matrix(const GroupoidModel& m, const Kernel& k, const GroupoidElement& x,
                                 int radius, std::size_t budget = kDefaultEnumerationBudget);

/// <pi_F(x) delta_{s(x)}, delta_{r(x)}> in the truncated GNS space; equals F(x).
Complex matrix_coeff_recovery(const GroupoidModel& m, const Kernel& k, const GroupoidElement& x,
                              int radius, std::size_t budget = kDefaultEnumerationBudget);

struct ProductCheck {
  std::vector<PsdResult> tuples;
  bool exp_length_exact = true;  // only meaningful when both are ExpLength
  double max_exp_length_error = 0;
  bool pass = true;
};

/// PSD check of the pointwise product K1*K2 on each tuple; for two
/// ExpLength kernels also compares against ExpLength(alpha*beta).
ProductCheck pointwise_product_check(const GroupoidModel& m, const Kernel& k1, const Kernel& k2,
                                     const std::vector<std::vector<GroupoidElement>>& tuples,
                                     double tol = kDefaultPsdTolerance);

}  // namespace exo
