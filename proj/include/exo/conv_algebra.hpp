#pragma once

// The convolution *-algebra C_c(G) of a groupoid model: sparse finitely
// supported complex functions with convolution, involution, the I-norm and
// the measure-weighted fiberwise L^p norms.

#include <complex>
#include <functional>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "exo/groupoid_model.hpp"

namespace exo {

using Complex = std::complex<double>;

class CcFunction {
 public:
  using Map = std::unordered_map<GroupoidElement, Complex, GroupoidElementHash>;

  explicit CcFunction(ModelPtr model) : model_(std::move(model)) {}

  static CcFunction delta(ModelPtr model, const GroupoidElement& g, Complex c = 1.0);
  /// Indicator of a set of elements.
  static CcFunction indicator(ModelPtr model, const std::vector<GroupoidElement>& set);
  /// chi_{W_k}: indicator of all length-k elements over every unit.
  static CcFunction sphere_indicator(ModelPtr model, int k,
                                     std::size_t budget = kDefaultEnumerationBudget);
  /// chi_{G^(0)}, the multiplicative identity.
  static CcFunction unit_indicator(ModelPtr model);

  const ModelPtr& model() const noexcept { return model_; }
  const GroupoidModel& groupoid() const noexcept { return *model_; }

  /// Exact zeros are removed; any other value is stored as given.
  void set(const GroupoidElement& g, Complex v);
  void add(const GroupoidElement& g, Complex v);
  Complex at(const GroupoidElement& g) const;

  std::size_t support_size() const noexcept { return values_.size(); }
  bool is_zero() const noexcept { return values_.empty(); }
  const Map& values() const noexcept { return values_; }

  /// Entries sorted by (unit, shortlex word); the serialization order.
  std::vector<std::pair<GroupoidElement, Complex>> sorted_entries() const;

  CcFunction scaled(Complex c) const;
  /// x -> f(x) * w(x)
  CcFunction pointwise(const std::function<Complex(const GroupoidElement&)>& w) const;

  friend CcFunction operator+(const CcFunction& a, const CcFunction& b);
  friend CcFunction operator-(const CcFunction& a, const CcFunction& b);
  friend CcFunction convolve(const CcFunction& f, const CcFunction& g);
  friend CcFunction involution(const CcFunction& f);

 private:
  ModelPtr model_;
  Map values_;
};

/// (f*g)(x) = sum over x = ab with s(a) = r(b) of f(a) g(b).
CcFunction convolve(const CcFunction& f, const CcFunction& g);
/// f*(x) = conj f(x^{-1}).
CcFunction involution(const CcFunction& f);
/// Drops entries with |v| < threshold. The only place near-zeros are removed.
CcFunction prune(const CcFunction& f, double threshold = 1e-15);

/// max over units of the l^1 fiber sums along G^u and along G_u.
double i_norm(const CcFunction& f);

/// l^1 norm of f restricted to the range fiber G^u.
double fiber_l1(const CcFunction& f, UnitId u);

struct LpValue {
  double value = 0.0;
  double p = 1.0;
};

/// |f|_p = ( sum_u mu(u) sum_{x in G^u} |f(x)|^p )^{1/p}.
LpValue lp_norm(const CcFunction& f, double p, const MeasureContext& mu);

/// omega_phi(f) = sum_u mu(u) sum_{x in G^u} f(x) phi(x).
Complex omega_pairing(const CcFunction& f,
                      const std::function<Complex(const GroupoidElement&)>& phi,
                      const MeasureContext& mu);

nlohmann::json function_to_json(const CcFunction& f);
CcFunction function_from_json(ModelPtr model, const nlohmann::json& j);

}  // namespace exo
