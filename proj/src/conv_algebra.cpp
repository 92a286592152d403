#include "exo/conv_algebra.hpp"

#include <algorithm>
#include <cmath>

namespace exo {

namespace {

void require_same_model(const CcFunction& a, const CcFunction& b) {
  if (a.model() != b.model()) throw PreconditionViolation("functions belong to different models");
}

}  // namespace

CcFunction CcFunction::delta(ModelPtr model, const GroupoidElement& g, Complex c) {
  CcFunction f(std::move(model));
  f.set(g, c);
  return f;
}

CcFunction CcFunction::indicator(ModelPtr model, const std::vector<GroupoidElement>& set) {
  CcFunction f(std::move(model));
  for (const auto& g : set) f.set(g, 1.0);
  return f;
}

CcFunction CcFunction::sphere_indicator(ModelPtr model, int k, std::size_t budget) {
  CcFunction f(model);
  for (std::uint32_t x = 0; x < model->unit_count(); ++x)
    for (const auto& g : enumerate_sphere(*model, UnitId{x}, k, budget)) f.set(g, 1.0);
  return f;
}

CcFunction CcFunction::unit_indicator(ModelPtr model) {
  CcFunction f(model);
  for (std::uint32_t x = 0; x < model->unit_count(); ++x) f.set(unit_element(UnitId{x}), 1.0);
  return f;
}

void CcFunction::set(const GroupoidElement& g, Complex v) {
  if (!model_->contains(g)) throw PreconditionViolation("element does not belong to the model");
  if (v == Complex{}) {
    values_.erase(g);
    return;
  }
  values_[g] = v;
}

void CcFunction::add(const GroupoidElement& g, Complex v) {
  auto it = values_.find(g);
  if (it == values_.end()) {
    set(g, v);
    return;
  }
  it->second += v;
  if (it->second == Complex{}) values_.erase(it);
}

Complex CcFunction::at(const GroupoidElement& g) const {
  auto it = values_.find(g);
  return it == values_.end() ? Complex{} : it->second;
}

std::vector<std::pair<GroupoidElement, Complex>> CcFunction::sorted_entries() const {
  std::vector<std::pair<GroupoidElement, Complex>> out(values_.begin(), values_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

CcFunction CcFunction::scaled(Complex c) const {
  CcFunction out(model_);
  if (c == Complex{}) return out;
  out.values_.reserve(values_.size());
  for (const auto& [g, v] : values_)
    if (Complex w = v * c; w != Complex{}) out.values_.emplace(g, w);
  return out;
}

CcFunction CcFunction::pointwise(const std::function<Complex(const GroupoidElement&)>& w) const {
  CcFunction out(model_);
  out.values_.reserve(values_.size());
  for (const auto& [g, v] : values_)
    if (Complex x = v * w(g); x != Complex{}) out.values_.emplace(g, x);
  return out;
}

CcFunction operator+(const CcFunction& a, const CcFunction& b) {
  require_same_model(a, b);
  CcFunction out = a;
  for (const auto& [g, v] : b.values_) out.add(g, v);
  return out;
}

CcFunction operator-(const CcFunction& a, const CcFunction& b) { return a + b.scaled(-1.0); }

CcFunction convolve(const CcFunction& f, const CcFunction& g) {
  require_same_model(f, g);
  const GroupoidModel& m = f.groupoid();
  if (f.is_zero() || g.is_zero()) return CcFunction(f.model());

  // Composability index: g's support grouped by range unit.
  std::unordered_map<std::uint32_t, std::vector<const CcFunction::Map::value_type*>> by_range;
  for (const auto& entry : g.values()) by_range[entry.first.range.value].push_back(&entry);

  CcFunction::Map acc;
  acc.reserve(f.support_size() * std::max<std::size_t>(1, g.support_size() / by_range.size() + 1));
  for (const auto& [a, fa] : f.values()) {
    auto it = by_range.find(m.source(a).value);
    if (it == by_range.end()) continue;
    for (const auto* entry : it->second) {
      GroupoidElement ab{a.range, m.backend().multiply(a.word, entry->first.word)};
      acc[std::move(ab)] += fa * entry->second;
    }
  }
  std::erase_if(acc, [](const auto& kv) { return kv.second == Complex{}; });
  CcFunction out(f.model());
  out.values_ = std::move(acc);
  return out;
}

CcFunction involution(const CcFunction& f) {
  CcFunction out(f.model());
  out.values_.reserve(f.support_size());
  for (const auto& [g, v] : f.values()) out.values_.emplace(inverse(f.groupoid(), g), std::conj(v));
  return out;
}

CcFunction prune(const CcFunction& f, double threshold) {
  CcFunction out(f.model());
  for (const auto& [g, v] : f.values())
    if (std::abs(v) >= threshold) out.set(g, v);
  return out;
}

double i_norm(const CcFunction& f) {
  const GroupoidModel& m = f.groupoid();
  std::vector<double> by_range(m.unit_count(), 0.0), by_source(m.unit_count(), 0.0);
  for (const auto& [g, v] : f.values()) {
    by_range[g.range.value] += std::abs(v);
    by_source[m.source(g).value] += std::abs(v);
  }
  double r = *std::max_element(by_range.begin(), by_range.end());
  double s = *std::max_element(by_source.begin(), by_source.end());
  return std::max(r, s);
}

double fiber_l1(const CcFunction& f, UnitId u) {
  double total = 0.0;
  for (const auto& [g, v] : f.values())
    if (g.range == u) total += std::abs(v);
  return total;
}

LpValue lp_norm(const CcFunction& f, double p, const MeasureContext& mu) {
  if (!(p >= 1.0)) throw PreconditionViolation("lp_norm needs p >= 1");
  std::vector<double> fiber(f.groupoid().unit_count(), 0.0);
  for (const auto& [g, v] : f.values()) fiber[g.range.value] += std::pow(std::abs(v), p);
  double total = 0.0;
  for (std::uint32_t x = 0; x < fiber.size(); ++x) total += mu.weight(UnitId{x}) * fiber[x];
  return LpValue{std::pow(total, 1.0 / p), p};
}

Complex omega_pairing(const CcFunction& f,
                      const std::function<Complex(const GroupoidElement&)>& phi,
                      const MeasureContext& mu) {
  Complex total{};
  for (const auto& [g, v] : f.sorted_entries()) total += mu.weight(g.range) * v * phi(g);
  return total;
}

nlohmann::json function_to_json(const CcFunction& f) {
  auto arr = nlohmann::json::array();
  for (const auto& [g, v] : f.sorted_entries())
    arr.push_back({{"unit", g.range.value}, {"word", format_word(g.word)}, {"re", v.real()}, {"im", v.imag()}});
  return arr;
}

CcFunction function_from_json(ModelPtr model, const nlohmann::json& j) {
  if (!j.is_array()) throw InvalidModel("function JSON must be a list of entries");
  CcFunction f(model);
  for (const auto& e : j) {
    GroupoidElement g = element_from_json(*model, e);
    f.add(g, Complex{e.value("re", 0.0), e.value("im", 0.0)});
  }
  return f;
}

}  // namespace exo
