#pragma once

// Finite-truncation models of etale groupoids: action groupoids X x| Gamma
// over a finite unit space X, with Gamma a free group or a finite group
// given by its multiplication table. The one-unit model is the group itself.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "exo/errors.hpp"

namespace exo {

inline constexpr std::size_t kDefaultEnumerationBudget = 5'000'000;

/// Generator i is encoded as +(i+1), its formal inverse as -(i+1).
using Letter = signed char;

inline Letter inverse_letter(Letter l) { return static_cast<Letter>(-l); }

/// Position of a letter in the enumeration order a < A < b < B < ...
inline int letter_rank(Letter l) { return l > 0 ? 2 * (l - 1) : 2 * (-l - 1) + 1; }

inline Letter letter_from_rank(int rank) {
  return static_cast<Letter>(rank % 2 == 0 ? rank / 2 + 1 : -(rank / 2 + 1));
}

/// A word over the symmetric generating set. Always stored in normal form
/// for its backend (freely reduced, or the shortlex geodesic of a finite
/// group element), so its size is the word length l_S.
class Word {
 public:
  Word() = default;
  explicit Word(std::string letters) : letters_(std::move(letters)) {}

  std::size_t size() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return static_cast<Letter>(letters_[i]); }
  Letter back() const { return static_cast<Letter>(letters_.back()); }
  const std::string& raw() const noexcept { return letters_; }

  void push_back(Letter l) { letters_.push_back(static_cast<char>(l)); }
  void pop_back() { letters_.pop_back(); }

  friend bool operator==(const Word&, const Word&) = default;

  /// Shortlex in letter_rank order.
  friend std::strong_ordering operator<=>(const Word& a, const Word& b);

 private:
  std::string letters_;
};

struct UnitId {
  std::uint32_t value = 0;
  friend auto operator<=>(const UnitId&, const UnitId&) = default;
};

/// (x, gamma): range x, source x . gamma.
struct GroupoidElement {
  UnitId range;
  Word word;

  std::size_t length() const noexcept { return word.size(); }
  friend bool operator==(const GroupoidElement&, const GroupoidElement&) = default;
  friend std::strong_ordering operator<=>(const GroupoidElement& a, const GroupoidElement& b);
};

struct GroupoidElementHash {
  std::size_t operator()(const GroupoidElement& g) const noexcept {
    std::size_t h = std::hash<std::string>{}(g.word.raw());
    return h ^ (static_cast<std::size_t>(g.range.value) * 0x9e3779b97f4a7c15ULL);
  }
};

struct FreeGroupSpec {
  int rank = 0;
};

struct FiniteGroupSpec {
  std::vector<std::vector<int>> table;  // table[g][h] = g*h
  std::vector<int> inverse;
  int identity = 0;
  std::vector<int> generators;  // element ids of the generating set F
};

class GroupBackend {
 public:
  static GroupBackend free_group(int rank);
  static GroupBackend finite_group(FiniteGroupSpec spec);

  bool is_free() const noexcept { return std::holds_alternative<FreeGroupSpec>(spec_); }
  int generator_count() const noexcept { return generators_; }
  int letter_count() const noexcept { return 2 * generators_; }
  const std::variant<FreeGroupSpec, FiniteGroupSpec>& spec() const noexcept { return spec_; }

  /// Normal form of an arbitrary letter sequence.
  Word normalize(const Word& any) const;
  Word multiply(const Word& a, const Word& b) const;
  Word invert(const Word& w) const;

  /// Exact |{gamma : l_S(gamma) = k}|. Double because free-group spheres
  /// overflow 64 bits well inside the ranges the analyzer uses.
  double sphere_size(int k) const;
  /// All group elements of length k in shortlex order.
  std::vector<Word> sphere(int k) const;
  /// Largest element length; nullopt for free groups.
  std::optional<int> diameter() const;

  /// Finite backends only: element id of a normal-form word.
  int element_id(const Word& w) const;
  const Word& element_word(int id) const { return words_.at(static_cast<std::size_t>(id)); }
  int order() const noexcept { return static_cast<int>(words_.size()); }

 private:
  GroupBackend() = default;
  int evaluate(const Word& w) const;
  int letter_element(Letter l) const;

  std::variant<FreeGroupSpec, FiniteGroupSpec> spec_;
  int generators_ = 0;
  // Finite backends: shortlex geodesic per element and BFS layers.
  std::vector<Word> words_;
  std::vector<std::vector<int>> layers_;
};

/// Immutable after construction; share through ModelPtr.
class GroupoidModel {
 public:
  /// `action[i][x]` = x . g_i (right action of generator i on unit x).
  GroupoidModel(GroupBackend backend, std::uint32_t units,
                std::vector<std::vector<std::uint32_t>> action);

  const GroupBackend& backend() const noexcept { return backend_; }
  std::uint32_t unit_count() const noexcept { return units_; }
  bool is_group() const noexcept { return units_ == 1; }

  /// x . w
  UnitId act(UnitId x, const Word& w) const;
  UnitId act(UnitId x, Letter l) const {
    return UnitId{letter_perm_[static_cast<std::size_t>(letter_rank(l))][x.value]};
  }
  UnitId range(const GroupoidElement& g) const { return g.range; }
  UnitId source(const GroupoidElement& g) const { return act(g.range, g.word); }

  const std::vector<std::vector<std::uint32_t>>& generator_action() const noexcept {
    return action_;
  }

  bool contains(const GroupoidElement& g) const;

 private:
  GroupBackend backend_;
  std::uint32_t units_;
  std::vector<std::vector<std::uint32_t>> action_;
  std::vector<std::vector<std::uint32_t>> letter_perm_;  // indexed by letter_rank
};

using ModelPtr = std::shared_ptr<const GroupoidModel>;

ModelPtr build_model(GroupBackend backend, std::uint32_t units,
                     std::vector<std::vector<std::uint32_t>> action);

/// Rank-d free group as a one-unit groupoid.
ModelPtr free_group_model(int rank);

/// F_d acting on `units` points by seeded uniformly random permutations.
ModelPtr random_free_action_model(int rank, std::uint32_t units, std::uint64_t seed);

/// Cyclic group Z_n with generator 1 (n >= 2).
ModelPtr cyclic_group_model(int n);

GroupoidElement unit_element(UnitId u);
GroupoidElement compose(const GroupoidModel& m, const GroupoidElement& g, const GroupoidElement& h);
GroupoidElement inverse(const GroupoidModel& m, const GroupoidElement& g);

/// W_k intersected with the range fiber G^u, shortlex order.
std::vector<GroupoidElement> enumerate_sphere(const GroupoidModel& m, UnitId u, int k,
                                              std::size_t budget = kDefaultEnumerationBudget);
/// B_k intersected with G^u: spheres 0..k concatenated.
std::vector<GroupoidElement> enumerate_ball(const GroupoidModel& m, UnitId u, int k,
                                            std::size_t budget = kDefaultEnumerationBudget);
/// B_k intersected with the source fiber G_u.
std::vector<GroupoidElement> enumerate_source_ball(const GroupoidModel& m, UnitId u, int k,
                                                   std::size_t budget = kDefaultEnumerationBudget);

/// Exact |B_k cap G^u|; independent of u for action groupoids.
double ball_size(const GroupoidModel& m, int k);

// Labels: generator i is 'a'+i, its inverse 'A'+i; words are space separated.
std::string letter_label(Letter l);
std::string format_word(const Word& w);
Word parse_word(const GroupBackend& backend, std::string_view text);

ModelPtr model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const GroupoidModel& m);
/// FNV-1a over the canonical JSON dump, hex encoded.
std::string model_digest(const GroupoidModel& m);

nlohmann::json element_to_json(const GroupoidElement& g);
GroupoidElement element_from_json(const GroupoidModel& m, const nlohmann::json& j);

/// Probability weights on the unit space. Construction checks normalization
/// and invariance under every generator permutation, so nu = nu^{-1} and
/// the modular function is identically 1.
class MeasureContext {
 public:
  static MeasureContext uniform(const GroupoidModel& m);
  MeasureContext(const GroupoidModel& m, std::vector<double> weights);

  double weight(UnitId u) const { return weights_[u.value]; }
  const std::vector<double>& weights() const noexcept { return weights_; }

 private:
  explicit MeasureContext(std::vector<double> weights) : weights_(std::move(weights)) {}
  std::vector<double> weights_;
};

/// Units to visit for per-unit statistics: all when |X| <= 64, otherwise a
/// seeded sample of 64 (sorted).
std::vector<UnitId> units_for_statistics(const GroupoidModel& m, std::uint64_t seed,
                                         bool* sampled = nullptr);

}  // namespace exo
