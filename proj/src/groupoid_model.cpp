#include "exo/groupoid_model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>
#include <sstream>

namespace exo {

std::strong_ordering operator<=>(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() <=> b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    int ra = letter_rank(a[i]);
    int rb = letter_rank(b[i]);
    if (ra != rb) return ra <=> rb;
  }
  return std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const GroupoidElement& a, const GroupoidElement& b) {
  if (auto c = a.range <=> b.range; c != 0) return c;
  return a.word <=> b.word;
}

// ---------------------------------------------------------------------------
// GroupBackend

GroupBackend GroupBackend::free_group(int rank) {
  if (rank < 1 || rank > 26) throw InvalidModel("free group rank must be in [1, 26]");
  GroupBackend b;
  b.spec_ = FreeGroupSpec{rank};
  b.generators_ = rank;
  return b;
}

GroupBackend GroupBackend::finite_group(FiniteGroupSpec spec) {
  const int n = static_cast<int>(spec.table.size());
  if (n < 1) throw InvalidModel("finite group table is empty");
  if (n > 512) throw InvalidModel("finite group order above 512 is not supported");
  for (const auto& row : spec.table) {
    if (static_cast<int>(row.size()) != n) throw InvalidModel("multiplication table is not square");
    for (int v : row)
      if (v < 0 || v >= n) throw InvalidModel("multiplication table entry out of range");
  }
  const auto& t = spec.table;
  if (spec.identity < 0 || spec.identity >= n) throw InvalidModel("identity id out of range");
  for (int g = 0; g < n; ++g)
    if (t[spec.identity][g] != g || t[g][spec.identity] != g)
      throw InvalidModel("identity id is not a two-sided identity");
  if (spec.inverse.empty()) {
    spec.inverse.assign(n, -1);
    for (int g = 0; g < n; ++g)
      for (int h = 0; h < n; ++h)
        if (t[g][h] == spec.identity) spec.inverse[g] = h;
  }
  if (static_cast<int>(spec.inverse.size()) != n) throw InvalidModel("inverse table has wrong size");
  for (int g = 0; g < n; ++g) {
    int gi = spec.inverse[g];
    if (gi < 0 || gi >= n || t[g][gi] != spec.identity || t[gi][g] != spec.identity)
      throw InvalidModel("inverse table inconsistent at element " + std::to_string(g));
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (t[t[a][b]][c] != t[a][t[b][c]])
          throw InvalidModel("multiplication table is not associative");
  if (spec.generators.empty()) throw InvalidModel("finite group needs at least one generator");
  if (spec.generators.size() > 26) throw InvalidModel("at most 26 generators are supported");
  for (int g : spec.generators)
    if (g < 0 || g >= n) throw InvalidModel("generator id out of range");

  GroupBackend b;
  b.generators_ = static_cast<int>(spec.generators.size());
  b.spec_ = std::move(spec);
  const auto& fs = std::get<FiniteGroupSpec>(b.spec_);

  // Breadth-first search from the identity. Parents are processed in
  // shortlex order and letters in rank order, so the first word found for an
  // element is its shortlex geodesic.
  b.words_.assign(n, Word{});
  std::vector<bool> seen(n, false);
  seen[fs.identity] = true;
  std::vector<int> layer{fs.identity};
  while (!layer.empty()) {
    b.layers_.push_back(layer);
    std::vector<int> next;
    for (int g : layer) {
      for (int r = 0; r < b.letter_count(); ++r) {
        Letter l = letter_from_rank(r);
        int h = fs.table[g][b.letter_element(l)];
        if (seen[h]) continue;
        seen[h] = true;
        Word w = b.words_[g];
        w.push_back(l);
        b.words_[h] = std::move(w);
        next.push_back(h);
      }
    }
    layer = std::move(next);
  }
  if (std::count(seen.begin(), seen.end(), true) != n)
    throw InvalidModel("generators do not generate the finite group");
  return b;
}

int GroupBackend::letter_element(Letter l) const {
  const auto& fs = std::get<FiniteGroupSpec>(spec_);
  int g = fs.generators[static_cast<std::size_t>(std::abs(l) - 1)];
  return l > 0 ? g : fs.inverse[g];
}

int GroupBackend::evaluate(const Word& w) const {
  const auto& fs = std::get<FiniteGroupSpec>(spec_);
  int id = fs.identity;
  for (std::size_t i = 0; i < w.size(); ++i) id = fs.table[id][letter_element(w[i])];
  return id;
}

int GroupBackend::element_id(const Word& w) const {
  if (is_free()) throw Error("element_id is defined for finite backends only");
  return evaluate(w);
}

Word GroupBackend::normalize(const Word& any) const {
  for (std::size_t i = 0; i < any.size(); ++i) {
    int g = std::abs(any[i]);
    if (any[i] == 0 || g > generators_) throw InvalidModel("letter outside the generating set");
  }
  if (!is_free()) return words_[evaluate(any)];
  Word out;
  for (std::size_t i = 0; i < any.size(); ++i) {
    if (!out.empty() && out.back() == inverse_letter(any[i]))
      out.pop_back();
    else
      out.push_back(any[i]);
  }
  return out;
}

Word GroupBackend::multiply(const Word& a, const Word& b) const {
  if (!is_free()) {
    const auto& fs = std::get<FiniteGroupSpec>(spec_);
    return words_[fs.table[evaluate(a)][evaluate(b)]];
  }
  // Both operands are reduced; cancellation only happens at the junction.
  std::size_t cancel = 0;
  while (cancel < a.size() && cancel < b.size() &&
         a[a.size() - 1 - cancel] == inverse_letter(b[cancel]))
    ++cancel;
  std::string s;
  s.reserve(a.size() + b.size() - 2 * cancel);
  s.append(a.raw(), 0, a.size() - cancel);
  s.append(b.raw(), cancel, std::string::npos);
  return Word(std::move(s));
}

Word GroupBackend::invert(const Word& w) const {
  if (!is_free()) {
    const auto& fs = std::get<FiniteGroupSpec>(spec_);
    return words_[fs.inverse[evaluate(w)]];
  }
  std::string s(w.size(), '\0');
  for (std::size_t i = 0; i < w.size(); ++i)
    s[w.size() - 1 - i] = static_cast<char>(inverse_letter(w[i]));
  return Word(std::move(s));
}

double GroupBackend::sphere_size(int k) const {
  if (k < 0) return 0.0;
  if (is_free()) {
    if (k == 0) return 1.0;
    const double two_d = 2.0 * generators_;
    return two_d * std::pow(two_d - 1.0, k - 1);
  }
  if (k >= static_cast<int>(layers_.size())) return 0.0;
  return static_cast<double>(layers_[static_cast<std::size_t>(k)].size());
}

std::vector<Word> GroupBackend::sphere(int k) const {
  std::vector<Word> out;
  if (k < 0) return out;
  if (!is_free()) {
    if (k < static_cast<int>(layers_.size()))
      for (int id : layers_[static_cast<std::size_t>(k)]) out.push_back(words_[id]);
    return out;
  }
  out.reserve(static_cast<std::size_t>(sphere_size(k)));
  Word w;
  const int letters = letter_count();
  // Depth-first over reduced words, letters in rank order.
  std::function<void()> rec = [&]() {
    if (static_cast<int>(w.size()) == k) {
      out.push_back(w);
      return;
    }
    for (int r = 0; r < letters; ++r) {
      Letter l = letter_from_rank(r);
      if (!w.empty() && w.back() == inverse_letter(l)) continue;
      w.push_back(l);
      rec();
      w.pop_back();
    }
  };
  rec();
  return out;
}

std::optional<int> GroupBackend::diameter() const {
  if (is_free()) return std::nullopt;
  return static_cast<int>(layers_.size()) - 1;
}

// ---------------------------------------------------------------------------
// GroupoidModel

GroupoidModel::GroupoidModel(GroupBackend backend, std::uint32_t units,
                             std::vector<std::vector<std::uint32_t>> action)
    : backend_(std::move(backend)), units_(units), action_(std::move(action)) {
  if (units_ == 0) throw InvalidModel("unit space must be nonempty");
  const auto d = static_cast<std::size_t>(backend_.generator_count());
  if (action_.empty() && units_ == 1) action_.assign(d, std::vector<std::uint32_t>{0});
  if (action_.size() != d)
    throw InvalidModel("action needs one permutation per generator (got " +
                       std::to_string(action_.size()) + ", expected " + std::to_string(d) + ")");
  letter_perm_.assign(2 * d, {});
  for (std::size_t i = 0; i < d; ++i) {
    const auto& p = action_[i];
    if (p.size() != units_) throw InvalidModel("permutation length differs from unit count");
    std::vector<std::uint32_t> inv(units_, units_);
    for (std::uint32_t x = 0; x < units_; ++x) {
      if (p[x] >= units_ || inv[p[x]] != units_)
        throw InvalidModel("action of generator " + letter_label(static_cast<Letter>(i + 1)) +
                           " is not a bijection");
      inv[p[x]] = x;
    }
    letter_perm_[static_cast<std::size_t>(letter_rank(static_cast<Letter>(i + 1)))] = p;
    letter_perm_[static_cast<std::size_t>(letter_rank(static_cast<Letter>(-(int)i - 1)))] = inv;
  }
  if (!backend_.is_free()) {
    // x.(gh) = (x.g).h for every pair of group elements.
    const auto& fs = std::get<FiniteGroupSpec>(backend_.spec());
    const int n = backend_.order();
    std::vector<std::vector<std::uint32_t>> perm(static_cast<std::size_t>(n));
    for (int g = 0; g < n; ++g) {
      auto& pg = perm[static_cast<std::size_t>(g)];
      pg.resize(units_);
      for (std::uint32_t x = 0; x < units_; ++x) pg[x] = act(UnitId{x}, backend_.element_word(g)).value;
    }
    for (int g = 0; g < n; ++g)
      for (int h = 0; h < n; ++h) {
        const auto& pgh = perm[static_cast<std::size_t>(fs.table[g][h])];
        for (std::uint32_t x = 0; x < units_; ++x)
          if (pgh[x] != perm[static_cast<std::size_t>(h)][perm[static_cast<std::size_t>(g)][x]])
            throw InvalidModel("action is not a homomorphism of the finite group");
      }
  }
}

UnitId GroupoidModel::act(UnitId x, const Word& w) const {
  for (std::size_t i = 0; i < w.size(); ++i) x = act(x, w[i]);
  return x;
}

bool GroupoidModel::contains(const GroupoidElement& g) const {
  if (g.range.value >= units_) return false;
  try {
    return backend_.normalize(g.word) == g.word;
  } catch (const InvalidModel&) {
    return false;
  }
}

ModelPtr build_model(GroupBackend backend, std::uint32_t units,
                     std::vector<std::vector<std::uint32_t>> action) {
  return std::make_shared<const GroupoidModel>(std::move(backend), units, std::move(action));
}

ModelPtr free_group_model(int rank) { return build_model(GroupBackend::free_group(rank), 1, {}); }

ModelPtr random_free_action_model(int rank, std::uint32_t units, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::uint32_t>> action;
  for (int i = 0; i < rank; ++i) {
    std::vector<std::uint32_t> p(units);
    std::iota(p.begin(), p.end(), 0u);
    std::shuffle(p.begin(), p.end(), rng);
    action.push_back(std::move(p));
  }
  return build_model(GroupBackend::free_group(rank), units, std::move(action));
}

ModelPtr cyclic_group_model(int n) {
  if (n < 2) throw InvalidModel("cyclic group order must be at least 2");
  FiniteGroupSpec spec;
  spec.table.assign(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) spec.table[a][b] = (a + b) % n;
  spec.identity = 0;
  spec.generators = {1};
  return build_model(GroupBackend::finite_group(std::move(spec)), 1, {});
}

// ---------------------------------------------------------------------------
// Groupoid operations

GroupoidElement unit_element(UnitId u) { return GroupoidElement{u, Word{}}; }

GroupoidElement compose(const GroupoidModel& m, const GroupoidElement& g, const GroupoidElement& h) {
  if (m.source(g) != h.range)
    throw NotComposable("source(g) = " + std::to_string(m.source(g).value) +
                        " but range(h) = " + std::to_string(h.range.value));
  return GroupoidElement{g.range, m.backend().multiply(g.word, h.word)};
}

GroupoidElement inverse(const GroupoidModel& m, const GroupoidElement& g) {
  return GroupoidElement{m.source(g), m.backend().invert(g.word)};
}

std::vector<GroupoidElement> enumerate_sphere(const GroupoidModel& m, UnitId u, int k,
                                              std::size_t budget) {
  if (k < 0) throw PreconditionViolation("sphere radius must be nonnegative");
  if (u.value >= m.unit_count()) throw PreconditionViolation("unit id out of range");
  const double need = m.backend().sphere_size(k);
  if (need > static_cast<double>(budget)) throw BudgetExceeded("enumerate_sphere", need, budget);
  std::vector<GroupoidElement> out;
  for (auto& w : m.backend().sphere(k)) out.push_back(GroupoidElement{u, std::move(w)});
  return out;
}

double ball_size(const GroupoidModel& m, int k) {
  double total = 0.0;
  for (int j = 0; j <= k; ++j) total += m.backend().sphere_size(j);
  return total;
}

std::vector<GroupoidElement> enumerate_ball(const GroupoidModel& m, UnitId u, int k,
                                            std::size_t budget) {
  if (k < 0) throw PreconditionViolation("ball radius must be nonnegative");
  const double need = ball_size(m, k);
  if (need > static_cast<double>(budget)) throw BudgetExceeded("enumerate_ball", need, budget);
  std::vector<GroupoidElement> out;
  out.reserve(static_cast<std::size_t>(need));
  for (int j = 0; j <= k; ++j)
    for (auto& g : enumerate_sphere(m, u, j, budget)) out.push_back(std::move(g));
  return out;
}

std::vector<GroupoidElement> enumerate_source_ball(const GroupoidModel& m, UnitId u, int k,
                                                   std::size_t budget) {
  auto ball = enumerate_ball(m, u, k, budget);
  for (auto& g : ball) g = inverse(m, g);
  return ball;
}

// ---------------------------------------------------------------------------
// Text and JSON

std::string letter_label(Letter l) {
  int i = std::abs(l) - 1;
  return std::string(1, static_cast<char>((l > 0 ? 'a' : 'A') + i));
}

std::string format_word(const Word& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ' ';
    s += letter_label(w[i]);
  }
  return s;
}

Word parse_word(const GroupBackend& backend, std::string_view text) {
  Word raw;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) {
    if (tok.size() != 1) throw InvalidModel("bad letter '" + tok + "' in word");
    char c = tok[0];
    int i;
    Letter l;
    if (c >= 'a' && c <= 'z') {
      i = c - 'a';
      l = static_cast<Letter>(i + 1);
    } else if (c >= 'A' && c <= 'Z') {
      i = c - 'A';
      l = static_cast<Letter>(-(i + 1));
    } else {
      throw InvalidModel("bad letter '" + tok + "' in word");
    }
    if (i >= backend.generator_count()) throw InvalidModel("letter '" + tok + "' is not a generator");
    raw.push_back(l);
  }
  return backend.normalize(raw);
}

ModelPtr model_from_json(const nlohmann::json& j) {
  try {
    const auto& b = j.at("backend");
    GroupBackend backend = [&] {
      if (b.contains("free")) return GroupBackend::free_group(b.at("free").get<int>());
      if (b.contains("finite")) {
        const auto& f = b.at("finite");
        FiniteGroupSpec spec;
        spec.table = f.at("table").get<std::vector<std::vector<int>>>();
        if (f.contains("inverse")) spec.inverse = f.at("inverse").get<std::vector<int>>();
        spec.identity = f.value("identity", 0);
        spec.generators = f.at("generators").get<std::vector<int>>();
        return GroupBackend::finite_group(std::move(spec));
      }
      throw InvalidModel("backend must be {\"free\": d} or {\"finite\": {...}}");
    }();
    auto units = j.value("units", 1u);
    std::vector<std::vector<std::uint32_t>> action;
    if (j.contains("action")) action = j.at("action").get<std::vector<std::vector<std::uint32_t>>>();
    return build_model(std::move(backend), units, std::move(action));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidModel(std::string("malformed model JSON: ") + e.what());
  }
}

nlohmann::json model_to_json(const GroupoidModel& m) {
  nlohmann::json j;
  const auto& spec = m.backend().spec();
  if (const auto* f = std::get_if<FreeGroupSpec>(&spec)) {
    j["backend"] = {{"free", f->rank}};
  } else {
    const auto& fs = std::get<FiniteGroupSpec>(spec);
    j["backend"] = {{"finite",
                     {{"table", fs.table},
                      {"inverse", fs.inverse},
                      {"identity", fs.identity},
                      {"generators", fs.generators}}}};
  }
  j["units"] = m.unit_count();
  j["action"] = m.generator_action();
  return j;
}

std::string model_digest(const GroupoidModel& m) {
  const std::string text = model_to_json(m).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json element_to_json(const GroupoidElement& g) {
  return {{"unit", g.range.value}, {"word", format_word(g.word)}};
}

GroupoidElement element_from_json(const GroupoidModel& m, const nlohmann::json& j) {
  GroupoidElement g{UnitId{j.value("unit", 0u)}, parse_word(m.backend(), j.value("word", ""))};
  if (g.range.value >= m.unit_count()) throw InvalidModel("element unit out of range");
  return g;
}

// ---------------------------------------------------------------------------
// Measures

MeasureContext MeasureContext::uniform(const GroupoidModel& m) {
  return MeasureContext(std::vector<double>(m.unit_count(), 1.0 / m.unit_count()));
}

MeasureContext::MeasureContext(const GroupoidModel& m, std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.size() != m.unit_count()) throw InvalidMeasure("one weight per unit required");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw InvalidMeasure("weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidMeasure("weights must sum to 1");
  for (const auto& p : m.generator_action())
    for (std::uint32_t x = 0; x < m.unit_count(); ++x)
      if (std::abs(weights_[p[x]] - weights_[x]) > 1e-12)
        throw InvalidMeasure("measure is not invariant under the generator action");
}

std::vector<UnitId> units_for_statistics(const GroupoidModel& m, std::uint64_t seed, bool* sampled) {
  std::vector<UnitId> out;
  const std::uint32_t n = m.unit_count();
  if (n <= 64) {
    for (std::uint32_t x = 0; x < n; ++x) out.push_back(UnitId{x});
    if (sampled) *sampled = false;
    return out;
  }
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates; std::sample's order guarantees are weaker.
  for (std::uint32_t i = 0; i < 64; ++i) {
    std::uniform_int_distribution<std::uint32_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(64);
  std::sort(idx.begin(), idx.end());
  for (auto x : idx) out.push_back(UnitId{x});
  if (sampled) *sampled = true;
  return out;
}

}  // namespace exo
