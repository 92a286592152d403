#include "exo/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include <Eigen/Sparse>

#include "exo/metric.hpp"

namespace exo {

namespace {

using SparseC = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

struct PowerResult {
  double value = 0;
  int iterations = 0;
  double residual = 0;
  bool converged = false;
};

// Power iteration on M^dagger M from the normalized all-ones vector; the
// Rayleigh quotient of M^dagger M is the squared singular value estimate.
PowerResult top_singular_value(const SparseC& M, int max_iter, double tol) {
  PowerResult r;
  const auto n = M.cols();
  if (n == 0 || M.nonZeros() == 0) {
    r.converged = true;
    return r;
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Constant(n, Complex{1.0 / std::sqrt(static_cast<double>(n))});
  Eigen::VectorXcd mv(M.rows()), w(n);
  double rho = 0;
  for (int it = 1; it <= max_iter; ++it) {
    mv.noalias() = M * v;
    w.noalias() = M.adjoint() * mv;
    rho = mv.squaredNorm();  // v^dagger M^dagger M v with |v| = 1
    r.iterations = it;
    if (rho == 0.0) break;
    r.residual = (w - rho * v).norm() / rho;
    const double wn = w.norm();
    v = w / wn;
    if (r.residual < tol) {
      r.converged = true;
      // One more Rayleigh quotient on the improved vector.
      mv.noalias() = M * v;
      rho = std::max(rho, mv.squaredNorm());
      break;
    }
  }
  r.value = std::sqrt(rho);
  return r;
}

SparseC compressed_operator(const CcFunction& f, UnitId u, int L, std::size_t budget) {
  const GroupoidModel& m = f.groupoid();
  const auto ball = enumerate_source_ball(m, u, L, budget);
  std::unordered_map<GroupoidElement, int, GroupoidElementHash> index;
  index.reserve(ball.size());
  for (std::size_t i = 0; i < ball.size(); ++i) index.emplace(ball[i], static_cast<int>(i));

  std::unordered_map<std::uint32_t, std::vector<std::pair<const GroupoidElement*, Complex>>> by_source;
  for (const auto& [x, v] : f.values()) by_source[m.source(x).value].emplace_back(&x, v);

  // Row y = x y' for x with s(x) = r(y'); M[y, y'] = f(x).
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(ball.size() * std::min<std::size_t>(f.support_size(), 64));
  for (std::size_t j = 0; j < ball.size(); ++j) {
    const auto it = by_source.find(ball[j].range.value);
    if (it == by_source.end()) continue;
    for (const auto& [x, v] : it->second) {
      const auto row = index.find(compose(m, *x, ball[j]));
      if (row != index.end()) triplets.emplace_back(row->second, static_cast<int>(j), v);
    }
  }
  SparseC M(static_cast<Eigen::Index>(ball.size()), static_cast<Eigen::Index>(ball.size()));
  M.setFromTriplets(triplets.begin(), triplets.end());
  return M;
}

}  // namespace

std::vector<int> default_ladder(int L) {
  if (L < 0) throw PreconditionViolation("truncation radius must be nonnegative");
  std::vector<int> out;
  for (int r : {4, 6, 8, 10, 12})
    if (r >= 1 && r < L) out.push_back(r);
  out.push_back(L);
  return out;
}

NormEstimate reduced_norm_at_unit(const CcFunction& f, UnitId u, const std::vector<int>& ladder, int max_iter,
                                  double tol, std::size_t budget) {
  if (ladder.empty()) throw PreconditionViolation("empty truncation ladder");
  if (u.value >= f.groupoid().unit_count()) throw PreconditionViolation("unit out of range");
  NormEstimate est;
  est.unit = u;
  for (int L : ladder) {
    const double need = ball_size(f.groupoid(), L);
    if (need > static_cast<double>(budget)) throw BudgetExceeded("reduced_norm ball at L=" + std::to_string(L), need, budget);
    const auto r = top_singular_value(compressed_operator(f, u, L, budget), max_iter, tol);
    if (!est.trace.empty() && r.value < est.trace.back().second) est.monotone = false;
    est.trace.emplace_back(L, r.value);
    est.value = r.value;
    est.L = L;
    est.iterations = r.iterations;
    est.residual = r.residual;
    est.converged = r.converged;
  }
  return est;
}

NormEstimate reduced_norm_at_unit(const CcFunction& f, UnitId u, int L, int max_iter, double tol,
                                  std::size_t budget) {
  return reduced_norm_at_unit(f, u, default_ladder(L), max_iter, tol, budget);
}

NormEstimate reduced_norm(const CcFunction& f, int L, int max_iter, double tol, std::size_t budget) {
  NormEstimate best;
  bool first = true;
  for (std::uint32_t x = 0; x < f.groupoid().unit_count(); ++x) {
    auto e = reduced_norm_at_unit(f, UnitId{x}, L, max_iter, tol, budget);
    if (first || e.value > best.value) best = std::move(e);
    first = false;
  }
  return best;
}

nlohmann::json NormEstimate::to_json() const {
  auto tr = nlohmann::json::array();
  for (const auto& [L_, v] : trace) tr.push_back({{"L", L_}, {"value", v}});
  return {{"value", value}, {"L", L}, {"unit", unit.value}, {"iterations", iterations},
          {"residual", residual}, {"converged", converged}, {"trace", tr}, {"monotone", monotone}};
}

std::string NormEstimate::trace_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "L,value\n";
  for (const auto& [L_, v] : trace) out << L_ << ',' << v << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------

PowerSeq power_sequence_norm(const CcFunction& f, int n_max, const MeasureContext& mu,
                             std::size_t support_budget) {
  if (n_max < 1) throw PreconditionViolation("n_max must be >= 1");
  if (f.is_zero()) throw PreconditionViolation("power sequence of the zero function");
  PowerSeq seq;
  const CcFunction h = convolve(involution(f), f);
  const CcFunction hh = convolve(h, h);
  CcFunction power = hh;  // (f* f)^{*2n}
  for (int n = 1; n <= n_max; ++n) {
    if (n > 1) power = convolve(power, hh);
    if (power.support_size() > support_budget)
      throw BudgetExceeded("power_sequence_norm support at n=" + std::to_string(n),
                           static_cast<double>(power.support_size()), static_cast<double>(support_budget));
    const double norm2 = lp_norm(power, 2.0, mu).value;
    seq.entries.emplace_back(n, std::pow(norm2, 1.0 / (4.0 * n)));
    seq.support_sizes.push_back(power.support_size());
  }
  return seq;
}

nlohmann::json PowerSeq::to_json() const {
  auto arr = nlohmann::json::array();
  for (std::size_t i = 0; i < entries.size(); ++i)
    arr.push_back({{"n", entries[i].first}, {"value", entries[i].second}, {"support", support_sizes[i]}});
  return {{"entries", arr}};
}

std::string PowerSeq::csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "n,value,support\n";
  for (std::size_t i = 0; i < entries.size(); ++i)
    out << entries[i].first << ',' << entries[i].second << ',' << support_sizes[i] << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------

NormBoundReport verify_norm_bound(double alpha, int k, double p, ModelPtr m, const MeasureContext& mu, int C,
                                  int L, std::size_t budget) {
  if (!(p >= 2.0)) throw PreconditionViolation("verify_norm_bound needs p >= 2");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw PreconditionViolation("alpha must lie in (0, 1]");
  if (k < 0) throw PreconditionViolation("k must be nonnegative");
  NormBoundReport rep;
  rep.alpha = alpha;
  rep.k = k;
  rep.p = p;
  rep.q = p / (p - 1.0);
  rep.C = C;
  rep.L = std::max(L, k);
  const CcFunction f = CcFunction::sphere_indicator(m, k, budget).scaled(std::pow(alpha, k));
  rep.estimate = reduced_norm(f, rep.L, kDefaultMaxIterations, kDefaultNormTolerance, budget);
  rep.lhs = rep.estimate.value;
  rep.rhs = 2.0 * C * (k + 1) * lp_norm(f, rep.q, mu).value;
  rep.slack = rep.rhs - rep.lhs;
  rep.pass = rep.lhs <= rep.rhs;
  return rep;
}

nlohmann::json NormBoundReport::to_json() const {
  return {{"alpha", alpha}, {"k", k}, {"p", p}, {"q", q}, {"C", C}, {"L", L}, {"lhs", lhs},
          {"rhs", rhs}, {"slack", slack}, {"pass", pass}, {"estimate", estimate.to_json()}};
}

}  // namespace exo
