#include "exo/pd_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "exo/metric.hpp"

namespace exo {

TableKernel::TableKernel(const GroupoidModel& m,
                         std::unordered_map<GroupoidElement, Complex, GroupoidElementHash> values)
    : values_(std::move(values)) {
  for (const auto& [g, v] : values_) {
    if (!m.contains(g)) throw InvalidKernel("table entry is not an element of the model");
    radius_ = std::max(radius_, length(g));
  }
  for (const auto& [g, v] : values_) {
    auto it = values_.find(inverse(m, g));
    Complex w = it == values_.end() ? Complex{} : it->second;
    if (std::abs(w - std::conj(v)) > 1e-12)
      throw InvalidKernel("table violates F(x^-1) = conj F(x) at " + format_word(g.word));
  }
}

Complex TableKernel::at(const GroupoidElement& g) const {
  if (length(g) > radius_) throw InvalidKernel("table kernel evaluated outside its ball");
  auto it = values_.find(g);
  return it == values_.end() ? Complex{} : it->second;
}

Kernel Kernel::exp_length(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidKernel("exp_length needs alpha in (0, 1]");
  return Kernel(ExpLength{alpha});
}

Kernel Kernel::haagerup(int n) {
  if (n < 1) throw InvalidKernel("haagerup witness needs n >= 1");
  return Kernel(HaagerupWitness{n});
}

Complex Kernel::operator()(const GroupoidElement& g) const {
  return std::visit(
      [&](const auto& k) -> Complex {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, ExpLength>)
          return std::pow(k.alpha, length(g));
        else if constexpr (std::is_same_v<T, HaagerupWitness>)
          return std::exp(-static_cast<double>(length(g)) / k.n);
        else
          return k.at(g);
      },
      v_);
}

std::string Kernel::describe() const {
  std::ostringstream out;
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, ExpLength>)
          out << "exp_length(" << k.alpha << ")";
        else if constexpr (std::is_same_v<T, HaagerupWitness>)
          out << "haagerup(" << k.n << ")";
        else
          out << "table(radius " << k.radius() << ")";
      },
      v_);
  return out.str();
}

Kernel kernel_from_json(const GroupoidModel& m, const nlohmann::json& j) {
  if (j.contains("exp_length")) return Kernel::exp_length(j.at("exp_length").get<double>());
  if (j.contains("haagerup")) return Kernel::haagerup(j.at("haagerup").get<int>());
  if (j.contains("table")) {
    std::unordered_map<GroupoidElement, Complex, GroupoidElementHash> values;
    for (const auto& e : j.at("table"))
      values[element_from_json(m, e)] = Complex{e.value("re", 0.0), e.value("im", 0.0)};
    return Kernel::table(TableKernel(m, std::move(values)));
  }
  throw InvalidKernel("kernel descriptor must be exp_length, haagerup or table");
}

nlohmann::json kernel_to_json(const Kernel& k) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ExpLength>)
          return {{"exp_length", v.alpha}};
        else if constexpr (std::is_same_v<T, HaagerupWitness>)
          return {{"haagerup", v.n}};
        else {
          std::vector<std::pair<GroupoidElement, Complex>> entries(v.values().begin(), v.values().end());
          std::sort(entries.begin(), entries.end(),
                    [](const auto& a, const auto& b) { return a.first < b.first; });
          auto arr = nlohmann::json::array();
          for (const auto& [g, c] : entries)
            arr.push_back({{"unit", g.range.value}, {"word", format_word(g.word)}, {"re", c.real()}, {"im", c.imag()}});
          return {{"table", arr}};
        }
      },
      k.variant());
}

Complex eval_kernel(const Kernel& k, const GroupoidElement& g) { return k(g); }

Complex omega_pairing(const CcFunction& f, const Kernel& k, const MeasureContext& mu) {
  return omega_pairing(f, [&](const GroupoidElement& g) { return k(g); }, mu);
}

Eigen::MatrixXcd gram_matrix(const GroupoidModel& m, const Kernel& k,
                             const std::vector<GroupoidElement>& tuple) {
  const auto n = static_cast<Eigen::Index>(tuple.size());
  for (const auto& x : tuple)
    if (x.range != tuple.front().range) throw PreconditionViolation("tuple elements must share a range unit");
  std::vector<GroupoidElement> inv;
  inv.reserve(tuple.size());
  for (const auto& x : tuple) inv.push_back(inverse(m, x));
  Eigen::MatrixXcd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      g(i, j) = k(compose(m, inv[static_cast<std::size_t>(i)], tuple[static_cast<std::size_t>(j)]));
  return g;
}

double min_eigenvalue(const Eigen::MatrixXcd& h) {
  if (h.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("Hermitian eigensolver failed");
  return es.eigenvalues().minCoeff();
}

PsdResult psd_check(const GroupoidModel& m, const Kernel& k, const std::vector<GroupoidElement>& tuple,
                    double tol) {
  PsdResult r;
  r.min_eig = min_eigenvalue(gram_matrix(m, k, tuple));
  r.pass = r.min_eig >= -tol;
  return r;
}

// ---------------------------------------------------------------------------
// Haagerup witnesses

HaagerupReport haagerup_witness_check(const GroupoidModel& m, const std::vector<int>& n_list,
                                      const std::vector<int>& k_list, const std::vector<double>& eps_list,
                                      std::size_t budget) {
  HaagerupReport rep;
  std::vector<int> ns = n_list;
  std::sort(ns.begin(), ns.end());
  for (int n : ns) {
    const Kernel f = Kernel::haagerup(n);
    for (std::uint32_t x = 0; x < m.unit_count(); ++x)
      if (f(unit_element(UnitId{x})) != Complex{1.0}) rep.units_ok = false;
  }
  const auto units = units_for_statistics(m, 0);
  for (int k : k_list) {
    double previous = std::numeric_limits<double>::infinity();
    std::vector<std::vector<GroupoidElement>> balls;
    for (auto u : units) balls.push_back(enumerate_ball(m, u, k, budget));
    for (int n : ns) {
      const Kernel f = Kernel::haagerup(n);
      HaagerupRow row;
      row.n = n;
      row.k = k;
      for (const auto& ball : balls)
        for (const auto& g : ball) row.sup_deviation = std::max(row.sup_deviation, std::abs(1.0 - f(g)));
      row.bound = 1.0 - std::exp(-static_cast<double>(k) / n);
      row.ok = row.sup_deviation <= row.bound && row.sup_deviation <= previous;
      previous = row.sup_deviation;
      if (!row.ok) rep.convergence_ok = false;
      rep.rows.push_back(row);
    }
  }
  for (double eps : eps_list) {
    for (int n : ns) {
      HaagerupRadius r;
      r.n = n;
      r.eps = eps;
      r.radius = static_cast<int>(std::ceil(n * std::log(1.0 / eps)));
      r.ball_size = ball_size(m, r.radius);
      // F_n decreases in length, so the first sphere outside B_radius
      // dominates the complement. Finite groups may have no such sphere.
      const int outside = r.radius + 1;
      if (m.backend().sphere_size(outside) > 0) {
        Word w = m.backend().sphere(1).front();
        Word probe;
        if (m.backend().is_free()) {
          for (int i = 0; i < outside; ++i) probe.push_back(w[0]);
        } else {
          probe = m.backend().sphere(outside).front();
        }
        r.value_outside = std::abs(Kernel::haagerup(n)(GroupoidElement{UnitId{0}, probe}));
        r.ok = r.value_outside < eps && std::isfinite(r.ball_size);
      } else {
        r.value_outside = 0.0;
        r.ok = std::isfinite(r.ball_size);
      }
      if (!r.ok) rep.c0_ok = false;
      rep.radii.push_back(r);
    }
  }
  return rep;
}

nlohmann::json HaagerupReport::to_json() const {
  auto rs = nlohmann::json::array();
  for (const auto& r : rows)
    rs.push_back({{"n", r.n}, {"k", r.k}, {"sup_deviation", r.sup_deviation}, {"bound", r.bound}, {"ok", r.ok}});
  auto rad = nlohmann::json::array();
  for (const auto& r : radii)
    rad.push_back({{"n", r.n}, {"eps", r.eps}, {"radius", r.radius}, {"value_outside", r.value_outside},
                   {"ball_size", r.ball_size}, {"ok", r.ok}});
  return {{"units_ok", units_ok}, {"convergence_ok", convergence_ok}, {"c0_ok", c0_ok},
          {"rows", rs}, {"radii", rad}, {"pass", pass()}};
}

// ---------------------------------------------------------------------------
// GNS

GnsData gns_build(const GroupoidModel& m, const Kernel& k, UnitId u, int radius, double null_tol,
                  double psd_tol, std::size_t budget) {
  GnsData d;
  d.unit = u;
  d.radius = radius;
  d.null_tol = null_tol;
  d.basis = enumerate_ball(m, u, radius, budget);
  d.gram = gram_matrix(m, k, d.basis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(d.gram, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("Hermitian eigensolver failed");
  d.eigenvalues = es.eigenvalues();
  if (d.eigenvalues.size() > 0 && d.eigenvalues.minCoeff() < -psd_tol)
    throw InvalidKernel("kernel is not positive definite on B_" + std::to_string(radius) +
                        " (min eigenvalue " + std::to_string(d.eigenvalues.minCoeff()) + ")");
  for (Eigen::Index i = 0; i < d.eigenvalues.size(); ++i)
    if (d.eigenvalues[i] < null_tol) ++d.null_dimension;
  d.quotient_dimension = static_cast<int>(d.basis.size()) - d.null_dimension;
  return d;
}

nlohmann::json GnsData::to_json() const {
  auto eig = nlohmann::json::array();
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) eig.push_back(eigenvalues[i]);
  auto basis_json = nlohmann::json::array();
  for (const auto& g : basis) basis_json.push_back(format_word(g.word));
  return {{"unit", unit.value}, {"radius", radius}, {"dimension", basis.size()},
          {"basis", basis_json}, {"eigenvalues", eig}, {"min_eigenvalue", eigenvalues.size() ? eigenvalues.minCoeff() : 0.0},
          {"null_tol", null_tol}, {"null_dimension", null_dimension},
          {"quotient_dimension", quotient_dimension}};
}

double GnsRepresentation::isometry_defect() const {
  const Eigen::MatrixXcd lhs = matrix.adjoint() * codomain.gram * matrix;
  return (lhs - domain.gram).cwiseAbs().maxCoeff();
}

GnsRepresentation gns_rep_matrix(const GroupoidModel& m, const Kernel& k, const GroupoidElement& x,
                                 int radius, std::size_t budget) {
  GnsRepresentation rep;
  rep.domain = gns_build(m, k, m.source(x), radius, kDefaultNullTolerance, kDefaultPsdTolerance, budget);
  rep.codomain = gns_build(m, k, x.range, radius + length(x), kDefaultNullTolerance,
                           kDefaultPsdTolerance, budget);
  std::unordered_map<GroupoidElement, Eigen::Index, GroupoidElementHash> index;
  for (std::size_t j = 0; j < rep.codomain.basis.size(); ++j)
    index.emplace(rep.codomain.basis[j], static_cast<Eigen::Index>(j));
  rep.matrix = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(rep.codomain.basis.size()),
                                      static_cast<Eigen::Index>(rep.domain.basis.size()));
  for (std::size_t i = 0; i < rep.domain.basis.size(); ++i) {
    const auto it = index.find(compose(m, x, rep.domain.basis[i]));
    if (it == index.end()) throw Error("codomain ball does not contain x . B_k");
    rep.matrix(it->second, static_cast<Eigen::Index>(i)) = 1.0;
  }
  return rep;
}

Complex matrix_coeff_recovery(const GroupoidModel& m, const Kernel& k, const GroupoidElement& x,
                              int radius, std::size_t budget) {
  if (length(x) > radius) throw PreconditionViolation("x lies outside the truncation radius");
  const auto rep = gns_rep_matrix(m, k, x, radius, budget);
  // Unit vectors sit first in shortlex order.
  Eigen::VectorXcd xi_s = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(rep.domain.basis.size()));
  Eigen::VectorXcd xi_r = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(rep.codomain.basis.size()));
  xi_s(0) = 1.0;
  xi_r(0) = 1.0;
  const Eigen::VectorXcd image = rep.matrix * xi_s;
  return (xi_r.adjoint() * rep.codomain.gram * image)(0, 0);
}

// ---------------------------------------------------------------------------
// Products

ProductCheck pointwise_product_check(const GroupoidModel& m, const Kernel& k1, const Kernel& k2,
                                     const std::vector<std::vector<GroupoidElement>>& tuples, double tol) {
  ProductCheck out;
  const auto* e1 = std::get_if<ExpLength>(&k1.variant());
  const auto* e2 = std::get_if<ExpLength>(&k2.variant());
  for (const auto& tuple : tuples) {
    const Eigen::MatrixXcd g = gram_matrix(m, k1, tuple).cwiseProduct(gram_matrix(m, k2, tuple));
    PsdResult r;
    r.min_eig = min_eigenvalue(g);
    r.pass = r.min_eig >= -tol;
    out.pass = out.pass && r.pass;
    out.tuples.push_back(r);
    if (e1 && e2) {
      const Kernel joint = Kernel::exp_length(e1->alpha * e2->alpha);
      for (const auto& x : tuple) {
        const Complex a = k1(x) * k2(x), b = joint(x);
        const double rel = std::abs(a - b) / std::max(std::abs(b), std::numeric_limits<double>::min());
        out.max_exp_length_error = std::max(out.max_exp_length_error, rel);
      }
    }
  }
  if (e1 && e2) {
    // Exponent addition up to rounding of alpha*beta and pow.
    out.exp_length_exact = out.max_exp_length_error <= 1e-15 * 16;
    out.pass = out.pass && out.exp_length_exact;
  }
  return out;
}

}  // namespace exo
