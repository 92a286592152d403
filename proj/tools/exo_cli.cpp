// exo: command line front end. Every subcommand loads a model, reads its
// parameters from an optional JSON config, runs one library operation and
// emits {tool_version, model_digest, operation, parameters, results, verdict}.
//
// Exit codes: 0 all asserted properties hold, 1 a property failed,
// 2 budget or usage error.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "exo/conv_algebra.hpp"
#include "exo/exotic_analyzer.hpp"
#include "exo/groupoid_model.hpp"
#include "exo/metric.hpp"
#include "exo/pd_kernels.hpp"
#include "exo/spectral.hpp"
#include "exo/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace exo;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string model;
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t budget = kDefaultEnumerationBudget;
};

struct Context {
  ModelPtr model;
  json config;
  Options opt;
  std::optional<MeasureContext> mu;
};

struct Outcome {
  json parameters = json::object();
  json results = json::object();
  std::string verdict;
  bool pass = true;
  std::map<std::string, std::string> tables;
};

// --- inputs -----------------------------------------------------------------

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string part; std::getline(in, part, sep);) out.push_back(part);
  return out;
}

// builtin:free:<d> | builtin:cyclic:<n> | builtin:free-action:<d>:<units>:<seed>
ModelPtr load_model(const std::string& spec) {
  if (spec.rfind("builtin:", 0) == 0) {
    const auto parts = split(spec.substr(8), ':');
    try {
      if (parts.size() == 2 && parts[0] == "free") return free_group_model(std::stoi(parts[1]));
      if (parts.size() == 2 && parts[0] == "cyclic") return cyclic_group_model(std::stoi(parts[1]));
      if (parts.size() == 4 && parts[0] == "free-action")
        return random_free_action_model(std::stoi(parts[1]), static_cast<std::uint32_t>(std::stoul(parts[2])),
                                        std::stoull(parts[3]));
    } catch (const std::logic_error&) {
    }
    throw UsageError("unknown builtin model '" + spec + "'");
  }
  std::ifstream in(spec);
  if (!in) throw UsageError("cannot open model file '" + spec + "'");
  return model_from_json(json::parse(in));
}

template <class T>
T param(Context& ctx, Outcome& o, const std::string& key, T fallback) {
  T value = ctx.config.contains(key) ? ctx.config.at(key).get<T>() : fallback;
  o.parameters[key] = value;
  return value;
}

const MeasureContext& measure(Context& ctx, Outcome& o) {
  if (!ctx.mu) {
    if (ctx.config.contains("measure")) {
      ctx.mu.emplace(*ctx.model, ctx.config.at("measure").get<std::vector<double>>());
      o.parameters["measure"] = ctx.config.at("measure");
    } else {
      ctx.mu.emplace(MeasureContext::uniform(*ctx.model));
      o.parameters["measure"] = "uniform";
    }
  }
  return *ctx.mu;
}

Kernel kernel_param(Context& ctx, Outcome& o) {
  const json desc = ctx.config.value("kernel", json{{"exp_length", 0.5}});
  o.parameters["kernel"] = desc;
  return kernel_from_json(*ctx.model, desc);
}

// {"sphere": k, "scale": s} | {"delta": {"unit", "word"}} | {"entries": [...]}
CcFunction function_param(Context& ctx, Outcome& o) {
  const json desc = ctx.config.value("function", json{{"sphere", 1}});
  o.parameters["function"] = desc;
  if (desc.contains("sphere")) {
    const double scale = desc.value("scale", 1.0);
    return CcFunction::sphere_indicator(ctx.model, desc.at("sphere").get<int>(), ctx.opt.budget).scaled(scale);
  }
  if (desc.contains("delta")) return CcFunction::delta(ctx.model, element_from_json(*ctx.model, desc.at("delta")));
  if (desc.contains("entries")) return function_from_json(ctx.model, desc.at("entries"));
  throw UsageError("function must be given as sphere, delta or entries");
}

int overlap_param(Context& ctx, Outcome& o) {
  if (ctx.config.contains("C")) return param<int>(ctx, o, "C", 0);
  const int radius = param<int>(ctx, o, "delta_radius", 3);
  const double delta = hyperbolicity_delta(*ctx.model, UnitId{0}, radius, kDefaultQuadrupleBudget, ctx.opt.budget).delta;
  const int C = overlap_constant(*ctx.model, delta, ctx.opt.budget);
  o.results["delta"] = delta;
  o.results["C"] = C;
  return C;
}

std::string csv_line(std::initializer_list<std::string> cells) {
  std::string s;
  for (const auto& c : cells) s += (s.empty() ? "" : ",") + c;
  return s + "\n";
}

std::string num(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

void set_verdict(Outcome& o, bool pass) {
  o.pass = pass;
  o.verdict = pass ? "pass" : "fail";
}

// --- operations ---------------------------------------------------------------

Outcome op_growth(Context& ctx) {
  Outcome o;
  const int K = param(ctx, o, "K", 8);
  const int k_min = param(ctx, o, "k_min", 1);
  const auto g = growth_stats(*ctx.model, K, k_min, ctx.opt.budget, ctx.opt.seed);
  o.results = g.to_json();
  bool ok = true;
  for (int k = k_min; k <= K; ++k) {
    ok = ok && g.rows[k].sup_sphere <= std::pow(g.R, k) * (1 + 1e-12);
    ok = ok && g.rows[k].inf_ball >= g.D * std::pow(g.R_prime, k) * (1 - 1e-12);
  }
  o.results["certified_inequalities"] = ok;
  set_verdict(o, ok);
  o.tables["growth.csv"] = g.to_csv();
  return o;
}

Outcome op_delta(Context& ctx) {
  Outcome o;
  const int radius = param(ctx, o, "radius", 3);
  const bool all = param(ctx, o, "all_units", false);
  const auto est = all ? hyperbolicity_delta_all(*ctx.model, radius, ctx.opt.seed, kDefaultQuadrupleBudget, ctx.opt.budget)
                       : hyperbolicity_delta(*ctx.model, UnitId{param<std::uint32_t>(ctx, o, "unit", 0)}, radius,
                                             kDefaultQuadrupleBudget, ctx.opt.budget);
  o.results = est.to_json();
  bool ok = true;
  if (ctx.config.contains("expect_delta")) ok = est.delta == param<double>(ctx, o, "expect_delta", 0);
  set_verdict(o, ok);
  return o;
}

Outcome op_pdcheck(Context& ctx) {
  Outcome o;
  const Kernel k = kernel_param(ctx, o);
  const UnitId u{param<std::uint32_t>(ctx, o, "unit", 0)};
  const int radius = param(ctx, o, "radius", 2);
  const int tuples = param(ctx, o, "random_tuples", 100);
  const int max_size = param(ctx, o, "max_tuple_size", 10);
  const int tuple_radius = param(ctx, o, "tuple_radius", 3);
  const double tol = param(ctx, o, "tol", kDefaultPsdTolerance);

  std::string csv = "tuple,size,min_eig,pass\n";
  bool ok = true;
  const auto ball = enumerate_ball(*ctx.model, u, radius, ctx.opt.budget);
  const auto r = psd_check(*ctx.model, k, ball, tol);
  ok = ok && r.pass;
  o.results["ball"] = {{"size", ball.size()}, {"min_eig", r.min_eig}, {"pass", r.pass}};
  csv += csv_line({"ball", std::to_string(ball.size()), num(r.min_eig), r.pass ? "1" : "0"});

  std::mt19937_64 rng(ctx.opt.seed);
  const auto pool = enumerate_ball(*ctx.model, u, tuple_radius, ctx.opt.budget);
  double worst = r.min_eig;
  int failed = 0;
  for (int t = 0; t < tuples; ++t) {
    std::vector<GroupoidElement> tuple;
    const std::size_t size = 1 + rng() % static_cast<std::size_t>(std::max(1, max_size));
    for (std::size_t i = 0; i < size; ++i) tuple.push_back(pool[rng() % pool.size()]);
    const auto rt = psd_check(*ctx.model, k, tuple, tol);
    worst = std::min(worst, rt.min_eig);
    if (!rt.pass) ++failed;
    csv += csv_line({std::to_string(t), std::to_string(size), num(rt.min_eig), rt.pass ? "1" : "0"});
  }
  ok = ok && failed == 0;
  o.results["random_tuples"] = {{"count", tuples}, {"failed", failed}, {"worst_min_eig", worst}};
  set_verdict(o, ok);
  o.tables["psd.csv"] = csv;
  return o;
}

Outcome op_gns(Context& ctx) {
  Outcome o;
  const Kernel k = kernel_param(ctx, o);
  const UnitId u{param<std::uint32_t>(ctx, o, "unit", 0)};
  const int radius = param(ctx, o, "radius", 2);
  const auto data = gns_build(*ctx.model, k, u, radius, kDefaultNullTolerance, kDefaultPsdTolerance, ctx.opt.budget);
  o.results["space"] = data.to_json();
  double worst_coeff = 0, worst_iso = 0;
  std::string csv = "word,kernel_re,kernel_im,coeff_error,isometry_defect\n";
  for (const auto& x : data.basis) {
    const Complex expect = eval_kernel(k, x);
    const double err = std::abs(matrix_coeff_recovery(*ctx.model, k, x, radius, ctx.opt.budget) - expect);
    const double iso = gns_rep_matrix(*ctx.model, k, x, radius, ctx.opt.budget).isometry_defect();
    worst_coeff = std::max(worst_coeff, err);
    worst_iso = std::max(worst_iso, iso);
    csv += csv_line({format_word(x.word), num(expect.real()), num(expect.imag()), num(err), num(iso)});
  }
  o.results["max_coefficient_error"] = worst_coeff;
  o.results["max_isometry_defect"] = worst_iso;
  set_verdict(o, worst_coeff <= 1e-12 && worst_iso < 1e-10);
  o.tables["gns.csv"] = csv;
  return o;
}

Outcome op_haagerup(Context& ctx) {
  Outcome o;
  const auto ns = param(ctx, o, "n", std::vector<int>{1, 2, 4, 8});
  const auto ks = param(ctx, o, "k", std::vector<int>{0, 2, 4});
  const auto eps = param(ctx, o, "eps", std::vector<double>{0.1, 0.01});
  const auto rep = haagerup_witness_check(*ctx.model, ns, ks, eps, ctx.opt.budget);
  o.results = rep.to_json();
  std::string csv = "n,k,sup_deviation,bound,ok\n";
  for (const auto& r : rep.rows)
    csv += csv_line({std::to_string(r.n), std::to_string(r.k), num(r.sup_deviation), num(r.bound), r.ok ? "1" : "0"});
  o.tables["haagerup.csv"] = csv;
  set_verdict(o, rep.pass());
  return o;
}

Outcome op_bandcheck(Context& ctx) {
  Outcome o;
  const int k = param(ctx, o, "k", 3);
  const int n = param(ctx, o, "n", 2);
  const UnitId u{param<std::uint32_t>(ctx, o, "unit", 0)};
  const int pairs = param(ctx, o, "pairs", 50);
  const int C = overlap_param(ctx, o);
  const auto wk = enumerate_sphere(*ctx.model, u, k, ctx.opt.budget);
  std::vector<GroupoidElement> wn;
  for (std::uint32_t x = 0; x < ctx.model->unit_count(); ++x)
    for (auto& g : enumerate_sphere(*ctx.model, UnitId{x}, n, ctx.opt.budget)) wn.push_back(std::move(g));

  std::mt19937_64 rng(ctx.opt.seed);
  std::uniform_real_distribution<double> val(-1.0, 1.0), phase(0.0, 2.0 * M_PI);
  std::string csv = "pair,m,mass,ratio,in_band,ok\n";
  int support_fail = 0, bound_fail = 0;
  double worst = 0;
  for (int t = 0; t < pairs; ++t) {
    CcFunction f(ctx.model), g(ctx.model);
    for (const auto& x : wk)
      if (rng() % 3) f.set(x, Complex{val(rng), val(rng)});
    for (const auto& x : wn)
      if (rng() % 3) g.set(x, std::polar(std::abs(val(rng)), phase(rng)));
    if (f.is_zero() && !wk.empty()) f.set(wk.front(), 1.0);
    const auto rep = band_check(f, g, k, n, u, C);
    if (!rep.support_ok) ++support_fail;
    if (!rep.bound_ok) ++bound_fail;
    for (const auto& r : rep.rows) {
      worst = std::max(worst, r.ratio);
      csv += csv_line({std::to_string(t), std::to_string(r.m), num(r.mass), num(r.ratio), r.in_band ? "1" : "0",
                       r.ok ? "1" : "0"});
    }
  }
  o.results["C"] = C;
  o.results["pairs"] = pairs;
  o.results["support_failures"] = support_fail;
  o.results["bound_failures"] = bound_fail;
  o.results["max_ratio"] = worst;
  o.tables["band.csv"] = csv;
  set_verdict(o, support_fail == 0 && bound_fail == 0);
  return o;
}

Outcome op_norm(Context& ctx) {
  Outcome o;
  const CcFunction f = function_param(ctx, o);
  const int L = param(ctx, o, "L", 12);
  const int max_iter = param(ctx, o, "max_iter", kDefaultMaxIterations);
  const double tol = param(ctx, o, "tol", kDefaultNormTolerance);
  NormEstimate est;
  if (ctx.config.contains("unit"))
    est = reduced_norm_at_unit(f, UnitId{param<std::uint32_t>(ctx, o, "unit", 0)}, L, max_iter, tol, ctx.opt.budget);
  else
    est = reduced_norm(f, L, max_iter, tol, ctx.opt.budget);
  o.results = est.to_json();
  o.tables["trace.csv"] = est.trace_csv();
  set_verdict(o, est.monotone);
  return o;
}

Outcome op_powerseq(Context& ctx) {
  Outcome o;
  const CcFunction f = function_param(ctx, o);
  const int n_max = param(ctx, o, "n_max", 3);
  const auto budget = param<std::size_t>(ctx, o, "support_budget", kPowerSupportBudget);
  const auto seq = power_sequence_norm(f, n_max, measure(ctx, o), budget);
  o.results = seq.to_json();
  bool ok = true;
  for (const auto& [n, v] : seq.entries) ok = ok && std::isfinite(v) && v > 0;
  o.tables["powerseq.csv"] = seq.csv();
  set_verdict(o, ok);
  return o;
}

Outcome op_normbound(Context& ctx) {
  Outcome o;
  const auto alphas = param(ctx, o, "alpha", std::vector<double>{0.3, 0.5, 0.7});
  const auto ks = param(ctx, o, "k", std::vector<int>{1, 2, 3});
  const auto ps = param(ctx, o, "p", std::vector<double>{2.0, 4.0});
  const int L = param(ctx, o, "L", 8);
  const int C = overlap_param(ctx, o);
  const auto& mu = measure(ctx, o);
  json cases = json::array();
  std::string csv = "alpha,k,p,lhs,rhs,slack,pass\n";
  bool ok = true;
  for (double a : alphas)
    for (int k : ks)
      for (double p : ps) {
        const auto r = verify_norm_bound(a, k, p, ctx.model, mu, C, L, ctx.opt.budget);
        ok = ok && r.pass;
        cases.push_back(r.to_json());
        csv += csv_line({num(a), std::to_string(k), num(p), num(r.lhs), num(r.rhs), num(r.slack), r.pass ? "1" : "0"});
      }
  o.results["C"] = C;
  o.results["cases"] = cases;
  o.tables["normbound.csv"] = csv;
  set_verdict(o, ok);
  return o;
}

Outcome op_extend(Context& ctx) {
  Outcome o;
  const double alpha = param(ctx, o, "alpha", 0.65);
  const double p = param(ctx, o, "p", 6.0);
  const int K = param(ctx, o, "K", default_extension_horizon(*ctx.model));
  const auto betas = param(ctx, o, "beta_grid", kDefaultBetaGrid);
  const auto rep = extension_criteria(*ctx.model, measure(ctx, o), alpha, p, K, betas, ctx.opt.budget);
  o.results = rep.to_json();
  o.tables["extension.csv"] = rep.csv();
  o.verdict = to_string(rep.verdict);
  o.pass = rep.verdict != ExtensionVerdict::Inconclusive;
  if (ctx.config.contains("expect")) o.pass = o.verdict == param<std::string>(ctx, o, "expect", "");
  return o;
}

Outcome op_band(Context& ctx) {
  Outcome o;
  const double q = param(ctx, o, "q", 2.0);
  const double p = param(ctx, o, "p", 4.0);
  const int K = param(ctx, o, "growth_K", 8);
  const auto growth = growth_stats(*ctx.model, K, 1, ctx.opt.budget, ctx.opt.seed);
  o.results["growth"] = growth.to_json();
  try {
    const auto b = threshold_band(growth, q, p);
    o.results["band"] = b.to_json();
    set_verdict(o, true);
    o.verdict = b.nonempty ? "nonempty" : "empty";
  } catch (const SubexponentialGrowth& e) {
    o.results["error"] = e.what();
    o.pass = false;
    o.verdict = "subexponential";
  }
  o.tables["growth.csv"] = growth.to_csv();
  return o;
}

Outcome op_certify(Context& ctx) {
  Outcome o;
  const double q = param(ctx, o, "q", 2.0);
  const double p = param(ctx, o, "p", 6.0);
  const double alpha = param(ctx, o, "alpha", 0.65);
  const int K = param(ctx, o, "K", default_extension_horizon(*ctx.model));
  const int growth_K = param(ctx, o, "growth_K", 6);
  std::optional<int> C;
  if (ctx.config.contains("C")) C = param<int>(ctx, o, "C", 0);
  const int delta_radius = param(ctx, o, "delta_radius", 3);
  const auto growth = growth_stats(*ctx.model, growth_K, 1, ctx.opt.budget, ctx.opt.seed);
  try {
    const auto cert = certificate(*ctx.model, measure(ctx, o), growth, q, p, alpha, K, C, delta_radius, ctx.opt.budget);
    o.results = cert.to_json();
    o.tables["witness.csv"] = cert.witness_csv();
    o.verdict = cert.verdict;
    o.pass = cert.certified();
  } catch (const SubexponentialGrowth& e) {
    o.results["error"] = e.what();
    o.verdict = "Inconclusive";
    o.pass = false;
  }
  return o;
}

// --- driver -----------------------------------------------------------------

void emit(const Context& ctx, const std::string& op, Outcome& o) {
  o.parameters["seed"] = ctx.opt.seed;
  o.parameters["budget"] = ctx.opt.budget;
  const json report = {{"tool_version", kToolVersion},
                       {"model_digest", model_digest(*ctx.model)},
                       {"operation", op},
                       {"parameters", o.parameters},
                       {"results", o.results},
                       {"verdict", o.verdict}};
  if (ctx.opt.out.empty()) {
    std::cout << report.dump(2) << '\n';
    return;
  }
  fs::create_directories(fs::path(ctx.opt.out) / "tables");
  std::ofstream(fs::path(ctx.opt.out) / "report.json") << report.dump(2) << '\n';
  for (const auto& [name, content] : o.tables) std::ofstream(fs::path(ctx.opt.out) / "tables" / name) << content;
  std::cout << op << ": " << o.verdict << " (report written to " << ctx.opt.out << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exo: exotic groupoid C*-algebra toolkit"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string(kToolVersion));

  Options opt;
  const std::vector<std::pair<std::string, std::function<Outcome(Context&)>>> ops{
      {"growth", op_growth},       {"delta", op_delta},       {"pdcheck", op_pdcheck}, {"gns", op_gns},
      {"haagerup", op_haagerup},   {"bandcheck", op_bandcheck}, {"norm", op_norm},     {"powerseq", op_powerseq},
      {"normbound", op_normbound}, {"extend", op_extend},     {"band", op_band},       {"certify", op_certify}};
  const std::map<std::string, std::string> help{
      {"growth", "sphere and ball growth with certified constants"},
      {"delta", "four-point hyperbolicity constant"},
      {"pdcheck", "Gram-matrix positivity of a kernel"},
      {"gns", "truncated GNS space and matrix coefficients"},
      {"haagerup", "Haagerup witness conditions for e^{-l/n}"},
      {"bandcheck", "convolution band bound on seeded random pairs"},
      {"norm", "reduced norm by truncated power iteration"},
      {"powerseq", "power sequence |(f*f)^{*2n}|_2^{1/4n}"},
      {"normbound", "2C(k+1)|f|_q upper bound"},
      {"extend", "extension criteria for omega_{phi_alpha}"},
      {"band", "threshold band from growth rates"},
      {"certify", "two-leg separation certificate"}};

  std::string chosen;
  for (const auto& [name, fn] : ops) {
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--model", opt.model, "model JSON file or builtin:free:<d>, builtin:cyclic:<n>, "
                                          "builtin:free-action:<d>:<units>:<seed>")
        ->required();
    sub->add_option("--config", opt.config, "JSON object with operation parameters");
    sub->add_option("--out", opt.out, "output directory for report.json and tables/*.csv");
    sub->add_option("--seed", opt.seed, "seed for sampling and random inputs");
    sub->add_option("--budget", opt.budget, "enumeration budget (elements)");
    sub->callback([&chosen, n = name] { chosen = n; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Context ctx;
  ctx.opt = opt;
  try {
    ctx.model = load_model(opt.model);
    if (!opt.config.empty()) {
      std::ifstream in(opt.config);
      if (!in) throw UsageError("cannot open config file '" + opt.config + "'");
      ctx.config = json::parse(in);
      if (!ctx.config.is_object()) throw UsageError("config must be a JSON object");
    } else {
      ctx.config = json::object();
    }
    for (const auto& [name, fn] : ops)
      if (name == chosen) {
        Outcome o = fn(ctx);
        emit(ctx, chosen, o);
        return o.pass ? 0 : 1;
      }
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << " (required " << e.required() << ", budget " << e.budget()
              << ")\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "invalid JSON input: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
