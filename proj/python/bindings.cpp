#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "exo/conv_algebra.hpp"
#include "exo/exotic_analyzer.hpp"
#include "exo/groupoid_model.hpp"
#include "exo/metric.hpp"
#include "exo/pd_kernels.hpp"
#include "exo/spectral.hpp"
#include "exo/version.hpp"

namespace py = pybind11;
using namespace exo;

namespace {

py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_py(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

Kernel kernel_arg(const ModelPtr& m, const py::object& desc) { return kernel_from_json(*m, from_py(desc)); }

MeasureContext measure_arg(const ModelPtr& m, const std::optional<std::vector<double>>& w) {
  return w ? MeasureContext(*m, *w) : MeasureContext::uniform(*m);
}

GroupoidElement element_arg(const ModelPtr& m, std::uint32_t unit, const std::string& word) {
  return GroupoidElement{UnitId{unit}, parse_word(m->backend(), word)};
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "exo core bindings";
  mod.attr("__version__") = kToolVersion;

  // Base first: the most recently registered translator is tried first.
  auto base = py::register_exception<Error>(mod, "ExoError", PyExc_ValueError);
  py::register_exception<BudgetExceeded>(mod, "BudgetExceeded", base.ptr());
  py::register_exception<SubexponentialGrowth>(mod, "SubexponentialGrowth", base.ptr());

  py::class_<GroupoidModel, std::shared_ptr<GroupoidModel>>(mod, "Model")
      .def_property_readonly("units", &GroupoidModel::unit_count)
      .def_property_readonly("digest", [](const GroupoidModel& m) { return model_digest(m); })
      .def("to_dict", [](const GroupoidModel& m) { return to_py(model_to_json(m)); })
      .def("sphere", [](const GroupoidModel& m, int k, std::uint32_t unit) {
             std::vector<std::string> out;
             for (const auto& g : enumerate_sphere(m, UnitId{unit}, k)) out.push_back(format_word(g.word));
             return out;
           },
           py::arg("k"), py::arg("unit") = 0);

  // Models are immutable; the const cast only lets pybind11 hold them.
  auto hold = [](ModelPtr p) { return std::const_pointer_cast<GroupoidModel>(p); };
  mod.def("free_group", [hold](int rank) { return hold(free_group_model(rank)); }, py::arg("rank"));
  mod.def("cyclic_group", [hold](int n) { return hold(cyclic_group_model(n)); }, py::arg("n"));
  mod.def("free_action", [hold](int rank, std::uint32_t units, std::uint64_t seed) {
            return hold(random_free_action_model(rank, units, seed));
          },
          py::arg("rank"), py::arg("units"), py::arg("seed"));
  mod.def("load_model", [hold](const py::object& spec) { return hold(model_from_json(from_py(spec))); },
          py::arg("spec"), "Build a model from its JSON description (a dict).");

  py::class_<CcFunction>(mod, "Function")
      .def_static("sphere", [](std::shared_ptr<GroupoidModel> m, int k) { return CcFunction::sphere_indicator(m, k); },
                  py::arg("model"), py::arg("k"))
      .def_static("delta",
                  [](std::shared_ptr<GroupoidModel> m, std::uint32_t unit, const std::string& word, Complex c) {
                    return CcFunction::delta(m, element_arg(m, unit, word), c);
                  },
                  py::arg("model"), py::arg("unit"), py::arg("word"), py::arg("value") = Complex{1.0})
      .def("scaled", &CcFunction::scaled)
      .def("support_size", &CcFunction::support_size)
      .def("__mul__", [](const CcFunction& a, const CcFunction& b) { return convolve(a, b); })
      .def("star", [](const CcFunction& a) { return involution(a); })
      .def("i_norm", [](const CcFunction& a) { return i_norm(a); })
      .def("to_list", [](const CcFunction& a) { return to_py(function_to_json(a)); });

  mod.def("lp_norm", [](const CcFunction& f, double p, std::optional<std::vector<double>> w) {
            return lp_norm(f, p, measure_arg(f.model(), w)).value;
          },
          py::arg("f"), py::arg("p"), py::arg("measure") = py::none());

  mod.def("growth_stats", [](std::shared_ptr<GroupoidModel> m, int K, int k_min, std::uint64_t seed) {
            return to_py(growth_stats(*m, K, k_min, kDefaultEnumerationBudget, seed).to_json());
          },
          py::arg("model"), py::arg("K"), py::arg("k_min") = 1, py::arg("seed") = 0);
  mod.def("hyperbolicity_delta", [](std::shared_ptr<GroupoidModel> m, int radius, std::uint32_t unit) {
            return to_py(hyperbolicity_delta(*m, UnitId{unit}, radius).to_json());
          },
          py::arg("model"), py::arg("radius"), py::arg("unit") = 0);
  mod.def("overlap_constant", [](std::shared_ptr<GroupoidModel> m, double delta) { return overlap_constant(*m, delta); },
          py::arg("model"), py::arg("delta"));

  mod.def("psd_check", [](std::shared_ptr<GroupoidModel> m, const py::object& kernel, int radius, std::uint32_t unit) {
            const auto r = psd_check(*m, kernel_arg(m, kernel), enumerate_ball(*m, UnitId{unit}, radius));
            return py::dict(py::arg("min_eig") = r.min_eig, py::arg("pass") = r.pass);
          },
          py::arg("model"), py::arg("kernel"), py::arg("radius"), py::arg("unit") = 0);
  mod.def("matrix_coeff_recovery",
          [](std::shared_ptr<GroupoidModel> m, const py::object& kernel, std::uint32_t unit, const std::string& word,
             int radius) { return matrix_coeff_recovery(*m, kernel_arg(m, kernel), element_arg(m, unit, word), radius); },
          py::arg("model"), py::arg("kernel"), py::arg("unit"), py::arg("word"), py::arg("radius"));
  mod.def("haagerup_witness_check",
          [](std::shared_ptr<GroupoidModel> m, std::vector<int> n, std::vector<int> k, std::vector<double> eps) {
            return to_py(haagerup_witness_check(*m, n, k, eps).to_json());
          },
          py::arg("model"), py::arg("n"), py::arg("k"), py::arg("eps"));

  mod.def("reduced_norm", [](const CcFunction& f, int L) { return to_py(reduced_norm(f, L).to_json()); },
          py::arg("f"), py::arg("L"));
  mod.def("power_sequence_norm", [](const CcFunction& f, int n_max, std::optional<std::vector<double>> w) {
            return to_py(power_sequence_norm(f, n_max, measure_arg(f.model(), w)).to_json());
          },
          py::arg("f"), py::arg("n_max"), py::arg("measure") = py::none());
  mod.def("verify_norm_bound",
          [](std::shared_ptr<GroupoidModel> m, double alpha, int k, double p, int C, int L) {
            return to_py(verify_norm_bound(alpha, k, p, m, MeasureContext::uniform(*m), C, L).to_json());
          },
          py::arg("model"), py::arg("alpha"), py::arg("k"), py::arg("p"), py::arg("C"), py::arg("L") = 8);

  mod.def("phi_chi_norm", [](std::shared_ptr<GroupoidModel> m, double alpha, double p, int k) {
            return phi_chi_norm(*m, MeasureContext::uniform(*m), alpha, p, k);
          },
          py::arg("model"), py::arg("alpha"), py::arg("p"), py::arg("k"));
  mod.def("extension_criteria",
          [](std::shared_ptr<GroupoidModel> m, double alpha, double p, std::optional<int> K) {
            return to_py(extension_criteria(*m, MeasureContext::uniform(*m), alpha, p,
                                            K.value_or(default_extension_horizon(*m)))
                             .to_json());
          },
          py::arg("model"), py::arg("alpha"), py::arg("p"), py::arg("K") = py::none());
  mod.def("threshold_band", [](std::shared_ptr<GroupoidModel> m, double q, double p, int growth_K) {
            return to_py(threshold_band(growth_stats(*m, growth_K, 1), q, p).to_json());
          },
          py::arg("model"), py::arg("q"), py::arg("p"), py::arg("growth_K") = 8);
  mod.def("witness_ratio", [](std::shared_ptr<GroupoidModel> m, double alpha, double p, int k, int C) {
            return witness_ratio(*m, MeasureContext::uniform(*m), alpha, p, k, C);
          },
          py::arg("model"), py::arg("alpha"), py::arg("p"), py::arg("k"), py::arg("C"));
  mod.def("certificate",
          [](std::shared_ptr<GroupoidModel> m, double q, double p, double alpha, std::optional<int> K, int growth_K) {
            const auto g = growth_stats(*m, growth_K, 1);
            return to_py(certificate(*m, MeasureContext::uniform(*m), g, q, p, alpha,
                                     K.value_or(default_extension_horizon(*m)))
                             .to_json());
          },
          py::arg("model"), py::arg("q"), py::arg("p"), py::arg("alpha"), py::arg("K") = py::none(),
          py::arg("growth_K") = 6);
}
