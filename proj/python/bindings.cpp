#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pqw/cli_harness.hpp"
#include "pqw/decoherence.hpp"
#include "pqw/detection.hpp"
#include "pqw/errors.hpp"
#include "pqw/hitting_time.hpp"
#include "pqw/spectral_bounds.hpp"
#include "pqw/szegedy_core.hpp"

namespace py = pybind11;
using namespace pqw;

namespace {

Graph parse_graph(const std::string& spec) { return generate_graph(GraphSpec::parse(spec)); }

MarkedSet marked_set(const Graph& g, const std::vector<int>& marked) {
  return MarkedSet(g.n(), marked);
}

AveragedOperator averaged(const Graph& g, const std::vector<int>& marked, double p,
                          const std::string& variant, const std::string& mode,
                          std::uint64_t samples, std::uint64_t seed) {
  const PercolationModel model(g, p, parse_variant(variant));
  OperatorMode om;
  om.mode = mode == "mc" ? AveragedOperator::Mode::monte_carlo : AveragedOperator::Mode::exact;
  om.samples = samples;
  om.seed = seed;
  return build_averaged_operator(model, marked_set(g, marked), om);
}

py::dict report_dict(const HittingTimeReport& r) {
  py::dict d;
  d["F"] = r.F;
  d["threshold"] = r.threshold;
  d["T_star"] = r.T_star ? py::cast(*r.T_star) : py::none();
  d["T_max"] = r.T_max;
  const auto b = r.bound_value();
  d["bound"] = b ? py::cast(*b) : py::none();
  d["within_bound"] = r.within_bound();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Szegedy quantum walks under percolation decoherence";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<InvariantError>(m, "InvariantError", PyExc_ArithmeticError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);
  py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);

  py::class_<Graph>(m, "Graph")
      .def(py::init([](int n, const std::vector<std::pair<int, int>>& edges) {
             std::vector<Edge> e;
             for (auto [u, v] : edges) e.push_back({u, v});
             return Graph(n, e);
           }),
           py::arg("n"), py::arg("edges"))
      .def_static("from_spec", &parse_graph, py::arg("spec"))
      .def_static("complete", &Graph::complete)
      .def_static("odd_cycle", &Graph::odd_cycle)
      .def_property_readonly("n", &Graph::n)
      .def_property_readonly("edges", [](const Graph& g) {
        std::vector<std::pair<int, int>> out;
        for (const auto& e : g.edges()) out.emplace_back(e.u, e.v);
        return out;
      })
      .def("complement", &Graph::complement)
      .def("__eq__", &Graph::operator==)
      .def("__repr__", [](const Graph& g) {
        return "Graph(n=" + std::to_string(g.n()) + ", edges=" + std::to_string(g.edge_count()) + ")";
      });

  m.def("transition_matrix", [](const Graph& g) { return build_transition_matrix(g).entries(); });
  m.def("walk_unitary", [](const Graph& g, const std::vector<int>& marked) {
    return marked_walk_unitary(g, marked_set(g, marked));
  }, py::arg("graph"), py::arg("marked") = std::vector<int>{});
  m.def("initial_state", [](const Graph& g) {
    return initial_state(build_transition_matrix(g)).amplitudes();
  });

  m.def("bounds", [](const Graph& g, const std::vector<int>& marked, double p, const std::string& variant) {
    const PercolationModel model(g, p, parse_variant(variant));
    const auto sd = spectral_data(build_transition_matrix(g), marked_set(g, marked));
    return to_json(bound_report(sd, model.a_c(), p)).dump();
  }, py::arg("graph"), py::arg("marked"), py::arg("p") = 0.0, py::arg("variant") = "bond-flip");

  m.def("averaged_operator", [](const Graph& g, const std::vector<int>& marked, double p,
                                const std::string& variant, const std::string& mode,
                                std::uint64_t samples, std::uint64_t seed) {
    return averaged(g, marked, p, variant, mode, samples, seed).matrix;
  }, py::arg("graph"), py::arg("marked"), py::arg("p"), py::arg("variant") = "bond-flip",
     py::arg("mode") = "exact", py::arg("samples") = kDefaultSamples, py::arg("seed") = 0);

  m.def("coherent_qht", [](const Graph& g, const std::vector<int>& marked, std::optional<int> tcap) {
    return report_dict(coherent_qht(build_transition_matrix(g), marked_set(g, marked), tcap));
  }, py::arg("graph"), py::arg("marked"), py::arg("tcap") = py::none());

  m.def("decoherent_qht", [](const Graph& g, const std::vector<int>& marked, double p,
                             const std::string& variant, const std::string& mode,
                             std::uint64_t samples, std::uint64_t seed, std::optional<int> tcap) {
    const PercolationModel model(g, p, parse_variant(variant));
    return report_dict(decoherent_qht(model, averaged(g, marked, p, variant, mode, samples, seed), tcap));
  }, py::arg("graph"), py::arg("marked"), py::arg("p"), py::arg("variant") = "bond-flip",
     py::arg("mode") = "exact", py::arg("samples") = kDefaultSamples, py::arg("seed") = 0,
     py::arg("tcap") = py::none());

  m.def("classical_hitting_time", [](const Graph& g, const std::vector<int>& marked) {
    return classical_hitting_time(build_transition_matrix(g), marked_set(g, marked));
  });

  m.def("verify_lemma1", [](const Graph& g, const std::vector<int>& marked, double p, int t, int T) {
    return verify_lemma1(PercolationModel(g, p, Variant::bond_flip), marked_set(g, marked), t, T);
  }, py::arg("graph"), py::arg("marked"), py::arg("p"), py::arg("t"), py::arg("T"));

  m.def("exact_mean_p1", [](const Graph& g, const std::vector<int>& marked, double p, int T,
                            const std::string& variant) {
    const auto r = exact_mean_p1(PercolationModel(g, p, parse_variant(variant)), marked_set(g, marked), T);
    return py::make_tuple(r.value, r.method);
  }, py::arg("graph"), py::arg("marked"), py::arg("p"), py::arg("T"), py::arg("variant") = "bond-flip");

  m.def("detection_campaign", [](const Graph& g, const std::vector<int>& marked, double p, int T,
                                 std::uint64_t trials, std::uint64_t seed, const std::string& variant) {
    const PercolationModel model(g, p, parse_variant(variant));
    py::gil_scoped_release release;
    return to_json(run_detection_campaign(model, marked_set(g, marked), T, trials, seed)).dump();
  }, py::arg("graph"), py::arg("marked"), py::arg("p"), py::arg("T"), py::arg("trials"),
     py::arg("seed") = 0, py::arg("variant") = "bond-flip");

  m.def("run_cli", [](std::vector<std::string> args) {
    args.insert(args.begin(), "pqw");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli::run(static_cast<int>(argv.size()), argv.data());
  }, py::arg("args"));
}
