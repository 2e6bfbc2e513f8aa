#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pedebate/harness.hpp"
#include "pedebate/indistinguishability.hpp"
#include "pedebate/serialize.hpp"

namespace py = pybind11;
using namespace pedebate;

namespace {

py::dict stability_to_dict(const StabilityReport& report) {
  py::dict d;
  d["stable"] = report.stable;
  d["worst_gap"] = report.worst_gap;
  d["threshold"] = report.threshold;
  d["witness"] = report.witness;
  d["method"] = report.method;
  return d;
}

py::dict check_stability_py(const std::string& logic, int w, int kappa,
                            const std::vector<double>& p, double epsilon, double rho) {
  AggregatorSpec spec;
  spec.logic = logic == "or" ? AggregatorSpec::Gate::Or : AggregatorSpec::Gate::And;
  spec.group_count = w;
  spec.group_size = kappa;
  return stability_to_dict(check_stability(spec, p, epsilon, rho));
}

std::string run_debate_py(const std::string& fixture, std::uint64_t seed,
                          const std::string& prover, const std::string& estimator) {
  auto f = make_fixture(fixture, seed);
  ProverPtr A;
  for (const auto& cand : f.pool.provers)
    if (cand->name() == prover) A = cand;
  EstimatorPtr B;
  for (const auto& cand : f.pool.estimators)
    if (cand->name() == estimator) B = cand;
  require(A != nullptr, "unknown prover " + prover);
  require(B != nullptr, "unknown estimator " + estimator);
  json runs = json::array();
  for (const Bits& x : f.world->inputs) {
    CounterRng rng(seed, 0);
    runs.push_back(debate_run_to_json(run_debate(*f.world, *f.dec, *A, *B, x, f.params, rng)));
  }
  return json(runs).dump();
}

double expected_payoff_py(const std::string& fixture, const std::string& prover,
                          const std::string& estimator, std::uint64_t seed) {
  auto f = make_fixture(fixture, seed);
  ProverPtr A;
  for (const auto& cand : f.pool.provers)
    if (cand->name() == prover) A = cand;
  EstimatorPtr B;
  for (const auto& cand : f.pool.estimators)
    if (cand->name() == estimator) B = cand;
  require(A != nullptr, "unknown prover " + prover);
  require(B != nullptr, "unknown estimator " + estimator);
  return expected_payoff(*f.world, *f.dec, *A, *B, f.params);
}

py::list stackelberg_py(const std::vector<std::vector<double>>& values, double alpha) {
  PayoffMatrix m;
  m.values = values;
  for (std::size_t r = 0; r < values.size(); ++r) m.provers.push_back("A" + std::to_string(r));
  for (std::size_t c = 0; c < values.at(0).size(); ++c)
    m.estimators.push_back("B" + std::to_string(c));
  py::list out;
  for (const auto& eq : stackelberg(m, alpha)) {
    py::dict d;
    d["leader"] = eq.leader_choice;
    d["follower_map"] = eq.follower_map;
    d["leader_value"] = eq.leader_value;
    out.append(d);
  }
  return out;
}

py::dict run_suite_py(const std::string& name, std::uint64_t seed) {
  const auto result = run_suite(name, seed);
  py::dict d;
  d["suite"] = result.suite;
  d["pass"] = result.pass;
  py::list records;
  for (const auto& r : result.records) {
    py::dict rec;
    rec["metric"] = r.metric;
    rec["value"] = r.value;
    rec["bound"] = r.bound;
    rec["pass"] = r.pass;
    rec["informational"] = r.informational;
    records.append(rec);
  }
  d["records"] = records;
  return d;
}

}  // namespace

PYBIND11_MODULE(_pedebate, m) {
  m.doc() = "prover-estimator debate simulator: core operations";

  m.def("project_to_simplex",
        [](const std::vector<double>& v) { return project_to_simplex(v); },
        py::arg("v"), "Euclidean projection onto the probability simplex.");
  m.def("kappa_for", &kappa_for, py::arg("w"), py::arg("epsilon"),
        "Majority fan-in for the stable transformation.");
  m.def("check_stability", &check_stability_py, py::arg("logic"), py::arg("w"),
        py::arg("kappa"), py::arg("p"), py::arg("epsilon"), py::arg("rho"),
        "Stability report for a logic-gate-over-majorities aggregator.");
  m.def("run_debate", &run_debate_py, py::arg("fixture"), py::arg("seed") = 42,
        py::arg("prover") = "honest", py::arg("estimator") = "uniform",
        "Run one seeded debate per fixture input; returns transcripts as JSON.");
  m.def("expected_payoff", &expected_payoff_py, py::arg("fixture"), py::arg("prover"),
        py::arg("estimator"), py::arg("seed") = 42,
        "Exact expected payoff by branch enumeration.");
  m.def("stackelberg", &stackelberg_py, py::arg("values"), py::arg("alpha"),
        "All alpha-approximate leader-follower equilibria of a payoff matrix.");
  m.def("run_suite", &run_suite_py, py::arg("name"), py::arg("seed") = 42,
        "Run a verification suite and return its records.");
  m.def("fixtures", []() { return fixture_names(); });
  m.def("suites", []() { return suite_names(); });
}
