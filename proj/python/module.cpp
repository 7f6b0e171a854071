#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "qnetsim/config.hpp"
#include "qnetsim/forwarding.hpp"
#include "qnetsim/oracle.hpp"
#include "qnetsim/simulation.hpp"
#include "qnetsim/sweep.hpp"
#include "qnetsim/topology.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace qnetsim;

namespace {

py::dict metrics_to_dict(const RunMetrics& m) {
    py::dict out;
    py::list flows;
    for (const auto& f : m.flows) {
        py::dict d;
        d["id"] = f.id;
        d["delivered"] = f.delivered;
        d["rate"] = f.rate(m.duration);
        d["mean_fidelity"] = f.mean_fidelity();
        d["swap_attempts"] = f.swap_attempts;
        d["swap_successes"] = f.swap_successes;
        d["purif_attempts"] = f.purif_attempts;
        d["purif_successes"] = f.purif_successes;
        d["decohered"] = f.decohered;
        flows.append(d);
    }
    py::list channels;
    for (const auto& c : m.channels) {
        py::dict d;
        d["id"] = c.id;
        d["attempts"] = c.attempts;
        d["successes"] = c.successes;
        d["measured_p"] = c.measured_p();
        d["attempt_rate"] = c.attempt_rate(m.duration);
        d["entanglement_rate"] = c.entanglement_rate(m.duration);
        channels.append(d);
    }
    out["flows"] = flows;
    out["channels"] = channels;
    out["ledger"] = py::dict(
        py::arg("created") = m.ledger.created, py::arg("delivered") = m.ledger.delivered,
        py::arg("decohered") = m.ledger.decohered,
        py::arg("swap_consumed") = m.ledger.swap_consumed,
        py::arg("purif_consumed") = m.ledger.purif_consumed,
        py::arg("live") = m.ledger.live, py::arg("balanced") = m.ledger.balanced());
    out["event_count"] = m.event_count;
    out["wall_seconds"] = m.wall_seconds;
    out["duration"] = m.duration;
    return out;
}

}  // namespace

PYBIND11_MODULE(qnetsim, m) {
    m.doc() = "Discrete-event simulator for end-to-end entanglement distribution";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SimLogicError>(m, "SimLogicError", PyExc_RuntimeError);

    m.def(
        "run_scenario",
        [](const std::string& config_json, py::object seed) {
            const ScenarioConfig cfg = load_scenario(json::parse(config_json));
            const std::uint64_t s =
                seed.is_none() ? cfg.sim.seed : seed.cast<std::uint64_t>();
            return metrics_to_dict(run_scenario(cfg, s));
        },
        py::arg("config_json"), py::arg("seed") = py::none(),
        "Run one scenario from a JSON string; returns a metrics dict.");

    m.def(
        "run_scenario_csv",
        [](const std::string& config_json, py::object seed) {
            const ScenarioConfig cfg = load_scenario(json::parse(config_json));
            const std::uint64_t s =
                seed.is_none() ? cfg.sim.seed : seed.cast<std::uint64_t>();
            std::ostringstream csv;
            emit_csv(run_scenario(cfg, s), csv);
            return csv.str();
        },
        py::arg("config_json"), py::arg("seed") = py::none(),
        "Run one scenario and return the CSV metrics text.");

    m.def(
        "run_sweep",
        [](const std::string& config_json, const std::string& axis,
           const std::vector<std::string>& values, int runs) {
            std::vector<json> parsed;
            for (const auto& v : values) {
                json j = json::parse(v, nullptr, false);
                parsed.push_back(j.is_discarded() ? json(v) : j);
            }
            py::list rows;
            for (const auto& cell : run_sweep(json::parse(config_json), axis, parsed, runs)) {
                py::dict d;
                d["axis_value"] = cell.axis_value;
                d["metric"] = cell.metric;
                d["mean"] = cell.mean;
                d["stddev"] = cell.stddev;
                rows.append(d);
            }
            return rows;
        },
        py::arg("config_json"), py::arg("axis"), py::arg("values"), py::arg("runs") = 100);

    m.def(
        "generate_random_scenario",
        [](int n_nodes, double avg_degree, int capacity, double sim_seconds,
           std::uint64_t seed) {
            return generate_random_scenario(n_nodes, avg_degree, capacity, sim_seconds,
                                            seed)
                .dump();
        },
        py::arg("n_nodes"), py::arg("avg_degree") = 2.5, py::arg("capacity") = 10,
        py::arg("sim_seconds") = 1.0, py::arg("seed") = 0,
        "Connected random scenario document as a JSON string.");

    m.def("e2e_distribution", &e2e_distribution, py::arg("c1"), py::arg("c2"),
          py::arg("p1"), py::arg("p2"), py::arg("q"));
    m.def("expected_throughput", &expected_throughput, py::arg("pmf"), py::arg("t_s"));
    m.def(
        "predict_rate",
        [](double a1, double a2, double p1, double p2, double r1, double r2, double q,
           double t_coh, double l1, double l2, double c0, double t_app, int samples) {
            OracleInput in;
            in.attempt_rate[0] = a1;
            in.attempt_rate[1] = a2;
            in.p_success[0] = p1;
            in.p_success[1] = p2;
            in.ent_rate[0] = r1;
            in.ent_rate[1] = r2;
            in.swap_success = q;
            in.coherence_time = t_coh;
            in.length_km[0] = l1;
            in.length_km[1] = l2;
            in.classical_speed = c0;
            in.t_app = t_app;
            in.sample_count = samples;
            return predict_rate(in);
        },
        py::arg("a1"), py::arg("a2"), py::arg("p1"), py::arg("p2"), py::arg("r1"),
        py::arg("r2"), py::arg("q"), py::arg("t_coh"), py::arg("l1"), py::arg("l2"),
        py::arg("c0") = 2.0e5, py::arg("t_app") = 0.0, py::arg("samples") = 5000);

    m.def(
        "purify_step",
        [](double f1, double f2) {
            const auto out = purify_step(f1, f2);
            return py::make_tuple(out.success_prob, out.fidelity_out);
        },
        py::arg("f1"), py::arg("f2"),
        "BBPSSW recurrence: (success probability, output fidelity).");

    m.def("attenuation_length_from_db", &attenuation_length_from_db,
          py::arg("loss_db_per_km"));
}
