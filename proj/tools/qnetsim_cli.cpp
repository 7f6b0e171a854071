#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qnetsim/config.hpp"
#include "qnetsim/errors.hpp"
#include "qnetsim/event_engine.hpp"
#include "qnetsim/metrics.hpp"
#include "qnetsim/oracle.hpp"
#include "qnetsim/simulation.hpp"
#include "qnetsim/sweep.hpp"

using nlohmann::json;
using namespace qnetsim;

namespace {

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return doc;
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + out_path);
    out << text;
}

int cmd_run(const std::string& config, std::uint64_t seed, bool seed_given, bool trace,
            const std::string& out_path) {
    const json doc = load_json_file(config);
    ScenarioConfig cfg = load_scenario(doc);
    if (seed_given) cfg.sim.seed = seed;

    Simulation sim(cfg, cfg.sim.seed);
    if (trace) {
        sim.set_trace([](const EventRecord& ev) {
            std::cerr << "trace " << format_double(ev.time) << ' ' << ev.seq << ' '
                      << ev.target << ' ' << to_string(ev.kind) << '\n';
        });
    }
    const RunMetrics metrics = sim.run();
    std::ostringstream csv;
    emit_csv(metrics, csv);
    write_output(csv.str(), out_path);
    return 0;
}

int cmd_sweep(const std::string& config, const std::string& axis,
              const std::vector<std::string>& values, int runs,
              const std::string& out_path) {
    const json doc = load_json_file(config);
    std::vector<json> parsed;
    for (const auto& v : values) {
        // Accept bare strings as well as JSON literals (numbers, bools, arrays).
        json j = json::parse(v, nullptr, false);
        parsed.push_back(j.is_discarded() ? json(v) : j);
    }
    const auto table = run_sweep(doc, axis, parsed, runs);
    std::ostringstream csv;
    emit_csv(table, csv);
    write_output(csv.str(), out_path);
    return 0;
}

int cmd_oracle(const OracleInput& input, const std::string& out_path) {
    const double rate = predict_rate(input);
    std::ostringstream out;
    out << "predicted_rate," << format_double(rate) << '\n';

    // pmf at the mean capacities, for inspection.
    const double l_max = std::max(input.length_km[0], input.length_km[1]);
    const TimeSlot slot = select_time_slot(input.ent_rate[0], input.ent_rate[1],
                                           input.coherence_time, l_max,
                                           input.classical_speed, input.t_app);
    const int c1 = static_cast<int>(std::llround(input.attempt_rate[0] * slot.t_s));
    const int c2 = static_cast<int>(std::llround(input.attempt_rate[1] * slot.t_s));
    out << "t_gen," << format_double(slot.t_gen) << '\n';
    out << "t_s," << format_double(slot.t_s) << '\n';
    const auto pmf = e2e_distribution(c1, c2, input.p_success[0], input.p_success[1],
                                      input.swap_success);
    for (size_t k = 0; k < pmf.size(); ++k)
        out << "pmf_" << k << ',' << format_double(pmf[k]) << '\n';
    write_output(out.str(), out_path);
    return 0;
}

int cmd_scale(int nodes, int capacity, double sim_seconds, std::uint64_t seed,
              const std::string& out_path) {
    const json doc = generate_random_scenario(nodes, 2.5, capacity, sim_seconds, seed);
    const ScenarioConfig cfg = load_scenario(doc);
    const RunMetrics metrics = run_scenario(cfg, cfg.sim.seed);
    std::ostringstream csv;
    emit_csv(metrics, csv);
    csv << "wall_seconds," << format_double(metrics.wall_seconds) << '\n';
    write_output(csv.str(), out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic discrete-event simulator for entanglement distribution"};
    app.require_subcommand(1);

    std::string config, out_path, axis;
    std::uint64_t seed = 0;
    bool trace = false;
    int runs = 100;
    std::vector<std::string> values;

    auto* run = app.add_subcommand("run", "Simulate one scenario");
    run->add_option("--config", config, "Scenario JSON file")->required();
    auto* seed_opt = run->add_option("--seed", seed, "Override the config seed");
    run->add_flag("--trace", trace, "Dump the event trace to stderr");
    run->add_option("--out", out_path, "CSV output file (default stdout)");

    auto* sweep = app.add_subcommand("sweep", "Sweep one config field");
    sweep->add_option("--config", config, "Scenario JSON file")->required();
    sweep->add_option("--axis", axis, "Dotted path of the field to vary")->required();
    sweep->add_option("--values", values, "Values to sweep over")->required();
    sweep->add_option("--runs", runs, "Seeds per sweep point");
    sweep->add_option("--out", out_path, "CSV output file (default stdout)");

    OracleInput oin;
    auto* oracle = app.add_subcommand("oracle", "Analytic three-node throughput");
    oracle->add_option("--a1", oin.attempt_rate[0], "Link 1 attempt rate (1/s)")->required();
    oracle->add_option("--a2", oin.attempt_rate[1], "Link 2 attempt rate (1/s)")->required();
    oracle->add_option("--p1", oin.p_success[0], "Link 1 per-attempt success")->required();
    oracle->add_option("--p2", oin.p_success[1], "Link 2 per-attempt success")->required();
    oracle->add_option("--r1", oin.ent_rate[0], "Link 1 entanglement rate (1/s)")->required();
    oracle->add_option("--r2", oin.ent_rate[1], "Link 2 entanglement rate (1/s)")->required();
    oracle->add_option("--q", oin.swap_success, "Swap success probability");
    oracle->add_option("--t-coh", oin.coherence_time, "Coherence time (s)")->required();
    oracle->add_option("--l1", oin.length_km[0], "Link 1 length (km)")->required();
    oracle->add_option("--l2", oin.length_km[1], "Link 2 length (km)")->required();
    oracle->add_option("--c0", oin.classical_speed, "Classical speed (km/s)");
    oracle->add_option("--t-app", oin.t_app, "Application phase duration (s)");
    oracle->add_option("--samples", oin.sample_count, "MC rounding samples");
    oracle->add_option("--out", out_path, "CSV output file (default stdout)");

    int nodes = 128, capacity = 10;
    double sim_seconds = 3.0;
    auto* scale = app.add_subcommand("scale", "Random-topology scalability run");
    scale->add_option("--nodes", nodes, "Node count")->required();
    scale->add_option("--capacity", capacity, "Qubits per channel side")->required();
    scale->add_option("--sim-seconds", sim_seconds, "Simulated duration")->required();
    scale->add_option("--seed", seed, "Topology and simulation seed");
    scale->add_option("--out", out_path, "CSV output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(config, seed, seed_opt->count() > 0, trace, out_path);
        if (sweep->parsed()) return cmd_sweep(config, axis, values, runs, out_path);
        if (oracle->parsed()) return cmd_oracle(oin, out_path);
        if (scale->parsed()) return cmd_scale(nodes, capacity, sim_seconds, seed, out_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const SimLogicError& e) {
        std::cerr << "runtime assertion: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
