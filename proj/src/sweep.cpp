#include "qnetsim/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>

#include <nlohmann/json.hpp>

#include "qnetsim/config.hpp"
#include "qnetsim/control_plane.hpp"
#include "qnetsim/simulation.hpp"

namespace qnetsim {

using nlohmann::json;

namespace {

json* resolve_axis(json& doc, const std::string& axis) {
    json* cur = &doc;
    size_t start = 0;
    while (start <= axis.size()) {
        const size_t dot = axis.find('.', start);
        const std::string part = axis.substr(start, dot - start);
        if (cur->is_array()) {
            size_t idx = 0;
            try {
                idx = std::stoul(part);
            } catch (const std::exception&) {
                throw ConfigError("sweep axis: '" + part + "' is not an array index");
            }
            if (idx >= cur->size())
                throw ConfigError("sweep axis: index " + part + " out of range");
            cur = &(*cur)[idx];
        } else if (cur->is_object() && cur->contains(part)) {
            cur = &(*cur)[part];
        } else {
            throw ConfigError("sweep axis: no field '" + part + "' in config");
        }
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    return cur;
}

struct Agg {
    double sum = 0.0, sumsq = 0.0;
    int n = 0;
    void add(double v) {
        sum += v;
        sumsq += v * v;
        n += 1;
    }
    double mean() const { return n ? sum / n : 0.0; }
    double stddev() const {
        if (n < 2) return 0.0;
        const double m = mean();
        return std::sqrt(std::max(0.0, (sumsq - n * m * m) / (n - 1)));
    }
};

void collect(const RunMetrics& m, std::map<std::string, Agg>& aggs,
             std::vector<std::string>& order) {
    auto put = [&](const std::string& key, double v) {
        if (!aggs.count(key)) order.push_back(key);
        aggs[key].add(v);
    };
    for (const auto& f : m.flows) {
        put("flow." + f.id + ".rate", f.rate(m.duration));
        put("flow." + f.id + ".fidelity", f.mean_fidelity());
        put("flow." + f.id + ".delivered", static_cast<double>(f.delivered));
    }
    for (const auto& c : m.channels) {
        put("chan." + c.id + ".attempt_rate", c.attempt_rate(m.duration));
        put("chan." + c.id + ".ent_rate", c.entanglement_rate(m.duration));
        put("chan." + c.id + ".p", c.measured_p());
    }
    double total = 0.0;
    for (const auto& f : m.flows) total += f.rate(m.duration);
    put("total.rate", total);
}

}  // namespace

std::vector<SweepCell> run_batch(const json& doc, int runs, const std::string& axis_label) {
    if (runs < 1) throw ConfigError("sweep: runs must be >= 1");
    const ScenarioConfig cfg = load_scenario(doc);

    std::vector<std::future<RunMetrics>> futures;
    futures.reserve(runs);
    for (int r = 0; r < runs; ++r) {
        const std::uint64_t seed = cfg.sim.seed + static_cast<std::uint64_t>(r);
        futures.push_back(std::async(std::launch::async,
                                     [&cfg, seed] { return run_scenario(cfg, seed); }));
    }

    std::map<std::string, Agg> aggs;
    std::vector<std::string> order;
    for (auto& fut : futures) collect(fut.get(), aggs, order);  // seed order

    std::vector<SweepCell> out;
    for (const auto& key : order)
        out.push_back({axis_label, key, aggs.at(key).mean(), aggs.at(key).stddev()});
    return out;
}

std::vector<SweepCell> run_sweep(const json& doc, const std::string& axis,
                                 const std::vector<json>& values, int runs) {
    std::vector<SweepCell> table;
    for (const auto& v : values) {
        json point = doc;
        *resolve_axis(point, axis) = v;
        const std::string label = v.is_string() ? v.get<std::string>() : v.dump();
        auto rows = run_batch(point, runs, label);
        table.insert(table.end(), rows.begin(), rows.end());
    }
    return table;
}

json generate_random_scenario(int n_nodes, double avg_degree, int capacity,
                              double sim_seconds, std::uint64_t seed) {
    if (n_nodes < 2) throw ConfigError("random scenario: need at least 2 nodes");
    if (capacity < 1) throw ConfigError("random scenario: capacity must be >= 1");
    RngStream rng(seed, "topo");

    // Spanning tree first (always connected), then extra edges up to the
    // target average degree.
    std::set<std::pair<int, int>> edges;
    for (int v = 1; v < n_nodes; ++v) {
        const int u = rng.uniform_int(0, v - 1);
        edges.insert({std::min(u, v), std::max(u, v)});
    }
    const auto target = static_cast<size_t>(std::llround(n_nodes * avg_degree / 2.0));
    const size_t max_edges = static_cast<size_t>(n_nodes) * (n_nodes - 1) / 2;
    int misses = 0;
    while (edges.size() < std::min(target, max_edges) && misses < 10 * n_nodes) {
        int u = rng.uniform_int(0, n_nodes - 1);
        int v = rng.uniform_int(0, n_nodes - 1);
        if (u == v) continue;
        if (!edges.insert({std::min(u, v), std::max(u, v)}).second) ++misses;
    }

    std::vector<int> degree(n_nodes, 0);
    for (const auto& [u, v] : edges) {
        degree[u] += 1;
        degree[v] += 1;
    }

    auto node_id = [](int i) { return "n" + std::to_string(i); };
    json nodes = json::array();
    for (int i = 0; i < n_nodes; ++i) {
        nodes.push_back({{"id", node_id(i)},
                         {"memory_capacity", degree[i] * capacity},
                         {"local_op_latency", 1e-5},
                         {"swap_success_prob", 0.5}});
    }
    json channels = json::array();
    int cidx = 0;
    for (const auto& [u, v] : edges) {
        channels.push_back({{"id", "c" + std::to_string(cidx++)},
                            {"primary", node_id(u)},
                            {"secondary", node_id(v)},
                            {"length_km", 30.0},
                            {"loss_db_per_km", 0.2},
                            {"architecture", "sim-dual-rail"},
                            {"eta_d", 0.95},
                            {"base_fidelity", 0.99},
                            {"qubits_primary", capacity},
                            {"qubits_secondary", capacity}});
    }

    // ceil(0.2 n) distinct source-destination requests over min-hop routes.
    const int n_requests = (n_nodes + 4) / 5;
    std::set<std::pair<int, int>> used;
    json paths = json::array();
    int attempts = 0;
    while (static_cast<int>(paths.size()) < n_requests && attempts < 100 * n_requests) {
        ++attempts;
        int s = rng.uniform_int(0, n_nodes - 1);
        int d = rng.uniform_int(0, n_nodes - 1);
        if (s == d || !used.insert({s, d}).second) continue;
        paths.push_back({{"id", "req" + std::to_string(paths.size())},
                         {"src", node_id(s)},
                         {"dst", node_id(d)},
                         {"swap_policy", "asap"},
                         {"multiplexing", "statistical"}});
    }

    return json{{"nodes", nodes},
                {"channels", channels},
                {"paths", paths},
                {"simulation", {{"duration", sim_seconds},
                                {"seed", seed},
                                {"coherence_time", 0.005},
                                {"idealized_coordination", true}}}};
}

}  // namespace qnetsim
