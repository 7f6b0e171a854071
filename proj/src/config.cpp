#include "qnetsim/config.hpp"

#include <set>

#include <nlohmann/json.hpp>

namespace qnetsim {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& context) {
    if (!j.is_object()) throw ConfigError(context + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key))
            throw ConfigError(context + ": unknown key '" + key + "'");
    }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

NodeSpec parse_node(const json& j) {
    check_keys(j, {"id", "memory_capacity", "local_op_latency", "swap_success_prob",
                   "end_node"},
               "node");
    NodeSpec n;
    n.id = j.at("id").get<std::string>();
    n.memory_capacity = j.at("memory_capacity").get<int>();
    n.local_op_latency = get_or(j, "local_op_latency", 0.0);
    n.swap_success_prob = get_or(j, "swap_success_prob", 1.0);
    n.end_node = get_or(j, "end_node", false);
    return n;
}

ChannelSpec parse_channel(const json& j) {
    check_keys(j,
               {"id", "primary", "secondary", "length_km", "attenuation_length_km",
                "loss_db_per_km", "architecture", "alpha", "eta_b", "eta_d", "eta_s",
                "eta_r", "base_fidelity", "qubits_primary", "qubits_secondary",
                "classical_speed_km_s"},
               "channel");
    ChannelSpec c;
    c.id = j.at("id").get<std::string>();
    c.primary = j.at("primary").get<std::string>();
    c.secondary = j.at("secondary").get<std::string>();
    c.length_km = j.at("length_km").get<double>();
    // Attenuation may be given as L0 directly or as dB/km; L0 wins if both.
    if (j.contains("attenuation_length_km"))
        c.attenuation_length_km = j.at("attenuation_length_km").get<double>();
    else if (j.contains("loss_db_per_km"))
        c.attenuation_length_km = attenuation_length_from_db(j.at("loss_db_per_km").get<double>());
    else
        throw ConfigError("channel " + c.id +
                          ": needs attenuation_length_km or loss_db_per_km");
    c.architecture = architecture_from_string(j.at("architecture").get<std::string>());
    c.alpha = get_or(j, "alpha", 0.5);
    c.eta_b = get_or(j, "eta_b", 1.0);
    c.eta_d = get_or(j, "eta_d", 1.0);
    c.eta_s = get_or(j, "eta_s", 1.0);
    c.eta_r = get_or(j, "eta_r", 1.0);
    c.base_fidelity = get_or(j, "base_fidelity", 1.0);
    c.qubits_primary = j.at("qubits_primary").get<int>();
    c.qubits_secondary = j.at("qubits_secondary").get<int>();
    c.classical_speed = get_or(j, "classical_speed_km_s", kDefaultClassicalSpeed);
    return c;
}

SwapPolicy parse_swap_policy(const json& j, const std::string& path_id) {
    SwapPolicy sp;
    if (j.is_string()) {
        if (j.get<std::string>() != "asap")
            throw ConfigError("path " + path_id + ": swap_policy must be \"asap\" or a list");
        sp.mode = SwapMode::Asap;
        return sp;
    }
    if (!j.is_array())
        throw ConfigError("path " + path_id + ": swap_policy must be \"asap\" or a list");
    sp.mode = SwapMode::StaticOrder;
    int rank = 0;
    for (const auto& entry : j) {
        if (entry.is_string()) {
            sp.rank[entry.get<std::string>()] = rank;
        } else if (entry.is_array()) {
            // nodes grouped at the same rank, e.g. [["R1","R3"],["R2"],["R4"]]
            for (const auto& node : entry) sp.rank[node.get<std::string>()] = rank;
        } else {
            throw ConfigError("path " + path_id + ": malformed swap order entry");
        }
        ++rank;
    }
    return sp;
}

MultiplexConfig parse_multiplexing(const json& j, const std::string& path_id) {
    MultiplexConfig mc;
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "blocking") mc.mode = MultiplexMode::Blocking;
        else if (s == "buffer_space") mc.mode = MultiplexMode::BufferSpace;
        else if (s == "statistical") mc.mode = MultiplexMode::Statistical;
        else throw ConfigError("path " + path_id + ": unknown multiplexing mode " + s);
        return mc;
    }
    check_keys(j, {"mode", "allocations"}, "path " + path_id + " multiplexing");
    const auto s = j.at("mode").get<std::string>();
    if (s == "blocking") mc.mode = MultiplexMode::Blocking;
    else if (s == "buffer_space") mc.mode = MultiplexMode::BufferSpace;
    else if (s == "statistical") mc.mode = MultiplexMode::Statistical;
    else throw ConfigError("path " + path_id + ": unknown multiplexing mode " + s);
    if (j.contains("allocations")) {
        if (mc.mode == MultiplexMode::Statistical)
            throw ConfigError("path " + path_id +
                              ": statistical multiplexing takes no allocations");
        for (const auto& [chan, a] : j.at("allocations").items()) {
            check_keys(a, {"primary", "secondary"},
                       "path " + path_id + " allocation for " + chan);
            mc.allocations[chan] = {a.at("primary").get<int>(),
                                    a.at("secondary").get<int>()};
        }
    }
    if (mc.mode == MultiplexMode::BufferSpace && mc.allocations.empty())
        throw ConfigError("path " + path_id +
                          ": buffer-space multiplexing requires allocations");
    return mc;
}

PathInstruction parse_path(const json& j, const NetworkTopology& topo) {
    check_keys(j, {"id", "src", "dst", "route", "swap_policy", "purification",
                   "multiplexing", "active"},
               "path");
    PathInstruction pi;
    pi.request_id = j.at("id").get<std::string>();
    if (j.contains("route")) {
        for (const auto& n : j.at("route")) pi.route.push_back(n.get<std::string>());
    } else if (j.contains("src") && j.contains("dst")) {
        pi.route = compute_path(topo, j.at("src").get<std::string>(),
                                j.at("dst").get<std::string>());
    } else {
        throw ConfigError("path " + pi.request_id + ": needs route or src+dst");
    }
    if (j.contains("swap_policy"))
        pi.swap_policy = parse_swap_policy(j.at("swap_policy"), pi.request_id);
    if (j.contains("purification")) {
        for (const auto& t : j.at("purification")) {
            check_keys(t, {"segment", "rounds"}, "path " + pi.request_id + " purification");
            PurificationTarget target;
            for (const auto& n : t.at("segment")) target.segment.push_back(n.get<std::string>());
            target.rounds = t.at("rounds").get<int>();
            pi.purification.targets.push_back(std::move(target));
        }
    }
    if (j.contains("multiplexing"))
        pi.multiplexing = parse_multiplexing(j.at("multiplexing"), pi.request_id);
    pi.active = get_or(j, "active", true);
    return pi;
}

}  // namespace

NetworkTopology load_topology(const json& doc) {
    check_keys(doc, {"nodes", "channels"}, "topology");
    std::vector<NodeSpec> nodes;
    std::vector<ChannelSpec> channels;
    for (const auto& n : doc.at("nodes")) nodes.push_back(parse_node(n));
    for (const auto& c : doc.at("channels")) channels.push_back(parse_channel(c));
    return NetworkTopology(std::move(nodes), std::move(channels));
}

json topology_to_json(const NetworkTopology& topo) {
    json nodes = json::array();
    for (const auto& n : topo.nodes()) {
        nodes.push_back({{"id", n.id},
                         {"memory_capacity", n.memory_capacity},
                         {"local_op_latency", n.local_op_latency},
                         {"swap_success_prob", n.swap_success_prob},
                         {"end_node", n.end_node}});
    }
    json channels = json::array();
    for (const auto& c : topo.channels()) {
        channels.push_back({{"id", c.id},
                            {"primary", c.primary},
                            {"secondary", c.secondary},
                            {"length_km", c.length_km},
                            {"attenuation_length_km", c.attenuation_length_km},
                            {"architecture", to_string(c.architecture)},
                            {"alpha", c.alpha},
                            {"eta_b", c.eta_b},
                            {"eta_d", c.eta_d},
                            {"eta_s", c.eta_s},
                            {"eta_r", c.eta_r},
                            {"base_fidelity", c.base_fidelity},
                            {"qubits_primary", c.qubits_primary},
                            {"qubits_secondary", c.qubits_secondary},
                            {"classical_speed_km_s", c.classical_speed}});
    }
    return json{{"nodes", nodes}, {"channels", channels}};
}

ScenarioConfig load_scenario(const json& doc) {
    check_keys(doc, {"nodes", "channels", "paths", "timing", "simulation"}, "scenario");
    ScenarioConfig cfg;
    cfg.topology = load_topology(json{{"nodes", doc.at("nodes")}, {"channels", doc.at("channels")}});

    if (doc.contains("paths")) {
        for (const auto& p : doc.at("paths"))
            cfg.paths.push_back(parse_path(p, cfg.topology));
    }
    validate_instructions(cfg.topology, cfg.paths);

    if (doc.contains("timing")) {
        const auto& t = doc.at("timing");
        check_keys(t, {"mode", "t_ext", "t_int", "t_app", "t_r"}, "timing");
        const auto mode = t.at("mode").get<std::string>();
        if (mode == "async") {
            cfg.timing.mode = TimingMode::Async;
        } else if (mode == "sync") {
            cfg.timing.mode = TimingMode::Sync;
            cfg.timing.t_ext = t.at("t_ext").get<double>();
            cfg.timing.t_int = t.at("t_int").get<double>();
            cfg.timing.t_app = t.at("t_app").get<double>();
            if (cfg.timing.t_ext <= 0 || cfg.timing.t_int <= 0 || cfg.timing.t_app <= 0)
                throw ConfigError("timing: sync phase durations must all be > 0");
        } else {
            throw ConfigError("timing: unknown mode " + mode);
        }
        cfg.t_r = get_or(t, "t_r", 0.0);
    }

    const auto& s = doc.at("simulation");
    check_keys(s,
               {"duration", "seed", "runs", "coherence_time", "purify_rule",
                "idealized_coordination", "conflict_guard", "per_state_occupancy"},
               "simulation");
    cfg.sim.duration = s.at("duration").get<double>();
    if (cfg.sim.duration <= 0) throw ConfigError("simulation: duration must be > 0");
    cfg.sim.seed = get_or<std::uint64_t>(s, "seed", 0);
    cfg.sim.runs = get_or(s, "runs", 1);
    if (s.contains("coherence_time")) {
        const double tc = s.at("coherence_time").get<double>();
        if (tc <= 0) throw ConfigError("simulation: coherence_time must be > 0");
        cfg.sim.coherence_time = tc;
    }
    if (s.contains("purify_rule")) {
        const auto rule = s.at("purify_rule").get<std::string>();
        if (rule != "bbpssw") throw ConfigError("unknown purify_rule: " + rule);
        cfg.sim.purify_rule = PurifyRule::Bbpssw;
    }
    cfg.sim.idealized_coordination = get_or(s, "idealized_coordination", false);
    cfg.sim.conflict_guard = get_or(s, "conflict_guard", true);
    cfg.sim.per_state_occupancy = get_or(s, "per_state_occupancy", false);
    return cfg;
}

}  // namespace qnetsim
