#pragma once

#include <cstdint>
#include <limits>

#include <nlohmann/json_fwd.hpp>

#include "qnetsim/control_plane.hpp"
#include "qnetsim/topology.hpp"

namespace qnetsim {

struct SimulationParams {
    double duration = 1.0;             // simulated seconds
    std::uint64_t seed = 0;
    int runs = 1;
    double coherence_time = std::numeric_limits<double>::infinity();  // T_coh
    PurifyRule purify_rule = PurifyRule::Bbpssw;
    bool idealized_coordination = false;
    bool conflict_guard = true;
    bool per_state_occupancy = false;  // emit qubit-state occupancy series
};

struct ScenarioConfig {
    NetworkTopology topology;
    std::vector<PathInstruction> paths;
    TimingConfig timing;
    SimulationParams sim;
    double t_r = 0.0;  // reactive routing interval: parsed, rejected at run time
};

// Parses and validates a full scenario document. Unknown keys anywhere in the
// document are rejected.
ScenarioConfig load_scenario(const nlohmann::json& doc);

// Topology-only load/serialize; serialize-then-load round-trips field-by-field.
NetworkTopology load_topology(const nlohmann::json& doc);
nlohmann::json topology_to_json(const NetworkTopology& topo);

}  // namespace qnetsim
