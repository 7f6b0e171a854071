#include "qnetsim/topology.hpp"

#include <cmath>
#include <tuple>

namespace qnetsim {

Architecture architecture_from_string(const std::string& s) {
    if (s == "dim-bk") return Architecture::DimBk;
    if (s == "dim-dual-rail") return Architecture::DimDualRail;
    if (s == "sr-dual-rail") return Architecture::SrDualRail;
    if (s == "sim-dual-rail") return Architecture::SimDualRail;
    throw ConfigError("unknown link architecture: " + s);
}

std::string to_string(Architecture a) {
    switch (a) {
        case Architecture::DimBk: return "dim-bk";
        case Architecture::DimDualRail: return "dim-dual-rail";
        case Architecture::SrDualRail: return "sr-dual-rail";
        case Architecture::SimDualRail: return "sim-dual-rail";
    }
    return "?";
}

double attenuation_length_from_db(double loss_db_per_km) {
    if (loss_db_per_km <= 0.0)
        throw ConfigError("fiber loss must be positive (dB/km)");
    return 10.0 / (loss_db_per_km * std::log(10.0));
}

NetworkTopology::NetworkTopology(std::vector<NodeSpec> nodes,
                                 std::vector<ChannelSpec> channels)
    : nodes_(std::move(nodes)), channels_(std::move(channels)) {
    for (size_t i = 0; i < nodes_.size(); ++i) {
        if (!node_index_.emplace(nodes_[i].id, static_cast<int>(i)).second)
            throw ConfigError("duplicate node id: " + nodes_[i].id);
    }
    for (size_t i = 0; i < channels_.size(); ++i) {
        if (!channel_index_.emplace(channels_[i].id, static_cast<int>(i)).second)
            throw ConfigError("duplicate channel id: " + channels_[i].id);
        adjacency_[channels_[i].primary].push_back(static_cast<int>(i));
        adjacency_[channels_[i].secondary].push_back(static_cast<int>(i));
    }
    validate();
}

void NetworkTopology::validate() const {
    for (const auto& n : nodes_) {
        if (n.memory_capacity < 0)
            throw ConfigError("node " + n.id + ": negative memory capacity");
        if (n.swap_success_prob < 0.0 || n.swap_success_prob > 1.0)
            throw ConfigError("node " + n.id + ": swap_success_prob outside [0,1]");
        if (n.local_op_latency < 0.0)
            throw ConfigError("node " + n.id + ": negative local_op_latency");
    }
    std::map<std::string, int> allocated;
    for (const auto& c : channels_) {
        for (const auto& end : {c.primary, c.secondary}) {
            if (!node_index_.count(end))
                throw ConfigError("channel " + c.id + ": dangling endpoint " + end);
        }
        if (c.primary == c.secondary)
            throw ConfigError("channel " + c.id + ": self loop");
        if (c.length_km <= 0.0)
            throw ConfigError("channel " + c.id + ": length must be > 0");
        if (c.attenuation_length_km <= 0.0)
            throw ConfigError("channel " + c.id + ": attenuation length must be > 0");
        if (c.alpha <= 0.0 || c.alpha >= 1.0)
            throw ConfigError("channel " + c.id + ": alpha outside (0,1)");
        for (auto [name, v] : {std::pair{"eta_b", c.eta_b}, {"eta_d", c.eta_d},
                               {"eta_s", c.eta_s}, {"eta_r", c.eta_r}}) {
            if (v <= 0.0 || v > 1.0)
                throw ConfigError("channel " + c.id + ": " + name + " outside (0,1]");
        }
        if (c.base_fidelity <= 0.25 || c.base_fidelity > 1.0)
            throw ConfigError("channel " + c.id + ": base_fidelity outside (0.25,1]");
        if (c.qubits_primary < 1 || c.qubits_secondary < 1)
            throw ConfigError("channel " + c.id + ": each side needs at least one qubit");
        if (c.classical_speed <= 0.0)
            throw ConfigError("channel " + c.id + ": classical_speed must be > 0");
        allocated[c.primary] += c.qubits_primary;
        allocated[c.secondary] += c.qubits_secondary;
    }
    for (const auto& [node, total] : allocated) {
        if (total > nodes_[node_index_.at(node)].memory_capacity)
            throw ConfigError("node " + node + ": channel qubit allocation (" +
                              std::to_string(total) + ") exceeds memory capacity (" +
                              std::to_string(nodes_[node_index_.at(node)].memory_capacity) + ")");
    }
}

const NodeSpec& NetworkTopology::node(const std::string& id) const {
    auto it = node_index_.find(id);
    if (it == node_index_.end()) throw ConfigError("unknown node: " + id);
    return nodes_[it->second];
}

const ChannelSpec& NetworkTopology::channel(const std::string& id) const {
    auto it = channel_index_.find(id);
    if (it == channel_index_.end()) throw ConfigError("unknown channel: " + id);
    return channels_[it->second];
}

int NetworkTopology::node_index(const std::string& id) const {
    auto it = node_index_.find(id);
    if (it == node_index_.end()) throw ConfigError("unknown node: " + id);
    return it->second;
}

int NetworkTopology::channel_index(const std::string& id) const {
    auto it = channel_index_.find(id);
    if (it == channel_index_.end()) throw ConfigError("unknown channel: " + id);
    return it->second;
}

const std::vector<int>& NetworkTopology::incident(const std::string& node) const {
    static const std::vector<int> empty;
    auto it = adjacency_.find(node);
    return it == adjacency_.end() ? empty : it->second;
}

std::optional<int> NetworkTopology::channel_between(const std::string& a,
                                                    const std::string& b) const {
    if (a == b) return std::nullopt;
    for (int ci : incident(a)) {
        if (channels_[ci].touches(b)) return ci;
    }
    return std::nullopt;
}

bool operator==(const NodeSpec& a, const NodeSpec& b) {
    return std::tie(a.id, a.memory_capacity, a.local_op_latency, a.swap_success_prob,
                    a.end_node) ==
           std::tie(b.id, b.memory_capacity, b.local_op_latency, b.swap_success_prob,
                    b.end_node);
}

bool operator==(const ChannelSpec& a, const ChannelSpec& b) {
    return std::tie(a.id, a.primary, a.secondary, a.length_km, a.attenuation_length_km,
                    a.architecture, a.alpha, a.eta_b, a.eta_d, a.eta_s, a.eta_r,
                    a.base_fidelity, a.qubits_primary, a.qubits_secondary,
                    a.classical_speed) ==
           std::tie(b.id, b.primary, b.secondary, b.length_km, b.attenuation_length_km,
                    b.architecture, b.alpha, b.eta_b, b.eta_d, b.eta_s, b.eta_r,
                    b.base_fidelity, b.qubits_primary, b.qubits_secondary,
                    b.classical_speed);
}

bool NetworkTopology::operator==(const NetworkTopology& other) const {
    return nodes_ == other.nodes_ && channels_ == other.channels_;
}

}  // namespace qnetsim
