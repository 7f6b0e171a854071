#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qnetsim/errors.hpp"

namespace qnetsim {

// Default speed of light in fiber, km/s. Overridable per channel.
inline constexpr double kDefaultClassicalSpeed = 2.0e5;

enum class Architecture {
    DimBk,        // detection-in-midpoint, Barrett-Kok single rail
    DimDualRail,  // detection-in-midpoint, dual rail
    SrDualRail,   // sender-receiver, dual rail
    SimDualRail,  // source-in-midpoint, dual rail
};

Architecture architecture_from_string(const std::string& s);
std::string to_string(Architecture a);

// L0 = 10 / (loss * ln 10). Converts a dB/km fiber loss figure into the
// attenuation length used by the exponential transmissivity model.
double attenuation_length_from_db(double loss_db_per_km);

struct NodeSpec {
    std::string id;
    int memory_capacity = 1;
    double local_op_latency = 0.0;   // tau_0, seconds
    double swap_success_prob = 1.0;  // q
    bool end_node = false;
};

struct ChannelSpec {
    std::string id;
    std::string primary;    // initiates reservations
    std::string secondary;
    double length_km = 0.0;
    double attenuation_length_km = 0.0;  // L0
    Architecture architecture = Architecture::DimBk;
    double alpha = 0.5;   // superposition / transduction parameter, in (0,1)
    double eta_b = 1.0;   // BSM-side detection efficiency
    double eta_d = 1.0;   // receiver-side detection/interaction efficiency
    double eta_s = 1.0;   // emitter transduction efficiency
    double eta_r = 1.0;   // receiver transduction efficiency
    double base_fidelity = 1.0;  // F0, in (0.25, 1]
    int qubits_primary = 1;
    int qubits_secondary = 1;
    double classical_speed = kDefaultClassicalSpeed;  // c0, km/s

    bool touches(const std::string& node) const {
        return primary == node || secondary == node;
    }
    const std::string& peer_of(const std::string& node) const {
        return node == primary ? secondary : primary;
    }
    int qubits_on(const std::string& node) const {
        return node == primary ? qubits_primary : qubits_secondary;
    }
    // One-way classical delivery latency over this channel, seconds.
    double classical_latency() const { return length_km / classical_speed; }
};

class NetworkTopology {
  public:
    NetworkTopology() = default;
    NetworkTopology(std::vector<NodeSpec> nodes, std::vector<ChannelSpec> channels);

    const std::vector<NodeSpec>& nodes() const { return nodes_; }
    const std::vector<ChannelSpec>& channels() const { return channels_; }

    bool has_node(const std::string& id) const { return node_index_.count(id) > 0; }
    const NodeSpec& node(const std::string& id) const;
    const ChannelSpec& channel(const std::string& id) const;
    int node_index(const std::string& id) const;
    int channel_index(const std::string& id) const;

    // Indices of channels incident to the given node.
    const std::vector<int>& incident(const std::string& node) const;

    // Channel connecting a and b, if any.
    std::optional<int> channel_between(const std::string& a, const std::string& b) const;

    bool operator==(const NetworkTopology& other) const;

  private:
    void validate() const;

    std::vector<NodeSpec> nodes_;
    std::vector<ChannelSpec> channels_;
    std::map<std::string, int> node_index_;
    std::map<std::string, int> channel_index_;
    std::map<std::string, std::vector<int>> adjacency_;
};

bool operator==(const NodeSpec& a, const NodeSpec& b);
bool operator==(const ChannelSpec& a, const ChannelSpec& b);

}  // namespace qnetsim
