#pragma once

#include <string>
#include <vector>

#include "qnetsim/forwarding.hpp"
#include "qnetsim/topology.hpp"

namespace qnetsim {

struct PathInstruction {
    std::string request_id;
    std::vector<std::string> route;  // ordered node ids, simple path
    SwapPolicy swap_policy;
    PurificationConfig purification;
    MultiplexConfig multiplexing;
    bool active = true;
};

enum class TimingMode { Async, Sync };

struct TimingConfig {
    TimingMode mode = TimingMode::Async;
    double t_ext = 0.0;
    double t_int = 0.0;
    double t_app = 0.0;
    double slot_length() const { return t_ext + t_int + t_app; }
};

enum class SlotPhase { External, Internal, Application };

SlotPhase phase_at(const TimingConfig& t, double time);
double phase_start(const TimingConfig& t, double time, SlotPhase phase);  // next start >= time
double phase_end_of_current(const TimingConfig& t, double time);

// Minimum-hop route; equal-hop ties broken by lexicographically smaller node
// id sequence. Throws ConfigError if src and dst are disconnected.
std::vector<std::string> compute_path(const NetworkTopology& topo, const std::string& src,
                                      const std::string& dst);

// Validates a set of instructions against the topology: simple routes over
// existing channels, static-order ranks covering every intermediate node,
// purification segments on-path, and per-side multiplexing allocations within
// channel capacity (summed across paths sharing a channel).
void validate_instructions(const NetworkTopology& topo,
                           const std::vector<PathInstruction>& instructions);

}  // namespace qnetsim
