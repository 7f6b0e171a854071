#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qnetsim/errors.hpp"

namespace qnetsim {

enum class SwapMode { Asap, StaticOrder };

struct SwapPolicy {
    SwapMode mode = SwapMode::Asap;
    // Lower rank swaps first. Covers every intermediate node exactly once.
    std::map<std::string, int> rank;
};

struct PurificationTarget {
    std::vector<std::string> segment;  // contiguous node span on the path
    int rounds = 0;
};

struct PurificationConfig {
    std::vector<PurificationTarget> targets;
};

enum class MultiplexMode { Blocking, BufferSpace, Statistical };

struct HopAllocation {
    int primary = 0;
    int secondary = 0;
};

struct MultiplexConfig {
    MultiplexMode mode = MultiplexMode::Blocking;
    // channel id -> per-side qubit counts claimed by this path (blocking /
    // buffer-space). Empty entry means "all remaining" in blocking mode.
    std::map<std::string, HopAllocation> allocations;
};

// Named 2->1 purification recurrences. The strategy is pluggable via config;
// bbpssw is the Werner-twirled recurrence used by default.
enum class PurifyRule { Bbpssw };

struct PurifyOutcome {
    double success_prob;
    double fidelity_out;  // fidelity of the kept pair, given success
};

PurifyOutcome purify_step(double f1, double f2, PurifyRule rule = PurifyRule::Bbpssw);

// StaticOrder permission check for one pair at one node, span-local:
// the node at position `node_pos` on the route holds a pair spanning route
// positions [span_lo, span_hi]. It may swap that pair only when every
// lower-ranked intermediate node on the pair's side is interior to the span.
// `ranks` is indexed by route position (end nodes carry no rank).
bool static_order_permits(const std::vector<std::optional<int>>& ranks, int node_pos,
                          int span_lo, int span_hi);

}  // namespace qnetsim
