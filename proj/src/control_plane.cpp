#include "qnetsim/control_plane.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace qnetsim {

SlotPhase phase_at(const TimingConfig& t, double time) {
    const double ts = t.slot_length();
    double in_slot = std::fmod(time, ts);
    if (in_slot < 0) in_slot += ts;
    if (in_slot < t.t_ext) return SlotPhase::External;
    if (in_slot < t.t_ext + t.t_int) return SlotPhase::Internal;
    return SlotPhase::Application;
}

double phase_start(const TimingConfig& t, double time, SlotPhase phase) {
    const double ts = t.slot_length();
    const double offset = phase == SlotPhase::External ? 0.0
                          : phase == SlotPhase::Internal ? t.t_ext
                                                         : t.t_ext + t.t_int;
    const double slot = std::floor(time / ts);
    double start = slot * ts + offset;
    if (start < time - 1e-15) start += ts;
    return start;
}

double phase_end_of_current(const TimingConfig& t, double time) {
    const double ts = t.slot_length();
    const double slot = std::floor(time / ts);
    const double in_slot = time - slot * ts;
    double end = t.t_ext;
    if (in_slot >= t.t_ext) end = t.t_ext + t.t_int;
    if (in_slot >= t.t_ext + t.t_int) end = ts;
    return slot * ts + end;
}

std::vector<std::string> compute_path(const NetworkTopology& topo, const std::string& src,
                                      const std::string& dst) {
    if (src == dst) throw ConfigError("path request src == dst: " + src);
    topo.node(src);
    topo.node(dst);

    // BFS hop distances from dst, then greedy descent from src choosing the
    // lexicographically smallest next node among those one hop closer.
    std::map<std::string, int> dist;
    std::vector<std::string> frontier{dst};
    dist[dst] = 0;
    while (!frontier.empty()) {
        std::vector<std::string> next;
        for (const auto& u : frontier) {
            for (int ci : topo.incident(u)) {
                const auto& v = topo.channels()[ci].peer_of(u);
                if (!dist.count(v)) {
                    dist[v] = dist[u] + 1;
                    next.push_back(v);
                }
            }
        }
        frontier = std::move(next);
    }
    if (!dist.count(src))
        throw ConfigError("no route between " + src + " and " + dst);

    std::vector<std::string> route{src};
    std::string cur = src;
    while (cur != dst) {
        std::string best;
        for (int ci : topo.incident(cur)) {
            const auto& v = topo.channels()[ci].peer_of(cur);
            if (dist.count(v) && dist.at(v) == dist.at(cur) - 1) {
                if (best.empty() || v < best) best = v;
            }
        }
        route.push_back(best);
        cur = best;
    }
    return route;
}

void validate_instructions(const NetworkTopology& topo,
                           const std::vector<PathInstruction>& instructions) {
    // channel id -> summed claims per side
    std::map<std::string, HopAllocation> claimed;
    std::set<std::string> ids;

    for (const auto& pi : instructions) {
        if (!ids.insert(pi.request_id).second)
            throw ConfigError("duplicate path id: " + pi.request_id);
        if (pi.route.size() < 2)
            throw ConfigError("path " + pi.request_id + ": route too short");
        std::set<std::string> seen;
        for (size_t i = 0; i < pi.route.size(); ++i) {
            topo.node(pi.route[i]);
            if (!seen.insert(pi.route[i]).second)
                throw ConfigError("path " + pi.request_id + ": route is not simple");
            if (i > 0 && !topo.channel_between(pi.route[i - 1], pi.route[i]))
                throw ConfigError("path " + pi.request_id + ": no channel between " +
                                  pi.route[i - 1] + " and " + pi.route[i]);
        }

        if (pi.swap_policy.mode == SwapMode::StaticOrder) {
            std::set<std::string> intermediates(pi.route.begin() + 1, pi.route.end() - 1);
            for (const auto& [node, _] : pi.swap_policy.rank) {
                if (!intermediates.count(node))
                    throw ConfigError("path " + pi.request_id + ": swap order names " +
                                      node + " which is not an intermediate node");
            }
            for (const auto& node : intermediates) {
                if (!pi.swap_policy.rank.count(node))
                    throw ConfigError("path " + pi.request_id +
                                      ": swap order misses intermediate node " + node);
            }
        }

        for (const auto& target : pi.purification.targets) {
            if (target.rounds < 0)
                throw ConfigError("path " + pi.request_id + ": negative purification rounds");
            if (target.segment.size() < 2)
                throw ConfigError("path " + pi.request_id + ": purification segment too short");
            auto it = std::search(pi.route.begin(), pi.route.end(),
                                  target.segment.begin(), target.segment.end());
            auto rit = std::search(pi.route.begin(), pi.route.end(),
                                   target.segment.rbegin(), target.segment.rend());
            if (it == pi.route.end() && rit == pi.route.end())
                throw ConfigError("path " + pi.request_id +
                                  ": purification segment is not a contiguous span of the route");
        }

        if (pi.multiplexing.mode != MultiplexMode::Statistical) {
            for (const auto& [chan_id, alloc] : pi.multiplexing.allocations) {
                const auto& c = topo.channel(chan_id);
                bool on_route = false;
                for (size_t i = 1; i < pi.route.size(); ++i) {
                    auto ci = topo.channel_between(pi.route[i - 1], pi.route[i]);
                    if (ci && topo.channels()[*ci].id == chan_id) on_route = true;
                }
                if (!on_route)
                    throw ConfigError("path " + pi.request_id + ": allocation names channel " +
                                      chan_id + " which is not on the route");
                if (alloc.primary < 0 || alloc.secondary < 0)
                    throw ConfigError("path " + pi.request_id + ": negative allocation on " +
                                      chan_id);
                if (pi.multiplexing.mode == MultiplexMode::BufferSpace &&
                    alloc.primary == 0 && alloc.secondary == 0)
                    throw ConfigError("path " + pi.request_id +
                                      ": buffer-space allocation on " + chan_id +
                                      " claims zero qubits");
                claimed[chan_id].primary += alloc.primary;
                claimed[chan_id].secondary += alloc.secondary;
                if (claimed[chan_id].primary > c.qubits_primary ||
                    claimed[chan_id].secondary > c.qubits_secondary)
                    throw ConfigError("channel " + chan_id +
                                      ": multiplexing allocations exceed per-side capacity");
            }
        }
    }
}

}  // namespace qnetsim
