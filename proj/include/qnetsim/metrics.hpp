#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace qnetsim {

struct FlowMetrics {
    std::string id;
    std::int64_t delivered = 0;
    double fidelity_sum = 0.0;   // summed delivered fidelities
    std::int64_t swap_attempts = 0;
    std::int64_t swap_successes = 0;
    std::int64_t purif_attempts = 0;
    std::int64_t purif_successes = 0;
    std::int64_t decohered = 0;

    double rate(double duration) const { return delivered / duration; }
    double mean_fidelity() const {
        return delivered > 0 ? fidelity_sum / delivered : 0.0;
    }
};

struct ChannelMetrics {
    std::string id;
    std::int64_t attempts = 0;   // generation rounds, including failed ones
    std::int64_t successes = 0;  // elementary pairs created

    double measured_p() const {
        return attempts > 0 ? static_cast<double>(successes) / attempts : 0.0;
    }
    double attempt_rate(double duration) const { return attempts / duration; }
    double entanglement_rate(double duration) const { return successes / duration; }
};

// Pair ledger: every pair ever created ends up in exactly one terminal
// category (or stays live). Checked as a conservation invariant.
struct PairLedger {
    std::int64_t created = 0;
    std::int64_t delivered = 0;
    std::int64_t decohered = 0;
    std::int64_t swap_consumed = 0;   // parents destroyed by a swap (either outcome)
    std::int64_t purif_consumed = 0;  // sacrificed or lost in purification
    std::int64_t live = 0;            // still alive at end of run

    bool balanced() const {
        return created == delivered + decohered + swap_consumed + purif_consumed + live;
    }
};

struct RunMetrics {
    double duration = 0.0;  // simulated seconds
    std::vector<FlowMetrics> flows;
    std::vector<ChannelMetrics> channels;
    PairLedger ledger;
    std::int64_t orphan_merges = 0;   // merged spans matching no installed flow
    std::int64_t stale_messages = 0;  // updates referencing already-dead pairs
    std::uint64_t event_count = 0;
    double wall_seconds = 0.0;
};

// One header plus one row per record (flows, channels, then one global row).
// Output is byte-stable for identical metrics.
void emit_csv(const RunMetrics& metrics, std::ostream& out);

struct SweepCell {
    std::string axis_value;
    std::string metric;  // e.g. "flow.AK.rate"
    double mean = 0.0;
    double stddev = 0.0;
};

void emit_csv(const std::vector<SweepCell>& table, std::ostream& out);

// Stable shortest-roundtrip formatting used for all CSV numbers.
std::string format_double(double v);

}  // namespace qnetsim
