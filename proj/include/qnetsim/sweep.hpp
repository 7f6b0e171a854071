#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qnetsim/metrics.hpp"

namespace qnetsim {

// One point of a parameter sweep: scenario document with `axis` (a dotted
// path, array indices allowed, e.g. "channels.0.qubits_primary") set to each
// value, simulated over `runs` consecutive seeds starting at the scenario's
// base seed. Runs execute in parallel; aggregation is in seed order, so the
// output is deterministic. Returns mean/stddev rows per flow and channel metric.
std::vector<SweepCell> run_sweep(const nlohmann::json& doc, const std::string& axis,
                                 const std::vector<nlohmann::json>& values, int runs);

// Aggregate a batch of runs of one fixed scenario over consecutive seeds.
std::vector<SweepCell> run_batch(const nlohmann::json& doc, int runs,
                                 const std::string& axis_label);

// Connected random scenario: spanning-tree backbone plus uniform random extra
// edges up to the target average degree, `capacity` qubits per channel side,
// and ceil(0.2 n) distinct min-hop source-destination requests using
// statistical multiplexing with swap-asap. Returns a loadable scenario document.
nlohmann::json generate_random_scenario(int n_nodes, double avg_degree, int capacity,
                                        double sim_seconds, std::uint64_t seed);

}  // namespace qnetsim
