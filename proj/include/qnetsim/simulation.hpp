#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "qnetsim/config.hpp"
#include "qnetsim/event_engine.hpp"
#include "qnetsim/link_models.hpp"
#include "qnetsim/metrics.hpp"
#include "qnetsim/qubit.hpp"

namespace qnetsim {

// One deterministic simulation instance. Strictly single-threaded; distinct
// instances share nothing mutable and can run concurrently.
class Simulation {
  public:
    Simulation(const ScenarioConfig& cfg, std::uint64_t seed);

    RunMetrics run();
    void set_trace(EventEngine::TraceSink sink) { engine_.set_trace(std::move(sink)); }
    const EventEngine& engine() const { return engine_; }

  private:
    struct PurifSpan {
        int lo = 0, hi = 0;  // route positions
        int rounds = 0;
    };

    struct Flow {
        PathInstruction instr;
        std::vector<int> route;                  // node indices
        std::vector<int> hop_channels;           // channel index per hop
        std::vector<std::optional<int>> ranks;   // swap rank per route position
        std::map<int, int> pos_of;               // node index -> route position
        std::vector<PurifSpan> purif;
        FlowMetrics metrics;
    };

    struct ChannelRt {
        int index = -1;
        LinkPhysics physics;
        double tau_c = 0.0;  // one-way classical latency
        std::vector<int> qubits_primary, qubits_secondary;
        std::deque<int> pending_requests;  // primary qubit ids awaiting a partner
        ChannelMetrics metrics;
        bool active = false;  // on at least one installed route
        std::unique_ptr<RngStream> rng;
    };

    // --- setup
    void build_flows();
    void allocate_qubits();
    void start();

    // --- reservation + generation
    void initiate_reservations(int channel);
    void try_initiate(int qubit_id);
    void on_reservation_request(int channel, int primary_qubit);
    void on_reservation_confirm(int channel, int primary_qubit, int secondary_qubit);
    void serve_pending(int channel);
    void schedule_generation(int channel, int qp, int qs, double earliest);
    void on_attempt_complete(int channel, int qp, int qs, std::int64_t k);

    // --- pair bookkeeping
    EprPair& make_pair(PairEnd a, PairEnd b, double w, double created_at,
                       std::vector<int> span, int path);
    EprPair* find_pair(std::int64_t id);
    void schedule_cutoff(EprPair& pair);
    void on_cutoff(std::int64_t pair_id);
    void free_qubit(int qubit_id);
    void maybe_gc(std::int64_t pair_id);

    // --- forwarding
    void on_pair_update(std::int64_t pair_id, int node);
    void evaluate_node(int node);
    std::optional<std::pair<int, int>> match_flow(const EprPair& pair, const Flow& f) const;
    std::vector<int> matching_flows(const EprPair& pair) const;
    bool swap_permitted(const EprPair& pair, int node, const Flow& f) const;
    void do_swap(int node, std::int64_t left_id, std::int64_t right_id, int flow_idx);
    void check_delivery(std::int64_t pair_id);
    void deliver(std::int64_t pair_id, int flow_idx);

    // --- purification
    const PurifSpan* purif_needed(const EprPair& pair, int flow_idx) const;
    void consider_purification(std::int64_t pair_id, int flow_idx);
    void try_purify(const std::string& room_key);
    void on_purif_round_done(std::int64_t keep_id, std::int64_t sac_id,
                             const std::string& room_key, int flow_idx);

    // --- sync timing
    bool in_phase(SlotPhase phase) const;
    void schedule_slot_boundaries();
    double delivery_gate_time() const;  // now, or next application-phase start

    double classical_latency_between(const EprPair& pair, int from_node, int to_node) const;

    ScenarioConfig cfg_;
    std::uint64_t seed_;
    EventEngine engine_;
    std::vector<Flow> flows_;
    std::vector<ChannelRt> channels_;
    std::vector<Qubit> qubits_;
    std::unordered_map<std::int64_t, EprPair> pairs_;
    std::int64_t next_pair_id_ = 0;
    std::map<std::string, std::vector<std::int64_t>> purif_rooms_;
    std::vector<std::unique_ptr<RngStream>> node_rngs_;
    PairLedger ledger_;
    std::int64_t orphan_merges_ = 0;
    std::int64_t stale_messages_ = 0;
};

// Convenience: parse, simulate, collect.
RunMetrics run_scenario(const ScenarioConfig& cfg, std::uint64_t seed);

}  // namespace qnetsim
