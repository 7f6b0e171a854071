#include "qnetsim/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace qnetsim {

namespace {
constexpr double kTimeEps = 1e-9;
}

Simulation::Simulation(const ScenarioConfig& cfg, std::uint64_t seed)
    : cfg_(cfg), seed_(seed) {
    if (cfg_.t_r > 0.0)
        throw ConfigError("reactive mode unimplemented (timing.t_r > 0)");
    build_flows();
    allocate_qubits();
    for (const auto& n : cfg_.topology.nodes())
        node_rngs_.push_back(std::make_unique<RngStream>(seed_, "node:" + n.id));
}

void Simulation::build_flows() {
    for (const auto& pi : cfg_.paths) {
        if (!pi.active) continue;
        Flow f;
        f.instr = pi;
        for (size_t i = 0; i < pi.route.size(); ++i) {
            int ni = cfg_.topology.node_index(pi.route[i]);
            f.route.push_back(ni);
            f.pos_of[ni] = static_cast<int>(i);
            if (i > 0) {
                auto ci = cfg_.topology.channel_between(pi.route[i - 1], pi.route[i]);
                f.hop_channels.push_back(*ci);
            }
        }
        f.ranks.assign(pi.route.size(), std::nullopt);
        if (pi.swap_policy.mode == SwapMode::StaticOrder) {
            for (const auto& [node, rank] : pi.swap_policy.rank)
                f.ranks[f.pos_of.at(cfg_.topology.node_index(node))] = rank;
        }
        for (const auto& target : pi.purification.targets) {
            PurifSpan ps;
            ps.lo = f.pos_of.at(cfg_.topology.node_index(target.segment.front()));
            ps.hi = f.pos_of.at(cfg_.topology.node_index(target.segment.back()));
            if (ps.lo > ps.hi) std::swap(ps.lo, ps.hi);
            ps.rounds = target.rounds;
            f.purif.push_back(ps);
        }
        f.metrics.id = pi.request_id;
        flows_.push_back(std::move(f));
    }
}

void Simulation::allocate_qubits() {
    const auto& topo = cfg_.topology;
    channels_.resize(topo.channels().size());
    for (size_t ci = 0; ci < topo.channels().size(); ++ci) {
        const auto& spec = topo.channels()[ci];
        auto& rt = channels_[ci];
        rt.index = static_cast<int>(ci);
        const double tau0 = std::max(topo.node(spec.primary).local_op_latency,
                                     topo.node(spec.secondary).local_op_latency);
        rt.physics = LinkPhysics::of(spec, tau0);
        rt.tau_c = spec.classical_latency();
        rt.metrics.id = spec.id;
        rt.rng = std::make_unique<RngStream>(seed_, "chan:" + spec.id);

        const int pn = topo.node_index(spec.primary);
        const int sn = topo.node_index(spec.secondary);
        for (int k = 0; k < spec.qubits_primary; ++k) {
            Qubit q;
            q.id = static_cast<int>(qubits_.size());
            q.node = pn;
            q.channel = rt.index;
            q.primary_side = true;
            rt.qubits_primary.push_back(q.id);
            qubits_.push_back(q);
        }
        for (int k = 0; k < spec.qubits_secondary; ++k) {
            Qubit q;
            q.id = static_cast<int>(qubits_.size());
            q.node = sn;
            q.channel = rt.index;
            q.primary_side = false;
            rt.qubits_secondary.push_back(q.id);
            qubits_.push_back(q);
        }
    }

    // Bind qubits to installed paths (blocking / buffer-space).
    std::vector<size_t> next_free_primary(channels_.size(), 0);
    std::vector<size_t> next_free_secondary(channels_.size(), 0);
    for (size_t fi = 0; fi < flows_.size(); ++fi) {
        auto& f = flows_[fi];
        for (int ci : f.hop_channels) channels_[ci].active = true;
        if (f.instr.multiplexing.mode == MultiplexMode::Statistical) continue;
        for (int ci : f.hop_channels) {
            const auto& spec = cfg_.topology.channels()[ci];
            auto& rt = channels_[ci];
            HopAllocation alloc;
            auto it = f.instr.multiplexing.allocations.find(spec.id);
            if (it != f.instr.multiplexing.allocations.end()) {
                alloc = it->second;
            } else {
                // Blocking default: claim everything still unbound.
                alloc.primary = static_cast<int>(rt.qubits_primary.size() -
                                                 next_free_primary[ci]);
                alloc.secondary = static_cast<int>(rt.qubits_secondary.size() -
                                                   next_free_secondary[ci]);
            }
            if (alloc.primary <= 0 || alloc.secondary <= 0)
                throw ConfigError("path " + f.instr.request_id + ": channel " + spec.id +
                                  " has no qubits left to allocate");
            if (next_free_primary[ci] + alloc.primary > rt.qubits_primary.size() ||
                next_free_secondary[ci] + alloc.secondary > rt.qubits_secondary.size())
                throw ConfigError("path " + f.instr.request_id + ": allocation on " +
                                  spec.id + " oversubscribes the channel");
            for (int k = 0; k < alloc.primary; ++k)
                qubits_[rt.qubits_primary[next_free_primary[ci]++]].path =
                    static_cast<int>(fi);
            for (int k = 0; k < alloc.secondary; ++k)
                qubits_[rt.qubits_secondary[next_free_secondary[ci]++]].path =
                    static_cast<int>(fi);
        }
    }
}

void Simulation::start() {
    if (cfg_.timing.mode == TimingMode::Sync) {
        for (const auto& rt : channels_) {
            if (rt.active && rt.physics.tau_round > cfg_.timing.t_ext + kTimeEps)
                throw ConfigError("channel " + rt.metrics.id +
                                  ": round duration exceeds T_ext; generation can never fit");
        }
        schedule_slot_boundaries();
    }
    for (auto& rt : channels_) {
        if (rt.active) initiate_reservations(rt.index);
    }
}

void Simulation::schedule_slot_boundaries() {
    // One boundary event per slot, at the internal-phase start: swaps and
    // purification deferred from other phases resume there.
    const double ts = cfg_.timing.slot_length();
    const double horizon = cfg_.sim.duration;
    for (std::int64_t slot = 0;; ++slot) {
        const double t = slot * ts + cfg_.timing.t_ext;
        if (t > horizon) break;
        engine_.schedule(t, "slots", EventKind::SlotBoundary, [this] {
            for (int n = 0; n < static_cast<int>(cfg_.topology.nodes().size()); ++n)
                evaluate_node(n);
            auto keys = purif_rooms_;  // keys snapshot; try_purify mutates rooms
            for (const auto& [key, _] : keys) try_purify(key);
        });
    }
}

bool Simulation::in_phase(SlotPhase phase) const {
    if (cfg_.timing.mode == TimingMode::Async) return true;
    return phase_at(cfg_.timing, engine_.clock() + kTimeEps) == phase;
}

double Simulation::delivery_gate_time() const {
    if (cfg_.timing.mode == TimingMode::Async || in_phase(SlotPhase::Application))
        return engine_.clock();
    return phase_start(cfg_.timing, engine_.clock(), SlotPhase::Application);
}

// ---------------------------------------------------------------------------
// Reservation and EPR generation

void Simulation::initiate_reservations(int channel) {
    for (int qid : channels_[channel].qubits_primary) try_initiate(qid);
}

void Simulation::try_initiate(int qubit_id) {
    auto& q = qubits_[qubit_id];
    auto& rt = channels_[q.channel];
    if (!rt.active || q.state != QubitState::Raw) return;
    q.apply(QubitTrigger::StartReservation, engine_.clock());
    const int channel = q.channel;
    engine_.schedule(engine_.clock() + rt.tau_c, cfg_.topology.channels()[channel].id,
                     EventKind::ClassicalMessage,
                     [this, channel, qubit_id] { on_reservation_request(channel, qubit_id); });
}

void Simulation::on_reservation_request(int channel, int primary_qubit) {
    auto& rt = channels_[channel];
    const int want_path = qubits_[primary_qubit].path;
    for (int sid : rt.qubits_secondary) {
        auto& s = qubits_[sid];
        if (s.state == QubitState::Raw && s.path == want_path) {
            s.apply(QubitTrigger::StartReservation, engine_.clock());
            s.apply(QubitTrigger::RemoteAvailable, engine_.clock());
            engine_.schedule(engine_.clock() + rt.tau_c, rt.metrics.id,
                             EventKind::ClassicalMessage, [this, channel, primary_qubit, sid] {
                                 on_reservation_confirm(channel, primary_qubit, sid);
                             });
            return;
        }
    }
    rt.pending_requests.push_back(primary_qubit);  // deferred until a qubit frees
}

void Simulation::serve_pending(int channel) {
    auto& rt = channels_[channel];
    if (rt.pending_requests.empty()) return;
    // FIFO: serve the oldest request that a free secondary qubit can match.
    for (auto it = rt.pending_requests.begin(); it != rt.pending_requests.end(); ++it) {
        const int want_path = qubits_[*it].path;
        for (int sid : rt.qubits_secondary) {
            auto& s = qubits_[sid];
            if (s.state == QubitState::Raw && s.path == want_path) {
                const int pq = *it;
                rt.pending_requests.erase(it);
                s.apply(QubitTrigger::StartReservation, engine_.clock());
                s.apply(QubitTrigger::RemoteAvailable, engine_.clock());
                engine_.schedule(engine_.clock() + rt.tau_c, rt.metrics.id,
                                 EventKind::ClassicalMessage, [this, channel, pq, sid] {
                                     on_reservation_confirm(channel, pq, sid);
                                 });
                return;
            }
        }
    }
}

void Simulation::on_reservation_confirm(int channel, int primary_qubit,
                                        int secondary_qubit) {
    qubits_[primary_qubit].apply(QubitTrigger::RemoteAvailable, engine_.clock());
    schedule_generation(channel, primary_qubit, secondary_qubit, engine_.clock());
}

void Simulation::schedule_generation(int channel, int qp, int qs, double earliest) {
    auto& rt = channels_[channel];
    const double p = rt.physics.p_success;
    const double tau = rt.physics.tau_round;
    double t = earliest;

    if (cfg_.timing.mode == TimingMode::Sync) {
        const double ts = cfg_.timing.slot_length();
        if (phase_at(cfg_.timing, t + kTimeEps) != SlotPhase::External)
            t = phase_start(cfg_.timing, t, SlotPhase::External);
        for (;;) {
            const std::int64_t k = sample_rounds_to_success(p, *rt.rng);
            const double slot_start = std::floor((t + kTimeEps) / ts) * ts;
            const double ext_end = slot_start + cfg_.timing.t_ext;
            if (t + k * tau <= ext_end + kTimeEps) {
                engine_.schedule(t + k * tau, rt.metrics.id, EventKind::AttemptComplete,
                                 [this, channel, qp, qs, k] {
                                     on_attempt_complete(channel, qp, qs, k);
                                 });
                return;
            }
            // Attempts that would overrun T_ext count as failures; resample
            // in the next slot (geometric memorylessness keeps this exact).
            rt.metrics.attempts +=
                static_cast<std::int64_t>(std::floor((ext_end - t + kTimeEps) / tau));
            t = slot_start + ts;
        }
    }

    const std::int64_t k = sample_rounds_to_success(p, *rt.rng);
    engine_.schedule(t + k * tau, rt.metrics.id, EventKind::AttemptComplete,
                     [this, channel, qp, qs, k] { on_attempt_complete(channel, qp, qs, k); });
}

void Simulation::on_attempt_complete(int channel, int qp, int qs, std::int64_t k) {
    if (cfg_.timing.mode == TimingMode::Sync && !in_phase(SlotPhase::External) &&
        phase_at(cfg_.timing, engine_.clock() - kTimeEps) != SlotPhase::External)
        throw SimLogicError("EPR creation dispatched outside T_ext");
    auto& rt = channels_[channel];
    rt.metrics.attempts += k;
    rt.metrics.successes += 1;

    const double now = engine_.clock();
    qubits_[qp].apply(QubitTrigger::EprCreated, now);
    qubits_[qs].apply(QubitTrigger::EprCreated, now);
    const auto& spec = cfg_.topology.channels()[channel];
    auto& pair = make_pair({qubits_[qp].node, qp}, {qubits_[qs].node, qs},
                           initial_werner(spec).w, now, {channel}, qubits_[qp].path);
    qubits_[qp].epr = pair.id;
    qubits_[qs].epr = pair.id;

    // Heralding is folded into the round duration: both ends know now.
    const std::int64_t id = pair.id;
    on_pair_update(id, qubits_[qp].node);
    on_pair_update(id, qubits_[qs].node);
}

// ---------------------------------------------------------------------------
// Pair bookkeeping

EprPair& Simulation::make_pair(PairEnd a, PairEnd b, double w, double created_at,
                               std::vector<int> span, int path) {
    EprPair pair;
    pair.id = next_pair_id_++;
    pair.end_a = a;
    pair.end_b = b;
    pair.w_ref = w;
    pair.w_ref_time = engine_.clock();
    pair.created_at = created_at;
    pair.span = std::move(span);
    pair.path = path;
    ledger_.created += 1;
    auto [it, _] = pairs_.emplace(pair.id, std::move(pair));
    schedule_cutoff(it->second);
    return it->second;
}

EprPair* Simulation::find_pair(std::int64_t id) {
    auto it = pairs_.find(id);
    return it == pairs_.end() ? nullptr : &it->second;
}

void Simulation::schedule_cutoff(EprPair& pair) {
    if (!std::isfinite(cfg_.sim.coherence_time)) return;
    const std::int64_t id = pair.id;
    pair.cutoff_event =
        engine_.schedule(pair.created_at + cfg_.sim.coherence_time, "pair",
                         EventKind::CutoffExpiry, [this, id] { on_cutoff(id); });
}

void Simulation::on_cutoff(std::int64_t pair_id) {
    auto* p = find_pair(pair_id);
    if (!p || !p->alive) return;  // stale expiry for an already-consumed pair
    p->alive = false;
    ledger_.decohered += 1;
    if (p->path >= 0) flows_[p->path].metrics.decohered += 1;
    for (const auto end : {p->end_a, p->end_b}) {
        auto& q = qubits_[end.qubit];
        if (q.epr == pair_id) {
            q.apply(QubitTrigger::Expired, engine_.clock());
            free_qubit(end.qubit);
        }
    }
    maybe_gc(pair_id);
}

void Simulation::free_qubit(int qubit_id) {
    auto& q = qubits_[qubit_id];
    q.apply(QubitTrigger::QubitFreed, engine_.clock());
    if (q.primary_side)
        try_initiate(qubit_id);
    else
        serve_pending(q.channel);
}

void Simulation::maybe_gc(std::int64_t pair_id) {
    auto it = pairs_.find(pair_id);
    if (it == pairs_.end() || it->second.alive) return;
    const auto& p = it->second;
    if (qubits_[p.end_a.qubit].epr != pair_id && qubits_[p.end_b.qubit].epr != pair_id) {
        if (p.cutoff_event != UINT64_MAX) engine_.cancel(p.cutoff_event);
        pairs_.erase(it);
    }
}

double Simulation::classical_latency_between(const EprPair& pair, int, int) const {
    double total = 0.0;
    for (int ci : pair.span) total += channels_[ci].tau_c;
    return total;
}

// ---------------------------------------------------------------------------
// Forwarding

std::optional<std::pair<int, int>> Simulation::match_flow(const EprPair& pair,
                                                          const Flow& f) const {
    auto ia = f.pos_of.find(pair.end_a.node);
    auto ib = f.pos_of.find(pair.end_b.node);
    if (ia == f.pos_of.end() || ib == f.pos_of.end()) return std::nullopt;
    int lo = std::min(ia->second, ib->second);
    int hi = std::max(ia->second, ib->second);
    if (static_cast<size_t>(hi - lo) != pair.span.size()) return std::nullopt;
    std::vector<int> hops(f.hop_channels.begin() + lo, f.hop_channels.begin() + hi);
    std::vector<int> span = pair.span;
    std::sort(hops.begin(), hops.end());
    std::sort(span.begin(), span.end());
    if (hops != span) return std::nullopt;
    return std::make_pair(lo, hi);
}

std::vector<int> Simulation::matching_flows(const EprPair& pair) const {
    std::vector<int> out;
    if (pair.path >= 0) {
        if (match_flow(pair, flows_[pair.path])) out.push_back(pair.path);
        return out;
    }
    for (size_t fi = 0; fi < flows_.size(); ++fi) {
        if (match_flow(pair, flows_[fi])) out.push_back(static_cast<int>(fi));
    }
    return out;
}

bool Simulation::swap_permitted(const EprPair& pair, int node, const Flow& f) const {
    if (f.instr.swap_policy.mode == SwapMode::Asap) return true;
    auto m = match_flow(pair, f);
    if (!m) return false;
    return static_order_permits(f.ranks, f.pos_of.at(node), m->first, m->second);
}

void Simulation::on_pair_update(std::int64_t pair_id, int node) {
    auto* p = find_pair(pair_id);
    if (!p || !p->alive) {
        stale_messages_ += 1;
        return;
    }
    auto& q = qubits_[p->end_at(node).qubit];
    if (q.epr != pair_id) {
        stale_messages_ += 1;
        return;
    }

    const auto flows = matching_flows(*p);
    for (int fi : flows) {
        const auto m = match_flow(*p, flows_[fi]);
        // Purification first, wherever the span matches a configured segment.
        if (purif_needed(*p, fi)) {
            consider_purification(pair_id, fi);
            return;
        }
        if (m->first == 0 && m->second == static_cast<int>(flows_[fi].route.size()) - 1) {
            // Full path reached this end node.
            if (q.state == QubitState::Entangled) {
                q.apply(QubitTrigger::SwapConditionsMet, engine_.clock());
                q.apply(QubitTrigger::PurifDone, engine_.clock());
            }
            double& ready = (p->end_a.node == node) ? p->ready_a : p->ready_b;
            if (ready < 0.0) ready = engine_.clock();
            check_delivery(pair_id);
            return;
        }
    }
    evaluate_node(node);
}

void Simulation::evaluate_node(int node) {
    if (cfg_.timing.mode == TimingMode::Sync && !in_phase(SlotPhase::Internal)) return;

    for (;;) {
        // Candidates: this node's qubits holding a live, unclaimed pair that the
        // policy lets this node swap now.
        struct Candidate {
            int qubit;
            std::int64_t pair;
            double entered;
        };
        std::vector<Candidate> cands;
        for (const auto& q : qubits_) {
            if (q.node != node) continue;
            if (q.state != QubitState::Entangled && q.state != QubitState::Eligible)
                continue;
            auto* p = find_pair(q.epr);
            if (!p || !p->alive || p->claimed) continue;
            cands.push_back({q.id, p->id, q.state_entered_at});
        }
        std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
            if (a.entered != b.entered) return a.entered < b.entered;
            return a.qubit < b.qubit;
        });

        bool swapped = false;
        for (size_t i = 0; i < cands.size() && !swapped; ++i) {
            auto* p1 = find_pair(cands[i].pair);
            for (size_t j = i + 1; j < cands.size() && !swapped; ++j) {
                auto* p2 = find_pair(cands[j].pair);
                if (p1->id == p2->id) continue;
                // Spans must be channel-disjoint and meet only at this node.
                bool overlap = false;
                for (int c1 : p1->span)
                    for (int c2 : p2->span)
                        if (c1 == c2) overlap = true;
                if (overlap) continue;

                int flow_idx = -1;
                if (p1->path >= 0 || p2->path >= 0) {
                    if (p1->path != p2->path) continue;  // same installed path only
                    flow_idx = p1->path;
                    const auto& f = flows_[flow_idx];
                    auto m1 = match_flow(*p1, f);
                    auto m2 = match_flow(*p2, f);
                    if (!m1 || !m2) continue;
                    const int pos_n = f.pos_of.at(node);
                    if (pos_n == 0 || pos_n == static_cast<int>(f.route.size()) - 1)
                        continue;  // end nodes deliver, never swap
                    const bool adjacent = (m1->second == pos_n && m2->first == pos_n) ||
                                          (m2->second == pos_n && m1->first == pos_n);
                    if (!adjacent) continue;
                    if (!swap_permitted(*p1, node, f) || !swap_permitted(*p2, node, f))
                        continue;
                } else {
                    // Statistical: merged span must form a contiguous segment of
                    // some installed flow with this node interior (conflict guard).
                    for (int fi : matching_flows(*p1)) {
                        const auto& f = flows_[fi];
                        auto m1 = match_flow(*p1, f);
                        auto m2 = match_flow(*p2, f);
                        if (!m2) continue;
                        const int pos_n = f.pos_of.at(node);
                        if (pos_n == 0 || pos_n == static_cast<int>(f.route.size()) - 1)
                            continue;
                        const bool adjacent = (m1->second == pos_n && m2->first == pos_n) ||
                                              (m2->second == pos_n && m1->first == pos_n);
                        if (!adjacent) continue;
                        if (!swap_permitted(*p1, node, f) || !swap_permitted(*p2, node, f))
                            continue;
                        flow_idx = fi;
                        break;
                    }
                    if (flow_idx < 0 && cfg_.sim.conflict_guard) continue;
                    if (flow_idx < 0) {
                        // Guard off: topological adjacency at this node suffices.
                        if (!p1->has_end(node) || !p2->has_end(node)) continue;
                    }
                }
                do_swap(node, p1->id, p2->id, flow_idx);
                swapped = true;
            }
        }
        if (!swapped) return;
    }
}

void Simulation::do_swap(int node, std::int64_t left_id, std::int64_t right_id,
                         int flow_idx) {
    auto* p1 = find_pair(left_id);
    auto* p2 = find_pair(right_id);
    if (!p1->has_end(node) || !p2->has_end(node))
        throw SimLogicError("swap spans are not adjacent at the swapping node");
    const double now = engine_.clock();
    const double q_prob = cfg_.topology.nodes()[node].swap_success_prob;
    const bool success = node_rngs_[node]->bernoulli(q_prob);

    if (flow_idx >= 0) {
        auto& fm = flows_[flow_idx].metrics;
        fm.swap_attempts += 1;
        if (success) fm.swap_successes += 1;
    }

    const PairEnd remote1 = p1->other_end(node);
    const PairEnd remote2 = p2->other_end(node);
    const double lat1 =
        cfg_.sim.idealized_coordination ? 0.0 : classical_latency_between(*p1, node, remote1.node);
    const double lat2 =
        cfg_.sim.idealized_coordination ? 0.0 : classical_latency_between(*p2, node, remote2.node);

    // Local qubits are measured and consumed either way.
    for (const auto pid : {left_id, right_id}) {
        auto* p = find_pair(pid);
        auto& q = qubits_[p->end_at(node).qubit];
        if (q.state == QubitState::Entangled) {
            q.apply(QubitTrigger::SwapConditionsMet, now);
            q.apply(QubitTrigger::PurifDone, now);
        }
        q.apply(QubitTrigger::Consumed, now);
    }

    const double w_merged = p1->werner_at(now, cfg_.sim.coherence_time) *
                            p2->werner_at(now, cfg_.sim.coherence_time);
    const double created = std::min(p1->created_at, p2->created_at);
    std::vector<int> span = p1->span;
    span.insert(span.end(), p2->span.begin(), p2->span.end());
    const int merged_path = (p1->path == p2->path) ? p1->path : -1;

    for (auto* p : {p1, p2}) {
        p->alive = false;
        if (p->cutoff_event != UINT64_MAX) engine_.cancel(p->cutoff_event);
        p->cutoff_event = UINT64_MAX;
        ledger_.swap_consumed += 1;
    }

    if (success) {
        auto& merged = make_pair(remote1, remote2, w_merged, created, std::move(span),
                                 merged_path);
        if (matching_flows(merged).empty()) orphan_merges_ += 1;
        const std::int64_t mid = merged.id;
        for (const auto& [remote, lat] :
             {std::pair{remote1, lat1}, std::pair{remote2, lat2}}) {
            auto& rq = qubits_[remote.qubit];
            rq.epr = mid;
            // Re-pointing to a merged pair puts the remote qubit back into the
            // waiting-for-update position of the lifecycle.
            if (rq.state == QubitState::Eligible) {
                rq.state = QubitState::Entangled;
                rq.state_entered_at = now;
            }
            const int rnode = remote.node;
            engine_.schedule(now + lat, "swap_update", EventKind::ClassicalMessage,
                             [this, mid, rnode] { on_pair_update(mid, rnode); });
        }
    } else {
        for (const auto& [remote, lat, pid] :
             {std::tuple{remote1, lat1, left_id}, std::tuple{remote2, lat2, right_id}}) {
            const int rq = remote.qubit;
            const std::int64_t dead = pid;
            engine_.schedule(now + lat, "swap_update", EventKind::ClassicalMessage,
                             [this, rq, dead] {
                                 auto& q = qubits_[rq];
                                 if (q.epr != dead) {
                                     stale_messages_ += 1;
                                     return;
                                 }
                                 q.apply(QubitTrigger::RemoteFailed, engine_.clock());
                                 free_qubit(rq);
                                 maybe_gc(dead);
                             });
        }
    }
    for (const auto pid : {left_id, right_id}) {
        auto* p = find_pair(pid);
        auto local = p->end_at(node);
        free_qubit(local.qubit);
        maybe_gc(pid);
    }
}

void Simulation::check_delivery(std::int64_t pair_id) {
    auto* p = find_pair(pair_id);
    if (!p || !p->alive || p->delivery_scheduled) return;
    if (p->ready_a < 0.0 || p->ready_b < 0.0) return;
    int flow_idx = -1;
    for (int fi : matching_flows(*p)) {
        const auto m = match_flow(*p, flows_[fi]);
        if (m->first == 0 && m->second == static_cast<int>(flows_[fi].route.size()) - 1) {
            flow_idx = fi;
            break;
        }
    }
    if (flow_idx < 0) return;
    p->delivery_scheduled = true;
    const double t = delivery_gate_time();
    engine_.schedule(t, flows_[flow_idx].metrics.id, EventKind::DeliverToApp,
                     [this, pair_id, flow_idx] { deliver(pair_id, flow_idx); });
}

void Simulation::deliver(std::int64_t pair_id, int flow_idx) {
    auto* p = find_pair(pair_id);
    if (!p || !p->alive) return;  // expired while waiting for the app phase
    if (cfg_.timing.mode == TimingMode::Sync && !in_phase(SlotPhase::Application))
        throw SimLogicError("delivery dispatched outside T_app");
    const double now = engine_.clock();
    auto& fm = flows_[flow_idx].metrics;
    fm.delivered += 1;
    fm.fidelity_sum += (3.0 * p->werner_at(now, cfg_.sim.coherence_time) + 1.0) / 4.0;
    ledger_.delivered += 1;
    p->alive = false;
    if (p->cutoff_event != UINT64_MAX) engine_.cancel(p->cutoff_event);
    p->cutoff_event = UINT64_MAX;
    for (const auto end : {p->end_a, p->end_b}) {
        auto& q = qubits_[end.qubit];
        if (q.epr == pair_id) {
            q.apply(QubitTrigger::Consumed, now);
            free_qubit(end.qubit);
        }
    }
    maybe_gc(pair_id);
}

// ---------------------------------------------------------------------------
// Purification

const Simulation::PurifSpan* Simulation::purif_needed(const EprPair& pair,
                                                      int flow_idx) const {
    const auto& f = flows_[flow_idx];
    const auto m = match_flow(pair, f);
    if (!m) return nullptr;
    for (const auto& ps : f.purif) {
        if (ps.lo == m->first && ps.hi == m->second && pair.purif_rounds_done < ps.rounds)
            return &ps;
    }
    return nullptr;
}

void Simulation::consider_purification(std::int64_t pair_id, int flow_idx) {
    auto* p = find_pair(pair_id);
    const double now = engine_.clock();
    for (const auto end : {p->end_a, p->end_b}) {
        auto& q = qubits_[end.qubit];
        if (q.epr == pair_id && q.state == QubitState::Entangled)
            q.apply(QubitTrigger::SwapConditionsMet, now);
    }
    if (qubits_[p->end_a.qubit].state != QubitState::Purif ||
        qubits_[p->end_b.qubit].state != QubitState::Purif)
        return;  // wait for the other end to learn about the pair
    const auto m = match_flow(*p, flows_[flow_idx]);
    const std::string key = std::to_string(flow_idx) + ":" + std::to_string(m->first) +
                            ":" + std::to_string(m->second);
    auto& room = purif_rooms_[key];
    if (std::find(room.begin(), room.end(), pair_id) == room.end())
        room.push_back(pair_id);
    try_purify(key);
}

void Simulation::try_purify(const std::string& room_key) {
    if (cfg_.timing.mode == TimingMode::Sync && !in_phase(SlotPhase::Internal)) return;
    auto it = purif_rooms_.find(room_key);
    if (it == purif_rooms_.end()) return;
    auto& room = it->second;
    room.erase(std::remove_if(room.begin(), room.end(),
                              [this](std::int64_t id) {
                                  auto* p = find_pair(id);
                                  return !p || !p->alive || p->claimed;
                              }),
               room.end());
    while (room.size() >= 2) {
        // Keep the older pair, sacrifice the younger.
        std::sort(room.begin(), room.end(), [this](std::int64_t a, std::int64_t b) {
            const auto* pa = find_pair(a);
            const auto* pb = find_pair(b);
            if (pa->created_at != pb->created_at) return pa->created_at < pb->created_at;
            return a < b;
        });
        const std::int64_t keep = room[0];
        const std::int64_t sac = room[1];
        room.erase(room.begin(), room.begin() + 2);
        auto* pk = find_pair(keep);
        auto* ps = find_pair(sac);
        pk->claimed = ps->claimed = true;
        const int flow_idx = std::stoi(room_key.substr(0, room_key.find(':')));
        flows_[flow_idx].metrics.purif_attempts += 1;
        const double now = engine_.clock();
        for (auto* p : {pk, ps}) {
            for (const auto end : {p->end_a, p->end_b})
                qubits_[end.qubit].apply(QubitTrigger::PurifRoundStart, now);
        }
        // One classical round trip over the segment (solicit + response).
        const double latency = 2.0 * classical_latency_between(*pk, 0, 0);
        const std::string key = room_key;
        engine_.schedule(now + latency, "purif", EventKind::ClassicalMessage,
                         [this, keep, sac, key, flow_idx] {
                             on_purif_round_done(keep, sac, key, flow_idx);
                         });
    }
}

void Simulation::on_purif_round_done(std::int64_t keep_id, std::int64_t sac_id,
                                     const std::string& room_key, int flow_idx) {
    auto* pk = find_pair(keep_id);
    auto* ps = find_pair(sac_id);
    const double now = engine_.clock();

    auto requeue_survivor = [&](EprPair* p) {
        if (!p || !p->alive) return;
        p->claimed = false;
        for (const auto end : {p->end_a, p->end_b})
            qubits_[end.qubit].apply(QubitTrigger::RoundSuccess, now);
        purif_rooms_[room_key].push_back(p->id);
        try_purify(room_key);
    };
    if (!pk || !pk->alive || !ps || !ps->alive) {
        // A partner decohered mid-round: the round is void, survivor re-queues.
        requeue_survivor(pk && pk->alive ? pk : nullptr);
        requeue_survivor(ps && ps->alive ? ps : nullptr);
        return;
    }

    const double f1 = (3.0 * pk->werner_at(now, cfg_.sim.coherence_time) + 1.0) / 4.0;
    const double f2 = (3.0 * ps->werner_at(now, cfg_.sim.coherence_time) + 1.0) / 4.0;
    const auto outcome = purify_step(f1, f2, cfg_.sim.purify_rule);
    const bool success = node_rngs_[pk->end_a.node]->bernoulli(outcome.success_prob);

    if (success) {
        flows_[flow_idx].metrics.purif_successes += 1;
        // Sacrifice pair is always consumed.
        ps->alive = false;
        ps->claimed = false;
        if (ps->cutoff_event != UINT64_MAX) engine_.cancel(ps->cutoff_event);
        ps->cutoff_event = UINT64_MAX;
        ledger_.purif_consumed += 1;
        for (const auto end : {ps->end_a, ps->end_b}) {
            qubits_[end.qubit].apply(QubitTrigger::Consumed, now);
            free_qubit(end.qubit);
        }
        maybe_gc(sac_id);

        pk->w_ref = (4.0 * outcome.fidelity_out - 1.0) / 3.0;
        pk->w_ref_time = now;
        pk->purif_rounds_done += 1;
        pk->claimed = false;
        for (const auto end : {pk->end_a, pk->end_b})
            qubits_[end.qubit].apply(QubitTrigger::RoundSuccess, now);
        if (purif_needed(*pk, flow_idx)) {
            purif_rooms_[room_key].push_back(keep_id);
            try_purify(room_key);
        } else {
            for (const auto end : {pk->end_a, pk->end_b})
                qubits_[end.qubit].apply(QubitTrigger::PurifDone, now);
            // Segment purified: resume normal forwarding at both ends.
            const auto m = match_flow(*pk, flows_[flow_idx]);
            if (m->first == 0 &&
                m->second == static_cast<int>(flows_[flow_idx].route.size()) - 1) {
                pk->ready_a = pk->ready_b = now;
                check_delivery(keep_id);
            } else {
                evaluate_node(pk->end_a.node);
                if (pk->alive) evaluate_node(pk->end_b.node);
            }
        }
    } else {
        // Round failure destroys both pairs.
        for (auto* p : {pk, ps}) {
            p->alive = false;
            p->claimed = false;
            if (p->cutoff_event != UINT64_MAX) engine_.cancel(p->cutoff_event);
            p->cutoff_event = UINT64_MAX;
            ledger_.purif_consumed += 1;
            for (const auto end : {p->end_a, p->end_b}) {
                qubits_[end.qubit].apply(QubitTrigger::RoundFailure, now);
                free_qubit(end.qubit);
            }
        }
        maybe_gc(keep_id);
        maybe_gc(sac_id);
    }
}

// ---------------------------------------------------------------------------

RunMetrics Simulation::run() {
    const auto wall_start = std::chrono::steady_clock::now();
    start();
    engine_.run_until(cfg_.sim.duration);

    RunMetrics m;
    m.duration = cfg_.sim.duration;
    for (const auto& f : flows_) m.flows.push_back(f.metrics);
    for (const auto& c : channels_) {
        if (c.active) m.channels.push_back(c.metrics);
    }
    for (const auto& [_, p] : pairs_) {
        if (p.alive) ledger_.live += 1;
    }
    m.ledger = ledger_;
    m.orphan_merges = orphan_merges_;
    m.stale_messages = stale_messages_;
    m.event_count = engine_.dispatch_count();
    m.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return m;
}

RunMetrics run_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
    Simulation sim(cfg, seed);
    return sim.run();
}

}  // namespace qnetsim
