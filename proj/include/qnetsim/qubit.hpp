#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qnetsim/errors.hpp"
#include "qnetsim/link_models.hpp"

namespace qnetsim {

enum class QubitState {
    Raw,
    Active,
    Reserved,
    Entangled,
    Purif,
    Pending,
    Eligible,
    Release,
};

enum class QubitTrigger {
    StartReservation,   // RAW -> ACTIVE
    RemoteAvailable,    // ACTIVE -> RESERVED
    EprCreated,         // RESERVED -> ENTANGLED
    SwapConditionsMet,  // ENTANGLED -> PURIF
    PurifRoundStart,    // PURIF -> PENDING
    RoundSuccess,       // PENDING -> PURIF
    RoundFailure,       // PENDING -> RELEASE
    PurifDone,          // PURIF -> ELIGIBLE (rounds done or none needed)
    Consumed,           // ELIGIBLE/PENDING -> RELEASE (swap, delivery, sacrifice)
    RemoteFailed,       // remote swap or purification failed -> RELEASE
    Expired,            // coherence cutoff -> RELEASE
    QubitFreed,         // RELEASE -> RAW
};

std::string to_string(QubitState s);
std::string to_string(QubitTrigger t);

bool legal_transition(QubitState state, QubitTrigger trigger);
// Next state for a legal (state, trigger) edge; throws SimLogicError otherwise.
QubitState next_state(QubitState state, QubitTrigger trigger);

// True while the qubit must reference a live EPR pair.
inline bool holds_epr(QubitState s) {
    return s == QubitState::Entangled || s == QubitState::Purif ||
           s == QubitState::Pending || s == QubitState::Eligible;
}

struct Qubit {
    int id = -1;
    int node = -1;        // topology node index
    int channel = -1;     // topology channel index this qubit is allocated to
    bool primary_side = false;
    QubitState state = QubitState::Raw;
    std::int64_t epr = -1;   // live pair id, or -1
    int path = -1;           // installed path binding, or -1 (statistical)
    double state_entered_at = 0.0;

    void apply(QubitTrigger trigger, double clock);
};

struct PairEnd {
    int node = -1;
    int qubit = -1;
};

struct EprPair {
    std::int64_t id = -1;
    PairEnd end_a, end_b;
    double w_ref = 1.0;       // Werner parameter at w_ref_time
    double w_ref_time = 0.0;
    double created_at = 0.0;  // oldest ancestor creation time; drives the cutoff
    std::vector<int> span;    // ordered elementary channel indices
    int path = -1;            // bound flow, or -1
    int purif_rounds_done = 0;
    bool alive = true;
    bool claimed = false;     // swap/purification commitment (conflict guard)
    std::uint64_t cutoff_event = UINT64_MAX;
    // Delivery bookkeeping: time each end learned the pair spans the full path.
    double ready_a = -1.0, ready_b = -1.0;
    bool delivery_scheduled = false;

    double werner_at(double t, double t_coh) const {
        return decayed_werner(w_ref, t - w_ref_time, t_coh);
    }
    bool has_end(int node_idx) const {
        return end_a.node == node_idx || end_b.node == node_idx;
    }
    PairEnd& end_at(int node_idx) { return end_a.node == node_idx ? end_a : end_b; }
    PairEnd& other_end(int node_idx) { return end_a.node == node_idx ? end_b : end_a; }
};

}  // namespace qnetsim
