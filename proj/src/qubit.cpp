#include "qnetsim/qubit.hpp"

namespace qnetsim {

std::string to_string(QubitState s) {
    switch (s) {
        case QubitState::Raw: return "RAW";
        case QubitState::Active: return "ACTIVE";
        case QubitState::Reserved: return "RESERVED";
        case QubitState::Entangled: return "ENTANGLED";
        case QubitState::Purif: return "PURIF";
        case QubitState::Pending: return "PENDING";
        case QubitState::Eligible: return "ELIGIBLE";
        case QubitState::Release: return "RELEASE";
    }
    return "?";
}

std::string to_string(QubitTrigger t) {
    switch (t) {
        case QubitTrigger::StartReservation: return "start_reservation";
        case QubitTrigger::RemoteAvailable: return "remote_available";
        case QubitTrigger::EprCreated: return "epr_created";
        case QubitTrigger::SwapConditionsMet: return "swap_conditions_met";
        case QubitTrigger::PurifRoundStart: return "purif_round_start";
        case QubitTrigger::RoundSuccess: return "round_success";
        case QubitTrigger::RoundFailure: return "round_failure";
        case QubitTrigger::PurifDone: return "purif_done";
        case QubitTrigger::Consumed: return "consumed";
        case QubitTrigger::RemoteFailed: return "remote_failed";
        case QubitTrigger::Expired: return "expired";
        case QubitTrigger::QubitFreed: return "qubit_freed";
    }
    return "?";
}

bool legal_transition(QubitState s, QubitTrigger t) {
    switch (t) {
        case QubitTrigger::StartReservation: return s == QubitState::Raw;
        case QubitTrigger::RemoteAvailable: return s == QubitState::Active;
        case QubitTrigger::EprCreated: return s == QubitState::Reserved;
        case QubitTrigger::SwapConditionsMet: return s == QubitState::Entangled;
        case QubitTrigger::PurifRoundStart: return s == QubitState::Purif;
        case QubitTrigger::RoundSuccess: return s == QubitState::Pending;
        case QubitTrigger::RoundFailure: return s == QubitState::Pending;
        case QubitTrigger::PurifDone: return s == QubitState::Purif;
        case QubitTrigger::Consumed:
            return s == QubitState::Eligible || s == QubitState::Pending;
        case QubitTrigger::RemoteFailed:
            return s == QubitState::Entangled || s == QubitState::Purif ||
                   s == QubitState::Pending || s == QubitState::Eligible;
        case QubitTrigger::Expired:
            return s == QubitState::Entangled || s == QubitState::Purif ||
                   s == QubitState::Pending || s == QubitState::Eligible;
        case QubitTrigger::QubitFreed: return s == QubitState::Release;
    }
    return false;
}

QubitState next_state(QubitState s, QubitTrigger t) {
    if (!legal_transition(s, t))
        throw SimLogicError("illegal qubit transition: " + to_string(s) + " + " +
                            to_string(t));
    switch (t) {
        case QubitTrigger::StartReservation: return QubitState::Active;
        case QubitTrigger::RemoteAvailable: return QubitState::Reserved;
        case QubitTrigger::EprCreated: return QubitState::Entangled;
        case QubitTrigger::SwapConditionsMet: return QubitState::Purif;
        case QubitTrigger::PurifRoundStart: return QubitState::Pending;
        case QubitTrigger::RoundSuccess: return QubitState::Purif;
        case QubitTrigger::RoundFailure: return QubitState::Release;
        case QubitTrigger::PurifDone: return QubitState::Eligible;
        case QubitTrigger::Consumed: return QubitState::Release;
        case QubitTrigger::RemoteFailed: return QubitState::Release;
        case QubitTrigger::Expired: return QubitState::Release;
        case QubitTrigger::QubitFreed: return QubitState::Raw;
    }
    throw SimLogicError("unreachable");
}

void Qubit::apply(QubitTrigger trigger, double clock) {
    state = next_state(state, trigger);
    state_entered_at = clock;
    if (!holds_epr(state)) epr = -1;
}

}  // namespace qnetsim
