#include <doctest.h>

#include <vector>

#include "qnetsim/event_engine.hpp"
#include "qnetsim/qubit.hpp"

using namespace qnetsim;

namespace {

const std::vector<QubitState> kAllStates = {
    QubitState::Raw,    QubitState::Active,  QubitState::Reserved,
    QubitState::Entangled, QubitState::Purif, QubitState::Pending,
    QubitState::Eligible,  QubitState::Release};

const std::vector<QubitTrigger> kAllTriggers = {
    QubitTrigger::StartReservation, QubitTrigger::RemoteAvailable,
    QubitTrigger::EprCreated,       QubitTrigger::SwapConditionsMet,
    QubitTrigger::PurifRoundStart,  QubitTrigger::RoundSuccess,
    QubitTrigger::RoundFailure,     QubitTrigger::PurifDone,
    QubitTrigger::Consumed,         QubitTrigger::RemoteFailed,
    QubitTrigger::Expired,          QubitTrigger::QubitFreed};

}  // namespace

TEST_CASE("happy-path lifecycle") {
    Qubit q;
    double t = 0.0;
    q.apply(QubitTrigger::StartReservation, t += 1);
    CHECK(q.state == QubitState::Active);
    q.apply(QubitTrigger::RemoteAvailable, t += 1);
    CHECK(q.state == QubitState::Reserved);
    q.apply(QubitTrigger::EprCreated, t += 1);
    CHECK(q.state == QubitState::Entangled);
    q.epr = 42;  // bound once entangled
    q.apply(QubitTrigger::SwapConditionsMet, t += 1);
    CHECK(q.state == QubitState::Purif);
    q.apply(QubitTrigger::PurifRoundStart, t += 1);
    CHECK(q.state == QubitState::Pending);
    q.apply(QubitTrigger::RoundSuccess, t += 1);
    CHECK(q.state == QubitState::Purif);
    q.apply(QubitTrigger::PurifDone, t += 1);
    CHECK(q.state == QubitState::Eligible);
    CHECK(q.epr == 42);  // still holding the pair
    q.apply(QubitTrigger::Consumed, t += 1);
    CHECK(q.state == QubitState::Release);
    CHECK(q.epr == -1);  // cleared on leaving the EPR-holding states
    q.apply(QubitTrigger::QubitFreed, t += 1);
    CHECK(q.state == QubitState::Raw);
    CHECK(q.state_entered_at == t);
}

TEST_CASE("illegal transitions throw and leave the qubit unchanged") {
    Qubit q;
    CHECK_THROWS_AS(q.apply(QubitTrigger::EprCreated, 1.0), SimLogicError);
    CHECK(q.state == QubitState::Raw);
    CHECK_THROWS_AS(q.apply(QubitTrigger::Consumed, 1.0), SimLogicError);
    CHECK(q.state == QubitState::Raw);
}

TEST_CASE("transition table fuzz: next_state throws exactly on illegal edges") {
    for (auto s : kAllStates) {
        for (auto t : kAllTriggers) {
            if (legal_transition(s, t)) {
                CHECK_NOTHROW(next_state(s, t));
            } else {
                CHECK_THROWS_AS(next_state(s, t), SimLogicError);
            }
        }
    }
}

TEST_CASE("random trigger walk stays in a consistent state") {
    RngStream rng(99, "fsm-fuzz");
    Qubit q;
    double clock = 0.0;
    int applied = 0;
    for (int i = 0; i < 20000; ++i) {
        const auto trig = kAllTriggers[rng.uniform_int(0, static_cast<int>(kAllTriggers.size()) - 1)];
        const auto before = q.state;
        if (legal_transition(before, trig)) {
            q.apply(trig, clock += 1.0);
            ++applied;
            CHECK(q.state == next_state(before, trig));
            if (holds_epr(q.state) && !holds_epr(before)) q.epr = i;  // simulate binding
            if (!holds_epr(q.state)) CHECK(q.epr == -1);
        } else {
            CHECK_THROWS_AS(q.apply(trig, clock), SimLogicError);
            CHECK(q.state == before);
        }
    }
    CHECK(applied > 1000);  // the walk actually exercised the machine
}

TEST_CASE("every failure edge lands in RELEASE") {
    for (auto s : kAllStates) {
        for (auto t : {QubitTrigger::RemoteFailed, QubitTrigger::Expired,
                       QubitTrigger::RoundFailure}) {
            if (legal_transition(s, t)) CHECK(next_state(s, t) == QubitState::Release);
        }
    }
}

TEST_CASE("EPR-holding predicate matches the lifecycle") {
    CHECK_FALSE(holds_epr(QubitState::Raw));
    CHECK_FALSE(holds_epr(QubitState::Active));
    CHECK_FALSE(holds_epr(QubitState::Reserved));
    CHECK(holds_epr(QubitState::Entangled));
    CHECK(holds_epr(QubitState::Purif));
    CHECK(holds_epr(QubitState::Pending));
    CHECK(holds_epr(QubitState::Eligible));
    CHECK_FALSE(holds_epr(QubitState::Release));
}

TEST_CASE("EPR pair helpers") {
    EprPair p;
    p.end_a = {3, 10};
    p.end_b = {7, 11};
    CHECK(p.has_end(3));
    CHECK(p.has_end(7));
    CHECK_FALSE(p.has_end(5));
    CHECK(p.end_at(3).qubit == 10);
    CHECK(p.other_end(3).qubit == 11);
    p.w_ref = 0.9866666666666667;
    p.w_ref_time = 0.0;
    CHECK(p.werner_at(1e-3, 1e-2) == doctest::Approx(0.8927729191288134).epsilon(1e-14));
}
