#include <doctest.h>

#include <vector>

#include "qnetsim/event_engine.hpp"

using namespace qnetsim;

TEST_CASE("events dispatch in strict (time, seq) order") {
    EventEngine eng;
    std::vector<int> order;
    eng.schedule(2.0, "b", EventKind::ClassicalMessage, [&] { order.push_back(2); });
    eng.schedule(1.0, "a", EventKind::ClassicalMessage, [&] { order.push_back(1); });
    eng.schedule(2.0, "c", EventKind::ClassicalMessage, [&] { order.push_back(3); });
    eng.run_until(5.0);
    CHECK(order == std::vector<int>{1, 2, 3});
    CHECK(eng.clock() == 5.0);
    CHECK(eng.dispatch_count() == 3);
}

TEST_CASE("equal-time events keep schedule order, including nested schedules") {
    EventEngine eng;
    std::vector<int> order;
    eng.schedule(1.0, "a", EventKind::ClassicalMessage, [&] {
        order.push_back(1);
        eng.schedule(1.0, "nested", EventKind::ClassicalMessage,
                     [&] { order.push_back(3); });
    });
    eng.schedule(1.0, "b", EventKind::ClassicalMessage, [&] { order.push_back(2); });
    eng.run_until(1.0);
    CHECK(order == std::vector<int>{1, 2, 3});
}

TEST_CASE("scheduling into the past is a logic error") {
    EventEngine eng;
    eng.schedule(1.0, "a", EventKind::ClassicalMessage, [] {});
    eng.run_until(2.0);
    CHECK_THROWS_AS(eng.schedule(1.5, "late", EventKind::ClassicalMessage, [] {}),
                    SimLogicError);
    // Scheduling at exactly the current time is allowed.
    CHECK_NOTHROW(eng.schedule(2.0, "now", EventKind::ClassicalMessage, [] {}));
}

TEST_CASE("cancelled events never fire") {
    EventEngine eng;
    int fired = 0;
    const auto seq = eng.schedule(1.0, "a", EventKind::CutoffExpiry, [&] { ++fired; });
    eng.schedule(2.0, "b", EventKind::ClassicalMessage, [&] { ++fired; });
    eng.cancel(seq);
    eng.run_until(3.0);
    CHECK(fired == 1);
}

TEST_CASE("run_until only dispatches events up to the horizon") {
    EventEngine eng;
    int fired = 0;
    eng.schedule(1.0, "a", EventKind::ClassicalMessage, [&] { ++fired; });
    eng.schedule(10.0, "b", EventKind::ClassicalMessage, [&] { ++fired; });
    eng.run_until(5.0);
    CHECK(fired == 1);
    eng.run_until(10.0);
    CHECK(fired == 2);
}

TEST_CASE("trace sink observes dispatches") {
    EventEngine eng;
    std::vector<EventRecord> trace;
    eng.set_trace([&](const EventRecord& ev) { trace.push_back(ev); });
    eng.schedule(1.0, "x", EventKind::AttemptComplete, [] {});
    eng.run_until(2.0);
    REQUIRE(trace.size() == 1);
    CHECK(trace[0].target == "x");
    CHECK(trace[0].kind == EventKind::AttemptComplete);
    CHECK(trace[0].time == 1.0);
}

TEST_CASE("rng streams are reproducible and independent") {
    RngStream a1(42, "chan:AB"), a2(42, "chan:AB");
    RngStream b(42, "chan:CD"), c(43, "chan:AB");
    bool all_equal_b = true, all_equal_c = true;
    for (int i = 0; i < 64; ++i) {
        const double u = a1.uniform();
        CHECK(u == a2.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        if (u != b.uniform()) all_equal_b = false;
        if (u != c.uniform()) all_equal_c = false;
    }
    CHECK_FALSE(all_equal_b);  // different label -> different stream
    CHECK_FALSE(all_equal_c);  // different master seed -> different stream
}

TEST_CASE("uniform_int covers the inclusive range") {
    RngStream rng(1, "test");
    bool lo = false, hi = false;
    for (int i = 0; i < 1000; ++i) {
        const int v = rng.uniform_int(0, 3);
        CHECK(v >= 0);
        CHECK(v <= 3);
        if (v == 0) lo = true;
        if (v == 3) hi = true;
    }
    CHECK(lo);
    CHECK(hi);
}
