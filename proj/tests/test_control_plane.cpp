#include <doctest.h>

#include "qnetsim/control_plane.hpp"

using namespace qnetsim;

namespace {

NodeSpec node(const std::string& id, int cap = 8) {
    NodeSpec n;
    n.id = id;
    n.memory_capacity = cap;
    return n;
}

ChannelSpec channel(const std::string& id, const std::string& a, const std::string& b) {
    ChannelSpec c;
    c.id = id;
    c.primary = a;
    c.secondary = b;
    c.length_km = 30.0;
    c.attenuation_length_km = 21.715;
    c.qubits_primary = 2;
    c.qubits_secondary = 2;
    return c;
}

NetworkTopology diamond() {
    // A - B - D and A - C - D, plus a long detour A - E - F - D.
    return NetworkTopology(
        {node("A"), node("B"), node("C"), node("D"), node("E"), node("F")},
        {channel("ab", "A", "B"), channel("bd", "B", "D"), channel("ac", "A", "C"),
         channel("cd", "C", "D"), channel("ae", "A", "E"), channel("ef", "E", "F"),
         channel("fd", "F", "D")});
}

}  // namespace

TEST_CASE("slot phases") {
    TimingConfig t;
    t.mode = TimingMode::Sync;
    t.t_ext = 4.0;
    t.t_int = 1.0;
    t.t_app = 0.5;  // slot length 5.5

    CHECK(phase_at(t, 0.0) == SlotPhase::External);
    CHECK(phase_at(t, 3.999) == SlotPhase::External);
    CHECK(phase_at(t, 4.0) == SlotPhase::Internal);
    CHECK(phase_at(t, 4.999) == SlotPhase::Internal);
    CHECK(phase_at(t, 5.0) == SlotPhase::Application);
    CHECK(phase_at(t, 5.5) == SlotPhase::External);  // next slot
    CHECK(phase_at(t, 5.5 + 4.2) == SlotPhase::Internal);

    // Next phase start at or after a time.
    CHECK(phase_start(t, 0.0, SlotPhase::External) == doctest::Approx(0.0));
    CHECK(phase_start(t, 0.1, SlotPhase::External) == doctest::Approx(5.5));
    CHECK(phase_start(t, 2.0, SlotPhase::Internal) == doctest::Approx(4.0));
    CHECK(phase_start(t, 4.5, SlotPhase::Internal) == doctest::Approx(9.5));
    CHECK(phase_start(t, 4.5, SlotPhase::Application) == doctest::Approx(5.0));

    CHECK(phase_end_of_current(t, 1.0) == doctest::Approx(4.0));
    CHECK(phase_end_of_current(t, 4.5) == doctest::Approx(5.0));
    CHECK(phase_end_of_current(t, 5.2) == doctest::Approx(5.5));
}

TEST_CASE("minimum-hop routing with lexicographic ties") {
    const auto topo = diamond();
    // Two 2-hop routes A-B-D and A-C-D; B < C wins the tie.
    CHECK(compute_path(topo, "A", "D") == std::vector<std::string>{"A", "B", "D"});
    CHECK(compute_path(topo, "D", "A") == std::vector<std::string>{"D", "B", "A"});
    CHECK(compute_path(topo, "A", "F") == std::vector<std::string>{"A", "E", "F"});
    CHECK_THROWS_AS(compute_path(topo, "A", "A"), ConfigError);
    CHECK_THROWS_AS(compute_path(topo, "A", "nope"), ConfigError);

    // Disconnected node.
    NetworkTopology split({node("A"), node("B"), node("X")}, {channel("ab", "A", "B")});
    CHECK_THROWS_AS(compute_path(split, "A", "X"), ConfigError);
}

TEST_CASE("instruction validation") {
    const auto topo = diamond();
    PathInstruction pi;
    pi.request_id = "p1";
    pi.route = {"A", "B", "D"};

    SUBCASE("valid baseline") { CHECK_NOTHROW(validate_instructions(topo, {pi})); }

    SUBCASE("duplicate request id") {
        auto other = pi;
        CHECK_THROWS_AS(validate_instructions(topo, {pi, other}), ConfigError);
    }
    SUBCASE("route over a missing channel") {
        pi.route = {"A", "D"};
        CHECK_THROWS_AS(validate_instructions(topo, {pi}), ConfigError);
    }
    SUBCASE("non-simple route") {
        pi.route = {"A", "B", "A"};
        CHECK_THROWS_AS(validate_instructions(topo, {pi}), ConfigError);
    }
    SUBCASE("static order must cover intermediates exactly") {
        pi.swap_policy.mode = SwapMode::StaticOrder;
        CHECK_THROWS_AS(validate_instructions(topo, {pi}), ConfigError);  // misses B
        pi.swap_policy.rank = {{"B", 0}, {"C", 1}};
        CHECK_THROWS_AS(validate_instructions(topo, {pi}), ConfigError);  // C off-route
        pi.swap_policy.rank = {{"B", 0}};
        CHECK_NOTHROW(validate_instructions(topo, {pi}));
    }
    SUBCASE("purification segment must sit on the route") {
        pi.purification.targets = {{{"A", "B"}, 1}};
        CHECK_NOTHROW(validate_instructions(topo, {pi}));
        pi.purification.targets = {{{"B", "A"}, 1}};  // reverse direction is fine
        CHECK_NOTHROW(validate_instructions(topo, {pi}));
        pi.purification.targets = {{{"A", "C"}, 1}};
        CHECK_THROWS_AS(validate_instructions(topo, {pi}), ConfigError);
        pi.purification.targets = {{{"A", "B"}, -1}};
        CHECK_THROWS_AS(validate_instructions(topo, {pi}), ConfigError);
    }
    SUBCASE("allocations must fit per-side capacity across paths") {
        pi.multiplexing.mode = MultiplexMode::BufferSpace;
        pi.multiplexing.allocations = {{"ab", {2, 2}}};
        CHECK_NOTHROW(validate_instructions(topo, {pi}));

        auto p2 = pi;
        p2.request_id = "p2";
        p2.multiplexing.allocations = {{"ab", {1, 1}}};
        CHECK_THROWS_AS(validate_instructions(topo, {pi, p2}), ConfigError);
    }
    SUBCASE("allocation must name an on-route channel") {
        pi.multiplexing.mode = MultiplexMode::BufferSpace;
        pi.multiplexing.allocations = {{"cd", {1, 1}}};
        CHECK_THROWS_AS(validate_instructions(topo, {pi}), ConfigError);
    }
    SUBCASE("buffer-space allocation claiming nothing is rejected") {
        pi.multiplexing.mode = MultiplexMode::BufferSpace;
        pi.multiplexing.allocations = {{"ab", {0, 0}}};
        CHECK_THROWS_AS(validate_instructions(topo, {pi}), ConfigError);
    }
}
