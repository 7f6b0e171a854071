#include <doctest.h>

#include <cmath>

#include "qnetsim/event_engine.hpp"
#include "qnetsim/link_models.hpp"

using namespace qnetsim;

namespace {

ChannelSpec make_channel(Architecture arch, double length, double l0 = 21.714724095162588) {
    ChannelSpec c;
    c.id = "test";
    c.primary = "A";
    c.secondary = "B";
    c.length_km = length;
    c.attenuation_length_km = l0;
    c.architecture = arch;
    c.alpha = 0.5;
    c.eta_b = 0.95;
    c.eta_d = 0.95;
    return c;
}

}  // namespace

TEST_CASE("per-round success probability matches the closed forms") {
    // Frozen values for a 30 km link at L0 = 21.7147... km (0.2 dB/km).
    CHECK(success_probability(make_channel(Architecture::DimBk, 30.0)) ==
          doctest::Approx(0.11334887522186977).epsilon(1e-14));
    CHECK(success_probability(make_channel(Architecture::DimDualRail, 30.0)) ==
          doctest::Approx(0.11334887522186977).epsilon(1e-14));  // alpha=0.5 coincidence
    CHECK(success_probability(make_channel(Architecture::SrDualRail, 30.0)) ==
          doctest::Approx(0.23862921099341006).epsilon(1e-14));
    CHECK(success_probability(make_channel(Architecture::SimDualRail, 30.0)) ==
          doctest::Approx(0.22669775044373955).epsilon(1e-14));
    // 32 km DiM-BK, and an SR link with a weaker detector.
    CHECK(success_probability(make_channel(Architecture::DimBk, 32.0)) ==
          doctest::Approx(0.10337540283114571).epsilon(1e-14));
    auto sr = make_channel(Architecture::SrDualRail, 30.0);
    sr.eta_d = 0.5;
    CHECK(success_probability(sr) == doctest::Approx(0.12559432157547898).epsilon(1e-14));
}

TEST_CASE("transduction efficiencies multiply uniformly") {
    auto c = make_channel(Architecture::SimDualRail, 30.0);
    const double base = success_probability(c);
    c.eta_s = 0.8;
    c.eta_r = 0.9;
    CHECK(success_probability(c) == doctest::Approx(base * 0.72).epsilon(1e-14));
}

TEST_CASE("success probability decreases monotonically with length") {
    for (auto arch : {Architecture::DimBk, Architecture::DimDualRail,
                      Architecture::SrDualRail, Architecture::SimDualRail}) {
        double prev = 1.0;
        for (double L = 5.0; L <= 100.0; L += 5.0) {
            const double p = success_probability(make_channel(arch, L));
            CHECK(p < prev);
            prev = p;
        }
    }
}

TEST_CASE("dual-rail DiM success peaks at alpha = 0.5") {
    auto c = make_channel(Architecture::DimDualRail, 30.0);
    const double peak = success_probability(c);
    for (double a : {0.1, 0.3, 0.45, 0.55, 0.7, 0.9}) {
        c.alpha = a;
        CHECK(success_probability(c) < peak);
    }
}

TEST_CASE("round durations per architecture") {
    const double tau0 = 1e-5;
    const double tau_l = 30.0 / 2.0e5;  // 1.5e-4 s
    CHECK(round_duration(make_channel(Architecture::DimBk, 30.0), tau0) ==
          doctest::Approx(2.0 * (tau_l + tau0)).epsilon(1e-14));
    CHECK(round_duration(make_channel(Architecture::DimDualRail, 30.0), tau0) ==
          doctest::Approx(tau_l + tau0).epsilon(1e-14));
    CHECK(round_duration(make_channel(Architecture::SrDualRail, 30.0), tau0) ==
          doctest::Approx(2.0 * tau_l + tau0).epsilon(1e-14));
    CHECK(round_duration(make_channel(Architecture::SimDualRail, 30.0), tau0) ==
          doctest::Approx(tau_l + tau0).epsilon(1e-14));
}

TEST_CASE("degenerate round duration is rejected") {
    auto c = make_channel(Architecture::DimBk, 30.0);
    c.length_km = 0.0;  // bypass topology validation; LinkPhysics still guards
    CHECK_THROWS_AS(LinkPhysics::of(c, 0.0), ConfigError);
    CHECK_NOTHROW(LinkPhysics::of(c, 1e-5));
}

TEST_CASE("rounds-to-success sampling") {
    RngStream rng(7, "geom");
    SUBCASE("p = 1 always succeeds on round one") {
        for (int i = 0; i < 100; ++i) CHECK(sample_rounds_to_success(1.0, rng) == 1);
    }
    SUBCASE("p <= 0 is rejected") {
        CHECK_THROWS_AS(sample_rounds_to_success(0.0, rng), ConfigError);
        CHECK_THROWS_AS(sample_rounds_to_success(-0.1, rng), ConfigError);
    }
    SUBCASE("support starts at one") {
        for (int i = 0; i < 1000; ++i) CHECK(sample_rounds_to_success(0.9, rng) >= 1);
    }
    SUBCASE("empirical mean within 3 sigma of 1/p") {
        const double p = 0.1;
        const int n = 100000;
        double sum = 0.0;
        for (int i = 0; i < n; ++i) sum += sample_rounds_to_success(p, rng);
        const double mean = sum / n;
        // Var of geometric = (1-p)/p^2; sigma of the mean = sqrt(var/n)
        const double sigma = std::sqrt((1.0 - p) / (p * p) / n);
        CHECK(std::abs(mean - 1.0 / p) < 3.0 * sigma);
    }
}

TEST_CASE("Werner parameter and fidelity conversions") {
    CHECK(WernerState::from_fidelity(0.99).w == doctest::Approx(0.9866666666666667).epsilon(1e-14));
    CHECK(WernerState{1.0}.fidelity() == doctest::Approx(1.0));
    CHECK(WernerState{0.0}.fidelity() == doctest::Approx(0.25));
    // Round trip
    for (double f : {0.3, 0.5, 0.9, 0.97, 1.0})
        CHECK(WernerState::from_fidelity(f).fidelity() == doctest::Approx(f).epsilon(1e-14));
}

TEST_CASE("memory decay of the Werner parameter") {
    const double w0 = 0.9866666666666667;
    CHECK(decayed_werner(w0, 1e-3, 1e-2) ==
          doctest::Approx(0.8927729191288134).epsilon(1e-14));
    CHECK(decayed_werner(w0, 0.0, 1e-2) == w0);
    CHECK(decayed_werner(w0, -1.0, 1e-2) == w0);
    CHECK(decayed_werner(w0, 1.0, std::numeric_limits<double>::infinity()) == w0);
}

TEST_CASE("initial Werner state from channel base fidelity") {
    auto c = make_channel(Architecture::DimBk, 30.0);
    c.base_fidelity = 0.99;
    CHECK(initial_werner(c).w == doctest::Approx(0.9866666666666667).epsilon(1e-14));
    c.base_fidelity = 0.2;
    CHECK_THROWS_AS(initial_werner(c), ConfigError);
}
