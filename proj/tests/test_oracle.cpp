#include <doctest.h>

#include <cmath>

#include "qnetsim/errors.hpp"
#include "qnetsim/oracle.hpp"

using namespace qnetsim;

namespace {

// Brute-force reference: enumerate every (E1, E2, per-attempt swap outcome)
// combination by direct recursion over Bernoulli trials.
std::vector<double> enumerate_e2e(int c1, int c2, double p1, double p2, double q) {
    std::vector<double> pmf(std::min(c1, c2) + 1, 0.0);
    for (int e1 = 0; e1 <= c1; ++e1) {
        for (int e2 = 0; e2 <= c2; ++e2) {
            // probability of exactly e successes in c Bernoulli(p) trials,
            // accumulated multiplicatively (no closed-form binomial here)
            auto prob = [](int c, int e, double p) {
                double total = 0.0;
                // iterate over bitmasks for small c (c <= 4 in the tests)
                for (int mask = 0; mask < (1 << c); ++mask) {
                    int ones = 0;
                    double pr = 1.0;
                    for (int b = 0; b < c; ++b) {
                        if (mask & (1 << b)) {
                            pr *= p;
                            ++ones;
                        } else {
                            pr *= 1.0 - p;
                        }
                    }
                    if (ones == e) total += pr;
                }
                return total;
            };
            const double pe = prob(c1, e1, p1) * prob(c2, e2, p2);
            if (pe == 0.0) continue;
            const int m = std::min(e1, e2);
            for (int mask = 0; mask < (1 << m); ++mask) {
                int k = 0;
                double pr = 1.0;
                for (int b = 0; b < m; ++b) {
                    if (mask & (1 << b)) {
                        pr *= q;
                        ++k;
                    } else {
                        pr *= 1.0 - q;
                    }
                }
                pmf[k] += pe * pr;
            }
        }
    }
    return pmf;
}

OracleInput sample_input() {
    OracleInput in;
    in.attempt_rate[0] = 2900.0;
    in.attempt_rate[1] = 4400.0;
    in.p_success[0] = 0.103;
    in.p_success[1] = 0.21;
    in.ent_rate[0] = 300.0;
    in.ent_rate[1] = 920.0;
    in.swap_success = 0.5;
    in.coherence_time = 0.1;
    in.length_km[0] = 32.0;
    in.length_km[1] = 18.0;
    return in;
}

}  // namespace

TEST_CASE("e2e distribution basics") {
    SUBCASE("certain single pair") {
        const auto pmf = e2e_distribution(1, 1, 1.0, 1.0, 1.0);
        REQUIRE(pmf.size() == 2);
        CHECK(pmf[0] == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(pmf[1] == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("q = 0 concentrates at zero") {
        const auto pmf = e2e_distribution(3, 4, 0.7, 0.9, 0.0);
        CHECK(pmf[0] == doctest::Approx(1.0).epsilon(1e-15));
        for (size_t k = 1; k < pmf.size(); ++k) CHECK(pmf[k] == 0.0);
    }
    SUBCASE("negative capacity is rejected") {
        CHECK_THROWS_AS(e2e_distribution(-1, 1, 0.5, 0.5, 0.5), ConfigError);
    }
}

TEST_CASE("e2e distribution matches brute-force enumeration") {
    const auto got = e2e_distribution(2, 1, 0.5, 0.5, 0.5);
    const auto want = enumerate_e2e(2, 1, 0.5, 0.5, 0.5);
    REQUIRE(got.size() == want.size());
    for (size_t k = 0; k < got.size(); ++k)
        CHECK(std::abs(got[k] - want[k]) < 1e-12);
}

TEST_CASE("pmf normalization across a parameter grid") {
    for (int c1 : {0, 1, 3}) {
        for (int c2 : {1, 2, 4}) {
            for (double p : {0.0, 0.3, 1.0}) {
                for (double q : {0.0, 0.7, 1.0}) {
                    const auto pmf = e2e_distribution(c1, c2, p, 0.6, q);
                    double sum = 0.0;
                    for (double v : pmf) sum += v;
                    CHECK(std::abs(sum - 1.0) < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("expected throughput") {
    CHECK(expected_throughput({0.5, 0.5}, 0.01) == doctest::Approx(50.0).epsilon(1e-14));
    CHECK(expected_throughput({1.0}, 0.01) == doctest::Approx(0.0));
    CHECK_THROWS_AS(expected_throughput({0.5, 0.4}, 0.01), ConfigError);
    CHECK_THROWS_AS(expected_throughput({0.5, 0.5}, 0.0), ConfigError);
}

TEST_CASE("expected throughput agrees with MC simulation of the binomial model") {
    const int c1 = 2, c2 = 1;
    const double p1 = 0.5, p2 = 0.5, q = 0.5, t_s = 0.01;
    const double analytic = expected_throughput(e2e_distribution(c1, c2, p1, p2, q), t_s);

    RngStream rng(11, "mc-xcheck");
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        int e1 = 0, e2 = 0;
        for (int t = 0; t < c1; ++t) e1 += rng.bernoulli(p1) ? 1 : 0;
        for (int t = 0; t < c2; ++t) e2 += rng.bernoulli(p2) ? 1 : 0;
        int k = 0;
        for (int t = 0; t < std::min(e1, e2); ++t) k += rng.bernoulli(q) ? 1 : 0;
        sum += k;
        sumsq += static_cast<double>(k) * k;
    }
    const double mean = sum / n;
    const double var = (sumsq - n * mean * mean) / (n - 1);
    const double sigma = std::sqrt(var / n) / t_s;
    CHECK(std::abs(mean / t_s - analytic) < 3.0 * sigma);
}

TEST_CASE("time slot selection") {
    SUBCASE("symmetric rates give 1.5/R") {
        const auto slot = select_time_slot(100.0, 100.0, 10.0, 0.0, 2e5, 0.0);
        CHECK(slot.t_gen == doctest::Approx(1.5 / 100.0).epsilon(1e-14));
    }
    SUBCASE("huge coherence time leaves E[T12]") {
        const auto slot = select_time_slot(200.0, 500.0, 1e9, 32.0, 2e5, 0.0);
        const double expected = 1.0 / 200 + 1.0 / 500 - 1.0 / 700;
        CHECK(slot.t_gen == doctest::Approx(expected).epsilon(1e-14));
        CHECK(slot.t_s == doctest::Approx(expected + 1.6e-4).epsilon(1e-12));
    }
    SUBCASE("heralding time from the longest link") {
        const auto slot = select_time_slot(100.0, 100.0, 10.0, 32.0, 2e5, 0.0);
        CHECK(slot.t_s - slot.t_gen == doctest::Approx(1.6e-4).epsilon(1e-12));
    }
    SUBCASE("coherence too short") {
        CHECK_THROWS_AS(select_time_slot(100.0, 100.0, 1e-4, 32.0, 2e5, 0.0), ConfigError);
    }
}

TEST_CASE("MC capacity rounding") {
    RngStream rng(5, "round");
    SUBCASE("integers stay put") {
        for (int i = 0; i < 100; ++i) CHECK(mc_capacity_rounding(3.0, rng) == 3);
    }
    SUBCASE("fractional support is floor / floor+1") {
        for (int i = 0; i < 1000; ++i) {
            const int c = mc_capacity_rounding(0.2, rng);
            CHECK((c == 0 || c == 1));
        }
    }
    SUBCASE("mean is preserved") {
        const int n = 100000;
        double sum = 0.0;
        for (int i = 0; i < n; ++i) sum += mc_capacity_rounding(2.5, rng);
        // Bernoulli(0.5) fraction: sigma of the mean = 0.5/sqrt(n)
        CHECK(std::abs(sum / n - 2.5) < 3.0 * 0.5 / std::sqrt(n));
    }
    SUBCASE("negative capacity is rejected") {
        CHECK_THROWS_AS(mc_capacity_rounding(-0.1, rng), ConfigError);
    }
}

TEST_CASE("rate prediction") {
    SUBCASE("q = 0 predicts zero") {
        auto in = sample_input();
        in.swap_success = 0.0;
        CHECK(predict_rate(in) == doctest::Approx(0.0));
    }
    SUBCASE("deterministic for fixed input") {
        const auto in = sample_input();
        CHECK(predict_rate(in) == predict_rate(in));
    }
    SUBCASE("monotone non-decreasing in q") {
        auto in = sample_input();
        double prev = -1.0;
        for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            in.swap_success = q;
            const double r = predict_rate(in);
            CHECK(r >= prev);
            prev = r;
        }
    }
    SUBCASE("monotone non-decreasing in each p_i") {
        auto in = sample_input();
        double prev = -1.0;
        for (double p : {0.05, 0.2, 0.5, 1.0}) {
            in.p_success[0] = p;
            const double r = predict_rate(in);
            CHECK(r >= prev);
            prev = r;
        }
    }
    SUBCASE("invalid inputs rejected") {
        auto in = sample_input();
        in.ent_rate[0] = 0.0;
        CHECK_THROWS_AS(predict_rate(in), ConfigError);
        in = sample_input();
        in.swap_success = 1.5;
        CHECK_THROWS_AS(predict_rate(in), ConfigError);
        in = sample_input();
        in.sample_count = 0;
        CHECK_THROWS_AS(predict_rate(in), ConfigError);
    }
}
