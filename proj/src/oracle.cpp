#include "qnetsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qnetsim/errors.hpp"

namespace qnetsim {

namespace {

// log C(n, k), stable for n up to ~1e3 and beyond.
double log_binom(int n, int k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// P(X = k) for X ~ Binomial(n, p), computed in log space.
double binom_pmf(int n, int k, double p) {
    if (k < 0 || k > n) return 0.0;
    if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return k == n ? 1.0 : 0.0;
    return std::exp(log_binom(n, k) + k * std::log(p) + (n - k) * std::log1p(-p));
}

}  // namespace

void OracleInput::validate() const {
    for (int i = 0; i < 2; ++i) {
        if (!(attempt_rate[i] > 0.0))
            throw ConfigError("oracle: attempt rate A must be positive");
        if (!(p_success[i] > 0.0 && p_success[i] <= 1.0))
            throw ConfigError("oracle: success probability p must be in (0, 1]");
        if (!(ent_rate[i] > 0.0))
            throw ConfigError("oracle: entanglement rate R must be positive");
        if (!(length_km[i] >= 0.0))
            throw ConfigError("oracle: link length must be non-negative");
    }
    if (swap_success < 0.0 || swap_success > 1.0)
        throw ConfigError("oracle: swap success q must be in [0, 1]");
    if (!(coherence_time > 0.0))
        throw ConfigError("oracle: coherence time must be positive");
    if (!(classical_speed > 0.0))
        throw ConfigError("oracle: classical speed must be positive");
    if (t_app < 0.0) throw ConfigError("oracle: T_app must be non-negative");
    if (sample_count <= 0) throw ConfigError("oracle: sample count must be positive");
}

std::vector<double> e2e_distribution(int c1, int c2, double p1, double p2, double q) {
    if (c1 < 0 || c2 < 0)
        throw ConfigError("oracle: capacities must be non-negative integers");
    const int kmax = std::min(c1, c2);
    std::vector<double> pmf(kmax + 1, 0.0);

    // E_i ~ Binomial(c_i, p_i); min(E1, E2) swap attempts each succeed w.p. q.
    for (int i = 0; i <= c1; ++i) {
        const double pe1 = binom_pmf(c1, i, p1);
        if (pe1 == 0.0) continue;
        for (int j = 0; j <= c2; ++j) {
            const double pe2 = binom_pmf(c2, j, p2);
            if (pe2 == 0.0) continue;
            const int m = std::min(i, j);
            for (int k = 0; k <= m; ++k)
                pmf[k] += pe1 * pe2 * binom_pmf(m, k, q);
        }
    }
    // Pin P(0) to the exact complement so the pmf sums to 1 by construction.
    double tail = 0.0;
    for (int k = 1; k <= kmax; ++k) tail += pmf[k];
    pmf[0] = 1.0 - tail;
    return pmf;
}

double expected_throughput(const std::vector<double>& pmf, double t_s) {
    if (!(t_s > 0.0)) throw ConfigError("oracle: time slot must be positive");
    double sum = 0.0, mean = 0.0;
    for (size_t k = 0; k < pmf.size(); ++k) {
        sum += pmf[k];
        mean += k * pmf[k];
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw ConfigError("oracle: pmf is not normalized");
    return mean / t_s;
}

TimeSlot select_time_slot(double r1, double r2, double t_coh, double l_max_km,
                          double c0, double t_app) {
    const double t_her = l_max_km / c0;
    const double t_cutoff = t_coh - t_her - t_app;
    if (!(t_cutoff > 0.0))
        throw ConfigError("oracle: coherence time too short for heralding + delivery");
    const double e_t12 = 1.0 / r1 + 1.0 / r2 - 1.0 / (r1 + r2);
    TimeSlot out;
    out.t_gen = std::min(e_t12, t_cutoff);
    out.t_s = out.t_gen + t_her;
    return out;
}

int mc_capacity_rounding(double c_tilde, RngStream& rng) {
    if (c_tilde < 0.0) throw ConfigError("oracle: capacity must be non-negative");
    const double fl = std::floor(c_tilde);
    const double r = c_tilde - fl;
    return static_cast<int>(fl) + (rng.uniform() < r ? 1 : 0);
}

double predict_rate(const OracleInput& input, RngStream& rng) {
    input.validate();
    const double l_max = std::max(input.length_km[0], input.length_km[1]);
    const TimeSlot slot = select_time_slot(input.ent_rate[0], input.ent_rate[1],
                                           input.coherence_time, l_max,
                                           input.classical_speed, input.t_app);
    const double c1_tilde = input.attempt_rate[0] * slot.t_s;
    const double c2_tilde = input.attempt_rate[1] * slot.t_s;

    double acc = 0.0;
    for (int s = 0; s < input.sample_count; ++s) {
        const int c1 = mc_capacity_rounding(c1_tilde, rng);
        const int c2 = mc_capacity_rounding(c2_tilde, rng);
        const auto pmf = e2e_distribution(c1, c2, input.p_success[0],
                                          input.p_success[1], input.swap_success);
        acc += expected_throughput(pmf, slot.t_s);
    }
    return acc / input.sample_count;
}

double predict_rate(const OracleInput& input) {
    RngStream rng(0, "oracle");
    return predict_rate(input, rng);
}

}  // namespace qnetsim
