#pragma once

#include <vector>

#include "qnetsim/event_engine.hpp"

namespace qnetsim {

// Inputs for the closed-form three-node swap-throughput predictor. The link
// characteristics can be supplied directly or measured from isolated-link
// simulation runs.
struct OracleInput {
    double attempt_rate[2] = {0.0, 0.0};   // A_i, attempts/s
    double p_success[2] = {0.0, 0.0};      // per-attempt success p_i
    double ent_rate[2] = {0.0, 0.0};       // R_i, pairs/s
    double swap_success = 1.0;             // q
    double coherence_time = 0.0;           // T_coh, seconds
    double length_km[2] = {0.0, 0.0};      // L_i
    double classical_speed = 2.0e5;        // c0, km/s
    double t_app = 0.0;
    int sample_count = 5000;

    void validate() const;  // throws ConfigError on violated invariants
};

// pmf over k = 0..min(c1,c2) of the number of end-to-end pairs produced when
// E_i ~ Binomial(c_i, p_i) elementary pairs meet a swap succeeding w.p. q.
std::vector<double> e2e_distribution(int c1, int c2, double p1, double p2, double q);

// E[k]/T_s. Throws ConfigError if the pmf is not normalized within 1e-12.
double expected_throughput(const std::vector<double>& pmf, double t_s);

struct TimeSlot {
    double t_gen = 0.0;
    double t_s = 0.0;
};

// T_her = max{L_i}/c0; T_cutoff = T_coh - T_her - T_app (must be positive);
// E[T12] ~ 1/R1 + 1/R2 - 1/(R1+R2); T_gen = min{E[T12], T_cutoff}; T_s = T_gen + T_her.
TimeSlot select_time_slot(double r1, double r2, double t_coh, double l_max_km,
                          double c0, double t_app);

// Round a fractional capacity to an integer preserving the mean:
// floor(c) w.p. 1-r, floor(c)+1 w.p. r, where r is the fractional part.
int mc_capacity_rounding(double c_tilde, RngStream& rng);

// Average predicted end-to-end rate over sample_count capacity draws.
double predict_rate(const OracleInput& input);
double predict_rate(const OracleInput& input, RngStream& rng);

}  // namespace qnetsim
