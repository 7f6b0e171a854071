#pragma once

#include "qnetsim/topology.hpp"

namespace qnetsim {

class RngStream;

// Werner-state pair: a Bell state mixed with white noise. Fidelity to the
// target Bell state is F = (3W + 1) / 4, so W in [0,1] maps to F in [0.25,1].
struct WernerState {
    double w = 1.0;
    double fidelity() const { return (3.0 * w + 1.0) / 4.0; }
    static WernerState from_fidelity(double f) { return {(4.0 * f - 1.0) / 3.0}; }
};

// Closed-form per-round heralding characteristics for one channel.
struct LinkPhysics {
    double p_success = 0.0;
    double tau_round = 0.0;
    Architecture architecture = Architecture::DimBk;
    double eta_ab = 0.0;  // endpoint -> midpoint BSM transmissivity (DiM)
    double eta_as = 0.0;  // midpoint source -> endpoint transmissivity (SiM)

    static LinkPhysics of(const ChannelSpec& channel, double tau0);
};

// Per-round heralding success probability for the channel's architecture.
// Transduction efficiencies eta_s/eta_r multiply the base formula.
double success_probability(const ChannelSpec& channel);

// Time from the start of one generation attempt until the next can begin,
// with tau_l = L/c0 and tau0 the local operation latency of the endpoints.
double round_duration(const ChannelSpec& channel, double tau0);

// Number of the round on which the first success occurs, k >= 1.
int sample_rounds_to_success(double p, RngStream& rng);

// Fresh pair at the channel's configured base fidelity.
WernerState initial_werner(const ChannelSpec& channel);

// Exponential memory decay of the Werner parameter.
double decayed_werner(double w0, double dt, double t_coh);

}  // namespace qnetsim
