#include "qnetsim/link_models.hpp"

#include <cmath>

#include "qnetsim/event_engine.hpp"

namespace qnetsim {

double success_probability(const ChannelSpec& c) {
    const double L = c.length_km;
    const double L0 = c.attenuation_length_km;
    double p = 0.0;
    switch (c.architecture) {
        case Architecture::DimBk: {
            const double eta_ab = c.eta_b * std::exp(-L / (2.0 * L0));
            p = 2.0 * c.alpha * c.alpha * eta_ab * eta_ab;
            break;
        }
        case Architecture::DimDualRail: {
            const double eta_ab = c.eta_b * std::exp(-L / (2.0 * L0));
            p = 2.0 * c.alpha * (1.0 - c.alpha) * eta_ab * eta_ab;
            break;
        }
        case Architecture::SrDualRail:
            p = c.eta_d * std::exp(-L / L0);
            break;
        case Architecture::SimDualRail: {
            const double eta_as = c.eta_d * std::exp(-L / (2.0 * L0));
            p = eta_as * eta_as;
            break;
        }
    }
    return p * c.eta_s * c.eta_r;
}

double round_duration(const ChannelSpec& c, double tau0) {
    const double tau_l = c.length_km / c.classical_speed;
    switch (c.architecture) {
        case Architecture::DimBk: return 2.0 * (tau_l + tau0);
        case Architecture::DimDualRail: return tau_l + tau0;
        case Architecture::SrDualRail: return 2.0 * tau_l + tau0;
        case Architecture::SimDualRail: return tau_l + tau0;
    }
    return 0.0;
}

LinkPhysics LinkPhysics::of(const ChannelSpec& c, double tau0) {
    LinkPhysics lp;
    lp.architecture = c.architecture;
    lp.p_success = success_probability(c);
    lp.tau_round = round_duration(c, tau0);
    lp.eta_ab = c.eta_b * std::exp(-c.length_km / (2.0 * c.attenuation_length_km));
    lp.eta_as = c.eta_d * std::exp(-c.length_km / (2.0 * c.attenuation_length_km));
    if (lp.tau_round <= 0.0)
        throw ConfigError("channel " + c.id +
                          ": degenerate round duration (L and tau_0 both zero)");
    return lp;
}

int sample_rounds_to_success(double p, RngStream& rng) {
    if (p <= 0.0) throw ConfigError("success probability must be > 0");
    if (p >= 1.0) return 1;
    // Inverse-CDF geometric on {1, 2, ...}.
    const double u = rng.uniform();
    const double k = std::ceil(std::log1p(-u) / std::log1p(-p));
    return k < 1.0 ? 1 : static_cast<int>(k);
}

WernerState initial_werner(const ChannelSpec& c) {
    if (c.base_fidelity <= 0.25 || c.base_fidelity > 1.0)
        throw ConfigError("channel " + c.id + ": base fidelity outside (0.25,1]");
    return WernerState::from_fidelity(c.base_fidelity);
}

double decayed_werner(double w0, double dt, double t_coh) {
    if (dt <= 0.0 || !std::isfinite(t_coh)) return w0;
    return w0 * std::exp(-dt / t_coh);
}

}  // namespace qnetsim
