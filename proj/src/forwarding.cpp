#include "qnetsim/forwarding.hpp"

namespace qnetsim {

PurifyOutcome purify_step(double f1, double f2, PurifyRule rule) {
    switch (rule) {
        case PurifyRule::Bbpssw: {
            const double p = f1 * f2 + f1 * (1.0 - f2) / 3.0 + f2 * (1.0 - f1) / 3.0 +
                             5.0 * (1.0 - f1) * (1.0 - f2) / 9.0;
            const double f_out = (f1 * f2 + (1.0 - f1) * (1.0 - f2) / 9.0) / p;
            return {p, f_out};
        }
    }
    throw SimLogicError("unknown purification rule");
}

bool static_order_permits(const std::vector<std::optional<int>>& ranks, int node_pos,
                          int span_lo, int span_hi) {
    if (node_pos != span_lo && node_pos != span_hi)
        throw SimLogicError("node is not an endpoint of the span");
    if (!ranks[node_pos].has_value()) return true;  // end nodes never swap anyway
    const int my_rank = *ranks[node_pos];
    // Walk from the node outward in the pair's direction up to the path end;
    // every lower-ranked node there must already be interior to the span.
    const int dir = (span_lo == node_pos) ? +1 : -1;
    const int far = (dir == +1) ? span_hi : span_lo;
    const int path_end = (dir == +1) ? static_cast<int>(ranks.size()) - 1 : 0;
    for (int pos = node_pos + dir; pos != path_end; pos += dir) {
        if (!ranks[pos].has_value()) continue;
        if (*ranks[pos] < my_rank) {
            const bool interior = (dir == +1) ? (pos < far) : (pos > far);
            if (!interior) return false;
        }
    }
    return true;
}

}  // namespace qnetsim
