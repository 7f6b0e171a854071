#include "qnetsim/metrics.hpp"

#include <charconv>

namespace qnetsim {

std::string format_double(double v) {
    // Shortest representation that round-trips.
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void emit_csv(const RunMetrics& m, std::ostream& out) {
    out << "record,id,delivered,rate,mean_fidelity,swap_attempts,swap_successes,"
           "purif_attempts,purif_successes,decohered,attempts,successes,measured_p,"
           "attempt_rate,entanglement_rate,created,swap_consumed,purif_consumed,live,"
           "orphan_merges,stale_messages,event_count\n";
    for (const auto& f : m.flows) {
        out << "flow," << f.id << ',' << f.delivered << ','
            << format_double(f.rate(m.duration)) << ','
            << format_double(f.mean_fidelity()) << ',' << f.swap_attempts << ','
            << f.swap_successes << ',' << f.purif_attempts << ',' << f.purif_successes
            << ',' << f.decohered << ",,,,,,,,,,,,\n";
    }
    for (const auto& c : m.channels) {
        out << "channel," << c.id << ",,,,,,,,," << c.attempts << ',' << c.successes
            << ',' << format_double(c.measured_p()) << ','
            << format_double(c.attempt_rate(m.duration)) << ','
            << format_double(c.entanglement_rate(m.duration)) << ",,,,,,,\n";
    }
    out << "global,,";
    out << m.ledger.delivered << ",,,,,,,";
    out << m.ledger.decohered << ",,,,,,";
    out << m.ledger.created << ',' << m.ledger.swap_consumed << ','
        << m.ledger.purif_consumed << ',' << m.ledger.live << ',' << m.orphan_merges
        << ',' << m.stale_messages << ',' << m.event_count << "\n";
}

void emit_csv(const std::vector<SweepCell>& table, std::ostream& out) {
    out << "axis_value,metric,mean,stddev\n";
    for (const auto& cell : table) {
        out << cell.axis_value << ',' << cell.metric << ',' << format_double(cell.mean)
            << ',' << format_double(cell.stddev) << '\n';
    }
}

}  // namespace qnetsim
