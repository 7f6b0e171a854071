#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "qnetsim/errors.hpp"

namespace qnetsim {

enum class EventKind {
    AttemptComplete,
    ClassicalMessage,
    CutoffExpiry,
    SlotBoundary,
    DeliverToApp,
};

std::string to_string(EventKind k);

struct EventRecord {
    double time = 0.0;
    std::uint64_t seq = 0;
    std::string target;
    EventKind kind = EventKind::ClassicalMessage;
};

// Deterministic discrete-event loop. Events dispatch in strict (time, seq)
// order; seq is assigned at schedule time, so equal-time events dispatch in
// schedule order.
class EventEngine {
  public:
    using Action = std::function<void()>;
    using TraceSink = std::function<void(const EventRecord&)>;

    double clock() const { return clock_; }
    std::uint64_t dispatch_count() const { return dispatched_; }

    std::uint64_t schedule(double time, std::string target, EventKind kind, Action action);
    void cancel(std::uint64_t seq);

    // Dispatches every event with time <= t_end and leaves clock = t_end.
    std::uint64_t run_until(double t_end);

    void set_trace(TraceSink sink) { trace_ = std::move(sink); }

  private:
    struct Entry {
        double time;
        std::uint64_t seq;
        std::string target;
        EventKind kind;
        Action action;
        bool operator>(const Entry& o) const {
            if (time != o.time) return time > o.time;
            return seq > o.seq;
        }
    };

    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue_;
    std::vector<std::uint64_t> cancelled_;
    double clock_ = 0.0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t dispatched_ = 0;
    TraceSink trace_;
};

// Per-entity random stream derived from the master seed and a stream label,
// so adding one entity never perturbs another entity's draws.
class RngStream {
  public:
    RngStream(std::uint64_t master_seed, std::string_view stream_id);

    double uniform();                  // [0, 1)
    bool bernoulli(double p) { return uniform() < p; }
    int uniform_int(int lo, int hi);   // inclusive
    std::mt19937_64& generator() { return gen_; }

  private:
    std::mt19937_64 gen_;
};

}  // namespace qnetsim
