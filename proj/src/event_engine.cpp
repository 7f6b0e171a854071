#include "qnetsim/event_engine.hpp"

#include <algorithm>
#include <cmath>

namespace qnetsim {

std::string to_string(EventKind k) {
    switch (k) {
        case EventKind::AttemptComplete: return "attempt_complete";
        case EventKind::ClassicalMessage: return "classical_message";
        case EventKind::CutoffExpiry: return "cutoff_expiry";
        case EventKind::SlotBoundary: return "slot_boundary";
        case EventKind::DeliverToApp: return "deliver_to_app";
    }
    return "?";
}

std::uint64_t EventEngine::schedule(double time, std::string target, EventKind kind,
                                    Action action) {
    if (time < clock_)
        throw SimLogicError("event scheduled into the past: t=" + std::to_string(time) +
                            " clock=" + std::to_string(clock_) + " target=" + target);
    std::uint64_t seq = next_seq_++;
    queue_.push(Entry{time, seq, std::move(target), kind, std::move(action)});
    return seq;
}

void EventEngine::cancel(std::uint64_t seq) {
    cancelled_.push_back(seq);
}

std::uint64_t EventEngine::run_until(double t_end) {
    if (t_end < clock_)
        throw SimLogicError("run_until into the past");
    std::uint64_t count = 0;
    while (!queue_.empty() && queue_.top().time <= t_end) {
        Entry e = queue_.top();
        queue_.pop();
        if (std::find(cancelled_.begin(), cancelled_.end(), e.seq) != cancelled_.end()) {
            cancelled_.erase(std::remove(cancelled_.begin(), cancelled_.end(), e.seq),
                             cancelled_.end());
            continue;
        }
        if (e.time < clock_)
            throw SimLogicError("dispatch time went backwards");
        clock_ = e.time;
        if (trace_) trace_(EventRecord{e.time, e.seq, e.target, e.kind});
        ++dispatched_;
        ++count;
        e.action();
    }
    clock_ = t_end;
    return count;
}

// splitmix64, used to whiten (master seed, stream label) into generator state.
static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

RngStream::RngStream(std::uint64_t master_seed, std::string_view stream_id) {
    std::uint64_t state = master_seed ^ fnv1a(stream_id);
    std::uint64_t s0 = splitmix64(state);
    std::uint64_t s1 = splitmix64(state);
    gen_.seed(s0 ^ (s1 << 1));
}

double RngStream::uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(gen_);
}

int RngStream::uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(gen_);
}

}  // namespace qnetsim
