#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tiersim {

using VirtualNs = uint64_t;

/// Error in the scenario itself (bad config, OOM, malformed trace), as
/// opposed to a bug in the simulator.
class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

/// Virtual clock. Advances only through event dispatch, never decreases.
class SimClock {
public:
    VirtualNs now() const { return now_; }

    void advance_to(VirtualNs t) {
        if (t < now_) throw std::logic_error("SimClock moved backwards");
        now_ = t;
    }

private:
    VirtualNs now_ = 0;
};

/// Time-ordered event queue with FIFO tie-break on equal timestamps.
/// Low traffic by design: periodic daemons and tenant lifecycle only,
/// the access fast path never goes through here.
class EventQueue {
public:
    explicit EventQueue(SimClock& clock) : clock_(clock) {}

    void schedule(VirtualNs at, std::function<void()> fn) {
        if (at < clock_.now())
            throw ScenarioError("event scheduled in the past: t=" + std::to_string(at) +
                                " now=" + std::to_string(clock_.now()));
        heap_.push(Entry{at, next_seq_++, std::move(fn)});
    }

    bool empty() const { return heap_.empty(); }

    VirtualNs next_time() const { return heap_.empty() ? UINT64_MAX : heap_.top().at; }

    /// Dispatches the earliest event, advancing the clock to its timestamp.
    void dispatch_next() {
        Entry e = std::move(const_cast<Entry&>(heap_.top()));
        heap_.pop();
        clock_.advance_to(e.at);
        e.fn();
    }

private:
    struct Entry {
        VirtualNs at;
        uint64_t seq;
        std::function<void()> fn;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.at != b.at) return a.at > b.at;
            return a.seq > b.seq;  // FIFO among ties
        }
    };

    SimClock& clock_;
    std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
    uint64_t next_seq_ = 0;
};

}  // namespace tiersim
