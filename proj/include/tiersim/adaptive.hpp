#pragma once

#include <cstdint>
#include <deque>

namespace tiersim {

enum class SlopeState : uint8_t { Varying = 0, Stabilizing = 1, Stabilized = 2 };
enum class VariationState : uint8_t { Varying = 0, Stabilized = 1 };

enum class StopAction : uint8_t { None, DisableMigration };
enum class RestartAction : uint8_t { None, RestartMigration };

inline const char* to_string(SlopeState s) {
    switch (s) {
        case SlopeState::Varying: return "varying";
        case SlopeState::Stabilizing: return "stabilizing";
        case SlopeState::Stabilized: return "stabilized";
    }
    return "?";
}

struct AdaptiveParams {
    uint64_t eval_period_s = 2;     // delta interval p; kevaluated cadence
    uint64_t restart_period_s = 5;  // krestartd cadence
    uint32_t stop_streak = 3;       // K: stabilized intervals before stop
    uint32_t varying_min = 2;       // M: varying intervals before stabilization allowed
    uint32_t restart_threshold = 3;
    size_t window_capacity = 8;
};

/// Per-process earlystop state (kevaluated side).
struct ToggleState {
    bool migration_on = true;
    SlopeState slope_state = SlopeState::Varying;
    uint64_t max_slope = 0;
    uint64_t stop_threshold = 0;  // max_slope >> 2, maintained by evaluate_stop
    uint64_t prev_slope = 0;
    uint64_t curr_slope = 0;
    std::deque<uint64_t> demote_promoted_history;  // last counter samples (up to 4)
    std::deque<uint64_t> delta_history;            // last deltas (up to 3)
    uint32_t stabilized_streak = 0;
    uint32_t varying_streak = 0;
    bool varying_min_met = false;

    void reset_for_restart() {
        migration_on = true;
        slope_state = SlopeState::Varying;
        max_slope = 0;
        stop_threshold = 0;
        prev_slope = 0;
        curr_slope = 0;
        demote_promoted_history.clear();
        delta_history.clear();
        stabilized_streak = 0;
        varying_streak = 0;
        varying_min_met = false;
    }
};

/// Per-process restart-monitoring state (krestartd side).
struct RestartState {
    std::deque<uint64_t> window;  // past accessed-PTE counts
    VariationState variation_state = VariationState::Varying;
    uint32_t count_variation = 0;

    void reset() {
        window.clear();
        variation_state = VariationState::Varying;
        count_variation = 0;
    }
};

/// delta(t) = demote_promoted(t) - demote_promoted(t-p). The first sampled
/// interval yields 0 by convention. Appends the sample and the delta to the
/// state's histories.
inline uint64_t compute_delta(ToggleState& st, uint64_t counter_now) {
    uint64_t delta = 0;
    if (!st.demote_promoted_history.empty())
        delta = counter_now - st.demote_promoted_history.back();
    st.demote_promoted_history.push_back(counter_now);
    if (st.demote_promoted_history.size() > 4) st.demote_promoted_history.pop_front();
    st.delta_history.push_back(delta);
    if (st.delta_history.size() > 3) st.delta_history.pop_front();
    return delta;
}

/// Central difference |delta(t) - delta(t-2p)| / 2. The comparison in the
/// stop machine is against a positive threshold, so the absolute value is
/// used. Returns 0 with insufficient history.
inline uint64_t compute_slope(const ToggleState& st) {
    if (st.delta_history.size() < 3) return 0;
    const uint64_t now = st.delta_history.back();
    const uint64_t then = st.delta_history.front();
    return (now > then ? now - then : then - now) / 2;
}

/// One kevaluated iteration for a migration-on process.
///
/// Maintains max_slope and stop_threshold (= max_slope >> 2), runs the
/// Varying / Stabilizing / Stabilized transition table, and disables
/// migration once the Stabilized streak reaches K, provided the state
/// spent at least M intervals Varying beforehand (confirms enough page
/// movement happened to judge).
inline StopAction evaluate_stop(ToggleState& st, uint64_t slope_curr, const AdaptiveParams& p) {
    st.curr_slope = slope_curr;
    if (slope_curr > st.max_slope) {
        st.max_slope = slope_curr;
        st.stop_threshold = st.max_slope >> 2;
    }
    const uint64_t thr = st.stop_threshold;

    switch (st.slope_state) {
        case SlopeState::Varying:
            if (st.prev_slope < thr) {
                // below-below: allocation ongoing; below-above: movement started
            } else if (slope_curr > thr) {
                // movement ongoing
            } else if (st.varying_min_met || st.varying_streak >= p.varying_min) {
                st.slope_state = SlopeState::Stabilizing;
            }
            break;
        case SlopeState::Stabilizing:
            st.slope_state = (slope_curr > thr) ? SlopeState::Varying : SlopeState::Stabilized;
            break;
        case SlopeState::Stabilized:
            if (slope_curr > thr) {
                st.slope_state = SlopeState::Varying;
                st.stabilized_streak = 0;
            }
            break;
    }

    if (st.slope_state == SlopeState::Varying) {
        st.varying_streak += 1;
        st.stabilized_streak = 0;
        if (st.varying_streak >= p.varying_min) st.varying_min_met = true;
    } else if (st.slope_state == SlopeState::Stabilizing) {
        st.varying_streak = 0;
        st.stabilized_streak = 0;
    } else {
        st.varying_streak = 0;
        st.stabilized_streak += 1;
    }

    st.prev_slope = slope_curr;

    if (st.slope_state == SlopeState::Stabilized && st.stabilized_streak >= p.stop_streak &&
        st.varying_min_met) {
        st.migration_on = false;
        return StopAction::DisableMigration;
    }
    return StopAction::None;
}

/// One krestartd iteration for a migration-off process.
///
/// The mean is taken over the window excluding the new sample (integer
/// mean). In Varying the sample is always appended and the state settles
/// once the sample sits within mean>>4 of the mean. In Stabilized a
/// deviation beyond mean>>4 bumps count_variation and freezes the window;
/// otherwise count_variation decays and the window slides. Restart when
/// count_variation exceeds the threshold.
inline RestartAction evaluate_restart(RestartState& st, uint64_t count_accessed,
                                      const AdaptiveParams& p) {
    auto append = [&](uint64_t v) {
        st.window.push_back(v);
        if (st.window.size() > p.window_capacity) st.window.pop_front();
    };

    if (st.window.empty()) {
        append(count_accessed);
        return RestartAction::None;
    }
    uint64_t sum = 0;
    for (uint64_t v : st.window) sum += v;
    const uint64_t mean = sum / st.window.size();
    const uint64_t band = mean >> 4;
    const uint64_t dev = count_accessed > mean ? count_accessed - mean : mean - count_accessed;

    if (st.variation_state == VariationState::Varying) {
        if (dev < band) st.variation_state = VariationState::Stabilized;
        append(count_accessed);
    } else {
        if (dev > band) {
            st.count_variation += 1;  // window frozen: the mean is maintained
        } else {
            if (st.count_variation > 0) st.count_variation -= 1;
            append(count_accessed);
        }
    }

    if (st.count_variation > p.restart_threshold) return RestartAction::RestartMigration;
    return RestartAction::None;
}

}  // namespace tiersim
