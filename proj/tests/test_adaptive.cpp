#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "tiersim/adaptive.hpp"
#include "tiersim/rng.hpp"

using namespace tiersim;

TEST_CASE("delta is the counter difference over one interval") {
    ToggleState st;
    CHECK(compute_delta(st, 100) == 0);  // first sample
    CHECK(compute_delta(st, 150) == 50);
    CHECK(compute_delta(st, 150) == 0);
    CHECK(compute_delta(st, 400) == 250);
}

TEST_CASE("slope is the absolute central difference over two intervals") {
    ToggleState st;
    compute_delta(st, 0);
    CHECK(compute_slope(st) == 0);  // insufficient history
    compute_delta(st, 50);  // delta 50
    CHECK(compute_slope(st) == 0);
    compute_delta(st, 60);  // delta 10
    // |10 - 0| / 2 = 5 over the window {0, 50, 10}
    CHECK(compute_slope(st) == 5);
    compute_delta(st, 110);  // delta 50; window {50, 10, 50}
    CHECK(compute_slope(st) == 0);
    compute_delta(st, 120);  // delta 10; window {10, 50, 10}
    CHECK(compute_slope(st) == 0);
    compute_delta(st, 170);  // delta 50; window {50, 10, 50}
    CHECK(compute_slope(st) == 0);
    // decreasing direction: |10 - 50| / 2 = 20
    ToggleState st2;
    compute_delta(st2, 0);
    compute_delta(st2, 50);   // delta 50
    compute_delta(st2, 100);  // delta 50
    compute_delta(st2, 110);  // delta 10; window {50, 50, 10}
    CHECK(compute_slope(st2) == 20);
}

TEST_CASE("stop threshold follows the running slope maximum") {
    ToggleState st;
    AdaptiveParams p;
    evaluate_stop(st, 100, p);
    CHECK(st.max_slope == 100);
    CHECK(st.stop_threshold == 25);
    evaluate_stop(st, 60, p);  // below max: unchanged
    CHECK(st.max_slope == 100);
    CHECK(st.stop_threshold == 25);
    evaluate_stop(st, 400, p);
    CHECK(st.max_slope == 400);
    CHECK(st.stop_threshold == 100);
}

TEST_CASE("threshold equals max_slope>>2 under any slope sequence") {
    RngStream rng(7, 0);
    for (int trial = 0; trial < 200; ++trial) {
        ToggleState st;
        AdaptiveParams p;
        uint64_t max_seen = 0;
        for (int i = 0; i < 50; ++i) {
            const uint64_t s = rng.next_below(10000);
            max_seen = std::max(max_seen, s);
            evaluate_stop(st, s, p);
            REQUIRE(st.max_slope == max_seen);
            REQUIRE(st.stop_threshold == (max_seen >> 2));
        }
    }
}

TEST_CASE("canonical stop trajectory: surge, then sustained quiet") {
    ToggleState st;
    AdaptiveParams p;  // K=3, M=2
    // movement phase: large slopes keep the state varying
    CHECK(evaluate_stop(st, 400, p) == StopAction::None);
    CHECK(st.slope_state == SlopeState::Varying);
    CHECK(evaluate_stop(st, 380, p) == StopAction::None);
    CHECK(st.varying_min_met);
    // quiet: slope falls under threshold (100) with prev above it ->
    // stabilizing; a second quiet sample confirms stabilized
    CHECK(evaluate_stop(st, 10, p) == StopAction::None);
    CHECK(st.slope_state == SlopeState::Stabilizing);
    CHECK(evaluate_stop(st, 8, p) == StopAction::None);
    CHECK(st.slope_state == SlopeState::Stabilized);
    CHECK(st.stabilized_streak == 1);
    CHECK(evaluate_stop(st, 6, p) == StopAction::None);
    CHECK(st.stabilized_streak == 2);
    CHECK(evaluate_stop(st, 5, p) == StopAction::DisableMigration);
    CHECK_FALSE(st.migration_on);
}

TEST_CASE("a slope spike re-arms the stabilized streak") {
    ToggleState st;
    AdaptiveParams p;
    evaluate_stop(st, 400, p);
    evaluate_stop(st, 380, p);
    evaluate_stop(st, 10, p);
    evaluate_stop(st, 8, p);
    evaluate_stop(st, 6, p);
    REQUIRE(st.slope_state == SlopeState::Stabilized);
    evaluate_stop(st, 300, p);  // spike above threshold 100
    CHECK(st.slope_state == SlopeState::Varying);
    CHECK(st.stabilized_streak == 0);
    // settling again requires the full stabilizing pass and streak
    evaluate_stop(st, 10, p);
    CHECK(st.slope_state == SlopeState::Stabilizing);
    evaluate_stop(st, 9, p);
    CHECK(st.slope_state == SlopeState::Stabilized);
    CHECK(evaluate_stop(st, 9, p) == StopAction::None);
    CHECK(evaluate_stop(st, 9, p) == StopAction::DisableMigration);
}

TEST_CASE("quiet from the very start stops after the minimum trajectory") {
    // zero ping-pong means migration is already stable: the machine walks
    // M varying + 1 stabilizing + K stabilized intervals and disables
    ToggleState st;
    AdaptiveParams p;  // varying_min = 2, stop_streak = 3
    for (int i = 0; i < 5; ++i)
        CHECK(evaluate_stop(st, 0, p) == StopAction::None);
    CHECK(evaluate_stop(st, 0, p) == StopAction::DisableMigration);
    CHECK_FALSE(st.migration_on);
}

TEST_CASE("low-slope start still varies until the movement minimum is met") {
    ToggleState st;
    AdaptiveParams p;
    p.varying_min = 4;
    // threshold ratchets up with the first sample; prev_slope below the
    // threshold reads as allocation-in-progress and stays varying
    evaluate_stop(st, 100, p);
    CHECK(st.slope_state == SlopeState::Varying);
    evaluate_stop(st, 120, p);
    evaluate_stop(st, 110, p);
    CHECK(st.slope_state == SlopeState::Varying);
    CHECK(st.varying_streak == 3);
    CHECK_FALSE(st.varying_min_met);
    evaluate_stop(st, 105, p);
    CHECK(st.varying_min_met);
}

TEST_CASE("restart state reset restores a clean slate") {
    ToggleState st;
    AdaptiveParams p;
    evaluate_stop(st, 400, p);
    evaluate_stop(st, 10, p);
    st.migration_on = false;
    st.reset_for_restart();
    CHECK(st.migration_on);
    CHECK(st.slope_state == SlopeState::Varying);
    CHECK(st.max_slope == 0);
    CHECK(st.demote_promoted_history.empty());
    CHECK(st.delta_history.empty());
    CHECK_FALSE(st.varying_min_met);
}

TEST_CASE("restart monitor settles, then counts sustained deviation") {
    RestartState st;
    AdaptiveParams p;  // restart_threshold = 3, window 8
    // stable plateau around 100: mean band is 100>>4 = 6
    CHECK(evaluate_restart(st, 100, p) == RestartAction::None);  // seeds the window
    CHECK(st.variation_state == VariationState::Varying);
    CHECK(evaluate_restart(st, 103, p) == RestartAction::None);  // |103-100| = 3 < 6
    CHECK(st.variation_state == VariationState::Stabilized);
    CHECK(evaluate_restart(st, 101, p) == RestartAction::None);
    CHECK(st.count_variation == 0);
    // phase change: counts jump beyond the band
    CHECK(evaluate_restart(st, 200, p) == RestartAction::None);
    CHECK(st.count_variation == 1);
    CHECK(evaluate_restart(st, 210, p) == RestartAction::None);
    CHECK(evaluate_restart(st, 205, p) == RestartAction::None);
    CHECK(st.count_variation == 3);
    CHECK(evaluate_restart(st, 207, p) == RestartAction::RestartMigration);
    CHECK(st.count_variation == 4);
}

TEST_CASE("deviating samples freeze the window so the mean holds") {
    RestartState st;
    AdaptiveParams p;
    evaluate_restart(st, 100, p);
    evaluate_restart(st, 100, p);
    REQUIRE(st.variation_state == VariationState::Stabilized);
    const size_t before = st.window.size();
    evaluate_restart(st, 500, p);  // deviates: not appended
    CHECK(st.window.size() == before);
    evaluate_restart(st, 100, p);  // conforms: appended, decays the counter
    CHECK(st.window.size() == before + 1);
    CHECK(st.count_variation == 0);
}

TEST_CASE("count_variation decays instead of resetting") {
    RestartState st;
    AdaptiveParams p;
    evaluate_restart(st, 100, p);
    evaluate_restart(st, 100, p);
    evaluate_restart(st, 200, p);
    evaluate_restart(st, 200, p);
    CHECK(st.count_variation == 2);
    evaluate_restart(st, 100, p);  // back in band: decay by one
    CHECK(st.count_variation == 1);
    evaluate_restart(st, 200, p);
    evaluate_restart(st, 200, p);
    CHECK(st.count_variation == 3);
    CHECK(evaluate_restart(st, 200, p) == RestartAction::RestartMigration);
}

TEST_CASE("window is bounded by its capacity") {
    RestartState st;
    AdaptiveParams p;
    p.window_capacity = 4;
    for (int i = 0; i < 10; ++i) evaluate_restart(st, 100, p);
    CHECK(st.window.size() == 4);
}

TEST_CASE("in the varying phase every sample is appended") {
    RestartState st;
    AdaptiveParams p;
    // wildly different counts keep the monitor varying but still append
    evaluate_restart(st, 10, p);
    evaluate_restart(st, 1000, p);
    CHECK(st.variation_state == VariationState::Varying);
    CHECK(st.window.size() == 2);
    evaluate_restart(st, 5, p);
    CHECK(st.window.size() == 3);
    CHECK(st.count_variation == 0);  // counting only starts once settled
}
