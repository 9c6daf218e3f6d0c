#include <cmath>

#include "doctest.h"
#include "stakelab/rng.hpp"
#include "stakelab/schedule.hpp"

using namespace stakelab;

TEST_SUITE_BEGIN("schedule");

TEST_CASE("reward_at per variant") {
    CHECK(reward_at(Constant{1.0}, 5, 104.0) == 1.0);
    CHECK(reward_at(FloorDecay{1.0, 1.0, 0.999}, 1, 100.0) == doctest::Approx(1.999).epsilon(1e-14));
    // high-precision direct evaluation of 0.001 * 1000^1.1
    CHECK(reward_at(Proportional{0.001, 1.1}, 7, 1000.0) ==
          doctest::Approx(1.9952623149688796).epsilon(1e-12));
    CHECK(reward_at(PowerDecay{2.0, 0.5}, 4, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(reward_at(Constant{1.0}, 0, 1.0), std::invalid_argument);
}

TEST_CASE("supply_after basics and cache") {
    CHECK(supply_after(Constant{1.0}, 100.0, 50) == 150.0);
    CHECK(supply_after(Constant{1.0}, 100.0, 0) == 100.0);
    CHECK(supply_after(FloorDecay{1.0, 0.5, 0.9}, 7.0, 0) == 7.0);
    // direct summation: 10 + 1 + 2^-0.6
    CHECK(supply_after(PowerDecay{1.0, 0.6}, 10.0, 2) ==
          doctest::Approx(11.659753955386447).epsilon(1e-12));
}

TEST_CASE("supply recurrence composes exactly") {
    std::vector<RewardSchedule> schedules = {Constant{0.7}, FloorDecay{1.0, 1.0, 0.999},
                                             PowerDecay{1.3, 0.6}, Proportional{0.01, 0.8}};
    Rng rng(99);
    for (const auto& s : schedules) {
        for (int i = 0; i < 25; ++i) {
            auto t = static_cast<std::int64_t>(rng.u01() * 3000);
            double n_t = supply_after(s, 37.0, t);
            double n_next = supply_after(s, 37.0, t + 1);
            CHECK(n_next == n_t + reward_at(s, t + 1, n_t));  // bitwise
        }
    }
}

TEST_CASE("monotonicity properties") {
    Rng rng(7);
    FloorDecay f{2.0, 3.0, 0.99};
    PowerDecay p{1.5, 0.3};
    for (int i = 0; i < 200; ++i) {
        auto t1 = static_cast<std::int64_t>(rng.u01() * 100000) + 1;
        auto t2 = t1 + 1 + static_cast<std::int64_t>(rng.u01() * 1000);
        CHECK(reward_at(f, t1, 1.0) >= reward_at(f, t2, 1.0));
        CHECK(reward_at(p, t1, 1.0) >= reward_at(p, t2, 1.0));
    }
    // proportional rewards are non-decreasing along the supply path
    Proportional g{0.01, 0.5};
    double prev_reward = 0.0;
    for (std::int64_t t = 1; t <= 500; ++t) {
        double r = reward_at(g, t, supply_after(g, 10.0, t - 1));
        CHECK(r >= prev_reward);
        prev_reward = r;
    }
}

TEST_CASE("super-linear supply growth for gamma > 1") {
    Proportional g{0.001, 1.1};
    double prev_ratio = 0.0;
    for (std::int64_t t : {250, 500, 1000, 2000}) {
        double ratio = supply_after(g, 1000.0, 2 * t) / supply_after(g, 1000.0, t);
        CHECK(ratio > prev_ratio);
        prev_ratio = ratio;
    }
    CHECK(prev_ratio > 2.5);  // far beyond the linear-growth ratio of ~2
}

TEST_CASE("overflow signals") {
    CHECK_THROWS_AS(reward_at(Proportional{1.0, 3.0}, 1, 1e200), SupplyOverflow);
    CHECK_THROWS_AS(supply_after(Proportional{1.0, 2.0}, 1e10, 100000), SupplyOverflow);
}

TEST_CASE("schedule table freeze in the geometric regime") {
    ScheduleTable tab = build_schedule_table(Proportional{0.001, 1.1}, 1000.0, 20000);
    REQUIRE(tab.freeze_step > 0);
    CHECK(tab.freeze_step > 5000);
    CHECK(tab.freeze_step < 5200);
    auto f = static_cast<std::size_t>(tab.freeze_step);
    CHECK(tab.supply[f] == tab.supply[f - 1]);
    CHECK(tab.supply.back() == tab.supply[f]);
    CHECK(tab.last_step(20000) == tab.freeze_step - 1);
    CHECK(tab.last_step(3000) == 3000);

    ScheduleTable small = build_schedule_table(Constant{1.0}, 10.0, 100);
    CHECK(small.freeze_step == 0);
    CHECK(small.supply[100] == 110.0);
}

TEST_CASE("json round trip and validation") {
    std::vector<RewardSchedule> schedules = {Constant{2.5}, FloorDecay{1.0, 1.0, 0.999},
                                             PowerDecay{1.0, 0.6}, Proportional{0.001, 1.1}};
    for (const auto& s : schedules) {
        RewardSchedule back = schedule_from_json(schedule_to_json(s));
        CHECK(schedule_to_json(back) == schedule_to_json(s));
    }
    CHECK(schedule_name(RewardSchedule{PowerDecay{1.0, 0.6}}) == "power_decay");
    CHECK_THROWS_AS(schedule_from_json({{"kind", "bogus"}}), std::invalid_argument);
    CHECK_THROWS_AS(schedule_from_json({{"kind", "constant"}, {"R", -1.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        schedule_from_json({{"kind", "floor_decay"}, {"floor", 1.0}, {"excess", 1.0}, {"q", 1.5}}),
        std::invalid_argument);
}

TEST_SUITE_END();
