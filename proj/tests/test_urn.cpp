#include <cmath>
#include <map>

#include "doctest.h"
#include "stakelab/rng.hpp"
#include "stakelab/urn.hpp"

using namespace stakelab;

namespace {

// Joint-moment enumeration over all K^T selection paths; exercises only the
// public step API plus exact probability bookkeeping.
void enumerate_joint(const ScheduleTable& tab, UrnState state, std::int64_t T, double prob,
                     std::map<std::vector<double>, double>& dist) {
    if (state.t == T) {
        std::vector<double> shares;
        for (double c : state.coins) shares.push_back(c / state.supply);
        dist[shares] += prob;
        return;
    }
    double reward = tab.reward[static_cast<std::size_t>(state.t + 1)];
    for (std::size_t k = 0; k < state.coins.size(); ++k) {
        UrnState next = state;
        double p = state.coins[k] / state.supply;
        next.coins[k] += reward;
        next.supply += reward;
        next.t += 1;
        enumerate_joint(tab, next, T, prob * p, dist);
    }
}

}  // namespace

TEST_SUITE_BEGIN("urn");

TEST_CASE("single investor keeps share exactly one") {
    Trajectory traj = simulate(Constant{1.0}, {3.0}, 100, SimulateOptions{}, 42);
    for (double s : traj.shares[0]) CHECK(s == 1.0);
}

TEST_CASE("inverse-cdf selection contract at K=2") {
    ScheduleTable tab = build_schedule_table(Constant{1.0}, 2.0, 4);
    UrnState st = make_urn({1.0, 1.0});
    int k = urn_step(st, tab, 0.3);  // 0.3 < 0.5 picks the first investor
    CHECK(k == 0);
    CHECK(st.coins[0] / st.supply == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(st.coins[1] / st.supply == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    UrnState st2 = make_urn({1.0, 1.0});
    CHECK(urn_step(st2, tab, 0.5) == 1);  // boundary goes right
    CHECK(st2.coins[1] == 2.0);

    UrnState st3 = make_urn({1.0, 1.0});
    CHECK(urn_step(st3, Constant{1.0}, 0.999999) == 1);
}

TEST_CASE("T=0 trajectory holds only the initial state") {
    Trajectory traj = simulate(Constant{1.0}, {1.0, 3.0}, 0, SimulateOptions{}, 1);
    CHECK(traj.times == std::vector<std::int64_t>{0});
    CHECK(traj.shares[0] == std::vector<double>{0.25});
}

TEST_CASE("two-step path enumeration: mean share is exactly 1/2") {
    ScheduleTable tab = build_schedule_table(Constant{1.0}, 2.0, 2);
    std::map<std::vector<double>, double> dist;
    enumerate_joint(tab, make_urn({1.0, 1.0}), 2, 1.0, dist);
    REQUIRE(dist.size() == 3);  // shares 1/4, 1/2, 3/4 for the tracked investor
    double mean = 0.0, total = 0.0;
    for (const auto& [shares, p] : dist) {
        mean += p * shares[0];
        total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mean == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(dist.at({0.75, 0.25}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(dist.at({0.25, 0.75}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("one-step conditional mean is the current share (martingale)") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        double coins = 0.1 + 10.0 * rng.u01();
        double supply = coins + 0.1 + 20.0 * rng.u01();
        double reward = 0.01 + 3.0 * rng.u01();
        double pi = coins / supply;
        double next_supply = supply + reward;
        double expected = pi * (coins + reward) / next_supply + (1.0 - pi) * coins / next_supply;
        CHECK(expected == doctest::Approx(pi).epsilon(1e-14));
    }
}

TEST_CASE("shares stay normalized over long runs") {
    Trajectory traj =
        simulate(FloorDecay{1.0, 1.0, 0.999}, {1.0, 2.0, 3.0, 4.0, 5.0}, 20000,
                 SimulateOptions{{0, 1, 2, 3, 4}, 500, false}, 77);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        double sum = 0.0;
        for (const auto& series : traj.shares) sum += series[i];
        CHECK(std::fabs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("deterministic in seed") {
    SimulateOptions opt;
    opt.record_selections = true;
    Trajectory a = simulate(Constant{1.0}, {1.0, 2.0}, 500, opt, 123);
    Trajectory b = simulate(Constant{1.0}, {1.0, 2.0}, 500, opt, 123);
    Trajectory c = simulate(Constant{1.0}, {1.0, 2.0}, 500, opt, 124);
    CHECK(a.selections == b.selections);
    CHECK(a.shares[0].back() == b.shares[0].back());
    CHECK(a.selections != c.selections);
    CHECK(a.selections.size() == 500);
}

TEST_CASE("joint terminal distribution is exchangeable for equal stakes") {
    ScheduleTable tab = build_schedule_table(Constant{2.0}, 3.0, 4);
    std::map<std::vector<double>, double> dist;
    enumerate_joint(tab, make_urn({1.0, 1.0, 1.0}), 4, 1.0, dist);
    for (const auto& [shares, p] : dist) {
        std::vector<double> swapped = {shares[1], shares[0], shares[2]};
        std::vector<double> rotated = {shares[2], shares[0], shares[1]};
        CHECK(dist.at(swapped) == doctest::Approx(p).epsilon(1e-13));
        CHECK(dist.at(rotated) == doctest::Approx(p).epsilon(1e-13));
    }
}

TEST_CASE("geometric regime freezes and absorbs") {
    Trajectory traj = simulate(Proportional{0.001, 1.1}, {500.0, 500.0}, 20000,
                               SimulateOptions{{0, 1}, 0, false}, 9);
    CHECK(traj.truncated);
    CHECK(traj.absorbed);
    CHECK(traj.times.back() < 20000);
    double winner = std::max(traj.shares[0].back(), traj.shares[1].back());
    CHECK(winner > 0.999);
}

TEST_SUITE_END();
