#include <cmath>

#include "doctest.h"
#include "stakelab/dynamical_pop.hpp"
#include "stakelab/ensemble.hpp"
#include "stakelab/rng.hpp"
#include "stakelab/stats.hpp"
#include "stakelab/urn.hpp"

using namespace stakelab;

TEST_SUITE_BEGIN("dynamical_pop");

TEST_CASE("theta = 0 degenerates to the finite urn step by step") {
    const RewardSchedule s = FloorDecay{1.0, 1.0, 0.999};
    DynState dyn = make_dyn_state({5.0, 5.0}, 0.0);
    UrnState urn = make_urn({5.0, 5.0});
    Rng rng(314);
    for (int t = 0; t < 200; ++t) {
        double u = rng.u01();
        DynSelection sel = dyn_step(dyn, s, DiffuseBase{}, u, 0.42);
        int k = urn_step(urn, s, u);
        REQUIRE(sel.kind == DynSelection::Kind::Incumbent);
        CHECK(static_cast<int>(sel.incumbent) == k);
        CHECK(dyn.incumbents[0] == urn.coins[0]);
        CHECK(dyn.incumbents[1] == urn.coins[1]);
        CHECK(dyn.supply == urn.supply);
    }
}

TEST_CASE("fresh entry probability at the first step is theta/(N+theta)") {
    // K=2, coins (5,5), theta=1: fresh iff u_select >= 10/11
    const RewardSchedule s = Constant{1.0};
    {
        DynState st = make_dyn_state({5.0, 5.0}, 1.0);
        DynSelection sel = dyn_step(st, s, DiffuseBase{}, 10.0 / 11.0 - 1e-12, 0.5);
        CHECK(sel.kind == DynSelection::Kind::Incumbent);
        CHECK(sel.incumbent == 1);
    }
    {
        DynState st = make_dyn_state({5.0, 5.0}, 1.0);
        DynSelection sel = dyn_step(st, s, DiffuseBase{}, 10.0 / 11.0 + 1e-12, 0.5);
        CHECK(sel.kind == DynSelection::Kind::Fresh);
        CHECK(sel.feature == 0.5);
        CHECK(st.entrants.K() == 1);
        CHECK(st.supply == 11.0);  // theta never joins the supply
    }
}

TEST_CASE("one-step expected share matches the supermartingale factor") {
    // state (5,5), theta=1, R=1: E[pi_1] = pi0 * N(N1+theta)/(N1(N+theta)) = 60/121
    const double expected = 60.0 / 121.0;
    // three-way enumeration: selected, other incumbent, fresh entrant
    double enumerated =
        (5.0 / 11.0) * (6.0 / 11.0) + (5.0 / 11.0) * (5.0 / 11.0) + (1.0 / 11.0) * (5.0 / 11.0);
    CHECK(enumerated == doctest::Approx(expected).epsilon(1e-15));
    std::vector<double> path = expected_ratio_path(Constant{1.0}, 10.0, 1.0, 1);
    CHECK(0.5 * path[1] == doctest::Approx(expected).epsilon(1e-14));
    // the factor is strictly below one whenever theta > 0
    CHECK(path[1] < 1.0);
}

TEST_CASE("expected limit ratio telescopes for constant rewards") {
    ExpectedLimit lim = expected_limit_ratio(Constant{1.0}, 10.0, 1.0, 1000000);
    double n_T = 10.0 + 1000000.0;
    double telescoped = (10.0 / 11.0) * ((n_T + 1.0) / n_T);
    CHECK(lim.value == doctest::Approx(telescoped).epsilon(1e-12));
    CHECK(lim.classification == DilutionClass::Positive);
    // limit value approaches N/(N+theta)
    CHECK(lim.value == doctest::Approx(10.0 / 11.0).epsilon(1e-5));

    // theta -> 0: every factor is one
    ExpectedLimit flat = expected_limit_ratio(Constant{1.0}, 10.0, 0.0, 1000);
    CHECK(flat.value == 1.0);

    // larger N dilutes less (monotone grid check toward 1)
    double r100 = expected_limit_ratio(Constant{1.0}, 100.0, 1.0, 100000).value;
    double r1000 = expected_limit_ratio(Constant{1.0}, 1000.0, 1.0, 100000).value;
    CHECK(r1000 > r100);
    CHECK(r1000 > 1.0 - 2.0 * (1.0 / 1000.0));
}

TEST_CASE("fast-decay rewards classify as Zero, slow ones as Positive") {
    ExpectedLimit fast = expected_limit_ratio(PowerDecay{1.0, 2.0}, 10.0, 1.0, 10000);
    CHECK(fast.classification == DilutionClass::Zero);
    ExpectedLimit faster = expected_limit_ratio(PowerDecay{1.0, 2.0}, 10.0, 1.0, 1000);
    CHECK(fast.value < faster.value);  // strictly decreasing in the horizon
    CHECK(fast.value < 1.0);

    CHECK(expected_limit_ratio(PowerDecay{1.0, 0.5}, 10.0, 1.0, 100).classification ==
          DilutionClass::Positive);
    CHECK(expected_limit_ratio(PowerDecay{1.0, 1.0}, 10.0, 1.0, 100).classification ==
          DilutionClass::Undetermined);
    CHECK(expected_limit_ratio(Proportional{0.01, 0.5}, 10.0, 1.0, 100).classification ==
          DilutionClass::Positive);
}

TEST_CASE("tail bound brackets the infinite product") {
    ExpectedLimit trunc = expected_limit_ratio(Constant{1.0}, 10.0, 1.0, 100);
    double limit = 10.0 / 11.0;
    CHECK(trunc.value * std::exp(-2.0 * trunc.tail_bound) <= limit + 1e-12);
    CHECK(limit <= trunc.value);
}

TEST_CASE("dyn ensemble with theta = 0 matches the urn kernel bitwise") {
    DynEnsembleConfig dc;
    dc.schedule = Constant{1.0};
    dc.incumbent_coins = {1.0, 9.0};
    dc.theta = 0.0;
    dc.T = 500;
    dc.replicates = 50;
    DynEnsembleSummary ds = run_dyn_ensemble(dc, 606);

    TrackedEnsembleConfig tc;
    tc.schedule = Constant{1.0};
    tc.N = 10.0;
    tc.n0 = 1.0;
    tc.T = 500;
    tc.replicates = 50;
    EnsembleSummary ts = run_tracked_ensemble(tc, 606);

    CHECK(ds.terminal_shares == ts.terminal_shares);
    CHECK(ds.terminal_new_share_mean == 0.0);
}

TEST_CASE("dilution ensemble: supermartingale path and aggregate entrant share") {
    DynEnsembleConfig dc;
    dc.schedule = Constant{1.0};
    dc.incumbent_coins = {1.0, 9.0};
    dc.theta = 1.0;
    dc.T = 5000;
    dc.replicates = 2000;
    dc.snapshot_stride = 1000;
    DynEnsembleSummary ds = run_dyn_ensemble(dc, 909);

    // empirical mean tracks the exact product path at every snapshot
    for (std::size_t i = 0; i < ds.snap_times.size(); ++i)
        CHECK(std::fabs(ds.mean_share[i] - ds.predicted_share[i]) <= 4.0 * ds.se_share[i]);

    // monotone (within noise) decay of the mean share
    for (std::size_t i = 0; i + 1 < ds.snap_times.size(); ++i)
        CHECK(ds.mean_share[i + 1] <= ds.mean_share[i] + 4.0 * (ds.se_share[i] + ds.se_share[i + 1]));

    // aggregate entrant share: E = 1 - (N/(N+theta)) (N_T+theta)/N_T
    double n_T = 10.0 + 5000.0;
    double expected_new = 1.0 - (10.0 / 11.0) * ((n_T + 1.0) / n_T);
    CHECK(std::fabs(ds.mean_new_share.back() - expected_new) <= 0.01);
}

TEST_SUITE_END();
