#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "doctest.h"
#include "stakelab/ensemble.hpp"
#include "stakelab/rng.hpp"
#include "stakelab/stats.hpp"

using namespace stakelab;

TEST_SUITE_BEGIN("ensemble");

TEST_CASE("tracked kernel matches the reference engine draw for draw") {
    for (const RewardSchedule& s :
         {RewardSchedule{Constant{1.0}}, RewardSchedule{FloorDecay{1.0, 1.0, 0.999}},
          RewardSchedule{PowerDecay{1.0, 0.6}}, RewardSchedule{Proportional{1.0, 0.1}}}) {
        TrackedEnsembleConfig cfg;
        cfg.schedule = s;
        cfg.N = 50.0;
        cfg.n0 = 3.0;
        cfg.T = 3000;
        cfg.replicates = 5;
        EnsembleSummary sum = run_tracked_ensemble(cfg, 4242);
        SimulateOptions opt;
        for (std::int64_t r = 0; r < cfg.replicates; ++r) {
            Trajectory traj = simulate(s, {cfg.n0, cfg.N - cfg.n0}, cfg.T, opt,
                                       derive_seed(4242, static_cast<std::uint64_t>(r)));
            CHECK(traj.shares[0].back() == sum.terminal_shares[static_cast<std::size_t>(r)]);
        }
    }
}

TEST_CASE("output is invariant to the thread count") {
    TrackedEnsembleConfig cfg;
    cfg.schedule = Constant{1.0};
    cfg.N = 100.0;
    cfg.n0 = 1.0;
    cfg.T = 2000;
    cfg.replicates = 200;
    cfg.epsilon = 0.5;
    cfg.snapshot_stride = 500;
#ifdef _OPENMP
    int old_threads = omp_get_max_threads();
    omp_set_num_threads(1);
#endif
    EnsembleSummary a = run_tracked_ensemble(cfg, 7);
#ifdef _OPENMP
    omp_set_num_threads(2);
#endif
    EnsembleSummary b = run_tracked_ensemble(cfg, 7);
#ifdef _OPENMP
    omp_set_num_threads(old_threads);
#endif
    CHECK(a.terminal_shares == b.terminal_shares);
    CHECK(a.exceed_counts == b.exceed_counts);
    CHECK(a.ratio_mean == b.ratio_mean);
    CHECK(a.ratio_var == b.ratio_var);
}

TEST_CASE("single-step ensemble mean is within 4 SE of 1/2") {
    TrackedEnsembleConfig cfg;
    cfg.schedule = Constant{1.0};
    cfg.N = 2.0;
    cfg.n0 = 1.0;
    cfg.T = 1;
    cfg.replicates = 100000;
    EnsembleSummary sum = run_tracked_ensemble(cfg, 11);
    MeanVar mv = mean_var(sum.terminal_shares);
    // exact mean 1/2 by the martingale property; sd of one step is 1/6
    CHECK(std::fabs(mv.mean - 0.5) <= 4.0 * mv.se);
    CHECK(std::sqrt(mv.var) == doctest::Approx(1.0 / 6.0).epsilon(0.05));
}

TEST_CASE("one replicate reduces to a single trajectory") {
    TrackedEnsembleConfig cfg;
    cfg.schedule = PowerDecay{1.0, 0.6};
    cfg.N = 10.0;
    cfg.n0 = 2.0;
    cfg.T = 100;
    cfg.replicates = 1;
    EnsembleSummary sum = run_tracked_ensemble(cfg, 31);
    Trajectory traj = simulate(cfg.schedule, {2.0, 8.0}, 100, SimulateOptions{}, derive_seed(31, 0));
    CHECK(sum.terminal_shares.size() == 1);
    CHECK(sum.terminal_shares[0] == traj.shares[0].back());
    CHECK(sum.ratio_mean.back() == doctest::Approx(traj.shares[0].back() / 0.2).epsilon(1e-15));
    CHECK(sum.ratio_var.back() == 0.0);
}

TEST_CASE("exceedance band edge cases") {
    TrackedEnsembleConfig cfg;
    cfg.schedule = Constant{1.0};
    cfg.N = 4.0;
    cfg.n0 = 2.0;
    cfg.T = 50;
    cfg.replicates = 40;

    cfg.epsilon = 50.0;  // band so wide nothing ever leaves it
    EnsembleSummary wide = run_tracked_ensemble(cfg, 3);
    CHECK(estimate_pmax(wide, 50.0) == 0.0);

    cfg.epsilon = 1e-12;  // any reward moves the share off pi0
    EnsembleSummary tight = run_tracked_ensemble(cfg, 3);
    CHECK(estimate_pmax(tight, 1e-12) == 1.0);

    CHECK_THROWS_AS(estimate_pmax(wide, 0.25), std::invalid_argument);
}

TEST_CASE("martingale mean holds along snapshots within 4 SE") {
    TrackedEnsembleConfig cfg;
    cfg.schedule = FloorDecay{1.0, 1.0, 0.999};
    cfg.N = 50.0;
    cfg.n0 = 5.0;
    cfg.T = 5000;
    cfg.replicates = 4000;
    cfg.snapshot_stride = 1000;
    EnsembleSummary sum = run_tracked_ensemble(cfg, 17);
    for (std::size_t i = 0; i < sum.snap_times.size(); ++i)
        CHECK(std::fabs(sum.ratio_mean[i] - 1.0) <= 4.0 * sum.ratio_se[i]);
}

TEST_CASE("general ensemble tracks joint terminal shares") {
    GeneralEnsembleConfig cfg;
    cfg.schedule = Constant{1.0};
    cfg.coins = {1.0, 1.0, 8.0};
    cfg.T = 2000;
    cfg.replicates = 2000;
    cfg.tracked = {0, 1};
    GeneralEnsembleSummary sum = run_general_ensemble(cfg, 23);
    MeanVar m0 = mean_var(sum.terminal_shares[0]);
    MeanVar m1 = mean_var(sum.terminal_shares[1]);
    CHECK(std::fabs(m0.mean - 0.1) <= 4.0 * m0.se);
    CHECK(std::fabs(m1.mean - 0.1) <= 4.0 * m1.se);
    // matched seeds couple the replicates, so exchangeable investors get
    // exchangeable sample paths
    CHECK(std::fabs(m0.mean - m1.mean) <= 4.0 * (m0.se + m1.se));
}

TEST_SUITE_END();
