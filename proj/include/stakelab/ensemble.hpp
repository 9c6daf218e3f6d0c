#pragma once
// Monte Carlo ensembles over independent replicates. Replicate i runs on its
// own generator seeded with derive_seed(master_seed, i); aggregation happens
// in replicate order, so results are identical for any thread count.
//
// Two engines share the same per-step arithmetic:
//   * simulate() in urn.hpp - the general-K serial reference;
//   * the tracked kernel here - the hot path for one investor vs. the rest
//     (the marginal law of a single share only depends on its own selection
//     probability, so lumping the other investors is exact).

#include <cstdint>
#include <vector>

#include "stakelab/schedule.hpp"
#include "stakelab/urn.hpp"

namespace stakelab {

struct TrackedEnsembleConfig {
    RewardSchedule schedule;
    double N = 0.0;   // initial total coins
    double n0 = 0.0;  // tracked investor's initial coins
    std::int64_t T = 0;
    std::int64_t replicates = 1;
    // Ratio deviation band |pi_t/pi_0 - 1| > epsilon; 0 disables tracking.
    double epsilon = 0.0;
    std::int64_t snapshot_stride = 0;  // 0: terminal only
    bool keep_terminal = true;
};

struct EnsembleSummary {
    double pi0 = 0.0;
    double epsilon = 0.0;
    std::int64_t replicates = 0;
    std::int64_t T = 0;
    std::int64_t last_step = 0;  // < T when the supply path froze

    std::vector<std::int64_t> snap_times;
    std::vector<double> ratio_mean, ratio_var, ratio_se;

    // exceed_counts[t], t in [0, T]: replicates with |ratio_t - 1| > epsilon.
    // Ratios and bands are evaluated against the deterministic supply path.
    std::vector<std::int64_t> exceed_counts;

    std::vector<double> terminal_shares;  // by replicate index
    std::vector<double> terminal_ratios;

    std::int64_t truncated_runs = 0;
    std::int64_t absorbed_runs = 0;
};

EnsembleSummary run_tracked_ensemble(const TrackedEnsembleConfig& cfg, std::uint64_t master_seed);

// max over t of the empirical exceedance probability. eps must match the
// band the summary was built with.
double estimate_pmax(const EnsembleSummary& summary, double eps);

// General-K ensemble driving the reference engine; used where the joint
// distribution across investors matters.
struct GeneralEnsembleConfig {
    RewardSchedule schedule;
    std::vector<double> coins;
    std::int64_t T = 0;
    std::int64_t replicates = 1;
    std::vector<std::size_t> tracked = {0};
};

struct GeneralEnsembleSummary {
    // terminal_shares[i][r]: tracked investor i, replicate r
    std::vector<std::vector<double>> terminal_shares;
    std::int64_t truncated_runs = 0;
    std::int64_t absorbed_runs = 0;
};

GeneralEnsembleSummary run_general_ensemble(const GeneralEnsembleConfig& cfg,
                                            std::uint64_t master_seed);

}  // namespace stakelab
