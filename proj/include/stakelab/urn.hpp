#pragma once
// Finite-population time-dependent Polya urn: proportional selection,
// deterministic reward credit, share recursion
//   pi_{k,t} = (N_{t-1}/N_t) pi_{k,t-1} + (R_t/N_t) 1{k selected}.

#include <cstdint>
#include <optional>
#include <vector>

#include "stakelab/schedule.hpp"

namespace stakelab {

// Selection is inverse-CDF over ascending index with a single uniform draw:
// pick the first k with u * supply < coins[0] + ... + coins[k]. Comparisons
// are done in coin space (no divisions) so the fast tracked kernel and this
// reference engine agree bit for bit.
struct UrnState {
    std::int64_t t = 0;
    std::vector<double> coins;
    double supply = 0.0;
};

UrnState make_urn(std::vector<double> coins);

// Accumulated float drift between `supply` and the coin sum is repaired by
// recomputing the ascending sum every kSupplyRepairStride steps.
inline constexpr std::int64_t kSupplyRepairStride = 65536;

// One transition using a caller-supplied uniform u in [0,1). The reward for
// step state.t+1 is read from the table. Returns the selected index.
int urn_step(UrnState& state, const ScheduleTable& table, double u);

// Convenience overload computing the reward directly from the schedule.
int urn_step(UrnState& state, const RewardSchedule& s, double u);

struct Trajectory {
    std::vector<std::int64_t> times;
    // shares[i][j]: share of tracked[i] at times[j]
    std::vector<std::vector<double>> shares;
    UrnState final_state;
    std::vector<std::int32_t> selections;  // filled when record_selections
    bool truncated = false;                // stopped before T (overflow/freeze)
    bool absorbed = false;                 // geometric regime: shares pinned
};

struct SimulateOptions {
    std::vector<std::size_t> tracked = {0};
    std::int64_t snapshot_stride = 0;  // 0: only t = 0 and t = T
    bool record_selections = false;
};

// Deterministic function of seed: applies urn_step T times, one u01 draw per
// step, recording tracked shares at t = 0, every stride, and the last step.
Trajectory simulate(const RewardSchedule& s, std::vector<double> coins, std::int64_t T,
                    const SimulateOptions& opt, std::uint64_t seed);

}  // namespace stakelab
