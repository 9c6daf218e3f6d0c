#include "stakelab/urn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stakelab/rng.hpp"

namespace stakelab {

namespace {

double ascending_sum(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
}

int select_index(const std::vector<double>& coins, double supply, double u) {
    double threshold = u * supply;
    double cum = 0.0;
    for (std::size_t k = 0; k < coins.size(); ++k) {
        cum += coins[k];
        if (threshold < cum) return static_cast<int>(k);
    }
    return static_cast<int>(coins.size()) - 1;  // u*supply hit the rounding edge
}

int apply_step(UrnState& state, double reward, double u) {
    int k = select_index(state.coins, state.supply, u);
    state.coins[static_cast<std::size_t>(k)] += reward;
    state.supply += reward;
    state.t += 1;
    if (state.t % kSupplyRepairStride == 0) state.supply = ascending_sum(state.coins);
    return k;
}

}  // namespace

UrnState make_urn(std::vector<double> coins) {
    if (coins.empty()) throw std::invalid_argument("make_urn: need at least one investor");
    for (double c : coins)
        if (!(c > 0.0)) throw std::invalid_argument("make_urn: coins must be positive");
    UrnState st;
    st.coins = std::move(coins);
    st.supply = ascending_sum(st.coins);
    return st;
}

int urn_step(UrnState& state, const ScheduleTable& table, double u) {
    std::int64_t t = state.t + 1;
    if (t > table.horizon()) throw std::invalid_argument("urn_step: past table horizon");
    if (table.freeze_step > 0 && t >= table.freeze_step)
        throw std::invalid_argument("urn_step: table frozen at this step");
    return apply_step(state, table.reward[static_cast<std::size_t>(t)], u);
}

int urn_step(UrnState& state, const RewardSchedule& s, double u) {
    double reward = reward_at(s, state.t + 1, state.supply);
    return apply_step(state, reward, u);
}

Trajectory simulate(const RewardSchedule& s, std::vector<double> coins, std::int64_t T,
                    const SimulateOptions& opt, std::uint64_t seed) {
    if (T < 0) throw std::invalid_argument("simulate: T must be >= 0");
    Trajectory traj;
    UrnState st = make_urn(std::move(coins));
    for (std::size_t k : opt.tracked)
        if (k >= st.coins.size()) throw std::invalid_argument("simulate: tracked index out of range");

    ScheduleTable table = build_schedule_table(s, st.supply, T);
    std::int64_t last = table.last_step(T);
    if (last < T) {
        traj.truncated = true;
        traj.absorbed = std::holds_alternative<Proportional>(s) &&
                        std::get<Proportional>(s).gamma >= 1.0;
    }

    traj.shares.resize(opt.tracked.size());
    auto snapshot = [&](std::int64_t t) {
        traj.times.push_back(t);
        for (std::size_t i = 0; i < opt.tracked.size(); ++i)
            traj.shares[i].push_back(st.coins[opt.tracked[i]] / st.supply);
    };
    snapshot(0);

    Rng rng(seed);
    for (std::int64_t t = 1; t <= last; ++t) {
        int k = urn_step(st, table, rng.u01());
        if (opt.record_selections) traj.selections.push_back(static_cast<std::int32_t>(k));
        bool at_stride = opt.snapshot_stride > 0 && t % opt.snapshot_stride == 0;
        if (at_stride || t == last) snapshot(t);
    }
    traj.final_state = std::move(st);
    return traj;
}

}  // namespace stakelab
