#pragma once
// Dynamical population: K incumbents plus dilution-weighted entry of new
// investors. Selection at step t (reward R_t, supply N_{t-1}):
//   incumbent k with prob n_{k,t-1}/(N_{t-1}+theta),
//   past entrant with prob (its coins)/(N_{t-1}+theta),
//   a fresh entrant with prob theta/(N_{t-1}+theta).
// theta enters selection only; it is never part of the supply.

#include <cstdint>
#include <vector>

#include "stakelab/infinite_pop.hpp"
#include "stakelab/schedule.hpp"

namespace stakelab {

struct DynState {
    std::int64_t t = 0;
    std::vector<double> incumbents;
    AtomLedger entrants;
    double theta = 0.0;
    double supply = 0.0;  // incumbents + entrant rewards
};

DynState make_dyn_state(std::vector<double> incumbent_coins, double theta);

struct DynSelection {
    enum class Kind { Incumbent, Entrant, Fresh } kind = Kind::Incumbent;
    std::size_t incumbent = 0;  // when Kind::Incumbent
    double feature = 0.0;       // when Entrant / Fresh
};

// Scan order: incumbents ascending, entrants in appearance order, fresh mass
// last. u_fresh feeds the entry measure nu; both uniforms are consumed by the
// caller protocol each step.
DynSelection dyn_step(DynState& state, const RewardSchedule& s, const DiffuseBase& nu,
                      double u_select, double u_fresh);

enum class DilutionClass { Positive, Zero, Undetermined };

// Truncated expected-ratio product
//   E(pi_{k,T})/pi_{k,0} = prod_{t=1..T} (1 - theta R_t / (N_t (N_{t-1}+theta))),
// with the telescoping tail bound sum_{t>T} x_t <= theta (1/N_T - 1/N_inf).
// A lower bound on the remaining decay factor is exp(-2 * tail_bound), valid
// while the per-step factors stay below 0.39.
struct ExpectedLimit {
    double value = 1.0;       // truncated product
    double tail_bound = 0.0;  // bound on the sum of remaining x_t
    DilutionClass classification = DilutionClass::Positive;
};

ExpectedLimit expected_limit_ratio(const RewardSchedule& s, double N, double theta,
                                   std::int64_t T_trunc);

// Prefix products of the one-step factors, for mean-path comparisons:
// out[t] = prod_{r=1..t} factor_r, out[0] = 1.
std::vector<double> expected_ratio_path(const RewardSchedule& s, double N, double theta,
                                        std::int64_t T);

struct DynEnsembleConfig {
    RewardSchedule schedule;
    std::vector<double> incumbent_coins;
    double theta = 0.0;
    std::size_t tracked_incumbent = 0;
    std::int64_t T = 0;
    std::int64_t replicates = 1;
    std::int64_t snapshot_stride = 0;
};

struct DynEnsembleSummary {
    double pi0 = 0.0;
    std::int64_t replicates = 0;
    std::vector<std::int64_t> snap_times;
    std::vector<double> mean_share;       // tracked incumbent, per snapshot
    std::vector<double> se_share;
    std::vector<double> predicted_share;  // pi0 * prefix product
    std::vector<double> mean_new_share;   // aggregate entrant share, per snapshot
    std::vector<double> terminal_shares;  // tracked incumbent, by replicate
    double terminal_new_share_mean = 0.0;
    std::int64_t truncated_runs = 0;
};

DynEnsembleSummary run_dyn_ensemble(const DynEnsembleConfig& cfg, std::uint64_t master_seed);

}  // namespace stakelab
