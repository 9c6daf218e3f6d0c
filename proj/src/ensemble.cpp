#include "stakelab/ensemble.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "stakelab/rng.hpp"
#include "stakelab/stats.hpp"

namespace stakelab {

EnsembleSummary run_tracked_ensemble(const TrackedEnsembleConfig& cfg, std::uint64_t master_seed) {
    if (cfg.replicates < 1) throw std::invalid_argument("ensemble: replicates >= 1");
    if (!(cfg.n0 > 0.0) || !(cfg.n0 < cfg.N))
        throw std::invalid_argument("ensemble: need 0 < n0 < N");
    if (cfg.T < 1) throw std::invalid_argument("ensemble: T >= 1");

    // Initial coin layout matches make_urn({n0, N - n0}).
    const double rest0 = cfg.N - cfg.n0;
    const double supply0 = cfg.n0 + rest0;
    const double pi0 = cfg.n0 / supply0;

    ScheduleTable table = build_schedule_table(cfg.schedule, supply0, cfg.T);
    const std::int64_t last = table.last_step(cfg.T);
    const bool track_band = cfg.epsilon > 0.0;

    EnsembleSummary out;
    out.pi0 = pi0;
    out.epsilon = cfg.epsilon;
    out.replicates = cfg.replicates;
    out.T = cfg.T;
    out.last_step = last;
    if (last < cfg.T) {
        out.truncated_runs = cfg.replicates;
        if (const auto* p = std::get_if<Proportional>(&cfg.schedule); p && p->gamma >= 1.0)
            out.absorbed_runs = cfg.replicates;
    }

    // Band thresholds in coin space against the deterministic supply path:
    // |ratio_t - 1| > eps  <=>  coins_t < lo[t] or coins_t > hi[t].
    std::vector<double> band_lo, band_hi;
    if (track_band) {
        band_lo.resize(static_cast<std::size_t>(last) + 1);
        band_hi.resize(static_cast<std::size_t>(last) + 1);
        const double lo_m = (1.0 - cfg.epsilon) * pi0;
        const double hi_m = (1.0 + cfg.epsilon) * pi0;
        for (std::int64_t t = 0; t <= last; ++t) {
            band_lo[static_cast<std::size_t>(t)] = lo_m * table.supply[static_cast<std::size_t>(t)];
            band_hi[static_cast<std::size_t>(t)] = hi_m * table.supply[static_cast<std::size_t>(t)];
        }
    }

    std::vector<std::int64_t> snaps;
    if (cfg.snapshot_stride > 0)
        for (std::int64_t t = cfg.snapshot_stride; t < last; t += cfg.snapshot_stride)
            snaps.push_back(t);
    snaps.push_back(last);
    out.snap_times = snaps;

    const auto reps = static_cast<std::size_t>(cfg.replicates);
    const auto n_snaps = snaps.size();
    std::vector<double> snap_ratio(n_snaps * reps);
    std::vector<double> terminal_share(reps);
    std::vector<std::int64_t> exceed(track_band ? static_cast<std::size_t>(cfg.T) + 1 : 0, 0);

#ifdef _OPENMP
#pragma omp parallel
#endif
    {
        std::vector<std::uint32_t> local_exceed(exceed.size(), 0);
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
        for (std::int64_t r = 0; r < cfg.replicates; ++r) {
            Rng rng(derive_seed(master_seed, static_cast<std::uint64_t>(r)));
            double coins = cfg.n0;
            double rest = rest0;
            double supply = supply0;
            std::size_t next_snap = 0;
            for (std::int64_t t = 1; t <= last; ++t) {
                const double reward = table.reward[static_cast<std::size_t>(t)];
                const double u = rng.u01();
                if (u * supply < coins)
                    coins += reward;
                else
                    rest += reward;
                supply += reward;
                if (t % kSupplyRepairStride == 0) supply = coins + rest;
                if (track_band) {
                    const auto i = static_cast<std::size_t>(t);
                    local_exceed[i] += (coins < band_lo[i]) | (coins > band_hi[i]);
                }
                if (next_snap < n_snaps && t == snaps[next_snap]) {
                    snap_ratio[next_snap * reps + static_cast<std::size_t>(r)] =
                        coins / table.supply[static_cast<std::size_t>(t)] / pi0;
                    ++next_snap;
                }
            }
            for (; next_snap < n_snaps; ++next_snap) {  // only when last == 0
                snap_ratio[next_snap * reps + static_cast<std::size_t>(r)] =
                    coins / table.supply[static_cast<std::size_t>(snaps[next_snap])] / pi0;
            }
            if (track_band && last < cfg.T) {
                // Frozen shares keep their band status through the horizon.
                const auto i = static_cast<std::size_t>(last);
                const std::uint32_t status = (coins < band_lo[i]) | (coins > band_hi[i]);
                for (std::int64_t t = last + 1; t <= cfg.T; ++t)
                    local_exceed[static_cast<std::size_t>(t)] += status;
            }
            terminal_share[static_cast<std::size_t>(r)] =
                coins / table.supply[static_cast<std::size_t>(last)];
        }
        if (track_band) {
#ifdef _OPENMP
#pragma omp critical
#endif
            for (std::size_t i = 0; i < exceed.size(); ++i)
                exceed[i] += local_exceed[i];
        }
    }

    out.exceed_counts = std::move(exceed);
    if (cfg.keep_terminal) {
        out.terminal_shares = terminal_share;
        out.terminal_ratios.resize(reps);
        for (std::size_t r = 0; r < reps; ++r) out.terminal_ratios[r] = terminal_share[r] / pi0;
    }
    out.ratio_mean.resize(n_snaps);
    out.ratio_var.resize(n_snaps);
    out.ratio_se.resize(n_snaps);
    for (std::size_t si = 0; si < n_snaps; ++si) {
        std::span<const double> row(snap_ratio.data() + si * reps, reps);
        MeanVar mv = mean_var(row);
        out.ratio_mean[si] = mv.mean;
        out.ratio_var[si] = mv.var;
        out.ratio_se[si] = mv.se;
    }
    return out;
}

double estimate_pmax(const EnsembleSummary& summary, double eps) {
    if (summary.exceed_counts.empty())
        throw std::invalid_argument("estimate_pmax: summary has no exceedance band");
    if (eps != summary.epsilon)
        throw std::invalid_argument("estimate_pmax: eps does not match the tracked band");
    std::int64_t worst = 0;
    for (std::int64_t c : summary.exceed_counts) worst = std::max(worst, c);
    return static_cast<double>(worst) / static_cast<double>(summary.replicates);
}

GeneralEnsembleSummary run_general_ensemble(const GeneralEnsembleConfig& cfg,
                                            std::uint64_t master_seed) {
    if (cfg.replicates < 1) throw std::invalid_argument("ensemble: replicates >= 1");
    GeneralEnsembleSummary out;
    const auto reps = static_cast<std::size_t>(cfg.replicates);
    out.terminal_shares.assign(cfg.tracked.size(), std::vector<double>(reps, 0.0));
    std::vector<std::uint8_t> truncated(reps, 0), absorbed(reps, 0);

    SimulateOptions opt;
    opt.tracked = cfg.tracked;

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t r = 0; r < cfg.replicates; ++r) {
        Trajectory traj = simulate(cfg.schedule, cfg.coins, cfg.T, opt,
                                   derive_seed(master_seed, static_cast<std::uint64_t>(r)));
        for (std::size_t i = 0; i < cfg.tracked.size(); ++i)
            out.terminal_shares[i][static_cast<std::size_t>(r)] = traj.shares[i].back();
        truncated[static_cast<std::size_t>(r)] = traj.truncated;
        absorbed[static_cast<std::size_t>(r)] = traj.absorbed;
    }
    for (std::size_t r = 0; r < reps; ++r) {
        out.truncated_runs += truncated[r];
        out.absorbed_runs += absorbed[r];
    }
    return out;
}

}  // namespace stakelab
