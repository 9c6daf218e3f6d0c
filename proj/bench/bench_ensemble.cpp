// Compares the serial reference engine, the tracked kernel at one thread,
// and the tracked kernel with the full OpenMP team on the same workload,
// verifying that the kernels agree with the reference before timing.

#include <chrono>
#include <cmath>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "stakelab/ensemble.hpp"
#include "stakelab/rng.hpp"
#include "stakelab/urn.hpp"

using namespace stakelab;

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

double run_reference(const TrackedEnsembleConfig& cfg, std::uint64_t seed) {
    SimulateOptions opt;
    double acc = 0.0;
    for (std::int64_t r = 0; r < cfg.replicates; ++r) {
        Trajectory traj = simulate(cfg.schedule, {cfg.n0, cfg.N - cfg.n0}, cfg.T, opt,
                                   derive_seed(seed, static_cast<std::uint64_t>(r)));
        acc += traj.shares[0].back();
    }
    return acc / static_cast<double>(cfg.replicates);
}

}  // namespace

int main() {
    TrackedEnsembleConfig cfg;
    cfg.schedule = Constant{1.0};
    cfg.N = 1000.0;
    cfg.n0 = 500.0;
    cfg.T = 50000;
    cfg.replicates = 2000;
    cfg.epsilon = 0.05;
    const std::uint64_t seed = 42;
    const double steps = static_cast<double>(cfg.T) * static_cast<double>(cfg.replicates);

    // correctness cross-check on a smaller slice
    {
        TrackedEnsembleConfig small = cfg;
        small.replicates = 8;
        small.epsilon = 0.0;
        EnsembleSummary kernel = run_tracked_ensemble(small, seed);
        SimulateOptions opt;
        for (std::int64_t r = 0; r < small.replicates; ++r) {
            Trajectory traj = simulate(small.schedule, {small.n0, small.N - small.n0}, small.T, opt,
                                       derive_seed(seed, static_cast<std::uint64_t>(r)));
            double ref = traj.shares[0].back();
            double ker = kernel.terminal_shares[static_cast<std::size_t>(r)];
            if (ref != ker) {
                std::printf("MISMATCH replicate %lld: reference %.17g kernel %.17g\n",
                            static_cast<long long>(r), ref, ker);
                return 1;
            }
        }
        std::printf("kernel/reference agreement: OK (8 matched-seed replicates)\n");
    }

    double t0 = now_seconds();
    double ref_mean = run_reference(cfg, seed);
    double t_ref = now_seconds() - t0;

#ifdef _OPENMP
    omp_set_num_threads(1);
#endif
    t0 = now_seconds();
    EnsembleSummary serial = run_tracked_ensemble(cfg, seed);
    double t_serial = now_seconds() - t0;

#ifdef _OPENMP
    omp_set_num_threads(omp_get_num_procs());
#endif
    t0 = now_seconds();
    EnsembleSummary parallel = run_tracked_ensemble(cfg, seed);
    double t_par = now_seconds() - t0;

    bool identical = serial.terminal_shares == parallel.terminal_shares &&
                     serial.exceed_counts == parallel.exceed_counts;

    std::printf("workload: T=%lld, replicates=%lld (%.2e steps)\n",
                static_cast<long long>(cfg.T), static_cast<long long>(cfg.replicates), steps);
    std::printf("reference engine : %8.3f s  (%6.1f Msteps/s)  mean=%.6f\n", t_ref,
                steps / t_ref / 1e6, ref_mean);
    std::printf("kernel, 1 thread : %8.3f s  (%6.1f Msteps/s)\n", t_serial,
                steps / t_serial / 1e6);
    std::printf("kernel, parallel : %8.3f s  (%6.1f Msteps/s)  speedup x%.2f\n", t_par,
                steps / t_par / 1e6, t_serial / t_par);
    std::printf("parallel output identical to serial: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
