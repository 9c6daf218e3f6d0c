#include "stakelab/dynamical_pop.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "stakelab/rng.hpp"
#include "stakelab/special_functions.hpp"
#include "stakelab/stats.hpp"

namespace stakelab {

DynState make_dyn_state(std::vector<double> incumbent_coins, double theta) {
    if (incumbent_coins.empty()) throw std::invalid_argument("dyn: need incumbents");
    if (!(theta >= 0.0)) throw std::invalid_argument("dyn: theta >= 0");
    DynState st;
    st.theta = theta;
    double sum = 0.0;
    for (double c : incumbent_coins) {
        if (!(c > 0.0)) throw std::invalid_argument("dyn: coins must be positive");
        sum += c;
    }
    st.incumbents = std::move(incumbent_coins);
    st.supply = sum;
    return st;
}

namespace {

// u_fresh is requested only when the fresh branch is taken, so a run with
// theta = 0 consumes exactly one uniform per step and couples draw for draw
// with the finite-urn engines.
template <typename FreshDraw>
DynSelection dyn_step_impl(DynState& state, const RewardSchedule& s, const DiffuseBase& nu,
                           double u_select, FreshDraw&& fresh_u) {
    const std::int64_t t = state.t + 1;
    const double reward = reward_at(s, t, state.supply);
    const double threshold = u_select * (state.supply + state.theta);

    DynSelection sel;
    double cum = 0.0;
    bool done = false;
    for (std::size_t k = 0; k < state.incumbents.size() && !done; ++k) {
        cum += state.incumbents[k];
        if (threshold < cum) {
            sel.kind = DynSelection::Kind::Incumbent;
            sel.incumbent = k;
            state.incumbents[k] += reward;
            done = true;
        }
    }
    if (!done) {
        for (const Atom& a : state.entrants.atoms()) {
            cum += a.coins;
            if (threshold < cum) {
                sel.kind = DynSelection::Kind::Entrant;
                sel.feature = a.feature;
                done = true;
                break;
            }
        }
    }
    if (!done) {
        sel.kind = DynSelection::Kind::Fresh;
        sel.feature = nu.draw(fresh_u());
    }
    if (sel.kind != DynSelection::Kind::Incumbent)
        state.entrants.credit(sel.feature, reward, sel.kind == DynSelection::Kind::Fresh);
    state.supply += reward;
    state.t = t;
    return sel;
}

}  // namespace

DynSelection dyn_step(DynState& state, const RewardSchedule& s, const DiffuseBase& nu,
                      double u_select, double u_fresh) {
    return dyn_step_impl(state, s, nu, u_select, [u_fresh] { return u_fresh; });
}

namespace {

// One-step expected-share factor 1 - theta R_t / (N_t (N_{t-1} + theta)),
// computed in long double; algebraically N_{t-1}(N_t+theta)/(N_t(N_{t-1}+theta)).
long double dyn_factor(long double theta, long double prev_supply, long double reward) {
    long double next = prev_supply + reward;
    return 1.0L - theta * reward / (next * (prev_supply + theta));
}

}  // namespace

ExpectedLimit expected_limit_ratio(const RewardSchedule& s, double N, double theta,
                                   std::int64_t T_trunc) {
    if (T_trunc < 1) throw std::invalid_argument("expected_limit_ratio: T_trunc >= 1");
    if (!(N > 0.0) || !(theta >= 0.0))
        throw std::invalid_argument("expected_limit_ratio: N > 0, theta >= 0");
    ExpectedLimit out;
    long double prod = 1.0L;
    long double supply = N;
    for (std::int64_t t = 1; t <= T_trunc; ++t) {
        double reward;
        try {
            reward = reward_at(s, t, static_cast<double>(supply));
        } catch (const SupplyOverflow&) {
            break;  // factors are ~1 by now; product already converged
        }
        prod *= dyn_factor(theta, supply, reward);
        supply += reward;
        if (!(supply < std::numeric_limits<double>::max())) break;
    }
    out.value = static_cast<double>(prod);

    // Tail: sum_{t>T} theta R_t/(N_t(N_{t-1}+theta)) <= theta (1/N_T - 1/N_inf).
    double n_T = static_cast<double>(supply);
    double inv_inf = 0.0;  // schedules with unbounded supply
    if (const auto* p = std::get_if<PowerDecay>(&s)) {
        if (p->alpha > 1.0) {
            double n_inf = N + p->c * zeta(p->alpha);
            inv_inf = 1.0 / n_inf;
            out.classification = DilutionClass::Zero;
        } else if (p->alpha == 1.0) {
            out.classification = DilutionClass::Undetermined;
        } else {
            out.classification = DilutionClass::Positive;
        }
    } else {
        out.classification = DilutionClass::Positive;
    }
    out.tail_bound = theta * (1.0 / n_T - inv_inf);
    if (out.tail_bound < 0.0) out.tail_bound = 0.0;
    return out;
}

std::vector<double> expected_ratio_path(const RewardSchedule& s, double N, double theta,
                                        std::int64_t T) {
    std::vector<double> out(static_cast<std::size_t>(T) + 1, 1.0);
    long double prod = 1.0L;
    long double supply = N;
    for (std::int64_t t = 1; t <= T; ++t) {
        double reward;
        try {
            reward = reward_at(s, t, static_cast<double>(supply));
        } catch (const SupplyOverflow&) {
            for (std::int64_t r = t; r <= T; ++r)
                out[static_cast<std::size_t>(r)] = static_cast<double>(prod);
            return out;
        }
        prod *= dyn_factor(theta, supply, reward);
        supply += reward;
        out[static_cast<std::size_t>(t)] = static_cast<double>(prod);
    }
    return out;
}

DynEnsembleSummary run_dyn_ensemble(const DynEnsembleConfig& cfg, std::uint64_t master_seed) {
    if (cfg.replicates < 1) throw std::invalid_argument("dyn_ensemble: replicates >= 1");
    if (cfg.T < 1) throw std::invalid_argument("dyn_ensemble: T >= 1");
    if (cfg.tracked_incumbent >= cfg.incumbent_coins.size())
        throw std::invalid_argument("dyn_ensemble: tracked incumbent out of range");

    DynEnsembleSummary out;
    out.replicates = cfg.replicates;

    double supply0 = 0.0;
    for (double c : cfg.incumbent_coins) supply0 += c;
    out.pi0 = cfg.incumbent_coins[cfg.tracked_incumbent] / supply0;

    std::vector<std::int64_t> snaps;
    if (cfg.snapshot_stride > 0)
        for (std::int64_t t = cfg.snapshot_stride; t < cfg.T; t += cfg.snapshot_stride)
            snaps.push_back(t);
    snaps.push_back(cfg.T);
    out.snap_times = snaps;
    const auto n_snaps = snaps.size();
    const auto reps = static_cast<std::size_t>(cfg.replicates);

    std::vector<double> snap_share(n_snaps * reps, 0.0);
    std::vector<double> snap_new(n_snaps * reps, 0.0);
    std::vector<double> terminal(reps, 0.0);
    std::vector<std::uint8_t> truncated(reps, 0);

    const DiffuseBase nu{};  // uniform entry measure

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t r = 0; r < cfg.replicates; ++r) {
        Rng rng(derive_seed(master_seed, static_cast<std::uint64_t>(r)));
        DynState st = make_dyn_state(cfg.incumbent_coins, cfg.theta);
        std::size_t next_snap = 0;
        for (std::int64_t t = 1; t <= cfg.T; ++t) {
            double u_select = rng.u01();
            try {
                dyn_step_impl(st, cfg.schedule, nu, u_select, [&rng] { return rng.u01(); });
            } catch (const SupplyOverflow&) {
                truncated[static_cast<std::size_t>(r)] = 1;
                break;
            }
            if (next_snap < n_snaps && t == snaps[next_snap]) {
                double share = st.incumbents[cfg.tracked_incumbent] / st.supply;
                double incumbent_sum = 0.0;
                for (double c : st.incumbents) incumbent_sum += c;
                snap_share[next_snap * reps + static_cast<std::size_t>(r)] = share;
                // aggregate entrant share via supply minus incumbents
                snap_new[next_snap * reps + static_cast<std::size_t>(r)] =
                    (st.supply - incumbent_sum) / st.supply;
                ++next_snap;
            }
        }
        for (; next_snap < n_snaps; ++next_snap) {
            double incumbent_sum = 0.0;
            for (double c : st.incumbents) incumbent_sum += c;
            snap_share[next_snap * reps + static_cast<std::size_t>(r)] =
                st.incumbents[cfg.tracked_incumbent] / st.supply;
            snap_new[next_snap * reps + static_cast<std::size_t>(r)] =
                (st.supply - incumbent_sum) / st.supply;
        }
        terminal[static_cast<std::size_t>(r)] = st.incumbents[cfg.tracked_incumbent] / st.supply;
    }

    out.terminal_shares = std::move(terminal);
    out.mean_share.resize(n_snaps);
    out.se_share.resize(n_snaps);
    out.mean_new_share.resize(n_snaps);
    for (std::size_t si = 0; si < n_snaps; ++si) {
        MeanVar mv = mean_var(std::span<const double>(snap_share.data() + si * reps, reps));
        out.mean_share[si] = mv.mean;
        out.se_share[si] = mv.se;
        MeanVar nv = mean_var(std::span<const double>(snap_new.data() + si * reps, reps));
        out.mean_new_share[si] = nv.mean;
    }
    out.terminal_new_share_mean = out.mean_new_share.back();

    std::vector<double> path = expected_ratio_path(cfg.schedule, supply0, cfg.theta, cfg.T);
    out.predicted_share.resize(n_snaps);
    for (std::size_t si = 0; si < n_snaps; ++si)
        out.predicted_share[si] = out.pi0 * path[static_cast<std::size_t>(snaps[si])];

    for (std::size_t r = 0; r < reps; ++r) out.truncated_runs += truncated[r];
    return out;
}

}  // namespace stakelab
