#include "stakelab/check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "stakelab/dynamical_pop.hpp"
#include "stakelab/ensemble.hpp"
#include "stakelab/figures.hpp"
#include "stakelab/infinite_pop.hpp"
#include "stakelab/limit_laws.hpp"
#include "stakelab/moments.hpp"
#include "stakelab/rng.hpp"
#include "stakelab/stats.hpp"

namespace stakelab {

namespace {

double rel_diff(double a, double b) {
    double scale = std::max(std::fabs(a), std::fabs(b));
    if (scale == 0.0) return 0.0;
    return std::fabs(a - b) / scale;
}

CriterionResult make_result(std::string id, std::string desc, bool pass, double measured,
                            double tol, std::uint64_t seed) {
    CriterionResult r;
    r.id = std::move(id);
    r.description = std::move(desc);
    r.pass = pass;
    r.measured = measured;
    r.tolerance = tol;
    r.seed = seed;
    return r;
}

// ---- oracle suite ----------------------------------------------------------

// a_t-based variance against the closed form, exact to 1e-12 relative.
CriterionResult check_variance_closed_form() {
    const double R = 1.0;
    const std::int64_t T = 100000;
    double worst = 0.0;
    for (double N : {2.0, 100.0, 10000.0}) {
        std::vector<double> a = a_sequence(Constant{R}, N, T);
        for (double pi0 : {0.5, 0.01}) {
            for (std::int64_t t = 1; t <= T; ++t) {
                double lhs = a[static_cast<std::size_t>(t)] * pi0 * (1.0 - pi0);
                double rhs = constant_reward_variance(R, N, static_cast<double>(t), pi0);
                worst = std::max(worst, rel_diff(lhs, rhs));
            }
        }
    }
    return make_result("oracle.variance_closed_form",
                       "a_t recursion variance equals the constant-reward closed form, "
                       "N in {2,100,1e4}, pi0 in {0.5,0.01}, t <= 1e5",
                       worst <= 1e-12, worst, 1e-12, 0);
}

// Exhaustive 2^T path enumeration of the two-investor urn; the oracle tracks
// coins directly and never touches the moment recursion.
struct PathMoments {
    KahanSum m[4];
    KahanSum total;
};

void enumerate_paths(const ScheduleTable& tab, std::int64_t t, std::int64_t T, double coins,
                     double supply, double prob, PathMoments& acc) {
    if (t == T) {
        double share = coins / supply;
        double p = prob;
        acc.total.add(p);
        double powx = 1.0;
        for (int j = 0; j < 4; ++j) {
            powx *= share;
            acc.m[j].add(p * powx);
        }
        return;
    }
    double reward = tab.reward[static_cast<std::size_t>(t + 1)];
    double p_sel = coins / supply;
    enumerate_paths(tab, t + 1, T, coins + reward, supply + reward, prob * p_sel, acc);
    enumerate_paths(tab, t + 1, T, coins, supply + reward, prob * (1.0 - p_sel), acc);
}

CriterionResult check_enumeration_moments() {
    const std::int64_t T = 12;
    double worst = 0.0;
    std::vector<RewardSchedule> schedules = {Constant{1.0}, PowerDecay{1.0, 0.6}};
    for (const auto& s : schedules) {
        for (double pi0 : {0.5, 0.25}) {
            const double N = 2.0;
            ScheduleTable tab = build_schedule_table(s, N, T);
            PathMoments acc;
            enumerate_paths(tab, 0, T, pi0 * N, N, 1.0, acc);
            MomentTable mt = raw_moment_table(s, N, pi0, T);
            auto i = static_cast<std::size_t>(T);
            worst = std::max(worst, rel_diff(acc.m[0].value(), mt.m1[i]));
            worst = std::max(worst, rel_diff(acc.m[1].value(), mt.m2[i]));
            worst = std::max(worst, rel_diff(acc.m[2].value(), mt.m3[i]));
            worst = std::max(worst, rel_diff(acc.m[3].value(), mt.m4[i]));
            worst = std::max(worst, std::fabs(acc.total.value() - 1.0));
        }
    }
    return make_result("oracle.enumeration_moments",
                       "raw moments 1-4 equal exhaustive 2^12 path enumeration "
                       "(constant and t^-0.6 rewards, K=2)",
                       worst <= 1e-12, worst, 1e-12, 0);
}

// Central-moment step identities, verified directly from raw moments.
CriterionResult check_central_identities() {
    double worst = 0.0;
    std::vector<RewardSchedule> schedules = {Constant{1.0}, FloorDecay{1.0, 1.0, 0.999},
                                             PowerDecay{1.0, 0.6}, Proportional{0.01, 0.5}};
    for (const auto& s : schedules) {
        const double N = 50.0;
        const double pi0 = 0.3;
        const std::int64_t T = 2000;
        MomentTable mt = raw_moment_table(s, N, pi0, T);
        ScheduleTable tab = build_schedule_table(s, N, T);
        for (std::int64_t t = 0; t < T; ++t) {
            auto i = static_cast<std::size_t>(t);
            double b = tab.reward[i + 1] / tab.supply[i + 1];
            double m1 = mt.m1[i], m2 = mt.m2[i], m3 = mt.m3[i], m4 = mt.m4[i];
            double e_dev_pq = m2 - m3 - pi0 * m1 + pi0 * m2;           // E[(pi-pi0) pi(1-pi)]
            double e_skew = m1 - 3.0 * m2 + 2.0 * m3;                  // E[pi(1-pi)(1-2pi)]
            double e_dev2_pq = (m3 - m4) - 2.0 * pi0 * (m2 - m3) + pi0 * pi0 * (m1 - m2);
            double e_dev_skew = (m2 - 3.0 * m3 + 2.0 * m4) - pi0 * (m1 - 3.0 * m2 + 2.0 * m3);
            double e_kurt = m1 - 4.0 * m2 + 6.0 * m3 - 3.0 * m4;       // E[pi(1-pi)(1-3pi+3pi^2)]
            double mu3_next = mt.mu3[i] + 3.0 * b * b * e_dev_pq + b * b * b * e_skew;
            double mu4_next = mt.mu4[i] + 6.0 * b * b * e_dev2_pq +
                              4.0 * b * b * b * e_dev_skew + b * b * b * b * e_kurt;
            double d3 = std::fabs(mu3_next - mt.mu3[i + 1]);
            double d4 = std::fabs(mu4_next - mt.mu4[i + 1]);
            double s3 = std::max({std::fabs(mu3_next), std::fabs(mt.mu3[i + 1]), 1e-18});
            double s4 = std::max({std::fabs(mu4_next), std::fabs(mt.mu4[i + 1]), 1e-18});
            worst = std::max(worst, std::max(d3 / s3, d4 / s4));
        }
    }
    return make_result("oracle.central_identities",
                       "third/fourth central moments satisfy the one-step identities",
                       worst <= 1e-10, worst, 1e-10, 0);
}

// Exchangeability of the selection sequence over a two-atom discrete base:
// every permutation of a pattern has the same probability.
CriterionResult check_exchangeability() {
    const double w1 = 1.5, w2 = 3.5;  // N = 5
    DiscreteWeights base = DiscreteWeights::finite({w1, w2});
    const RewardSchedule s = Constant{1.0};
    double worst = 0.0;

    auto pattern_prob = [&](const std::vector<int>& pattern) {
        AtomLedger ledger;
        double prob = 1.0;
        for (int f : pattern) {
            double feature = static_cast<double>(f);
            prob *= bm_step_probability(ledger, base, feature);
            double reward = reward_at(s, ledger.steps() + 1, base.total() + ledger.reward_total());
            ledger.credit(feature, reward, false);
        }
        return prob;
    };

    for (int len = 1; len <= 6; ++len) {
        // group patterns by number of 1-draws
        std::vector<std::vector<double>> by_count(static_cast<std::size_t>(len) + 1);
        for (int bits = 0; bits < (1 << len); ++bits) {
            std::vector<int> pattern(static_cast<std::size_t>(len));
            int ones = 0;
            for (int i = 0; i < len; ++i) {
                bool is_one = (bits >> i) & 1;
                pattern[static_cast<std::size_t>(i)] = is_one ? 1 : 2;
                ones += is_one;
            }
            by_count[static_cast<std::size_t>(ones)].push_back(pattern_prob(pattern));
        }
        KahanSum total;
        for (const auto& group : by_count) {
            for (double p : group) {
                total.add(p);
                worst = std::max(worst, rel_diff(p, group.front()));
            }
        }
        worst = std::max(worst, std::fabs(total.value() - 1.0));
    }
    return make_result("oracle.exchangeability",
                       "two-atom selection pattern probabilities are permutation invariant "
                       "(all patterns of length <= 6)",
                       worst <= 1e-14, worst, 1e-14, 0);
}

// ---- bounds suite ----------------------------------------------------------

struct PmaxPoint {
    double N = 0.0;
    double pmax = 0.0;
    double bound = 0.0;  // NaN when the constant is unspecified
};

PmaxPoint pmax_cell(const RewardSchedule& s, double N, double n0, double eps, std::int64_t T,
                    std::int64_t reps, std::uint64_t seed) {
    TrackedEnsembleConfig cfg;
    cfg.schedule = s;
    cfg.N = N;
    cfg.n0 = n0;
    cfg.T = T;
    cfg.replicates = reps;
    cfg.epsilon = eps;
    cfg.keep_terminal = false;
    EnsembleSummary sum = run_tracked_ensemble(cfg, seed);
    PmaxPoint p;
    p.N = N;
    p.pmax = estimate_pmax(sum, eps);
    ConcentrationBound b = concentration_bound(s, N, n0, eps);
    p.bound = b.value ? *b.value : std::numeric_limits<double>::quiet_NaN();
    return p;
}

CriterionResult check_thm1_coverage(const CheckOptions& opt) {
    const RewardSchedule s = Constant{1.0};
    const double eps = 0.05;
    const std::int64_t T = 50000;
    const std::int64_t reps = scale_replicates(10000, opt.scale);
    bool pass = true;
    double worst_excess = 0.0;
    nlohmann::json rows = nlohmann::json::array();
    int cell = 0;
    for (double N : {1000.0, 4000.0, 10000.0}) {
        PmaxPoint p = pmax_cell(s, N, N / 2.0, eps, T, reps, derive_seed(opt.seed, 200 + cell++));
        pass = pass && p.pmax <= p.bound;
        worst_excess = std::max(worst_excess, p.pmax - p.bound);
        rows.push_back({{"N", p.N}, {"p_max", p.pmax}, {"bound", p.bound}});
        if (N == 10000.0) {
            pass = pass && std::fabs(p.bound - 0.1) <= 1e-12 && p.pmax <= 0.1;
        }
    }
    CriterionResult r = make_result(
        "bounds.thm1_coverage",
        "constant reward, n0 = N/2: empirical P_max within the 5R/(4 eps^2 f(N)) bound; "
        "bound(N=1e4) = 0.1",
        pass, worst_excess, 0.0, opt.seed);
    r.details["rows"] = rows;
    r.details["replicates"] = reps;
    return r;
}

CriterionResult check_thm2_bounds(const CheckOptions& opt) {
    const std::int64_t T = 50000;
    const std::int64_t reps = scale_replicates(10000, opt.scale);
    bool pass = true;
    double worst_excess = 0.0;
    nlohmann::json rows = nlohmann::json::array();
    int cell = 0;

    // positive floor (decreasing to R = 1)
    for (double N : {1700.0, 10700.0}) {
        PmaxPoint p = pmax_cell(FloorDecay{1.0, 1.0, 0.999}, N, N / 2.0, 0.05, T, reps,
                                derive_seed(opt.seed, 500 + cell++));
        pass = pass && p.pmax <= p.bound;
        worst_excess = std::max(worst_excess, p.pmax - p.bound);
        rows.push_back({{"schedule", "floor_decay"}, {"N", p.N}, {"p_max", p.pmax}, {"bound", p.bound}});
    }
    // fast power decay
    for (double N : {2000.0, 11000.0}) {
        PmaxPoint p = pmax_cell(PowerDecay{1.0, 0.6}, N, 1.0, 0.05, T, reps,
                                derive_seed(opt.seed, 500 + cell++));
        pass = pass && p.pmax <= p.bound;
        worst_excess = std::max(worst_excess, p.pmax - p.bound);
        rows.push_back({{"schedule", "power_0.6"}, {"N", p.N}, {"p_max", p.pmax}, {"bound", p.bound}});
    }
    CriterionResult r = make_result(
        "bounds.thm2_bounds",
        "decreasing rewards: empirical P_max within the floor/fast-power Chebyshev bounds",
        pass, worst_excess, 0.0, opt.seed);
    r.details["rows"] = rows;
    r.details["replicates"] = reps;
    return r;
}

CriterionResult check_thm2_slow_power_slope(const CheckOptions& opt) {
    const double alpha = 0.1;
    const std::int64_t T = 50000;
    const std::int64_t reps = scale_replicates(10000, opt.scale);
    PmaxPoint p1 = pmax_cell(PowerDecay{1.0, alpha}, 2000.0, 1.0, 0.25, T, reps,
                             derive_seed(opt.seed, 540));
    PmaxPoint p2 = pmax_cell(PowerDecay{1.0, alpha}, 11000.0, 1.0, 0.25, T, reps,
                             derive_seed(opt.seed, 541));
    double slope = (std::log(p2.pmax) - std::log(p1.pmax)) / (std::log(p2.N) - std::log(p1.N));
    double limit = -alpha / (1.0 - alpha) + 0.15;
    CriterionResult r = make_result(
        "bounds.thm2_slow_power_slope",
        "slow power decay: log P_max vs log N slope within the N^(-alpha/(1-alpha)) scaling",
        slope <= limit, slope, limit, opt.seed);
    r.details = {{"p_max_N2000", p1.pmax}, {"p_max_N11000", p2.pmax}, {"replicates", reps}};
    return r;
}

// ---- limits suite ----------------------------------------------------------

EnsembleSummary medium_investor_run(double N, std::int64_t reps, std::uint64_t seed) {
    TrackedEnsembleConfig cfg;
    cfg.schedule = Constant{1.0};
    cfg.N = N;
    cfg.n0 = 1.0;
    cfg.T = 50000;
    cfg.replicates = reps;
    return run_tracked_ensemble(cfg, seed);
}

CriterionResult check_gamma_limit(const CheckOptions& opt) {
    const std::int64_t reps = scale_replicates(10000, opt.scale);
    auto exp_cdf = [](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x); };
    EnsembleSummary s100 = medium_investor_run(100.0, reps, derive_seed(opt.seed, 300));
    EnsembleSummary s200 = medium_investor_run(200.0, reps, derive_seed(opt.seed, 301));
    double ks100 = ks_distance(s100.terminal_ratios, exp_cdf);
    double ks200 = ks_distance(s200.terminal_ratios, exp_cdf);
    std::int64_t doubled = 0;
    for (double ratio : s100.terminal_ratios) doubled += ratio > 2.0;
    double p2 = static_cast<double>(doubled) / static_cast<double>(reps);
    const double e2 = std::exp(-2.0);

    bool pass = ks100 <= 0.05 && ks200 <= ks100 + 0.02 && std::fabs(p2 - e2) <= 0.02;
    CriterionResult r = make_result(
        "limits.gamma_ratio",
        "medium investor ratio is Exponential(1): KS <= 0.05, stable as N doubles, "
        "P(ratio > 2) near e^-2",
        pass, ks100, 0.05, opt.seed);
    r.details = {{"ks_N100", ks100}, {"ks_N200", ks200}, {"p_ratio_gt_2", p2},
                 {"exp_minus_2", e2}, {"replicates", reps}};
    return r;
}

CriterionResult check_poor_get_poorer(const CheckOptions& opt) {
    const std::int64_t reps = scale_replicates(10000, opt.scale);
    auto run = [&](double N, std::uint64_t seed) {
        TrackedEnsembleConfig cfg;
        cfg.schedule = Constant{1.0};
        cfg.N = N;
        cfg.n0 = std::pow(N, -1.1);
        cfg.T = 50000;
        cfg.replicates = reps;
        return run_tracked_ensemble(cfg, seed);
    };
    EnsembleSummary s100 = run(100.0, derive_seed(opt.seed, 310));
    EnsembleSummary s300 = run(300.0, derive_seed(opt.seed, 311));
    auto p_lt = [&](const EnsembleSummary& s) {
        std::int64_t n = 0;
        for (double ratio : s.terminal_ratios) n += ratio < 0.05;
        return static_cast<double>(n) / static_cast<double>(reps);
    };
    double p100 = p_lt(s100), p300 = p_lt(s300);
    double v100 = mean_var(s100.terminal_ratios).var;
    double v300 = mean_var(s300.terminal_ratios).var;
    bool pass = p300 > p100 && p300 > 0.5 && v300 > v100;
    CriterionResult r = make_result(
        "limits.poor_get_poorer",
        "n0 = N^-1.1: P(ratio < 0.05) grows with N and exceeds 1/2; var(ratio) grows",
        pass, p300, 0.5, opt.seed);
    r.details = {{"p_lt_N100", p100}, {"p_lt_N300", p300}, {"var_N100", v100},
                 {"var_N300", v300}, {"replicates", reps}};
    return r;
}

CriterionResult check_chaotic_centralization(const CheckOptions& opt) {
    const RewardSchedule s = Proportional{0.001, 1.1};
    const double N = 1000.0;
    const std::int64_t reps = scale_replicates(10000, opt.scale);
    bool pass = true;
    double worst_mid = 0.0;
    nlohmann::json rows = nlohmann::json::array();
    int cell = 0;
    for (double pi0 : {0.5, 0.25, 0.125}) {
        auto run_at = [&](std::int64_t horizon, std::uint64_t seed) {
            TrackedEnsembleConfig cfg;
            cfg.schedule = s;
            cfg.N = N;
            cfg.n0 = pi0 * N;
            cfg.T = horizon;
            cfg.replicates = reps;
            return run_tracked_ensemble(cfg, seed);
        };
        EnsembleSummary at_T = run_at(5000, derive_seed(opt.seed, 320 + cell));
        // diagnostic: same replicates continued to the absorption freeze
        EnsembleSummary absorbed = run_at(20000, derive_seed(opt.seed, 320 + cell));
        ++cell;
        auto extremes = [&](const EnsembleSummary& sum) {
            std::int64_t lo = 0, hi = 0;
            for (double sh : sum.terminal_shares) {
                lo += sh < 0.01;
                hi += sh > 0.99;
            }
            double n = static_cast<double>(reps);
            return std::pair<double, double>(static_cast<double>(hi) / n,
                                             1.0 - static_cast<double>(lo + hi) / n);
        };
        auto [hi_T, mid_T] = extremes(at_T);
        auto [hi_abs, mid_abs] = extremes(absorbed);
        double se4 = 4.0 * std::sqrt(pi0 * (1.0 - pi0) / static_cast<double>(reps));
        bool ok = std::fabs(hi_T - pi0) <= se4 && mid_T <= 0.01;
        pass = pass && ok;
        worst_mid = std::max(worst_mid, mid_T);
        rows.push_back({{"pi0", pi0},
                        {"frac_above_099_T5000", hi_T},
                        {"frac_mid_T5000", mid_T},
                        {"four_se", se4},
                        {"frac_above_099_absorbed", hi_abs},
                        {"frac_mid_absorbed", mid_abs},
                        {"absorbed_at_step", absorbed.last_step}});
    }
    CriterionResult r = make_result(
        "limits.chaotic_centralization",
        "geometric reward at T=5000: winner frequency matches pi0 within 4 SE and "
        "off-extreme mass <= 1% (absorption diagnostics in details)",
        pass, worst_mid, 0.01, opt.seed);
    r.details["rows"] = rows;
    r.details["replicates"] = reps;
    return r;
}

CriterionResult check_feature_growth(const CheckOptions& opt) {
    const std::int64_t T = 100000;
    const std::int64_t reps = scale_replicates(200, opt.scale);
    bool pass = true;
    nlohmann::json rows = nlohmann::json::array();
    double worst_rel = 0.0;
    int cell = 0;
    for (double theta : {2.0, 5.0}) {
        std::vector<double> k_ratio(static_cast<std::size_t>(reps));
        std::vector<double> first_w(static_cast<std::size_t>(reps));
        std::uint64_t base_seed = derive_seed(opt.seed, 700 + cell++);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (std::int64_t rep = 0; rep < reps; ++rep) {
            FeatureModelRun run =
                simulate_feature_model(DiffuseBase{}, Constant{1.0}, theta, T,
                                       derive_seed(base_seed, static_cast<std::uint64_t>(rep)));
            k_ratio[static_cast<std::size_t>(rep)] =
                static_cast<double>(run.ledger.K()) / std::log(static_cast<double>(T));
            first_w[static_cast<std::size_t>(rep)] =
                run.ledger.atoms().front().coins / (theta + run.ledger.reward_total());
        }
        MeanVar km = mean_var(k_ratio);
        MeanVar fm = mean_var(first_w);
        double expect_first = 1.0 / (theta + 1.0);
        bool k_ok = std::fabs(km.mean - theta) <= 0.1 * theta;
        bool f_ok = std::fabs(fm.mean - expect_first) <= 4.0 * fm.se;
        pass = pass && k_ok && f_ok;
        worst_rel = std::max(worst_rel, std::fabs(km.mean - theta) / theta);
        rows.push_back({{"theta", theta},
                        {"mean_KT_over_logT", km.mean},
                        {"se", km.se},
                        {"k_within_10pct", k_ok},
                        {"mean_first_weight", fm.mean},
                        {"expected_first_weight", expect_first},
                        {"first_weight_within_4se", f_ok}});
    }
    CriterionResult r = make_result(
        "limits.feature_growth",
        "diffuse feature model: K_T/log T within 10% of N/R; first-appearance weight mean "
        "within 4 SE of R/(N+R)",
        pass, worst_rel, 0.1, opt.seed);
    r.details["rows"] = rows;
    r.details["replicates"] = reps;
    return r;
}

// ---- dilution suite --------------------------------------------------------

CriterionResult check_dilution_beta(const CheckOptions& opt) {
    DynEnsembleConfig cfg;
    cfg.schedule = Constant{1.0};
    cfg.incumbent_coins = {1.0, 9.0};
    cfg.theta = 1.0;
    cfg.tracked_incumbent = 0;
    cfg.T = 50000;
    cfg.replicates = scale_replicates(10000, opt.scale);
    DynEnsembleSummary sum = run_dyn_ensemble(cfg, derive_seed(opt.seed, 800));

    double ks = ks_distance(sum.terminal_shares, [](double x) {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        return 1.0 - std::pow(1.0 - x, 10.0);  // Beta(1,10) cdf
    });
    std::vector<double> ratios(sum.terminal_shares);
    for (double& v : ratios) v /= sum.pi0;
    MeanVar mv = mean_var(ratios);
    const double target = 10.0 / 11.0;
    bool mean_ok = std::fabs(mv.mean - target) <= 4.0 * mv.se;
    bool pass = ks <= 0.05 && mean_ok;
    CriterionResult r = make_result(
        "dilution.beta_limit",
        "constant reward with dilution: terminal incumbent share is Beta(1,10) (KS <= 0.05) "
        "and mean ratio is within 4 SE of N/(N+theta)",
        pass, ks, 0.05, opt.seed);
    r.details = {{"ks", ks},        {"mean_ratio", mv.mean},          {"target", target},
                 {"se", mv.se},     {"replicates", cfg.replicates}};
    return r;
}

CriterionResult check_dilution_product(const CheckOptions& opt) {
    const double N = 10.0, theta = 1.0;
    const std::int64_t T = 50000;
    ExpectedLimit lim = expected_limit_ratio(Constant{1.0}, N, theta, T);
    double n_T = supply_after(Constant{1.0}, N, T);
    double telescoped = (N / (N + theta)) * ((n_T + theta) / n_T);
    double rd = rel_diff(lim.value, telescoped);
    CriterionResult r = make_result(
        "dilution.product_telescoping",
        "constant-reward truncated product equals the telescoped closed form to 1e-12",
        rd <= 1e-12 && lim.classification == DilutionClass::Positive, rd, 1e-12, opt.seed);
    r.details = {{"product", lim.value}, {"telescoped", telescoped}, {"tail_bound", lim.tail_bound}};
    return r;
}

CriterionResult check_dilution_fast_decay(const CheckOptions& opt) {
    const double N = 10.0, theta = 1.0;
    const RewardSchedule s = PowerDecay{1.0, 2.0};
    ExpectedLimit at_1e3 = expected_limit_ratio(s, N, theta, 1000);
    ExpectedLimit at_1e6 = expected_limit_ratio(s, N, theta, 1000000);
    // predicted decayed floor: product(1e3) shrunk by the tail bound (factors
    // are tiny here so 1 - x >= exp(-2x) applies)
    double floor_pred = at_1e3.value * std::exp(-2.0 * at_1e3.tail_bound);
    bool pass = at_1e6.value <= 10.0 * floor_pred &&
                at_1e6.value <= at_1e3.value &&
                at_1e6.classification == DilutionClass::Zero;
    CriterionResult r = make_result(
        "dilution.fast_decay_product",
        "t^-2 reward: truncated product at T=1e6 within 10x of the tail-bound-predicted decay "
        "of its T=1e3 value; classification Zero",
        pass, at_1e6.value, 10.0 * floor_pred, opt.seed);
    r.details = {{"product_1e3", at_1e3.value},
                 {"product_1e6", at_1e6.value},
                 {"tail_bound_1e3", at_1e3.tail_bound},
                 {"classification", at_1e6.classification == DilutionClass::Zero ? "zero" : "other"}};
    return r;
}

// ---- reproducibility -------------------------------------------------------

void append_suite(CheckReport& rep, Suite suite, const CheckOptions& opt);

CheckReport run_once(const CheckOptions& opt) {
    CheckReport rep;
    rep.suite = "all";
    rep.scale = opt.scale;
    rep.master_seed = opt.seed;
    append_suite(rep, Suite::Oracle, opt);
    append_suite(rep, Suite::Bounds, opt);
    append_suite(rep, Suite::Limits, opt);
    append_suite(rep, Suite::Dilution, opt);
    return rep;
}

CriterionResult check_thread_invariance(const CheckOptions& opt) {
    CheckOptions small = opt;
    small.scale = std::min(opt.scale, 1.0) * 0.02;
#ifdef _OPENMP
    int old_threads = omp_get_max_threads();
    omp_set_num_threads(1);
#endif
    std::string a = run_once(small).to_json().dump();
#ifdef _OPENMP
    omp_set_num_threads(8);
#endif
    std::string b = run_once(small).to_json().dump();
#ifdef _OPENMP
    omp_set_num_threads(old_threads);
#endif
    bool pass = a == b;
    CriterionResult r = make_result(
        "repro.thread_invariance",
        "check-all reports are byte-identical at 1 and 8 threads (thinned replicates)",
        pass, pass ? 0.0 : 1.0, 0.0, opt.seed);
    r.details = {{"report_bytes", static_cast<std::int64_t>(a.size())},
                 {"inner_scale", small.scale}};
    return r;
}

void append_suite(CheckReport& rep, Suite suite, const CheckOptions& opt) {
    switch (suite) {
        case Suite::Oracle:
            rep.criteria.push_back(check_variance_closed_form());
            rep.criteria.push_back(check_enumeration_moments());
            rep.criteria.push_back(check_central_identities());
            rep.criteria.push_back(check_exchangeability());
            break;
        case Suite::Bounds:
            rep.criteria.push_back(check_thm1_coverage(opt));
            rep.criteria.push_back(check_thm2_bounds(opt));
            rep.criteria.push_back(check_thm2_slow_power_slope(opt));
            break;
        case Suite::Limits:
            rep.criteria.push_back(check_gamma_limit(opt));
            rep.criteria.push_back(check_poor_get_poorer(opt));
            rep.criteria.push_back(check_chaotic_centralization(opt));
            rep.criteria.push_back(check_feature_growth(opt));
            break;
        case Suite::Dilution:
            rep.criteria.push_back(check_dilution_beta(opt));
            rep.criteria.push_back(check_dilution_product(opt));
            rep.criteria.push_back(check_dilution_fast_decay(opt));
            break;
        case Suite::All:
            break;
    }
}

}  // namespace

Suite suite_from_name(const std::string& name) {
    if (name == "oracle") return Suite::Oracle;
    if (name == "bounds") return Suite::Bounds;
    if (name == "limits") return Suite::Limits;
    if (name == "dilution") return Suite::Dilution;
    if (name == "all") return Suite::All;
    throw std::invalid_argument("unknown suite: " + name);
}

std::string suite_name(Suite s) {
    switch (s) {
        case Suite::Oracle: return "oracle";
        case Suite::Bounds: return "bounds";
        case Suite::Limits: return "limits";
        case Suite::Dilution: return "dilution";
        case Suite::All: return "all";
    }
    return "?";
}

bool CheckReport::all_pass() const {
    for (const auto& c : criteria)
        if (!c.pass) return false;
    return true;
}

nlohmann::json CheckReport::to_json() const {
    nlohmann::json j;
    j["suite"] = suite;
    j["scale"] = scale;
    j["master_seed"] = master_seed;
    j["all_pass"] = all_pass();
    j["criteria"] = nlohmann::json::array();
    for (const auto& c : criteria) {
        j["criteria"].push_back({{"id", c.id},
                                 {"description", c.description},
                                 {"pass", c.pass},
                                 {"measured", c.measured},
                                 {"tolerance", c.tolerance},
                                 {"seed", c.seed},
                                 {"details", c.details}});
    }
    return j;
}

std::string CheckReport::text_summary() const {
    std::ostringstream os;
    for (const auto& c : criteria) {
        os << (c.pass ? "[PASS] " : "[FAIL] ") << c.id << ": " << c.description
           << " (measured=" << c.measured << ", tol=" << c.tolerance << ")\n";
    }
    os << (all_pass() ? "ALL CRITERIA PASSED" : "CRITERIA FAILED") << " (" << criteria.size()
       << " checks)\n";
    return os.str();
}

CheckReport run_suite(Suite suite, const CheckOptions& opt) {
    if (suite == Suite::All) {
        CheckReport rep = run_once(opt);
        rep.criteria.push_back(check_thread_invariance(opt));
        return rep;
    }
    CheckReport rep;
    rep.suite = suite_name(suite);
    rep.scale = opt.scale;
    rep.master_seed = opt.seed;
    append_suite(rep, suite, opt);
    return rep;
}

}  // namespace stakelab
