#include <cmath>

#include "doctest.h"
#include "stakelab/infinite_pop.hpp"
#include "stakelab/rng.hpp"
#include "stakelab/stats.hpp"
#include "stakelab/urn.hpp"

using namespace stakelab;

TEST_SUITE_BEGIN("infinite_pop");

TEST_CASE("first step always draws fresh from the base") {
    AtomLedger ledger;
    PredictiveOutcome o =
        bm_predictive_step(ledger, DiffuseBase{}, 4.0, Constant{1.0}, 0.9999, 0.37);
    CHECK(o.fresh_draw);
    CHECK(o.new_feature);
    CHECK(o.feature == 0.37);  // uniform base: identity inverse cdf
    CHECK(ledger.K() == 1);
    CHECK(ledger.atoms()[0].first_index == 1);
}

TEST_CASE("fresh probability under constant reward is (N/R)/((N/R)+t)") {
    const double N = 3.0;
    FeatureModelRun run = simulate_feature_model(DiffuseBase{}, Constant{1.0}, N, 50, 17);
    CHECK(bm_fresh_probability(run.ledger, N) == doctest::Approx(3.0 / 53.0).epsilon(1e-14));
}

TEST_CASE("discrete base reproduces the urn's predictive law") {
    DiscreteWeights base = DiscreteWeights::finite({2.0, 3.0});
    AtomLedger ledger;
    const RewardSchedule s = Constant{1.0};
    // replay the fixed pattern 1,1,2 and check the closed-form step law
    auto credit = [&](double feature) {
        double reward = reward_at(s, ledger.steps() + 1, base.total() + ledger.reward_total());
        ledger.credit(feature, reward, false);
    };
    CHECK(bm_step_probability(ledger, base, 1.0) == doctest::Approx(2.0 / 5.0).epsilon(1e-15));
    credit(1.0);
    CHECK(bm_step_probability(ledger, base, 1.0) == doctest::Approx(3.0 / 6.0).epsilon(1e-15));
    CHECK(bm_step_probability(ledger, base, 2.0) == doctest::Approx(3.0 / 6.0).epsilon(1e-15));
    credit(1.0);
    credit(2.0);
    CHECK(bm_step_probability(ledger, base, 1.0) == doctest::Approx(4.0 / 8.0).epsilon(1e-15));
    CHECK(bm_step_probability(ledger, base, 2.0) == doctest::Approx(4.0 / 8.0).epsilon(1e-15));
}

TEST_CASE("order-of-appearance relabeling") {
    std::vector<double> xs = {0.1, 0.1, 0.3, 0.2, 0.2, 0.3, 0.1, 0.4};
    Relabeling r = relabel_by_appearance(xs);
    CHECK(r.first_indices == std::vector<std::int64_t>{1, 3, 4, 8});
    CHECK(r.distinct == std::vector<double>{0.1, 0.3, 0.2, 0.4});
    CHECK(r.counts == std::vector<std::int64_t>{3, 2, 2, 1});
    CHECK(r.k_series == std::vector<std::int64_t>{1, 1, 2, 3, 3, 3, 3, 4});

    Relabeling empty = relabel_by_appearance(std::vector<double>{});
    CHECK(empty.first_indices.empty());
    CHECK(empty.k_series.empty());

    std::vector<double> distinct = {0.5, 0.6, 0.7, 0.8};
    Relabeling d = relabel_by_appearance(distinct);
    CHECK(d.first_indices == std::vector<std::int64_t>{1, 2, 3, 4});
    CHECK(d.k_series == std::vector<std::int64_t>{1, 2, 3, 4});
}

TEST_CASE("species-sampling rule validation") {
    const double theta = 4.0;  // N/R
    SpeciesRule dirichlet_rule = [theta](const std::vector<std::int64_t>& n) {
        double t = 1.0;
        for (std::int64_t c : n) t += static_cast<double>(c);
        std::vector<double> p;
        for (std::int64_t c : n) p.push_back(static_cast<double>(c) / (theta + t - 1.0));
        p.push_back(theta / (theta + t - 1.0));
        return p;
    };
    const double alpha = 0.3;
    SpeciesRule py_rule = [theta, alpha](const std::vector<std::int64_t>& n) {
        double t = 1.0;
        for (std::int64_t c : n) t += static_cast<double>(c);
        double k = static_cast<double>(n.size());
        std::vector<double> p;
        for (std::int64_t c : n) p.push_back((static_cast<double>(c) - alpha) / (theta + t - 1.0));
        p.push_back((theta + k * alpha) / (theta + t - 1.0));
        return p;
    };
    std::vector<std::vector<std::int64_t>> histograms = {{1}, {3}, {2, 1}, {5, 1, 2}, {1, 1, 1, 4}};

    CHECK(species_rule_check(dirichlet_rule, histograms).valid);
    CHECK(species_rule_check(py_rule, histograms).valid);

    SpeciesRule broken = [](const std::vector<std::int64_t>& n) {
        return std::vector<double>(n.size() + 1, 0.6);
    };
    SpeciesRuleReport rep = species_rule_check(broken, histograms);
    CHECK_FALSE(rep.valid);
    REQUIRE(rep.witness.has_value());
    CHECK(*rep.witness == std::vector<std::int64_t>{1});
}

TEST_CASE("feature model ledger invariants") {
    const double N = 2.0;
    const std::int64_t T = 3000;
    FeatureModelRun run = simulate_feature_model(DiffuseBase{}, Constant{1.0}, N, T, 29, true);
    const AtomLedger& led = run.ledger;

    // conservation: per-atom rewards re-sum to the running total
    CHECK(std::fabs(led.reward_total() - led.recomputed_reward_total()) <=
          1e-12 * led.reward_total());
    CHECK(led.reward_total() == doctest::Approx(static_cast<double>(T)).epsilon(1e-12));

    std::int64_t count_sum = 0;
    for (const Atom& a : led.atoms()) count_sum += a.count;
    CHECK(count_sum == T);

    // diffuse base: fresh draws never collide, so fresh draws == K_t
    CHECK_FALSE(led.fresh_collision_seen());
    CHECK(led.fresh_draws() == led.K());

    // appearance indices strictly increase
    for (std::size_t j = 1; j < led.atoms().size(); ++j)
        CHECK(led.atoms()[j].first_index > led.atoms()[j - 1].first_index);

    // ledger bookkeeping matches a replay over the recorded features
    Relabeling r = relabel_by_appearance(run.features);
    REQUIRE(r.distinct.size() == static_cast<std::size_t>(led.K()));
    for (std::size_t j = 0; j < r.distinct.size(); ++j) {
        CHECK(r.distinct[j] == led.atoms()[j].feature);
        CHECK(r.first_indices[j] == led.atoms()[j].first_index);
        CHECK(r.counts[j] == led.atoms()[j].count);
    }

    // K snapshots on the powers-of-two grid
    REQUIRE(!run.k_times.empty());
    CHECK(run.k_times.front() == 1);
    CHECK(run.k_times.back() == T);
    for (std::size_t i = 0; i < run.k_times.size(); ++i) {
        auto t = static_cast<std::size_t>(run.k_times[i]) - 1;
        CHECK(run.k_counts[i] == r.k_series[t]);
    }
}

TEST_CASE("discrete infinite urn couples exactly with the finite urn") {
    for (const RewardSchedule& s :
         {RewardSchedule{Constant{1.0}}, RewardSchedule{FloorDecay{1.0, 1.0, 0.999}}}) {
        DiscreteWeights base = DiscreteWeights::finite({1.0, 2.0, 3.0, 4.0});
        std::vector<std::int64_t> tracked = {1, 2};
        DiscreteInfiniteTrajectory inf =
            simulate_discrete_infinite(base, s, 500, tracked, 100, 888);
        Trajectory fin = simulate(s, {1.0, 2.0, 3.0, 4.0}, 500, SimulateOptions{{0, 1}, 100, false}, 888);
        REQUIRE(inf.times == fin.times);
        CHECK(inf.shares[0] == fin.shares[0]);  // bitwise coupling
        CHECK(inf.shares[1] == fin.shares[1]);
    }
}

TEST_CASE("weights concentrated on one investor pin its share at one") {
    DiscreteWeights base = DiscreteWeights::finite({5.0});
    std::vector<std::int64_t> tracked = {1};
    DiscreteInfiniteTrajectory t = simulate_discrete_infinite(base, Constant{1.0}, 200, tracked, 0, 3);
    for (double s : t.shares[0]) CHECK(s == 1.0);
}

TEST_CASE("geometric and zeta-like weight rules") {
    DiscreteWeights geo = DiscreteWeights::geometric(20.0, 0.95);
    CHECK(geo.weight(1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(geo.total() == 20.0);
    // cdf/quantile consistency
    for (std::int64_t k : {1, 2, 7, 40, 300}) {
        double below = geo.cdf_mass(k) - 1e-9;
        CHECK(geo.quantile(below) == k);
        CHECK(geo.cdf_mass(k) > geo.cdf_mass(k - 1));
    }
    DiscreteWeights zeta = DiscreteWeights::zeta_like(10.0, 1.5);
    double prev = 0.0;
    for (std::int64_t k : {1, 2, 5, 50, 500, 5000}) {
        double c = zeta.cdf_mass(k);
        CHECK(c > prev);
        CHECK(c < 10.0);
        CHECK(zeta.quantile(c - 1e-9) == k);
        prev = c;
    }
    // weights sum toward the total (tail at k is ~ 2/sqrt(k) relative to zeta(1.5))
    CHECK(zeta.cdf_mass(2000000) == doctest::Approx(10.0).epsilon(1e-3));
    CHECK(zeta.cdf_mass(200000000) == doctest::Approx(10.0).epsilon(1e-4));

    // sampling distribution sanity for the zeta rule
    Rng rng(12);
    std::int64_t ones = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) ones += zeta.draw(rng.u01()) == 1;
    double p1 = zeta.weight(1) / zeta.total();
    double se = std::sqrt(p1 * (1.0 - p1) / n);
    CHECK(std::fabs(static_cast<double>(ones) / n - p1) <= 4.0 * se);
}

TEST_CASE("discrete infinite tracked ratio is consistent with the gamma limit") {
    // geometric weights with n_{1,0} = 1, N = 20; the tracked ratio at a long
    // horizon follows 20 * Beta(1, 19), i.e. nearly Exponential(1).
    DiscreteWeights base = DiscreteWeights::geometric(20.0, 0.95);
    const std::int64_t T = 10000;
    const int reps = 300;
    std::vector<double> ratios(reps);
    std::vector<std::int64_t> tracked = {1};
    for (int r = 0; r < reps; ++r) {
        DiscreteInfiniteTrajectory t = simulate_discrete_infinite(
            base, Constant{1.0}, T, tracked, 0, derive_seed(991, static_cast<std::uint64_t>(r)));
        ratios[static_cast<std::size_t>(r)] = t.shares[0].back() / (1.0 / 20.0);
        CHECK(t.materialized > 1);
    }
    double d = ks_distance(ratios, [](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x); });
    CHECK(d < 0.12);
}

TEST_SUITE_END();
