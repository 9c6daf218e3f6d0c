#pragma once
// Infinite-population selection models: the reward-weighted predictive rule
// over a base measure (discrete over the naturals, or diffuse on [0,1]),
// order-of-appearance bookkeeping, species-sampling rule validation, and the
// lazily-materialized discrete infinite urn.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <variant>
#include <vector>

#include "stakelab/schedule.hpp"

namespace stakelab {

// Diffuse probability measure on [0,1] given by its inverse CDF. The
// inverse CDF must be strictly increasing (atomless measure): features only
// ever recur through atom selection, never through fresh-draw collisions at
// double precision, and the ledger asserts that.
struct DiffuseBase {
    std::function<double(double)> inv_cdf;  // empty: uniform

    double draw(double u) const { return inv_cdf ? inv_cdf(u) : u; }
};

// Positive weights n_{k,0} over k = 1,2,... with a finite total, an analytic
// CDF and O(1) expected-time inversion.
class DiscreteWeights {
  public:
    // n_{k,0} = N (1-q) q^{k-1}
    static DiscreteWeights geometric(double N, double q);
    // n_{k,0} proportional to k^{-s}, s > 1, scaled to total N
    static DiscreteWeights zeta_like(double N, double s);
    // explicit weights on 1..K
    static DiscreteWeights finite(std::vector<double> weights);

    double total() const { return total_; }
    double weight(std::int64_t k) const;     // n_{k,0}
    double cdf_mass(std::int64_t k) const;   // sum_{j <= k} n_{j,0}; cdf_mass(0) = 0
    std::int64_t quantile(double v) const;   // min k with cdf_mass(k) > v
    std::int64_t draw(double u) const { return quantile(u * total_); }
    bool is_finite_support() const { return std::holds_alternative<Finite>(impl_); }
    std::int64_t support_end() const;  // K for finite support, 0 for infinite

  private:
    struct Geometric {
        double q;
    };
    struct Zeta {
        double s;
        double norm;                     // total / zeta(s)
        std::vector<double> prefix;      // exact partial sums of j^{-s}
    };
    struct Finite {
        std::vector<double> weights;
        std::vector<double> prefix;
    };
    std::variant<Geometric, Zeta, Finite> impl_;
    double total_ = 0.0;
};

using BaseMeasure = std::variant<DiffuseBase, DiscreteWeights>;

double base_total_mass(const BaseMeasure& base);

// Reward atoms keyed by feature with order-of-appearance bookkeeping.
struct Atom {
    double feature = 0.0;
    double coins = 0.0;  // accumulated reward
    std::int64_t count = 0;
    std::int64_t first_index = 0;  // M_j
};

class AtomLedger {
  public:
    const std::vector<Atom>& atoms() const { return atoms_; }
    std::int64_t K() const { return static_cast<std::int64_t>(atoms_.size()); }
    std::int64_t steps() const { return t_; }
    std::int64_t fresh_draws() const { return fresh_draws_; }
    double reward_total() const { return reward_total_; }
    double recomputed_reward_total() const;
    bool fresh_collision_seen() const { return fresh_collision_; }
    std::optional<std::size_t> find(double feature) const;

    // Credits `reward` to `feature`, creating the atom on first appearance.
    // Returns the atom index.
    std::size_t credit(double feature, double reward, bool fresh_draw);

  private:
    std::vector<Atom> atoms_;
    std::unordered_map<std::uint64_t, std::size_t> by_feature_;
    double reward_total_ = 0.0;
    std::int64_t t_ = 0;
    std::int64_t fresh_draws_ = 0;
    bool fresh_collision_ = false;
};

struct PredictiveOutcome {
    double feature = 0.0;
    bool fresh_draw = false;   // drawn from the base measure
    bool new_feature = false;  // first appearance (fresh and no collision)
    std::size_t atom_index = 0;
};

// One step of the reward-weighted predictive rule: with probability
// N/(N + sum of past rewards) draw a fresh feature from the base via
// u_fresh, otherwise select an existing atom proportionally to accumulated
// reward (appearance order, cumulative scan on u_select). The step reward is
// credited to the selected feature. N is the base coin mass.
PredictiveOutcome bm_predictive_step(AtomLedger& ledger, const BaseMeasure& base, double N,
                                     const RewardSchedule& s, double u_select, double u_fresh);

// Exact next-step selection probabilities (used by the exchangeability
// enumeration). Discrete-base features are integer-valued doubles.
double bm_step_probability(const AtomLedger& ledger, const DiscreteWeights& base, double feature);
double bm_fresh_probability(const AtomLedger& ledger, double N);

struct FeatureModelRun {
    std::vector<double> features;  // empty unless record_features
    AtomLedger ledger;
    std::vector<std::int64_t> k_times;   // powers of two plus the endpoint
    std::vector<std::int64_t> k_counts;  // K_t at those times
};

// Two u01 draws per step (u_select then u_fresh, both always consumed).
FeatureModelRun simulate_feature_model(const BaseMeasure& base, const RewardSchedule& s, double N,
                                       std::int64_t T, std::uint64_t seed,
                                       bool record_features = false);

struct Relabeling {
    std::vector<std::int64_t> first_indices;  // M_j, 1-based
    std::vector<double> distinct;             // X~_j in appearance order
    std::vector<std::int64_t> k_series;       // K_t for t = 1..n
    std::vector<std::int64_t> counts;         // N_{j,n} per distinct feature
};

Relabeling relabel_by_appearance(std::span<const double> features);

// Species-sampling rule validation: for each histogram n (positive counts
// over k features), rule(n) must return k+1 nonnegative probabilities
// summing to one (existing features plus a fresh one).
struct SpeciesRuleReport {
    bool valid = true;
    std::optional<std::vector<std::int64_t>> witness;
    std::string reason;
};

using SpeciesRule = std::function<std::vector<double>(const std::vector<std::int64_t>&)>;

SpeciesRuleReport species_rule_check(const SpeciesRule& rule,
                                     std::span<const std::vector<std::int64_t>> histograms,
                                     double tol = 1e-12);

// Discrete infinite urn, lazily materializing selected investors. Selection
// uses a single uniform per step over the ascending-index layout (gaps of
// never-selected investors contribute analytic CDF blocks), so with a
// finite-support base it reproduces the finite urn draw for draw.
struct DiscreteInfiniteTrajectory {
    std::vector<std::int64_t> times;
    std::vector<std::vector<double>> shares;  // per tracked index
    double final_supply = 0.0;
    std::int64_t materialized = 0;
    bool truncated = false;
};

DiscreteInfiniteTrajectory simulate_discrete_infinite(const DiscreteWeights& base,
                                                      const RewardSchedule& s, std::int64_t T,
                                                      std::span<const std::int64_t> tracked,
                                                      std::int64_t snapshot_stride,
                                                      std::uint64_t seed);

}  // namespace stakelab
