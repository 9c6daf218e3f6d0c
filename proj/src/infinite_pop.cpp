#include "stakelab/infinite_pop.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "stakelab/rng.hpp"
#include "stakelab/special_functions.hpp"

namespace stakelab {

namespace {

std::uint64_t feature_key(double feature) { return std::bit_cast<std::uint64_t>(feature); }

// Euler-Maclaurin tail sum_{j >= m} j^{-s}, m >= 2.
double zeta_tail(double s, double m) {
    return std::pow(m, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(m, -s) +
           s / 12.0 * std::pow(m, -s - 1.0);
}

constexpr std::size_t kZetaPrefix = 64;

}  // namespace

DiscreteWeights DiscreteWeights::geometric(double N, double q) {
    if (!(N > 0.0) || !(q > 0.0 && q < 1.0))
        throw std::invalid_argument("geometric weights: N > 0, q in (0,1)");
    DiscreteWeights w;
    w.impl_ = Geometric{q};
    w.total_ = N;
    return w;
}

DiscreteWeights DiscreteWeights::zeta_like(double N, double s) {
    if (!(N > 0.0) || !(s > 1.0)) throw std::invalid_argument("zeta weights: N > 0, s > 1");
    DiscreteWeights w;
    Zeta z;
    z.s = s;
    z.norm = N / zeta(s);
    z.prefix.assign(kZetaPrefix + 1, 0.0);
    for (std::size_t k = 1; k <= kZetaPrefix; ++k)
        z.prefix[k] = z.prefix[k - 1] + std::pow(static_cast<double>(k), -s);
    w.impl_ = std::move(z);
    w.total_ = N;
    return w;
}

DiscreteWeights DiscreteWeights::finite(std::vector<double> weights) {
    if (weights.empty()) throw std::invalid_argument("finite weights: empty");
    DiscreteWeights w;
    Finite f;
    f.prefix.reserve(weights.size());
    double cum = 0.0;
    for (double x : weights) {
        if (!(x > 0.0)) throw std::invalid_argument("finite weights: must be positive");
        cum += x;
        f.prefix.push_back(cum);
    }
    f.weights = std::move(weights);
    w.total_ = cum;
    w.impl_ = std::move(f);
    return w;
}

double DiscreteWeights::weight(std::int64_t k) const {
    if (k < 1) return 0.0;
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Geometric>) {
                return total_ * (1.0 - v.q) * std::pow(v.q, static_cast<double>(k - 1));
            } else if constexpr (std::is_same_v<T, Zeta>) {
                return v.norm * std::pow(static_cast<double>(k), -v.s);
            } else {
                auto i = static_cast<std::size_t>(k - 1);
                return i < v.weights.size() ? v.weights[i] : 0.0;
            }
        },
        impl_);
}

double DiscreteWeights::cdf_mass(std::int64_t k) const {
    if (k < 1) return 0.0;
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Geometric>) {
                return total_ * (1.0 - std::pow(v.q, static_cast<double>(k)));
            } else if constexpr (std::is_same_v<T, Zeta>) {
                auto idx = static_cast<std::size_t>(k);
                double partial = idx <= kZetaPrefix
                                     ? v.prefix[idx]
                                     : zeta(v.s) - zeta_tail(v.s, static_cast<double>(k) + 1.0);
                return v.norm * partial;
            } else {
                auto i = std::min(static_cast<std::size_t>(k), v.prefix.size());
                return i == 0 ? 0.0 : v.prefix[i - 1];
            }
        },
        impl_);
}

std::int64_t DiscreteWeights::quantile(double v) const {
    if (v < 0.0) return 1;
    return std::visit(
        [&](const auto& im) -> std::int64_t {
            using T = std::decay_t<decltype(im)>;
            if constexpr (std::is_same_v<T, Geometric>) {
                double frac = 1.0 - v / total_;
                if (frac <= 0.0) return 1 + static_cast<std::int64_t>(1e15);  // beyond any draw
                auto k = static_cast<std::int64_t>(
                    std::floor(std::log(frac) / std::log(im.q)));
                if (k < 0) k = 0;
                // fp guard: walk to the true boundary
                while (k > 0 && cdf_mass(k) > v) --k;
                while (cdf_mass(k + 1) <= v) ++k;
                return k + 1;
            } else if constexpr (std::is_same_v<T, Zeta>) {
                std::int64_t lo = 1, hi = 2;
                while (cdf_mass(hi) <= v) {
                    lo = hi + 1;
                    hi *= 2;
                    if (hi > (std::int64_t{1} << 60)) break;
                }
                while (lo < hi) {
                    std::int64_t mid = lo + (hi - lo) / 2;
                    if (cdf_mass(mid) > v)
                        hi = mid;
                    else
                        lo = mid + 1;
                }
                return lo;
            } else {
                auto it = std::upper_bound(im.prefix.begin(), im.prefix.end(), v);
                if (it == im.prefix.end()) return static_cast<std::int64_t>(im.prefix.size());
                return static_cast<std::int64_t>(it - im.prefix.begin()) + 1;
            }
        },
        impl_);
}

std::int64_t DiscreteWeights::support_end() const {
    if (const auto* f = std::get_if<Finite>(&impl_))
        return static_cast<std::int64_t>(f->weights.size());
    return 0;
}

double base_total_mass(const BaseMeasure& base) {
    if (const auto* d = std::get_if<DiscreteWeights>(&base)) return d->total();
    throw std::invalid_argument("base_total_mass: diffuse base carries no coin mass of its own");
}

double AtomLedger::recomputed_reward_total() const {
    double s = 0.0;
    for (const Atom& a : atoms_) s += a.coins;
    return s;
}

std::optional<std::size_t> AtomLedger::find(double feature) const {
    auto it = by_feature_.find(feature_key(feature));
    if (it == by_feature_.end()) return std::nullopt;
    return it->second;
}

std::size_t AtomLedger::credit(double feature, double reward, bool fresh_draw) {
    t_ += 1;
    fresh_draws_ += fresh_draw ? 1 : 0;
    reward_total_ += reward;
    auto [it, inserted] = by_feature_.try_emplace(feature_key(feature), atoms_.size());
    if (inserted) {
        atoms_.push_back(Atom{feature, reward, 1, t_});
    } else {
        if (fresh_draw) fresh_collision_ = true;
        Atom& a = atoms_[it->second];
        a.coins += reward;
        a.count += 1;
    }
    return it->second;
}

PredictiveOutcome bm_predictive_step(AtomLedger& ledger, const BaseMeasure& base, double N,
                                     const RewardSchedule& s, double u_select, double u_fresh) {
    const std::int64_t t = ledger.steps() + 1;
    const double prev_supply = N + ledger.reward_total();
    const double reward = reward_at(s, t, prev_supply);

    PredictiveOutcome out;
    const double threshold = u_select * prev_supply;
    double cum = 0.0;
    bool picked = false;
    for (const Atom& a : ledger.atoms()) {
        cum += a.coins;
        if (threshold < cum) {
            out.feature = a.feature;
            picked = true;
            break;
        }
    }
    if (!picked) {
        out.fresh_draw = true;
        out.feature = std::visit(
            [&](const auto& b) -> double {
                using T = std::decay_t<decltype(b)>;
                if constexpr (std::is_same_v<T, DiffuseBase>)
                    return b.draw(u_fresh);
                else
                    return static_cast<double>(b.draw(u_fresh));
            },
            base);
    }
    bool existed = ledger.find(out.feature).has_value();
    out.atom_index = ledger.credit(out.feature, reward, out.fresh_draw);
    out.new_feature = !existed;
    return out;
}

double bm_fresh_probability(const AtomLedger& ledger, double N) {
    return N / (N + ledger.reward_total());
}

double bm_step_probability(const AtomLedger& ledger, const DiscreteWeights& base, double feature) {
    double mass = base.weight(static_cast<std::int64_t>(feature));
    if (auto idx = ledger.find(feature)) mass += ledger.atoms()[*idx].coins;
    return mass / (base.total() + ledger.reward_total());
}

FeatureModelRun simulate_feature_model(const BaseMeasure& base, const RewardSchedule& s, double N,
                                       std::int64_t T, std::uint64_t seed, bool record_features) {
    if (T < 1) throw std::invalid_argument("simulate_feature_model: T >= 1");
    if (!(N > 0.0)) throw std::invalid_argument("simulate_feature_model: N > 0");
    FeatureModelRun run;
    if (record_features) run.features.reserve(static_cast<std::size_t>(T));
    Rng rng(seed);
    std::int64_t next_pow = 1;
    for (std::int64_t t = 1; t <= T; ++t) {
        double u_select = rng.u01();
        double u_fresh = rng.u01();
        PredictiveOutcome o = bm_predictive_step(run.ledger, base, N, s, u_select, u_fresh);
        if (record_features) run.features.push_back(o.feature);
        if (t == next_pow || t == T) {
            run.k_times.push_back(t);
            run.k_counts.push_back(run.ledger.K());
            if (t == next_pow) next_pow *= 2;
        }
    }
    return run;
}

Relabeling relabel_by_appearance(std::span<const double> features) {
    Relabeling out;
    out.k_series.reserve(features.size());
    std::unordered_map<std::uint64_t, std::size_t> seen;
    for (std::size_t i = 0; i < features.size(); ++i) {
        auto [it, inserted] = seen.try_emplace(feature_key(features[i]), out.distinct.size());
        if (inserted) {
            out.first_indices.push_back(static_cast<std::int64_t>(i) + 1);
            out.distinct.push_back(features[i]);
            out.counts.push_back(0);
        }
        out.counts[it->second] += 1;
        out.k_series.push_back(static_cast<std::int64_t>(out.distinct.size()));
    }
    return out;
}

SpeciesRuleReport species_rule_check(const SpeciesRule& rule,
                                     std::span<const std::vector<std::int64_t>> histograms,
                                     double tol) {
    SpeciesRuleReport rep;
    for (const auto& h : histograms) {
        for (std::int64_t c : h) {
            if (c <= 0) {
                rep.valid = false;
                rep.witness = h;
                rep.reason = "histogram entries must be positive";
                return rep;
            }
        }
        std::vector<double> p = rule(h);
        if (p.size() != h.size() + 1) {
            rep.valid = false;
            rep.witness = h;
            rep.reason = "rule must return k+1 probabilities";
            return rep;
        }
        double sum = 0.0;
        for (double pi : p) {
            if (pi < 0.0) {
                rep.valid = false;
                rep.witness = h;
                rep.reason = "negative probability";
                return rep;
            }
            sum += pi;
        }
        if (std::fabs(sum - 1.0) > tol) {
            rep.valid = false;
            rep.witness = h;
            rep.reason = "probabilities sum to " + std::to_string(sum);
            return rep;
        }
    }
    return rep;
}

DiscreteInfiniteTrajectory simulate_discrete_infinite(const DiscreteWeights& base,
                                                      const RewardSchedule& s, std::int64_t T,
                                                      std::span<const std::int64_t> tracked,
                                                      std::int64_t snapshot_stride,
                                                      std::uint64_t seed) {
    if (T < 0) throw std::invalid_argument("simulate_discrete_infinite: T >= 0");
    DiscreteInfiniteTrajectory out;
    out.shares.resize(tracked.size());

    // materialized investors, ascending index; coins include base weight
    std::vector<std::pair<std::int64_t, double>> mat;
    if (base.is_finite_support()) {
        std::int64_t K = base.support_end();
        mat.reserve(static_cast<std::size_t>(K));
        for (std::int64_t k = 1; k <= K; ++k) mat.emplace_back(k, base.weight(k));
    }

    double supply = base.total();
    ScheduleTable table = build_schedule_table(s, supply, T);
    std::int64_t last = table.last_step(T);
    out.truncated = last < T;

    auto coins_of = [&](std::int64_t k) -> double {
        auto it = std::lower_bound(mat.begin(), mat.end(), k,
                                   [](const auto& p, std::int64_t key) { return p.first < key; });
        if (it != mat.end() && it->first == k) return it->second;
        return base.weight(k);
    };
    auto snapshot = [&](std::int64_t t) {
        out.times.push_back(t);
        for (std::size_t i = 0; i < tracked.size(); ++i)
            out.shares[i].push_back(coins_of(tracked[i]) / supply);
    };
    snapshot(0);

    Rng rng(seed);
    for (std::int64_t t = 1; t <= last; ++t) {
        const double reward = table.reward[static_cast<std::size_t>(t)];
        const double threshold = rng.u01() * supply;
        double cum = 0.0;
        std::int64_t prev = 0;
        std::int64_t selected = 0;
        bool done = false;
        for (std::size_t i = 0; i < mat.size() && !done; ++i) {
            auto [k, coins] = mat[i];
            double gap = base.cdf_mass(k - 1) - base.cdf_mass(prev);
            if (threshold < cum + gap) {
                selected = base.quantile(threshold - cum + base.cdf_mass(prev));
                selected = std::clamp<std::int64_t>(selected, prev + 1, k - 1);
                done = true;
                break;
            }
            cum += gap;
            cum += coins;
            if (threshold < cum) {
                selected = k;
                done = true;
            }
            prev = k;
        }
        if (!done) {
            // tail beyond the last materialized investor
            double target = threshold - cum + base.cdf_mass(prev);
            double cap = std::nextafter(base.total(), 0.0);
            if (!(target < cap)) target = cap;  // u -> 1 rounding edge
            selected = base.quantile(target);
            if (selected <= prev) selected = prev + 1;
            if (base.is_finite_support()) selected = std::min(selected, base.support_end());
        }
        auto it = std::lower_bound(mat.begin(), mat.end(), selected,
                                   [](const auto& p, std::int64_t key) { return p.first < key; });
        if (it != mat.end() && it->first == selected) {
            it->second += reward;
        } else {
            mat.insert(it, {selected, base.weight(selected) + reward});
        }
        supply += reward;
        bool at_stride = snapshot_stride > 0 && t % snapshot_stride == 0;
        if (at_stride || t == last) snapshot(t);
    }
    out.final_supply = supply;
    out.materialized = static_cast<std::int64_t>(mat.size());
    return out;
}

}  // namespace stakelab
