#include "stakelab/schedule.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace stakelab {

void validate(const RewardSchedule& s) {
    std::visit(
        [](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Constant>) {
                if (!(v.R > 0.0)) throw std::invalid_argument("constant: R must be > 0");
            } else if constexpr (std::is_same_v<T, FloorDecay>) {
                if (!(v.floor > 0.0) || !(v.excess > 0.0))
                    throw std::invalid_argument("floor_decay: floor and excess must be > 0");
                if (!(v.q > 0.0 && v.q < 1.0))
                    throw std::invalid_argument("floor_decay: q must be in (0,1)");
            } else if constexpr (std::is_same_v<T, PowerDecay>) {
                if (!(v.c > 0.0) || !(v.alpha > 0.0))
                    throw std::invalid_argument("power_decay: c and alpha must be > 0");
            } else {
                if (!(v.rho > 0.0) || !(v.gamma > 0.0))
                    throw std::invalid_argument("proportional: rho and gamma must be > 0");
            }
        },
        s);
}

double reward_at(const RewardSchedule& s, std::int64_t t, double prev_supply) {
    if (t < 1) throw std::invalid_argument("reward_at: t must be >= 1");
    double r = std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return v.R;
            } else if constexpr (std::is_same_v<T, FloorDecay>) {
                return v.floor + v.excess * std::pow(v.q, static_cast<double>(t));
            } else if constexpr (std::is_same_v<T, PowerDecay>) {
                return v.c * std::pow(static_cast<double>(t), -v.alpha);
            } else {
                if (!(prev_supply > 0.0))
                    throw std::invalid_argument("reward_at: proportional needs prev_supply > 0");
                return v.rho * std::pow(prev_supply, v.gamma);
            }
        },
        s);
    if (!std::isfinite(r)) throw SupplyOverflow("reward_at: reward overflow");
    return r;
}

namespace {

struct SupplyCache {
    RewardSchedule schedule{Constant{1.0}};
    double N = -1.0;
    std::vector<double> supply;  // supply[t]

    bool matches(const RewardSchedule& s, double n) const {
        return N == n && schedule_to_json(schedule) == schedule_to_json(s);
    }
};

}  // namespace

double supply_after(const RewardSchedule& s, double N, std::int64_t t) {
    if (!(N > 0.0)) throw std::invalid_argument("supply_after: N must be > 0");
    if (t < 0) throw std::invalid_argument("supply_after: t must be >= 0");
    thread_local SupplyCache cache;
    if (!cache.matches(s, N)) {
        cache.schedule = s;
        cache.N = N;
        cache.supply.assign(1, N);
    }
    auto& sup = cache.supply;
    while (static_cast<std::int64_t>(sup.size()) <= t) {
        auto step = static_cast<std::int64_t>(sup.size());
        double next = sup.back() + reward_at(s, step, sup.back());
        if (!std::isfinite(next)) throw SupplyOverflow("supply_after: supply overflow");
        sup.push_back(next);
    }
    return sup[static_cast<std::size_t>(t)];
}

ScheduleTable build_schedule_table(const RewardSchedule& s, double N, std::int64_t T) {
    if (!(N > 0.0)) throw std::invalid_argument("build_schedule_table: N must be > 0");
    if (T < 0) throw std::invalid_argument("build_schedule_table: T must be >= 0");
    ScheduleTable tab;
    tab.initial_supply = N;
    tab.reward.assign(static_cast<std::size_t>(T) + 1, 0.0);
    tab.supply.assign(static_cast<std::size_t>(T) + 1, N);
    for (std::int64_t t = 1; t <= T; ++t) {
        double prev = tab.supply[static_cast<std::size_t>(t - 1)];
        double r;
        try {
            r = reward_at(s, t, prev);
        } catch (const SupplyOverflow&) {
            tab.freeze_step = t;
            break;
        }
        double next = prev + r;
        if (!std::isfinite(next) || next > kFreezeSupplyCap) {
            tab.freeze_step = t;
            break;
        }
        tab.reward[static_cast<std::size_t>(t)] = r;
        tab.supply[static_cast<std::size_t>(t)] = next;
    }
    if (tab.freeze_step > 0) {
        for (std::int64_t t = tab.freeze_step; t <= T; ++t) {
            tab.supply[static_cast<std::size_t>(t)] =
                tab.supply[static_cast<std::size_t>(tab.freeze_step - 1)];
        }
    }
    return tab;
}

nlohmann::json schedule_to_json(const RewardSchedule& s) {
    return std::visit(
        [](const auto& v) -> nlohmann::json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return {{"kind", "constant"}, {"R", v.R}};
            } else if constexpr (std::is_same_v<T, FloorDecay>) {
                return {{"kind", "floor_decay"}, {"floor", v.floor}, {"excess", v.excess}, {"q", v.q}};
            } else if constexpr (std::is_same_v<T, PowerDecay>) {
                return {{"kind", "power_decay"}, {"c", v.c}, {"alpha", v.alpha}};
            } else {
                return {{"kind", "proportional"}, {"rho", v.rho}, {"gamma", v.gamma}};
            }
        },
        s);
}

RewardSchedule schedule_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    RewardSchedule s;
    if (kind == "constant") {
        s = Constant{j.at("R").get<double>()};
    } else if (kind == "floor_decay") {
        s = FloorDecay{j.at("floor").get<double>(), j.at("excess").get<double>(),
                       j.at("q").get<double>()};
    } else if (kind == "power_decay") {
        s = PowerDecay{j.at("c").get<double>(), j.at("alpha").get<double>()};
    } else if (kind == "proportional") {
        s = Proportional{j.at("rho").get<double>(), j.at("gamma").get<double>()};
    } else {
        throw std::invalid_argument("schedule_from_json: unknown kind '" + kind + "'");
    }
    validate(s);
    return s;
}

std::string schedule_name(const RewardSchedule& s) {
    return schedule_to_json(s).at("kind").get<std::string>();
}

}  // namespace stakelab
