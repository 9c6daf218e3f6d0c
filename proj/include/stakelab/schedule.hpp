#pragma once
// Reward rules R_t and the induced supply recursion N_t = N_{t-1} + R_t.
// Rewards are 1-indexed: R_1 is the first minted reward.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace stakelab {

struct SupplyOverflow : std::runtime_error {
    explicit SupplyOverflow(const std::string& what) : std::runtime_error(what) {}
};

struct Constant {
    double R;  // coins per step
};

// R_t = floor + excess * q^t, decreasing to `floor`.
struct FloorDecay {
    double floor;
    double excess;
    double q;  // in (0,1)
};

// R_t = c * t^{-alpha}
struct PowerDecay {
    double c;
    double alpha;
};

// R_t = rho * N_{t-1}^gamma, non-decreasing; gamma > 1 is the geometric
// (absorbing) regime.
struct Proportional {
    double rho;
    double gamma;
};

using RewardSchedule = std::variant<Constant, FloorDecay, PowerDecay, Proportional>;

// Validates positivity constraints; throws std::invalid_argument.
void validate(const RewardSchedule& s);

// R_t for t >= 1. prev_supply is N_{t-1}, only consulted by Proportional.
// Throws SupplyOverflow if the result is not finite.
double reward_at(const RewardSchedule& s, std::int64_t t, double prev_supply);

// N_t = N + sum_{n=1..t} R_n, computed by forward iteration. A per-thread
// cache of the supply path makes repeated calls O(1) amortized.
// Throws SupplyOverflow if N_t is not representable.
double supply_after(const RewardSchedule& s, double N, std::int64_t t);

// R_1 (used by several analytic bounds).
inline double first_reward(const RewardSchedule& s, double N) { return reward_at(s, 1, N); }

// Precomputed reward/supply path for a (schedule, N, T) triple, shared
// read-only by all replicates of an ensemble. The path is deterministic,
// so freezing is too: `freeze_step` is the first step whose reward would
// push the supply past `kFreezeSupplyCap` (or overflow outright); the
// simulation holds shares fixed from there on and marks the run absorbed
// in the geometric regime. 0 means no freeze within [1, T].
struct ScheduleTable {
    double initial_supply = 0.0;
    std::vector<double> reward;  // reward[t], t in [1, T]; [0] unused
    std::vector<double> supply;  // supply[t] = N_t, t in [0, T]
    std::int64_t freeze_step = 0;

    std::int64_t horizon() const { return static_cast<std::int64_t>(reward.size()) - 1; }
    // Last step that actually executes for a run of length T.
    std::int64_t last_step(std::int64_t T) const {
        return freeze_step > 0 && freeze_step <= T ? freeze_step - 1 : T;
    }
};

// Supply cap for freezing runs in the geometric regime. Chosen so that by
// the time the cap is reached the per-step reward dwarfs all earlier coins
// (selection is a near-certain repeat of the current leader) while still
// leaving headroom below DBL_MAX for the next few rewards.
inline constexpr double kFreezeSupplyCap = 0x1p830;  // ~7.2e249

ScheduleTable build_schedule_table(const RewardSchedule& s, double N, std::int64_t T);

// Tagged-object JSON form, e.g. {"kind":"power_decay","c":1.0,"alpha":0.6}.
nlohmann::json schedule_to_json(const RewardSchedule& s);
RewardSchedule schedule_from_json(const nlohmann::json& j);
std::string schedule_name(const RewardSchedule& s);

}  // namespace stakelab
