#pragma once
// Exact analytic machinery for the tracked share pi_{k,t}: the a_t variance
// factor, closed-form constant-reward variance, raw/central moments to order
// four, regime bounds on a_t and the Chebyshev-type concentration bounds.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stakelab/schedule.hpp"

namespace stakelab {

// Requested for a bound whose constant the analysis leaves unspecified.
struct UnspecifiedConstant : std::logic_error {
    explicit UnspecifiedConstant(const std::string& what) : std::logic_error(what) {}
};

struct UnclassifiedRegime : std::logic_error {
    explicit UnclassifiedRegime(const std::string& what) : std::logic_error(what) {}
};

// a_t defined by a_1 = (R_1/N_1)^2, a_{t+1} = a_t + (R_{t+1}/N_{t+1})^2 (1 - a_t),
// so that var(pi_{k,t}) = a_t pi0 (1 - pi0). Returned vector has size T+1 with
// [0] = 0. Compensated accumulation keeps the recursion exact to ~1e-15 over
// 1e5 steps.
std::vector<double> a_sequence(const RewardSchedule& s, double N, std::int64_t T);

// Closed form for constant reward:
// var(pi_t) = R^2/(Rt+N)^2 (R/(N+R) t^2 + N/(N+R) t) pi0(1-pi0);
// t = infinity (pass std::numeric_limits<double>::infinity()) gives
// R/(N+R) pi0(1-pi0).
double constant_reward_variance(double R, double N, double t, double pi0);

struct MomentTable {
    std::vector<std::int64_t> t;
    std::vector<double> a;               // a_t
    std::vector<double> m1, m2, m3, m4;  // raw moments of pi_{k,t}
    std::vector<double> mu2, mu3, mu4;   // central moments
};

// Exact raw-moment recursion, conditioning one step: with a = N_t/N_{t+1}
// and b = R_{t+1}/N_{t+1},
//   m_j(t+1) = a^j m_j(t) + sum_{i=0}^{j-1} C(j,i) a^i b^{j-i} m_{i+1}(t).
// Central moments are derived from the raw ones.
MomentTable raw_moment_table(const RewardSchedule& s, double N, double pi0, std::int64_t T,
                             int max_order = 4);

enum class ARegime {
    BoundedBelowDecay,   // constant, or decreasing with positive floor
    FastPowerDecay,      // R_t = c t^-alpha, alpha > 1/2
    SlowPowerDecay,      // alpha < 1/2: scaling exponent only
    SubGeometric,        // proportional, gamma < 1
    GeometricAbsorbing,  // proportional, gamma >= 1: a_t -> 1
    UnboundedAnalysis,   // outside the analyzed regimes (e.g. alpha = 1/2)
};

struct ABounds {
    ARegime regime = ARegime::UnboundedAnalysis;
    std::optional<double> lower;
    std::optional<double> upper;
    // For SlowPowerDecay: a_t = Theta(N^scaling_exponent) once t >= min_t.
    std::optional<double> scaling_exponent;
    std::optional<double> min_t;
};

ABounds a_bounds(const RewardSchedule& s, double N, std::int64_t t);

// Chebyshev deviation bounds for P(|pi_t/pi_0 - 1| > eps) in the large-
// investor regimes. `value` is empty where the constant is unspecified
// (slow power decay), in which case only the scaling denominator
// N^{alpha/(1-alpha)} n0 is reported.
struct ConcentrationBound {
    std::optional<double> value;
    double scaling_denominator = 0.0;
    std::string regime;  // "constant", "floor_decay", "fast_power", "slow_power", "sub_geometric"
};

ConcentrationBound concentration_bound(const RewardSchedule& s, double N, double n0, double eps);

// Strict accessor: throws UnspecifiedConstant when only the scaling is known,
// UnclassifiedRegime outside the analyzed taxonomy.
double concentration_bound_value(const RewardSchedule& s, double N, double n0, double eps);

}  // namespace stakelab
