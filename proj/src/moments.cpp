#include "stakelab/moments.hpp"

#include <cmath>
#include <limits>

#include "stakelab/special_functions.hpp"
#include "stakelab/stats.hpp"

namespace stakelab {

std::vector<double> a_sequence(const RewardSchedule& s, double N, std::int64_t T) {
    if (T < 1) throw std::invalid_argument("a_sequence: T must be >= 1");
    ScheduleTable tab = build_schedule_table(s, N, T);
    std::vector<double> a(static_cast<std::size_t>(T) + 1, 0.0);
    KahanSum acc;
    std::int64_t last = tab.last_step(T);
    for (std::int64_t t = 1; t <= T; ++t) {
        if (t <= last) {
            double q = tab.reward[static_cast<std::size_t>(t)] / tab.supply[static_cast<std::size_t>(t)];
            acc.add(q * q * (1.0 - acc.value()));
        }
        a[static_cast<std::size_t>(t)] = acc.value();
    }
    return a;
}

double constant_reward_variance(double R, double N, double t, double pi0) {
    if (!(R > 0.0) || !(N > 0.0)) throw std::invalid_argument("constant_reward_variance: R,N > 0");
    if (!(pi0 >= 0.0 && pi0 <= 1.0)) throw std::invalid_argument("constant_reward_variance: pi0 in [0,1]");
    if (std::isinf(t)) return R / (N + R) * pi0 * (1.0 - pi0);
    if (!(t >= 1.0)) throw std::invalid_argument("constant_reward_variance: t >= 1 or infinity");
    double denom = (R * t + N) * (R * t + N);
    double bracket = R / (N + R) * t * t + N / (N + R) * t;
    return R * R / denom * bracket * pi0 * (1.0 - pi0);
}

MomentTable raw_moment_table(const RewardSchedule& s, double N, double pi0, std::int64_t T,
                             int max_order) {
    if (max_order < 1 || max_order > 4)
        throw std::invalid_argument("raw_moment_table: max_order in [1,4]");
    if (!(pi0 >= 0.0 && pi0 <= 1.0)) throw std::invalid_argument("raw_moment_table: pi0 in [0,1]");
    ScheduleTable tab = build_schedule_table(s, N, T);
    MomentTable mt;
    auto n = static_cast<std::size_t>(T) + 1;
    mt.t.resize(n);
    mt.a = a_sequence(s, N, std::max<std::int64_t>(T, 1));
    mt.a.resize(n);
    mt.m1.assign(n, 0.0);
    mt.m2.assign(n, 0.0);
    mt.m3.assign(n, 0.0);
    mt.m4.assign(n, 0.0);
    mt.mu2.assign(n, 0.0);
    mt.mu3.assign(n, 0.0);
    mt.mu4.assign(n, 0.0);

    double m1 = pi0, m2 = pi0 * pi0, m3 = m2 * pi0, m4 = m3 * pi0;
    std::int64_t last = tab.last_step(T);
    for (std::int64_t t = 0; t <= T; ++t) {
        auto i = static_cast<std::size_t>(t);
        mt.t[i] = t;
        mt.m1[i] = m1;
        mt.m2[i] = m2;
        mt.m3[i] = m3;
        mt.m4[i] = m4;
        mt.mu2[i] = m2 - m1 * m1;
        mt.mu3[i] = m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1;
        mt.mu4[i] = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1 * m1 * m1 * m1;
        if (t == T) break;
        if (t + 1 > last) continue;  // frozen: moments stop evolving
        double a = tab.supply[i] / tab.supply[i + 1];
        double b = tab.reward[i + 1] / tab.supply[i + 1];
        double a2 = a * a, a3 = a2 * a, a4 = a3 * a;
        double b2 = b * b, b3 = b2 * b, b4 = b3 * b;
        double n1 = m1;  // unchanged: martingale
        double n2 = a2 * m2 + (2.0 * a * b * m2 + b2 * m1);
        double n3 = a3 * m3 + (3.0 * a2 * b * m3 + 3.0 * a * b2 * m2 + b3 * m1);
        double n4 = a4 * m4 + (4.0 * a3 * b * m4 + 6.0 * a2 * b2 * m3 + 4.0 * a * b3 * m2 + b4 * m1);
        m1 = n1;
        m2 = n2;
        m3 = n3;
        m4 = n4;
    }
    return mt;
}

ABounds a_bounds(const RewardSchedule& s, double N, std::int64_t t) {
    if (!(N > 0.0) || t < 1) throw std::invalid_argument("a_bounds: N > 0, t >= 1");
    ABounds out;
    if (const auto* c = std::get_if<Constant>(&s)) {
        // Positive-floor case with R_1 = floor = R.
        out.regime = ARegime::BoundedBelowDecay;
        double R = c->R;
        out.upper = R / N;
        double td = static_cast<double>(t);
        out.lower = (N - R) * R * R * td / (N * (N + R) * (N + R * (1.0 + td)));
    } else if (const auto* f = std::get_if<FloorDecay>(&s)) {
        out.regime = ARegime::BoundedBelowDecay;
        double R1 = f->floor + f->excess * f->q;
        double Rfloor = f->floor;
        out.upper = R1 / N;
        double td = static_cast<double>(t);
        out.lower =
            (N - R1) * Rfloor * Rfloor * td / (N * (N + R1) * (N + R1 * (1.0 + td)));
    } else if (const auto* p = std::get_if<PowerDecay>(&s)) {
        if (p->alpha > 0.5) {
            out.regime = ARegime::FastPowerDecay;
            double R1 = p->c;
            out.lower = R1 * R1 / ((N + R1) * (N + R1));
            out.upper = p->c * p->c * zeta(2.0 * p->alpha) / (N * N);
        } else if (p->alpha < 0.5) {
            out.regime = ARegime::SlowPowerDecay;
            out.scaling_exponent = -1.0 / (1.0 - p->alpha);
            out.min_t = std::pow(N, 1.0 / (1.0 - p->alpha));
        } else {
            out.regime = ARegime::UnboundedAnalysis;
        }
    } else {
        const auto& g = std::get<Proportional>(s);
        if (g.gamma < 1.0) {
            out.regime = ARegime::SubGeometric;
            out.upper = g.rho / (1.0 - g.gamma) * std::pow(N, g.gamma - 1.0);
            out.scaling_exponent = g.gamma - 1.0;  // lower bound c N^{gamma-1}, c unspecified
        } else {
            out.regime = ARegime::GeometricAbsorbing;
            out.upper = 1.0;
        }
    }
    return out;
}

ConcentrationBound concentration_bound(const RewardSchedule& s, double N, double n0, double eps) {
    if (!(eps > 0.0) || !(n0 > 0.0) || !(N > 0.0))
        throw std::invalid_argument("concentration_bound: eps, n0, N > 0");
    ConcentrationBound out;
    if (const auto* c = std::get_if<Constant>(&s)) {
        out.regime = "constant";
        out.scaling_denominator = n0;
        out.value = 5.0 * c->R / (4.0 * eps * eps * n0);
    } else if (const auto* f = std::get_if<FloorDecay>(&s)) {
        out.regime = "floor_decay";
        out.scaling_denominator = n0;
        double R1 = f->floor + f->excess * f->q;
        out.value = R1 / (eps * eps * n0);
    } else if (const auto* p = std::get_if<PowerDecay>(&s)) {
        if (p->alpha > 0.5) {
            out.regime = "fast_power";
            out.scaling_denominator = N * n0;
            out.value = p->c * p->c * zeta(2.0 * p->alpha) / (eps * eps * N * n0);
        } else if (p->alpha < 0.5) {
            out.regime = "slow_power";
            out.scaling_denominator = std::pow(N, p->alpha / (1.0 - p->alpha)) * n0;
        } else {
            throw UnclassifiedRegime("concentration_bound: power decay with alpha = 1/2");
        }
    } else {
        const auto& g = std::get<Proportional>(s);
        if (!(g.gamma < 1.0))
            throw UnclassifiedRegime("concentration_bound: geometric regime has no deviation bound");
        out.regime = "sub_geometric";
        out.scaling_denominator = n0 / std::pow(N, g.gamma);
        out.value = g.rho * std::pow(N, g.gamma) / ((1.0 - g.gamma) * n0 * eps * eps);
    }
    return out;
}

double concentration_bound_value(const RewardSchedule& s, double N, double n0, double eps) {
    ConcentrationBound b = concentration_bound(s, N, n0, eps);
    if (!b.value)
        throw UnspecifiedConstant("concentration_bound: constant unspecified for regime " + b.regime);
    return *b.value;
}

}  // namespace stakelab
