#include "stakelab/limit_laws.hpp"

#include <cmath>

#include "stakelab/distributions.hpp"
#include "stakelab/rng.hpp"
#include "stakelab/special_functions.hpp"

namespace stakelab {

void validate(const LimitLaw& law) {
    std::visit(
        [](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, DirichletLaw>) {
                if (v.a.size() < 2) throw std::invalid_argument("dirichlet: need K >= 2");
                for (double ai : v.a)
                    if (!(ai > 0.0)) throw std::invalid_argument("dirichlet: a_k > 0");
            } else if constexpr (std::is_same_v<T, BetaMarginal>) {
                if (!(v.a > 0.0) || !(v.b > 0.0)) throw std::invalid_argument("beta: a,b > 0");
            } else if constexpr (std::is_same_v<T, GammaRatio>) {
                if (!(v.shape > 0.0) || !(v.scale > 0.0))
                    throw std::invalid_argument("gamma_ratio: shape,scale > 0");
            } else if constexpr (std::is_same_v<T, TwoPointAbsorption>) {
                if (!(v.p >= 0.0 && v.p <= 1.0))
                    throw std::invalid_argument("two_point: p in [0,1]");
            } else if constexpr (std::is_same_v<T, Gem>) {
                if (!(v.theta > 0.0)) throw std::invalid_argument("gem: theta > 0");
            } else {
                if (!(v.discount >= 0.0 && v.discount < 1.0))
                    throw std::invalid_argument("pitman_yor: discount in [0,1)");
                if (!(v.strength > -v.discount))
                    throw std::invalid_argument("pitman_yor: strength > -discount");
            }
        },
        law);
}

nlohmann::json law_to_json(const LimitLaw& law) {
    return std::visit(
        [](const auto& v) -> nlohmann::json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, DirichletLaw>) {
                return {{"kind", "dirichlet"}, {"a", v.a}};
            } else if constexpr (std::is_same_v<T, BetaMarginal>) {
                return {{"kind", "beta"}, {"a", v.a}, {"b", v.b}};
            } else if constexpr (std::is_same_v<T, GammaRatio>) {
                return {{"kind", "gamma_ratio"}, {"shape", v.shape}, {"scale", v.scale}};
            } else if constexpr (std::is_same_v<T, TwoPointAbsorption>) {
                return {{"kind", "two_point"}, {"p", v.p}};
            } else if constexpr (std::is_same_v<T, Gem>) {
                return {{"kind", "gem"}, {"theta", v.theta}};
            } else {
                return {{"kind", "pitman_yor"}, {"discount", v.discount}, {"strength", v.strength}};
            }
        },
        law);
}

LimitLaw law_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    LimitLaw law;
    if (kind == "dirichlet") {
        law = DirichletLaw{j.at("a").get<std::vector<double>>()};
    } else if (kind == "beta") {
        law = BetaMarginal{j.at("a").get<double>(), j.at("b").get<double>()};
    } else if (kind == "gamma_ratio") {
        law = GammaRatio{j.at("shape").get<double>(), j.at("scale").get<double>()};
    } else if (kind == "two_point") {
        law = TwoPointAbsorption{j.at("p").get<double>()};
    } else if (kind == "gem") {
        law = Gem{j.at("theta").get<double>()};
    } else if (kind == "pitman_yor") {
        law = PitmanYor{j.at("discount").get<double>(), j.at("strength").get<double>()};
    } else {
        throw std::invalid_argument("law_from_json: unknown kind '" + kind + "'");
    }
    validate(law);
    return law;
}

double dirichlet_density(std::span<const double> x, std::span<const double> a) {
    if (x.size() != a.size() || x.size() < 2)
        throw std::domain_error("dirichlet_density: dim mismatch or K < 2");
    double sum = 0.0;
    for (double xi : x) {
        if (!(xi > 0.0 && xi < 1.0)) throw std::domain_error("dirichlet_density: x off the open simplex");
        sum += xi;
    }
    if (std::fabs(sum - 1.0) > 1e-9) throw std::domain_error("dirichlet_density: x does not sum to 1");
    double a_sum = 0.0, log_f = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        a_sum += a[k];
        log_f += (a[k] - 1.0) * std::log(x[k]) - std::lgamma(a[k]);
    }
    log_f += std::lgamma(a_sum);
    return std::exp(log_f);
}

double beta_pdf(double a, double b, double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    double lb = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    return std::exp(lb + (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x));
}

double beta_cdf(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return beta_inc(a, b, x);
}

double gamma_ratio_pdf(const GammaRatio& g, double x) {
    if (x <= 0.0) return 0.0;
    double y = x / g.scale;
    return std::exp((g.shape - 1.0) * std::log(y) - y - std::lgamma(g.shape)) / g.scale;
}

double law_cdf(const LimitLaw& law, double x) {
    if (const auto* b = std::get_if<BetaMarginal>(&law)) return beta_cdf(b->a, b->b, x);
    if (const auto* g = std::get_if<GammaRatio>(&law))
        return x <= 0.0 ? 0.0 : gamma_p(g->shape, x / g->scale);
    if (const auto* t = std::get_if<TwoPointAbsorption>(&law)) {
        if (x < 0.0) return 0.0;
        if (x < 1.0) return 1.0 - t->p;
        return 1.0;
    }
    throw std::invalid_argument("law_cdf: no scalar cdf for this law");
}

SampleBatch sample_limit(const LimitLaw& law, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_limit: n >= 1");
    validate(law);
    Rng rng(seed);
    SampleBatch out;
    if (const auto* d = std::get_if<DirichletLaw>(&law)) {
        out.dim = d->a.size();
        out.data.reserve(n * out.dim);
        for (std::size_t i = 0; i < n; ++i) {
            auto v = dirichlet_sample(rng, d->a);
            out.data.insert(out.data.end(), v.begin(), v.end());
        }
        return out;
    }
    out.data.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = std::visit(
            [&](const auto& v) -> double {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, BetaMarginal>) {
                    return beta_sample(rng, v.a, v.b);
                } else if constexpr (std::is_same_v<T, GammaRatio>) {
                    return v.scale * gamma_sample(rng, v.shape);
                } else if constexpr (std::is_same_v<T, TwoPointAbsorption>) {
                    return rng.u01() < v.p ? 1.0 : 0.0;
                } else if constexpr (std::is_same_v<T, Gem>) {
                    return beta_sample(rng, 1.0, v.theta);  // a single stick
                } else if constexpr (std::is_same_v<T, PitmanYor>) {
                    return beta_sample(rng, 1.0 - v.discount, v.strength + v.discount);
                } else {
                    return 0.0;  // DirichletLaw handled above
                }
            },
            law);
        out.data.push_back(x);
    }
    return out;
}

std::vector<double> gem_stick_breaking(double theta, std::size_t j_max, std::uint64_t seed) {
    if (!(theta > 0.0) || j_max < 1) throw std::invalid_argument("gem: theta > 0, j_max >= 1");
    Rng rng(seed);
    std::vector<double> w(j_max);
    double residual = 1.0;
    for (std::size_t j = 0; j < j_max; ++j) {
        double stick = beta_sample(rng, 1.0, theta);
        w[j] = residual * stick;
        residual *= (1.0 - stick);
    }
    return w;
}

std::vector<double> pitman_yor_weights(double discount, double theta, std::size_t j_max,
                                       std::uint64_t seed) {
    if (!(discount >= 0.0 && discount < 1.0))
        throw std::invalid_argument("pitman_yor: discount in [0,1)");
    if (!(theta > -discount)) throw std::invalid_argument("pitman_yor: theta > -discount");
    if (j_max < 1) throw std::invalid_argument("pitman_yor: j_max >= 1");
    Rng rng(seed);
    std::vector<double> w(j_max);
    double residual = 1.0;
    for (std::size_t j = 0; j < j_max; ++j) {
        double k = static_cast<double>(j) + 1.0;
        double stick = beta_sample(rng, 1.0 - discount, theta + k * discount);
        w[j] = residual * stick;
        residual *= (1.0 - stick);
    }
    return w;
}

double StakeRule::operator()(double N) const { return coeff * std::pow(N, exponent); }

namespace {

Classification classified(InvestorClass cls, FindingKind kind, std::string threshold) {
    Classification c;
    c.investor_class = cls;
    c.kind = kind;
    c.threshold = std::move(threshold);
    return c;
}

// Trichotomy against a threshold exponent: exponent above -> Large,
// equal -> Medium, below -> Small. Exponents are user-declared reals, so
// equality allows float slack (1/9 vs 0.1/0.9).
InvestorClass trichotomy(double rule_exponent, double threshold_exponent) {
    if (std::fabs(rule_exponent - threshold_exponent) <= 1e-12) return InvestorClass::Medium;
    return rule_exponent > threshold_exponent ? InvestorClass::Large : InvestorClass::Small;
}

}  // namespace

Classification classify_and_limit(const RewardSchedule& s, double N, const StakeRule& n0_rule,
                                  double eps) {
    validate(s);
    const double n0 = n0_rule(N);
    if (!(n0 > 0.0) || !(n0 < N)) throw std::invalid_argument("classify: need 0 < n0(N) < N");

    double threshold_exp = 0.0;
    std::string threshold_desc;
    if (std::holds_alternative<Constant>(s)) {
        threshold_exp = 0.0;
        threshold_desc = "n0 = Theta(1)";
    } else if (std::holds_alternative<FloorDecay>(s)) {
        threshold_exp = 0.0;
        threshold_desc = "n0 = Theta(1)";
    } else if (const auto* p = std::get_if<PowerDecay>(&s)) {
        if (p->alpha == 0.5)
            throw UnclassifiedRegime("classify: power decay with alpha = 1/2 not analyzed");
        if (p->alpha > 0.5) {
            threshold_exp = -1.0;
            threshold_desc = "n0 = Theta(1/N)";
        } else {
            threshold_exp = -p->alpha / (1.0 - p->alpha);
            threshold_desc = "n0 = Theta(N^(-alpha/(1-alpha)))";
        }
    } else {
        const auto& g = std::get<Proportional>(s);
        if (g.gamma == 1.0)
            throw UnclassifiedRegime("classify: proportional with gamma = 1 not analyzed");
        if (g.gamma > 1.0) {
            Classification c;
            c.kind = FindingKind::Absorption;
            c.threshold = "absorbing for every n0";
            c.law = TwoPointAbsorption{n0 / N};
            return c;
        }
        threshold_exp = g.gamma;
        threshold_desc = "n0 = Theta(N^gamma)";
    }

    InvestorClass cls = trichotomy(n0_rule.exponent, threshold_exp);
    Classification c = classified(cls, FindingKind::ConcentratesAtOne, threshold_desc);
    switch (cls) {
        case InvestorClass::Large: {
            ConcentrationBound b = concentration_bound(s, N, n0, eps);
            c.kind = FindingKind::ConcentratesAtOne;
            c.bound = b.value;  // empty when the constant is unspecified
            c.bound_tag = b.regime;
            break;
        }
        case InvestorClass::Medium: {
            if (const auto* cst = std::get_if<Constant>(&s)) {
                c.kind = FindingKind::ClosedFormLaw;
                c.law = GammaRatio{n0 / cst->R, cst->R / n0};
            } else {
                c.kind = FindingKind::AntiConcentration;
            }
            break;
        }
        case InvestorClass::Small:
            c.kind = FindingKind::VarianceDiverges;
            break;
    }
    return c;
}

}  // namespace stakelab
