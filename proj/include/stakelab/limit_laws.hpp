#pragma once
// Closed-form limiting laws of the share process, their samplers, the
// large/medium/small investor classification, and KS machinery.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "stakelab/moments.hpp"
#include "stakelab/schedule.hpp"

namespace stakelab {

struct DirichletLaw {
    std::vector<double> a;  // concentration, a_k = n_{k,0}/R
};
struct BetaMarginal {
    double a, b;
};
// ratio pi_inf/pi_0 ~ scale * Gamma(shape): shape = n0/R, scale = R/n0.
struct GammaRatio {
    double shape, scale;
};
struct TwoPointAbsorption {
    double p;  // P(share -> 1) = pi_0
};
struct Gem {
    double theta;  // N/R
};
struct PitmanYor {
    double discount;  // in [0,1)
    double strength;  // N/R
};

using LimitLaw =
    std::variant<DirichletLaw, BetaMarginal, GammaRatio, TwoPointAbsorption, Gem, PitmanYor>;

void validate(const LimitLaw& law);
nlohmann::json law_to_json(const LimitLaw& law);
LimitLaw law_from_json(const nlohmann::json& j);

// Dirichlet density on the open simplex; throws std::domain_error off it.
double dirichlet_density(std::span<const double> x, std::span<const double> a);

double beta_pdf(double a, double b, double x);
double beta_cdf(double a, double b, double x);
double gamma_ratio_pdf(const GammaRatio& g, double x);

// CDF of a scalar law (BetaMarginal, GammaRatio, TwoPointAbsorption).
double law_cdf(const LimitLaw& law, double x);

// i.i.d. samples, deterministic in seed. Scalar laws fill `dim = 1`;
// DirichletLaw returns row-major vectors with dim = K.
struct SampleBatch {
    std::size_t dim = 1;
    std::vector<double> data;

    std::size_t count() const { return dim == 0 ? 0 : data.size() / dim; }
};

SampleBatch sample_limit(const LimitLaw& law, std::size_t n, std::uint64_t seed);

// GEM stick-breaking: weight_j = prod_{i<j}(1 - W_i) W_j with W_i iid
// Beta(1, theta). Uses the generic two-Gamma Beta sampler so that
// pitman_yor_weights with discount 0 reproduces it draw for draw.
std::vector<double> gem_stick_breaking(double theta, std::size_t j_max, std::uint64_t seed);

// Pitman-Yor sticks: W_k ~ Beta(1 - discount, theta + k * discount).
std::vector<double> pitman_yor_weights(double discount, double theta, std::size_t j_max,
                                       std::uint64_t seed);

// ---- investor classification ----------------------------------------------

// Symbolic initial-stake rule n0(N) = coeff * N^exponent. Asymptotic classes
// are properties of scaling families, not single numbers, so classification
// takes the declared rule rather than a magnitude heuristic.
struct StakeRule {
    double coeff = 1.0;
    double exponent = 0.0;

    double operator()(double N) const;
};

enum class InvestorClass { Large, Medium, Small };

enum class FindingKind {
    ConcentratesAtOne,  // ratio -> 1, Chebyshev bound available
    ClosedFormLaw,      // limit law known exactly
    AntiConcentration,  // P(|ratio-1| > eps) >= c for some unspecified c > 0
    VarianceDiverges,   // var(ratio) -> infinity
    Absorption,         // geometric regime: share -> {0,1}
};

struct Classification {
    std::optional<InvestorClass> investor_class;  // empty for absorption
    FindingKind kind;
    std::string threshold;  // the scaling expression classified against
    std::optional<LimitLaw> law;
    std::optional<double> bound;  // concentration bound at given (N, n0, eps)
    std::string bound_tag;
};

// Throws UnclassifiedRegime for schedules outside the analyzed taxonomy
// (power decay with alpha = 1/2, proportional with gamma = 1).
Classification classify_and_limit(const RewardSchedule& s, double N, const StakeRule& n0_rule,
                                  double eps);

}  // namespace stakelab
