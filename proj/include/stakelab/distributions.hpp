#pragma once
// Samplers for the limit laws. All are driven purely by Rng::u01() draws so
// a seed pins the whole sample path on any platform.

#include <span>
#include <vector>

#include "stakelab/rng.hpp"

namespace stakelab {

// Standard normal via Marsaglia polar rejection (no pair caching).
double normal_sample(Rng& rng);

// Gamma(shape, 1) by Marsaglia-Tsang; shape < 1 handled by boosting.
double gamma_sample(Rng& rng, double shape);

double beta_sample(Rng& rng, double a, double b);

// Dirichlet(a) as normalized independent Gammas.
std::vector<double> dirichlet_sample(Rng& rng, std::span<const double> a);

}  // namespace stakelab
