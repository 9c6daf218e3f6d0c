#include "stakelab/distributions.hpp"

#include <cmath>
#include <stdexcept>

namespace stakelab {

double normal_sample(Rng& rng) {
    for (;;) {
        double u = 2.0 * rng.u01() - 1.0;
        double v = 2.0 * rng.u01() - 1.0;
        double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) {
            return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }
}

double gamma_sample(Rng& rng, double shape) {
    if (shape <= 0.0) throw std::domain_error("gamma_sample: shape must be positive");
    if (shape < 1.0) {
        // Gamma(a) = Gamma(a+1) * U^{1/a}
        double u = rng.u01();
        while (u == 0.0) u = rng.u01();
        return gamma_sample(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = normal_sample(rng);
        double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        double v = t * t * t;
        double u = rng.u01();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double beta_sample(Rng& rng, double a, double b) {
    double x = gamma_sample(rng, a);
    double y = gamma_sample(rng, b);
    double s = x + y;
    if (s <= 0.0) return 0.5;  // both underflowed; unreachable for sane shapes
    return x / s;
}

std::vector<double> dirichlet_sample(Rng& rng, std::span<const double> a) {
    std::vector<double> out(a.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = gamma_sample(rng, a[i]);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
    return out;
}

}  // namespace stakelab
