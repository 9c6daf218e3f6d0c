#pragma once
// Small statistics toolbox: compensated accumulation, KS distances,
// fixed-bin histograms.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace stakelab {

// Kahan-compensated accumulator. The exact-moment recursions run for 1e5
// steps and are checked at 1e-12 relative, which plain summation cannot hold.
class KahanSum {
  public:
    KahanSum() = default;
    explicit KahanSum(double init) : sum_(init) {}

    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }

    double value() const { return sum_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct MeanVar {
    std::size_t n = 0;
    double mean = 0.0;
    double var = 0.0;  // unbiased (n-1)
    double se = 0.0;   // of the mean
};

MeanVar mean_var(std::span<const double> xs);

// One-sample Kolmogorov-Smirnov sup-distance against a cdf.
double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf);

// Two-sample KS distance.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

// Histogram over [lo, hi) with `bins` uniform bins; the last bin is closed.
// Out-of-range samples clamp into the edge bins.
struct Histogram {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<std::int64_t> counts;
    std::int64_t total = 0;

    double mass(std::size_t bin) const {
        return total == 0 ? 0.0 : static_cast<double>(counts[bin]) / static_cast<double>(total);
    }
};

Histogram make_histogram(std::span<const double> xs, double lo, double hi, std::size_t bins);

}  // namespace stakelab
