#include "stakelab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stakelab {

MeanVar mean_var(std::span<const double> xs) {
    MeanVar mv;
    mv.n = xs.size();
    if (mv.n == 0) return mv;
    KahanSum s;
    for (double x : xs) s.add(x);
    mv.mean = s.value() / static_cast<double>(mv.n);
    if (mv.n > 1) {
        KahanSum sq;
        for (double x : xs) sq.add((x - mv.mean) * (x - mv.mean));
        mv.var = sq.value() / static_cast<double>(mv.n - 1);
        mv.se = std::sqrt(mv.var / static_cast<double>(mv.n));
    }
    return mv;
}

double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_distance: no samples");
    std::vector<double> xs(samples.begin(), samples.end());
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double f = cdf(xs[i]);
        double hi = (static_cast<double>(i) + 1.0) / n - f;
        double lo = f - static_cast<double>(i) / n;
        d = std::max(d, std::max(hi, lo));
    }
    return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: no samples");
    std::vector<double> xs(a.begin(), a.end()), ys(b.begin(), b.end());
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    const double na = static_cast<double>(xs.size()), nb = static_cast<double>(ys.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < xs.size() && j < ys.size()) {
        double x = std::min(xs[i], ys[j]);
        while (i < xs.size() && xs[i] <= x) ++i;
        while (j < ys.size() && ys[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

Histogram make_histogram(std::span<const double> xs, double lo, double hi, std::size_t bins) {
    if (bins == 0 || !(hi > lo)) throw std::invalid_argument("make_histogram: bad bin spec");
    Histogram h;
    h.lo = lo;
    h.hi = hi;
    h.counts.assign(bins, 0);
    const double w = (hi - lo) / static_cast<double>(bins);
    for (double x : xs) {
        auto b = static_cast<std::int64_t>(std::floor((x - lo) / w));
        if (b < 0) b = 0;
        if (b >= static_cast<std::int64_t>(bins)) b = static_cast<std::int64_t>(bins) - 1;
        ++h.counts[static_cast<std::size_t>(b)];
        ++h.total;
    }
    return h;
}

}  // namespace stakelab
