#pragma once

// Statistics helpers for the studies: two-sided Kolmogorov-Smirnov distance
// against a centered normal, Wilson score intervals, and tail estimates.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "remlab/gauss.hpp"

namespace remlab {

// sup-norm distance between the empirical CDF of `sample` and N(0, sigma2).
// The sample need not be sorted.
inline double ks_distance(std::vector<double> sample, double sigma2) {
    if (sample.empty()) throw std::domain_error("ks_distance: empty sample");
    if (!(sigma2 > 0)) throw std::domain_error("ks_distance: sigma2 must be positive");
    std::sort(sample.begin(), sample.end());
    double sigma = std::sqrt(sigma2);
    double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        double z = sample[i] / sigma;
        double cdf = (z >= 0) ? 1.0 - std::exp(log_gauss_tail(z)) : std::exp(log_gauss_tail(-z));
        double hi = (static_cast<double>(i) + 1.0) / n - cdf;
        double lo = cdf - static_cast<double>(i) / n;
        d = std::max({d, hi, lo});
    }
    return d;
}

// 95% Wilson score interval for a binomial proportion.
inline std::pair<double, double> wilson_interval(long long hits, long long total) {
    if (total < 1) throw std::domain_error("wilson_interval: total must be >= 1");
    if (hits < 0 || hits > total) throw std::domain_error("wilson_interval: hits out of range");
    const double z = 1.959963984540054;  // Phi^{-1}(0.975)
    double n = static_cast<double>(total);
    double p = static_cast<double>(hits) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (p + z2 / (2.0 * n)) / denom;
    double half = (z / denom) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    double lo = std::max(0.0, center - half);
    double hi = std::min(1.0, center + half);
    return {lo, hi};
}

struct TailEstimate {
    double threshold = 0.0;
    long long hits = 0;
    long long total = 0;
    double p_hat = 0.0;
    double wilson_lo = 0.0;
    double wilson_hi = 1.0;
    double norm_log_p = 0.0;  // t^{-2} log p_hat, valid only when defined
    bool defined = false;     // false when hits == 0
};

inline TailEstimate tail_estimate(double threshold, long long hits, long long total,
                                  double norm_scale) {
    TailEstimate e;
    e.threshold = threshold;
    e.hits = hits;
    e.total = total;
    e.p_hat = total > 0 ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
    if (total > 0) std::tie(e.wilson_lo, e.wilson_hi) = wilson_interval(hits, total);
    if (hits > 0 && total > 0) {
        e.defined = true;
        e.norm_log_p = std::log(e.p_hat) / norm_scale;
    }
    return e;
}

}  // namespace remlab
