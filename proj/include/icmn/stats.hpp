// Sample statistics and goodness-of-fit helpers used by the simulator's
// validation paths (rate estimation checks, exponentiality tests).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace icmn {

// Welford accumulator.
struct RunningStats {
    std::size_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++count;
        const double d1 = x - mean;
        mean += d1 / static_cast<double>(count);
        m2 += d1 * (x - mean);
    }

    double variance() const { // unbiased
        return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
    }
    double stddev() const { return std::sqrt(variance()); }
    double standard_error() const {
        return count > 0 ? stddev() / std::sqrt(static_cast<double>(count)) : 0.0;
    }
};

inline double sample_mean(std::span<const double> xs) {
    RunningStats s;
    for (double x : xs) s.add(x);
    return s.mean;
}

inline double sample_variance(std::span<const double> xs) {
    RunningStats s;
    for (double x : xs) s.add(x);
    return s.variance();
}

// One-sample Kolmogorov-Smirnov statistic against Exp(rate):
// sup_x |F_n(x) - (1 - e^{-rate x})|.
inline double ks_statistic_exponential(std::vector<double> samples, double rate) {
    if (samples.empty())
        throw std::invalid_argument("ks_statistic_exponential: no samples");
    if (!(rate > 0.0))
        throw std::invalid_argument("ks_statistic_exponential: rate must be > 0");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double cdf = -std::expm1(-rate * samples[i]);
        const double lo = cdf - static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n - cdf;
        d = std::max(d, std::max(lo, hi));
    }
    return d;
}

// Asymptotic two-sided critical value: D_crit = sqrt(-ln(alpha/2)/2) / sqrt(n).
// Good for n in the thousands, which is how it is used here.
inline double ks_critical_value(double alpha, std::size_t n) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("ks_critical_value: alpha must be in (0,1)");
    if (n == 0)
        throw std::invalid_argument("ks_critical_value: n must be > 0");
    return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

// Pearson chi-square against equal expected counts in every bin.
inline double chi_square_uniform(std::span<const std::size_t> counts) {
    if (counts.empty())
        throw std::invalid_argument("chi_square_uniform: no bins");
    std::size_t total = 0;
    for (std::size_t c : counts) total += c;
    const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
    if (!(expected > 0.0))
        throw std::invalid_argument("chi_square_uniform: empty sample");
    double chi2 = 0.0;
    for (std::size_t c : counts) {
        const double d = static_cast<double>(c) - expected;
        chi2 += d * d / expected;
    }
    return chi2;
}

} // namespace icmn
