#include "noisegate/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace noisegate {

double mean(std::span<const double> values) {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return ss / static_cast<double>(n - 1);
}

double median(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    if (n == 0) return 0.0;
    if (n % 2 == 1) return sorted[n / 2];
    return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

double lower_median(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.empty()) return 0.0;
    return sorted[(sorted.size() - 1) / 2];
}

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

Standardizer Standardizer::fit(const std::vector<double>& rows, std::size_t n, std::size_t p) {
    Standardizer s;
    s.means.assign(p, 0.0);
    s.sds.assign(p, 1.0);
    if (n == 0) return s;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) s.means[j] += rows[i * p + j];
    for (std::size_t j = 0; j < p; ++j) s.means[j] /= static_cast<double>(n);
    if (n < 2) return s;
    std::vector<double> ss(p, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            const double d = rows[i * p + j] - s.means[j];
            ss[j] += d * d;
        }
    for (std::size_t j = 0; j < p; ++j) {
        const double sd = std::sqrt(ss[j] / static_cast<double>(n - 1));
        s.sds[j] = sd > 0.0 ? sd : 1.0;
    }
    return s;
}

void Standardizer::apply(std::vector<double>& rows, std::size_t n, std::size_t p) const {
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j)
            rows[i * p + j] = (rows[i * p + j] - means[j]) / sds[j];
}

}  // namespace noisegate
