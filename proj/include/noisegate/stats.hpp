#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace noisegate {

double mean(std::span<const double> values);

/// Unbiased sample variance (n-1 denominator); 0 for n < 2.
double sample_variance(std::span<const double> values);

/// Median as the average of the two middle order statistics for even n.
double median(std::span<const double> values);

/// Lower median: the element at sorted index floor((n-1)/2). Used where an
/// in-sample value (e.g. an integer rank) is required.
double lower_median(std::span<const double> values);

/// Average (midrank) ranks, 1-based; ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/// Standard normal CDF.
double normal_cdf(double z);

/// Per-column z-score statistics of a row-major matrix.
struct Standardizer {
    std::vector<double> means;
    std::vector<double> sds;  // zero-spread columns get sd 1 so they map to 0

    static Standardizer fit(const std::vector<double>& rows, std::size_t n, std::size_t p);
    /// Transforms in place (row-major n x p).
    void apply(std::vector<double>& rows, std::size_t n, std::size_t p) const;
};

}  // namespace noisegate
