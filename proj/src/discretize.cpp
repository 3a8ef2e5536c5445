#include "noisegate/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "noisegate/complexity.hpp"
#include "noisegate/errors.hpp"
#include "noisegate/rng.hpp"

namespace noisegate {

namespace {

constexpr int kCartMinBucket = 7;
constexpr std::size_t kCartMinSplit = 20;

// Prefix sums giving the within-SS of sorted_values[i..j] in O(1).
class SegmentCost {
public:
    explicit SegmentCost(std::span<const double> sorted_values) {
        sum_.resize(sorted_values.size() + 1, 0.0);
        sum2_.resize(sorted_values.size() + 1, 0.0);
        for (std::size_t i = 0; i < sorted_values.size(); ++i) {
            sum_[i + 1] = sum_[i] + sorted_values[i];
            sum2_[i + 1] = sum2_[i] + sorted_values[i] * sorted_values[i];
        }
    }

    double within_ss(std::size_t i, std::size_t j) const {  // inclusive range
        if (j < i) return 0.0;
        const double n = static_cast<double>(j - i + 1);
        const double s = sum_[j + 1] - sum_[i];
        const double s2 = sum2_[j + 1] - sum2_[i];
        const double ss = s2 - s * s / n;
        return ss > 0.0 ? ss : 0.0;
    }

private:
    std::vector<double> sum_;
    std::vector<double> sum2_;
};

std::vector<double> sorted_copy(std::span<const double> values) {
    std::vector<double> out(values.begin(), values.end());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::string to_string(ThresholdMethod method) {
    switch (method) {
        case ThresholdMethod::Median: return "median";
        case ThresholdMethod::Ckmeans: return "ckmeans";
        case ThresholdMethod::CartStump: return "cart";
    }
    return "unknown";
}

std::optional<ThresholdMethod> threshold_method_from_string(const std::string& name) {
    if (name == "median") return ThresholdMethod::Median;
    if (name == "ckmeans") return ThresholdMethod::Ckmeans;
    if (name == "cart") return ThresholdMethod::CartStump;
    return std::nullopt;
}

double threshold_median(std::span<const double> target) {
    if (target.size() < 2) throw DataError("median threshold needs at least 2 points");
    std::vector<double> sorted = sorted_copy(target);
    const std::size_t n = sorted.size();
    if (n % 2 == 1) return sorted[n / 2];
    return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

Ckmeans1dResult ckmeans_1d(std::span<const double> sorted_values, std::size_t k) {
    const std::size_t n = sorted_values.size();
    if (k == 0 || k > n) throw ConfigError("invalid cluster count");
    const SegmentCost cost(sorted_values);

    // dp[c][i]: best within-SS of splitting the first i+1 values into c+1
    // clusters; back[c][i] the start of the last cluster.
    std::vector<std::vector<double>> dp(k, std::vector<double>(n, 0.0));
    std::vector<std::vector<std::size_t>> back(k, std::vector<std::size_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i) dp[0][i] = cost.within_ss(0, i);

    for (std::size_t c = 1; c < k; ++c) {
        for (std::size_t i = c; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t best_start = c;
            for (std::size_t start = c; start <= i; ++start) {
                const double candidate = dp[c - 1][start - 1] + cost.within_ss(start, i);
                if (candidate < best) {  // first minimum wins on ties
                    best = candidate;
                    best_start = start;
                }
            }
            dp[c][i] = best;
            back[c][i] = best_start;
        }
    }

    Ckmeans1dResult result;
    result.within_ss = dp[k - 1][n - 1];
    result.split_starts.resize(k);
    std::size_t end = n - 1;
    for (std::size_t c = k; c-- > 0;) {
        const std::size_t start = c == 0 ? 0 : back[c][end];
        result.split_starts[c] = start;
        if (c > 0) end = start - 1;
    }
    return result;
}

double threshold_ckmeans(std::span<const double> target) {
    if (target.size() < 2) throw DataError("ckmeans threshold needs at least 2 points");
    std::vector<double> sorted = sorted_copy(target);
    if (sorted.front() == sorted.back()) throw DegenerateTarget("all target values identical");

    const Ckmeans1dResult split = ckmeans_1d(sorted, 2);
    return sorted[split.split_starts[1] - 1];  // max of the lower cluster
}

double threshold_cart(std::span<const double> target) {
    const std::size_t n = target.size();
    if (n < 2) throw DataError("cart threshold needs at least 2 points");
    std::vector<double> sorted = sorted_copy(target);
    if (sorted.front() == sorted.back()) throw DegenerateTarget("all target values identical");

    const std::size_t min_bucket = n < kCartMinSplit ? 1 : kCartMinBucket;
    const SegmentCost cost(sorted);

    double best_sse = std::numeric_limits<double>::infinity();
    double best_threshold = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (sorted[i] == sorted[i + 1]) continue;  // not a distinct boundary
        const std::size_t n_left = i + 1;
        const std::size_t n_right = n - n_left;
        if (n_left < min_bucket || n_right < min_bucket) continue;
        const double sse = cost.within_ss(0, i) + cost.within_ss(i + 1, n - 1);
        if (sse < best_sse) {
            best_sse = sse;
            best_threshold = 0.5 * (sorted[i] + sorted[i + 1]);
        }
    }
    if (!std::isfinite(best_threshold))
        throw DegenerateTarget("no split satisfies the bucket constraints");
    return best_threshold;
}

DiscretizationSpec discretize(const Dataset& data, double cutpoint, ThresholdMethod method) {
    if (!std::isfinite(cutpoint)) throw ConfigError("cutpoint must be finite");
    DiscretizationSpec spec;
    spec.method = method;
    spec.cutpoint = cutpoint;
    spec.labels.resize(data.n_rows());
    std::size_t n1 = 0;
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        const bool low = data.target[i] <= cutpoint;
        spec.labels[i] = low ? ClassLabel::class1 : ClassLabel::class2;
        n1 += low;
    }
    if (n1 == 0) throw EmptyClass("class1 is empty: cutpoint below every target value");
    if (n1 == data.n_rows()) throw EmptyClass("class2 is empty: cutpoint at or above every target value");
    return spec;
}

std::vector<std::size_t> window_indices(std::span<const double> target, double cutpoint,
                                        double x_pct) {
    std::vector<std::size_t> out;
    if (x_pct <= 0.0) return out;
    const double half = std::abs(cutpoint) * x_pct / 100.0;
    const double lower = cutpoint - half;
    const double upper = cutpoint + half;
    for (std::size_t i = 0; i < target.size(); ++i)
        if (target[i] > lower && target[i] < upper) out.push_back(i);
    return out;
}

NoisyAreaSpec estimate_noisy_area(const Dataset& data, double cutpoint, double step_size_pct,
                                  std::uint64_t seed) {
    if (step_size_pct <= 0.0 || step_size_pct > 100.0)
        throw ConfigError("step_size_pct must be in (0, 100]");

    NoisyAreaSpec spec;
    spec.cutpoint = cutpoint;
    spec.step_size_pct = step_size_pct;

    // The candidate band (cutpoint - 100%, cutpoint + 100%) collapses for a
    // non-positive cutpoint; report no noisy area rather than an error.
    if (cutpoint <= 0.0) return spec;

    spec.lower = 0.0;
    spec.upper = 2.0 * cutpoint;

    // x grid: multiples of the step below 100, then 100 itself.
    std::vector<double> grid;
    for (int k = 1; static_cast<double>(k) * step_size_pct < 100.0; ++k)
        grid.push_back(static_cast<double>(k) * step_size_pct);
    grid.push_back(100.0);

    double best_n4 = -1.0;
    std::size_t window_index = 0;
    for (const double x : grid) {
        const std::vector<std::size_t> rows = window_indices(data.target, cutpoint, x);
        ++window_index;
        if (rows.size() < 4) continue;
        std::size_t n1 = 0;
        for (std::size_t i : rows) n1 += data.target[i] <= cutpoint;
        if (n1 < 2 || rows.size() - n1 < 2) continue;  // N4 needs 2 points per class

        const Dataset quantum = data.subset(rows);
        ClassLabels labels(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            labels[i] = quantum.target[i] <= cutpoint ? ClassLabel::class1 : ClassLabel::class2;

        const double n4 = nonlinearity_n4(
            quantum.features, quantum.n_rows(), quantum.n_features(), labels,
            Rng::substream(seed, {streams::kNoisyWindow, window_index}));
        spec.per_step_nonlinearity.emplace_back(x, n4);
        if (n4 > best_n4) {  // ties keep the smallest x
            best_n4 = n4;
            spec.limit_pct = x;
        }
    }

    if (spec.limit_pct) {
        const auto rows = window_indices(data.target, cutpoint, *spec.limit_pct);
        spec.noisy_fraction = static_cast<double>(rows.size()) /
                              static_cast<double>(data.n_rows());
        const double half = cutpoint * *spec.limit_pct / 100.0;
        spec.lower = cutpoint - half;
        spec.upper = cutpoint + half;
    }
    return spec;
}

ExtremesSpec extremes(const Dataset& data, double fraction) {
    if (fraction <= 0.0 || fraction >= 0.5) throw ConfigError("fraction must be in (0, 0.5)");
    const std::size_t n = data.n_rows();
    const std::size_t k = static_cast<std::size_t>(fraction * static_cast<double>(n));
    if (k == 0) throw EmptyExtremes("fraction keeps no points");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return data.target[a] < data.target[b];
    });

    ExtremesSpec spec;
    spec.fraction = fraction;
    spec.low_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    spec.high_indices.assign(order.end() - static_cast<std::ptrdiff_t>(k), order.end());
    std::sort(spec.low_indices.begin(), spec.low_indices.end());
    std::sort(spec.high_indices.begin(), spec.high_indices.end());
    return spec;
}

std::pair<Dataset, ClassLabels> remove_window(const Dataset& data, const ClassLabels& labels,
                                              double cutpoint, double x_pct) {
    if (x_pct < 0.0) throw ConfigError("x_pct must be non-negative");
    if (labels.size() != data.n_rows()) throw DataError("label length mismatch");

    const std::vector<std::size_t> dropped = window_indices(data.target, cutpoint, x_pct);
    std::vector<bool> drop(data.n_rows(), false);
    for (std::size_t i : dropped) drop[i] = true;

    std::vector<std::size_t> kept;
    kept.reserve(data.n_rows() - dropped.size());
    for (std::size_t i = 0; i < data.n_rows(); ++i)
        if (!drop[i]) kept.push_back(i);

    ClassLabels kept_labels;
    kept_labels.reserve(kept.size());
    for (std::size_t i : kept) kept_labels.push_back(labels[i]);
    return {data.subset(kept), std::move(kept_labels)};
}

}  // namespace noisegate
