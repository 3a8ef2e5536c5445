#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "noisegate/dataset.hpp"

namespace noisegate {

enum class ThresholdMethod : std::uint8_t { Median, Ckmeans, CartStump };

std::string to_string(ThresholdMethod method);
std::optional<ThresholdMethod> threshold_method_from_string(const std::string& name);

/// Binary discretization of the dependent variable: class1 holds every point
/// with target <= cutpoint, class2 the rest.
struct DiscretizationSpec {
    ThresholdMethod method = ThresholdMethod::Median;
    double cutpoint = 0.0;
    ClassLabels labels;
};

/// Output of the automated noisy-area estimation. limit_pct is empty when the
/// candidate band around the cutpoint holds no usable window (reported as "no
/// noisy area", which is a value, not an error).
struct NoisyAreaSpec {
    double cutpoint = 0.0;
    double step_size_pct = 5.0;
    std::optional<double> limit_pct;
    double lower = 0.0;
    double upper = 0.0;
    double noisy_fraction = 0.0;
    std::vector<std::pair<double, double>> per_step_nonlinearity;  // (x %, N4)

    bool has_noisy_area() const { return limit_pct.has_value(); }
};

/// Bottom/top fraction of points by sorted dependent variable.
struct ExtremesSpec {
    double fraction = 0.10;
    std::vector<std::size_t> low_indices;
    std::vector<std::size_t> high_indices;
};

/// Sample median (average of the two middle order statistics for even n).
double threshold_median(std::span<const double> target);

/// Optimal 1-D 2-means: dynamic program over the sorted values minimizing the
/// total within-cluster sum of squares; returns the maximum of the lower
/// cluster so that class1 is exactly the lower cluster.
double threshold_ckmeans(std::span<const double> target);

/// Regression-stump split of the target on itself: candidate thresholds are
/// midpoints between consecutive distinct sorted values, subject to
/// minbucket = 7 / minsplit = 20 (relaxed to minbucket = 1 below minsplit);
/// returns the candidate minimizing the two-sided SSE.
double threshold_cart(std::span<const double> target);

/// General k-cluster optimal 1-D k-means split points (exposed for tests);
/// returns the optimal total within-SS and the sorted cluster boundaries.
struct Ckmeans1dResult {
    double within_ss = 0.0;
    std::vector<std::size_t> split_starts;  // start index of each cluster in sorted order
};
Ckmeans1dResult ckmeans_1d(std::span<const double> sorted_values, std::size_t k);

/// Labels every point by the <= rule; throws EmptyClass if either side is empty.
DiscretizationSpec discretize(const Dataset& data, double cutpoint,
                              ThresholdMethod method = ThresholdMethod::Median);

/// Algorithm for estimating the noisy area: sweeps windows
/// cutpoint +- cutpoint*x/100 for x = step, 2*step, ..., 100, scores each
/// window's non-linearity (N4), and picks the x with the maximum score (ties
/// to the smallest x). Windows with fewer than 2 points per class are
/// skipped; if every window is skipped (or cutpoint <= 0) there is no noisy
/// area.
NoisyAreaSpec estimate_noisy_area(const Dataset& data, double cutpoint, double step_size_pct,
                                  std::uint64_t seed);

/// Bottom/top floor(fraction*N) points of the sorted target; boundary ties
/// resolved by original index order.
ExtremesSpec extremes(const Dataset& data, double fraction = 0.10);

/// Drops every point whose target lies strictly inside the open window
/// cutpoint +- cutpoint*x/100. x = 0 is the identity.
std::pair<Dataset, ClassLabels> remove_window(const Dataset& data, const ClassLabels& labels,
                                              double cutpoint, double x_pct);

/// Row indices with target strictly inside the open window.
std::vector<std::size_t> window_indices(std::span<const double> target, double cutpoint,
                                        double x_pct);

}  // namespace noisegate
