#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "noisegate/dataset.hpp"
#include "noisegate/rng.hpp"

namespace noisegate {

/// The four data-complexity measures used by the noisy-area estimation and
/// the per-quantum profiling.
struct ComplexityReport {
    double f1 = 0.0;  // Fisher's discriminant ratio (max over features)
    double l2 = 0.0;  // linear classifier training error in [0, 1]
    double n2 = 0.0;  // intra/inter nearest-neighbor distance ratio
    double n4 = 0.0;  // 1NN error on same-class interpolants, in [0, 1]
    bool single_class = false;  // too few points in one class; measures zeroed
    bool capped = false;        // an infinite ratio was replaced by 1e12
};

/// max_j (mu1_j - mu2_j)^2 / (s1_j^2 + s2_j^2). Features with zero variance
/// in both classes contribute 0 when the means agree and a capped 1e12
/// sentinel when they differ.
double fisher_f1(const std::vector<double>& features, std::size_t n, std::size_t p,
                 const ClassLabels& labels, bool* capped = nullptr);

/// Training misclassification rate at cutoff 0.5 of a ridge-regularized
/// (1e-4) logistic regression on standardized features. Deterministic; the
/// seed parameter exists for interface symmetry with the other measures.
double linear_sep_l2(const std::vector<double>& features, std::size_t n, std::size_t p,
                     const ClassLabels& labels, std::uint64_t seed = 0);

/// Sum of same-class nearest-neighbor distances over sum of other-class
/// nearest-neighbor distances, on standardized features.
double mixture_n2(const std::vector<double>& features, std::size_t n, std::size_t p,
                  const ClassLabels& labels, bool* capped = nullptr);

/// Error rate of the 1NN rule (trained on the real points) on n synthetic
/// points, each interpolated between two distinct same-class points with a
/// single alpha ~ U(0,1). Classes are chosen proportionally to class sizes.
double nonlinearity_n4(const std::vector<double>& features, std::size_t n, std::size_t p,
                       const ClassLabels& labels, Rng rng);
double nonlinearity_n4(const std::vector<double>& features, std::size_t n, std::size_t p,
                       const ClassLabels& labels, std::uint64_t seed);

ComplexityReport complexity_report(const std::vector<double>& features, std::size_t n,
                                   std::size_t p, const ClassLabels& labels, Rng rng);

/// One report per quantum, pooling both classes' points of that bin. Bins
/// where either class has fewer than 2 points are reported as zeros with the
/// single_class flag, matching the degenerate-quantum convention.
std::vector<std::pair<int, ComplexityReport>> quanta_profile(const Dataset& data,
                                                             const ClassLabels& labels,
                                                             const QuantaAssignment& quanta,
                                                             std::uint64_t seed);

}  // namespace noisegate
