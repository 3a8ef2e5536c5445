#pragma once

#include <string>
#include <utility>
#include <vector>

#include "noisegate/dataset.hpp"

namespace noisegate {

/// Outcome of the correlation + redundancy feature reduction.
struct ReductionReport {
    std::vector<std::string> retained;
    // dropped feature -> representative of its correlation cluster
    std::vector<std::pair<std::string, std::string>> dropped_correlated;
    // dropped feature and the R^2 that condemned it
    std::vector<std::pair<std::string, double>> dropped_redundant;
    std::vector<std::string> constant_features;  // flagged, correlations set to 0
    bool ridge_jitter_used = false;              // rank-deficient redundancy solve
};

/// Spearman rank correlation matrix (Pearson on average-ranked columns),
/// p x p row-major. Constant features get zero correlations off-diagonal.
std::vector<double> spearman_matrix(const Dataset& data);

/// Complete-linkage clustering on 1 - |rho|; one representative per cluster
/// (lowest mean |rho| to features outside the cluster, ties by column order).
ReductionReport correlation_filter(const Dataset& data, double rho_threshold = 0.7);

/// Iteratively drops the retained feature best explained by the others
/// (OLS R^2 >= threshold) until none qualifies. Extends the given report.
ReductionReport redundancy_filter(const Dataset& data, const ReductionReport& after_correlation,
                                  double r2_threshold = 0.9);

/// Full Step-1 chain: correlation filter then redundancy filter. Returns the
/// reduced dataset and the combined report.
std::pair<Dataset, ReductionReport> reduce_features(const Dataset& data,
                                                    double rho_threshold = 0.7,
                                                    double r2_threshold = 0.9);

}  // namespace noisegate
