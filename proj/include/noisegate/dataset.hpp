#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace noisegate {

enum class ClassLabel : std::uint8_t { class1 = 0, class2 = 1 };
using ClassLabels = std::vector<ClassLabel>;

/// Tabular dataset: a row-major N x p feature matrix plus a continuous
/// dependent variable. Immutable after construction.
struct Dataset {
    std::vector<std::string> feature_names;
    std::vector<double> features;  // row-major, n_rows() * n_features()
    std::vector<double> target;
    std::string source_path;

    std::size_t n_rows() const { return target.size(); }
    std::size_t n_features() const { return feature_names.size(); }

    double at(std::size_t row, std::size_t col) const {
        return features[row * n_features() + col];
    }
    std::span<const double> row(std::size_t i) const {
        return {features.data() + i * n_features(), n_features()};
    }
    std::vector<double> column(std::size_t j) const;

    /// Copies the given rows (in order) into a new dataset.
    Dataset subset(std::span<const std::size_t> rows) const;
    /// Keeps only the named feature columns, in the given order.
    Dataset select_features(const std::vector<std::string>& names) const;

    /// Validates the structural invariants (finite values, unique names,
    /// matching lengths); throws DataError on violation.
    void validate() const;
};

/// Reads an RFC-4180-style CSV (header row required, '.' decimal separator),
/// extracting target_column as the dependent variable and every other column
/// as a feature. No imputation: a non-numeric or empty cell is an error.
Dataset load_csv(const std::string& path, const std::string& target_column);

/// Writes the dataset back out with round-trip double formatting; the target
/// column is appended last under the given name.
void write_csv(const Dataset& data, const std::string& path,
               const std::string& target_column = "target");

struct BoxCoxResult {
    std::vector<double> transformed;
    double lambda = 1.0;
};

/// Box-Cox transform with lambda fitted by profile log-likelihood over the
/// grid [-2, 2] in steps of 0.01. All inputs must be strictly positive;
/// callers with non-positive data shift by (1 - min) first.
BoxCoxResult box_cox(std::span<const double> values);

/// Box-Cox transform at a fixed exponent: (v^l - 1)/l, or ln(v) at l = 0.
std::vector<double> box_cox_fixed(std::span<const double> values, double lambda);

/// Profile log-likelihood of the Box-Cox model at a fixed exponent.
double box_cox_log_likelihood(std::span<const double> values, double lambda);

/// Per-class equal-width bins over the Box-Cox-transformed dependent
/// variable. Bin 1 holds the points farthest from the discretization
/// threshold and bin n_bins the points adjacent to it.
struct QuantaAssignment {
    std::vector<int> bin_index;  // in [1, n_bins]
    int n_bins = 5;
    double lambda = 1.0;  // fitted on the whole (shifted) target
    double shift = 0.0;   // positivity shift applied before the transform
};

/// Bins each class separately: equal-width over that class's transformed
/// target range, numbered so that increasing bin index means increasing
/// proximity to the cutpoint. A class with zero spread goes entirely into
/// the threshold-adjacent bin. forced_lambda skips the profile-likelihood fit.
QuantaAssignment bin_into_quanta(const Dataset& data, const ClassLabels& labels, int n_bins = 5,
                                 std::optional<double> forced_lambda = std::nullopt);

}  // namespace noisegate
