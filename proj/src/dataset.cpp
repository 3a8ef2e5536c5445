#include "noisegate/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "noisegate/errors.hpp"
#include "noisegate/stats.hpp"

namespace noisegate {

namespace {

// Splits one CSV record, honoring double-quoted fields with embedded commas
// and doubled quotes.
std::vector<std::string> split_csv_record(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else if (c != '\r') {
            current.push_back(c);
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

bool parse_double(const std::string& text, double& out) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t')) --end;
    if (begin == end) return false;
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end && std::isfinite(out);
}

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

std::vector<double> Dataset::column(std::size_t j) const {
    std::vector<double> out(n_rows());
    for (std::size_t i = 0; i < n_rows(); ++i) out[i] = at(i, j);
    return out;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    Dataset out;
    out.feature_names = feature_names;
    out.source_path = source_path;
    const std::size_t p = n_features();
    out.features.reserve(rows.size() * p);
    out.target.reserve(rows.size());
    for (std::size_t i : rows) {
        out.features.insert(out.features.end(), features.begin() + i * p,
                            features.begin() + (i + 1) * p);
        out.target.push_back(target[i]);
    }
    return out;
}

Dataset Dataset::select_features(const std::vector<std::string>& names) const {
    Dataset out;
    out.feature_names = names;
    out.target = target;
    out.source_path = source_path;
    std::vector<std::size_t> cols;
    cols.reserve(names.size());
    for (const auto& name : names) {
        const auto it = std::find(feature_names.begin(), feature_names.end(), name);
        if (it == feature_names.end()) throw DataError("unknown feature: " + name);
        cols.push_back(static_cast<std::size_t>(it - feature_names.begin()));
    }
    out.features.reserve(n_rows() * cols.size());
    for (std::size_t i = 0; i < n_rows(); ++i)
        for (std::size_t j : cols) out.features.push_back(at(i, j));
    return out;
}

void Dataset::validate() const {
    if (n_rows() == 0) throw DataError("dataset is empty");
    if (n_features() == 0) throw DataError("dataset has no features");
    if (features.size() != n_rows() * n_features())
        throw DataError("feature matrix shape does not match names/target");
    std::unordered_set<std::string> seen;
    for (const auto& name : feature_names)
        if (!seen.insert(name).second) throw DataError("duplicate feature name: " + name);
    for (double v : features)
        if (!std::isfinite(v)) throw DataError("non-finite feature value");
    for (double v : target)
        if (!std::isfinite(v)) throw DataError("non-finite target value");
}

Dataset load_csv(const std::string& path, const std::string& target_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    const std::vector<std::string> header = split_csv_record(line);

    std::size_t target_idx = header.size();
    for (std::size_t j = 0; j < header.size(); ++j)
        if (header[j] == target_column) target_idx = j;
    if (target_idx == header.size()) throw MissingTargetColumn(target_column);

    Dataset data;
    data.source_path = path;
    for (std::size_t j = 0; j < header.size(); ++j)
        if (j != target_idx) data.feature_names.push_back(header[j]);

    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        ++row;
        const std::vector<std::string> cells = split_csv_record(line);
        if (cells.size() != header.size())
            throw DataError("row " + std::to_string(row) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(header.size()));
        for (std::size_t j = 0; j < cells.size(); ++j) {
            double v = 0.0;
            if (!parse_double(cells[j], v)) throw NonNumericCell(row, header[j], cells[j]);
            if (j == target_idx)
                data.target.push_back(v);
            else
                data.features.push_back(v);
        }
    }
    if (data.target.empty()) throw DataError("no data rows in: " + path);
    data.validate();
    return data;
}

void write_csv(const Dataset& data, const std::string& path, const std::string& target_column) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    for (const auto& name : data.feature_names) out << name << ',';
    out << target_column << '\n';
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        for (std::size_t j = 0; j < data.n_features(); ++j)
            out << format_double(data.at(i, j)) << ',';
        out << format_double(data.target[i]) << '\n';
    }
}

std::vector<double> box_cox_fixed(std::span<const double> values, double lambda) {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] <= 0.0) throw DataError("box-cox requires strictly positive values");
        out[i] = lambda == 0.0 ? std::log(values[i])
                               : (std::pow(values[i], lambda) - 1.0) / lambda;
    }
    return out;
}

double box_cox_log_likelihood(std::span<const double> values, double lambda) {
    const std::size_t n = values.size();
    const std::vector<double> y = box_cox_fixed(values, lambda);
    const double m = mean(y);
    double ss = 0.0;
    for (double v : y) ss += (v - m) * (v - m);
    const double sigma2 = ss / static_cast<double>(n);
    double log_sum = 0.0;
    for (double v : values) log_sum += std::log(v);
    if (sigma2 <= 0.0) return std::numeric_limits<double>::infinity();
    return -0.5 * static_cast<double>(n) * std::log(sigma2) + (lambda - 1.0) * log_sum;
}

BoxCoxResult box_cox(std::span<const double> values) {
    if (values.empty()) throw DataError("box-cox on empty input");
    for (double v : values)
        if (v <= 0.0) throw DataError("box-cox requires strictly positive values");

    double best_lambda = -2.0;
    double best_ll = -std::numeric_limits<double>::infinity();
    for (int k = -200; k <= 200; ++k) {
        const double lambda = static_cast<double>(k) / 100.0;
        const double ll = box_cox_log_likelihood(values, lambda);
        if (std::isfinite(ll) && ll > best_ll) {
            best_ll = ll;
            best_lambda = lambda;
        }
    }
    // A constant input has infinite likelihood everywhere; treat as identity.
    if (!std::isfinite(best_ll)) best_lambda = 1.0;
    return {box_cox_fixed(values, best_lambda), best_lambda};
}

QuantaAssignment bin_into_quanta(const Dataset& data, const ClassLabels& labels, int n_bins,
                                 std::optional<double> forced_lambda) {
    if (n_bins < 2) throw ConfigError("n_bins must be >= 2");
    if (labels.size() != data.n_rows()) throw DataError("label length mismatch");

    QuantaAssignment out;
    out.n_bins = n_bins;

    // Shift to positivity, then fit one exponent on the whole target.
    const double lo = *std::min_element(data.target.begin(), data.target.end());
    out.shift = lo <= 0.0 ? 1.0 - lo : 0.0;
    std::vector<double> shifted(data.target.begin(), data.target.end());
    for (double& v : shifted) v += out.shift;
    BoxCoxResult fit;
    if (forced_lambda) {
        fit.lambda = *forced_lambda;
        fit.transformed = box_cox_fixed(shifted, fit.lambda);
    } else {
        fit = box_cox(shifted);
    }
    out.lambda = fit.lambda;

    out.bin_index.assign(data.n_rows(), 0);
    for (const ClassLabel cls : {ClassLabel::class1, ClassLabel::class2}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == cls) members.push_back(i);
        if (members.empty()) throw EmptyClass("a class has no points to bin");

        double t_min = fit.transformed[members.front()];
        double t_max = t_min;
        for (std::size_t i : members) {
            t_min = std::min(t_min, fit.transformed[i]);
            t_max = std::max(t_max, fit.transformed[i]);
        }
        const double width = t_max - t_min;

        for (std::size_t i : members) {
            int bin;
            if (width <= 0.0) {
                bin = n_bins;  // zero spread: everything sits at the cutpoint side
            } else {
                const double rel = (fit.transformed[i] - t_min) / width;
                int idx = 1 + static_cast<int>(rel * n_bins);
                idx = std::clamp(idx, 1, n_bins);
                // class1 lies below the cutpoint, so larger values are closer
                // to it; class2 is the mirror image.
                bin = cls == ClassLabel::class1 ? idx : n_bins + 1 - idx;
            }
            out.bin_index[i] = bin;
        }
    }
    return out;
}

}  // namespace noisegate
