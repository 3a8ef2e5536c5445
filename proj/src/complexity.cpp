#include "noisegate/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "noisegate/errors.hpp"
#include "noisegate/logistic.hpp"
#include "noisegate/stats.hpp"

namespace noisegate {

namespace {

constexpr double kRatioCap = 1e12;

void require_two_per_class(const ClassLabels& labels) {
    std::size_t n1 = 0;
    for (ClassLabel l : labels) n1 += l == ClassLabel::class1;
    if (n1 < 2 || labels.size() - n1 < 2)
        throw InsufficientClass("complexity measures need at least 2 points per class");
}

double squared_distance(const double* a, const double* b, std::size_t p) {
    double d = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        const double diff = a[j] - b[j];
        d += diff * diff;
    }
    return d;
}

std::vector<double> standardized(const std::vector<double>& features, std::size_t n,
                                 std::size_t p) {
    std::vector<double> z = features;
    Standardizer::fit(z, n, p).apply(z, n, p);
    return z;
}

}  // namespace

double fisher_f1(const std::vector<double>& features, std::size_t n, std::size_t p,
                 const ClassLabels& labels, bool* capped) {
    require_two_per_class(labels);

    double best = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        std::vector<double> a, b;
        for (std::size_t i = 0; i < n; ++i)
            (labels[i] == ClassLabel::class1 ? a : b).push_back(features[i * p + j]);
        const double mu_a = mean(a);
        const double mu_b = mean(b);
        const double var_sum = sample_variance(a) + sample_variance(b);
        const double num = (mu_a - mu_b) * (mu_a - mu_b);
        double score;
        if (var_sum > 0.0) {
            score = num / var_sum;
        } else if (num == 0.0) {
            score = 0.0;
        } else {
            score = kRatioCap;
            if (capped) *capped = true;
        }
        best = std::max(best, score);
    }
    return best;
}

double linear_sep_l2(const std::vector<double>& features, std::size_t n, std::size_t p,
                     const ClassLabels& labels, std::uint64_t /*seed*/) {
    require_two_per_class(labels);

    const std::vector<double> z = standardized(features, n, p);
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) y[i] = labels[i] == ClassLabel::class1 ? 1.0 : 0.0;

    LogisticOptions options;
    options.ridge = 1e-4;
    const LogisticFit fit = fit_logistic(z, n, p, y, options);

    std::size_t errors = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double prob = logistic_predict(fit, z.data() + i * p, p);
        const bool predicted_class1 = prob >= 0.5;
        errors += predicted_class1 != (labels[i] == ClassLabel::class1);
    }
    return static_cast<double>(errors) / static_cast<double>(n);
}

double mixture_n2(const std::vector<double>& features, std::size_t n, std::size_t p,
                  const ClassLabels& labels, bool* capped) {
    require_two_per_class(labels);
    const std::vector<double> z = standardized(features, n, p);

    double intra_sum = 0.0;
    double inter_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double best_intra = std::numeric_limits<double>::infinity();
        double best_inter = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            if (k == i) continue;
            const double d = squared_distance(z.data() + i * p, z.data() + k * p, p);
            if (labels[k] == labels[i])
                best_intra = std::min(best_intra, d);
            else
                best_inter = std::min(best_inter, d);
        }
        intra_sum += std::sqrt(best_intra);
        inter_sum += std::sqrt(best_inter);
    }

    if (inter_sum <= 0.0) {
        if (intra_sum <= 0.0) return 0.0;
        if (capped) *capped = true;
        return kRatioCap;
    }
    return intra_sum / inter_sum;
}

double nonlinearity_n4(const std::vector<double>& features, std::size_t n, std::size_t p,
                       const ClassLabels& labels, Rng rng) {
    require_two_per_class(labels);
    const std::vector<double> z = standardized(features, n, p);

    std::vector<std::size_t> class_members[2];
    for (std::size_t i = 0; i < n; ++i)
        class_members[labels[i] == ClassLabel::class1 ? 0 : 1].push_back(i);
    const double p_class1 =
        static_cast<double>(class_members[0].size()) / static_cast<double>(n);

    std::size_t errors = 0;
    std::vector<double> synthetic(p);
    for (std::size_t m = 0; m < n; ++m) {
        const int cls = rng.uniform() < p_class1 ? 0 : 1;
        const auto& members = class_members[cls];
        const std::size_t a = members[rng.uniform_index(members.size())];
        std::size_t b = a;
        while (b == a) b = members[rng.uniform_index(members.size())];
        const double alpha = rng.uniform();
        for (std::size_t j = 0; j < p; ++j)
            synthetic[j] = z[a * p + j] + alpha * (z[b * p + j] - z[a * p + j]);

        // 1NN over the real points; ties keep the earliest index.
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = squared_distance(synthetic.data(), z.data() + i * p, p);
            if (d < best) {
                best = d;
                best_i = i;
            }
        }
        const int predicted = labels[best_i] == ClassLabel::class1 ? 0 : 1;
        errors += predicted != cls;
    }
    return static_cast<double>(errors) / static_cast<double>(n);
}

double nonlinearity_n4(const std::vector<double>& features, std::size_t n, std::size_t p,
                       const ClassLabels& labels, std::uint64_t seed) {
    return nonlinearity_n4(features, n, p, labels, Rng(seed));
}

ComplexityReport complexity_report(const std::vector<double>& features, std::size_t n,
                                   std::size_t p, const ClassLabels& labels, Rng rng) {
    ComplexityReport report;
    report.f1 = fisher_f1(features, n, p, labels, &report.capped);
    report.l2 = linear_sep_l2(features, n, p, labels);
    report.n2 = mixture_n2(features, n, p, labels, &report.capped);
    report.n4 = nonlinearity_n4(features, n, p, labels, rng);
    return report;
}

std::vector<std::pair<int, ComplexityReport>> quanta_profile(const Dataset& data,
                                                             const ClassLabels& labels,
                                                             const QuantaAssignment& quanta,
                                                             std::uint64_t seed) {
    if (quanta.bin_index.size() != data.n_rows()) throw DataError("quanta length mismatch");

    std::vector<std::pair<int, ComplexityReport>> out;
    for (int bin = 1; bin <= quanta.n_bins; ++bin) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < data.n_rows(); ++i)
            if (quanta.bin_index[i] == bin) rows.push_back(i);

        std::size_t n1 = 0;
        for (std::size_t i : rows) n1 += labels[i] == ClassLabel::class1;

        ComplexityReport report;
        if (rows.size() < 4 || n1 < 2 || rows.size() - n1 < 2) {
            report.single_class = true;  // degenerate quantum: measures stay 0
        } else {
            const Dataset quantum = data.subset(rows);
            ClassLabels quantum_labels;
            quantum_labels.reserve(rows.size());
            for (std::size_t i : rows) quantum_labels.push_back(labels[i]);
            report = complexity_report(
                quantum.features, quantum.n_rows(), quantum.n_features(), quantum_labels,
                Rng::substream(seed, {streams::kQuantaBin, static_cast<std::uint64_t>(bin)}));
        }
        out.emplace_back(bin, report);
    }
    return out;
}

}  // namespace noisegate
