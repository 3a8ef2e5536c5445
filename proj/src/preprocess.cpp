#include "noisegate/preprocess.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "noisegate/errors.hpp"
#include "noisegate/stats.hpp"

namespace noisegate {

namespace {

double pearson(std::span<const double> a, std::span<const double> b) {
    const double ma = mean(a);
    const double mb = mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

// R^2 of an intercept-OLS regression of column y on columns X. Falls back to
// a 1e-8 ridge when the normal equations are not positive definite.
double ols_r_squared(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, bool& jitter_used) {
    const auto n = x.rows();
    Eigen::MatrixXd design(n, x.cols() + 1);
    design.col(0).setOnes();
    design.rightCols(x.cols()) = x;

    const Eigen::MatrixXd gram = design.transpose() * design;
    const Eigen::VectorXd rhs = design.transpose() * y;

    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    Eigen::VectorXd beta;
    if (llt.info() == Eigen::Success) {
        beta = llt.solve(rhs);
    } else {
        jitter_used = true;
        Eigen::MatrixXd jittered = gram;
        jittered.diagonal().array() += 1e-8;
        beta = Eigen::LDLT<Eigen::MatrixXd>(jittered).solve(rhs);
    }

    const Eigen::VectorXd residual = y - design * beta;
    const double sse = residual.squaredNorm();
    const double sst = (y.array() - y.mean()).square().sum();
    if (sst <= 0.0) return 0.0;
    return std::clamp(1.0 - sse / sst, 0.0, 1.0);
}

}  // namespace

std::vector<double> spearman_matrix(const Dataset& data) {
    const std::size_t p = data.n_features();
    if (p == 0) throw DataError("no features");
    if (data.n_rows() < 2) throw DataError("need at least 2 rows for correlations");

    std::vector<std::vector<double>> ranked(p);
    for (std::size_t j = 0; j < p; ++j) ranked[j] = average_ranks(data.column(j));

    std::vector<double> rho(p * p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        rho[i * p + i] = 1.0;
        for (std::size_t j = i + 1; j < p; ++j) {
            const double r = pearson(ranked[i], ranked[j]);
            rho[i * p + j] = r;
            rho[j * p + i] = r;
        }
    }
    return rho;
}

ReductionReport correlation_filter(const Dataset& data, double rho_threshold) {
    if (rho_threshold <= 0.0 || rho_threshold > 1.0)
        throw ConfigError("rho_threshold must be in (0, 1]");

    const std::size_t p = data.n_features();
    ReductionReport report;
    const std::vector<double> rho = spearman_matrix(data);

    for (std::size_t j = 0; j < p; ++j)
        if (sample_variance(data.column(j)) == 0.0)
            report.constant_features.push_back(data.feature_names[j]);

    // Complete-linkage agglomeration on 1 - |rho|: merge while the farthest
    // pair between two clusters still correlates at or above the threshold.
    std::vector<std::vector<std::size_t>> clusters(p);
    for (std::size_t j = 0; j < p; ++j) clusters[j] = {j};

    const double max_distance = 1.0 - rho_threshold;
    auto complete_distance = [&](const std::vector<std::size_t>& a,
                                 const std::vector<std::size_t>& b) {
        double worst = 0.0;
        for (std::size_t i : a)
            for (std::size_t j : b) worst = std::max(worst, 1.0 - std::abs(rho[i * p + j]));
        return worst;
    };

    while (clusters.size() > 1) {
        std::size_t best_a = 0, best_b = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < clusters.size(); ++a)
            for (std::size_t b = a + 1; b < clusters.size(); ++b) {
                const double d = complete_distance(clusters[a], clusters[b]);
                if (d < best_d) {
                    best_d = d;
                    best_a = a;
                    best_b = b;
                }
            }
        if (best_d > max_distance) break;
        clusters[best_a].insert(clusters[best_a].end(), clusters[best_b].begin(),
                                clusters[best_b].end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_b));
    }

    // Representative: lowest mean |rho| to features outside the cluster.
    std::vector<bool> retained_mask(p, false);
    for (auto& cluster : clusters) {
        std::sort(cluster.begin(), cluster.end());
        std::size_t rep = cluster.front();
        if (cluster.size() > 1) {
            double best_score = std::numeric_limits<double>::infinity();
            std::vector<bool> inside(p, false);
            for (std::size_t j : cluster) inside[j] = true;
            for (std::size_t j : cluster) {
                double sum = 0.0;
                std::size_t count = 0;
                for (std::size_t k = 0; k < p; ++k)
                    if (!inside[k]) {
                        sum += std::abs(rho[j * p + k]);
                        ++count;
                    }
                const double score = count == 0 ? 0.0 : sum / static_cast<double>(count);
                if (score < best_score) {  // ties keep the earlier column
                    best_score = score;
                    rep = j;
                }
            }
        }
        retained_mask[rep] = true;
        for (std::size_t j : cluster)
            if (j != rep)
                report.dropped_correlated.emplace_back(data.feature_names[j],
                                                       data.feature_names[rep]);
    }

    for (std::size_t j = 0; j < p; ++j)
        if (retained_mask[j]) report.retained.push_back(data.feature_names[j]);
    std::sort(report.dropped_correlated.begin(), report.dropped_correlated.end());
    return report;
}

ReductionReport redundancy_filter(const Dataset& data, const ReductionReport& after_correlation,
                                  double r2_threshold) {
    if (r2_threshold <= 0.0 || r2_threshold > 1.0)
        throw ConfigError("r2_threshold must be in (0, 1]");

    ReductionReport report = after_correlation;
    std::vector<std::string> retained = report.retained;

    while (retained.size() > 1) {
        const Dataset current = data.select_features(retained);
        const std::size_t n = current.n_rows();
        const std::size_t p = current.n_features();

        Eigen::MatrixXd all(n, p);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < p; ++j) all(static_cast<Eigen::Index>(i),
                                                    static_cast<Eigen::Index>(j)) = current.at(i, j);

        double worst_r2 = -1.0;
        std::size_t worst_j = p;
        for (std::size_t j = 0; j < p; ++j) {
            Eigen::MatrixXd others(n, p - 1);
            Eigen::Index col = 0;
            for (std::size_t k = 0; k < p; ++k)
                if (k != j) others.col(col++) = all.col(static_cast<Eigen::Index>(k));
            const double r2 = ols_r_squared(others, all.col(static_cast<Eigen::Index>(j)),
                                            report.ridge_jitter_used);
            if (r2 > worst_r2) {  // ties drop the earlier column
                worst_r2 = r2;
                worst_j = j;
            }
        }
        if (worst_j == p || worst_r2 < r2_threshold) break;
        report.dropped_redundant.emplace_back(retained[worst_j], worst_r2);
        retained.erase(retained.begin() + static_cast<std::ptrdiff_t>(worst_j));
    }

    report.retained = retained;
    return report;
}

std::pair<Dataset, ReductionReport> reduce_features(const Dataset& data, double rho_threshold,
                                                    double r2_threshold) {
    ReductionReport report = correlation_filter(data, rho_threshold);
    report = redundancy_filter(data, report, r2_threshold);
    return {data.select_features(report.retained), report};
}

}  // namespace noisegate
