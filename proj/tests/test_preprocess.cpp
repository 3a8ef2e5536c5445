#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "noisegate/dataset.hpp"
#include "noisegate/preprocess.hpp"
#include "noisegate/rng.hpp"
#include "oracles.hpp"

using namespace noisegate;

namespace {

Dataset make_dataset(const std::vector<std::string>& names,
                     const std::vector<std::vector<double>>& columns) {
    Dataset data;
    data.feature_names = names;
    const std::size_t n = columns.front().size();
    data.target.assign(n, 0.0);
    data.features.resize(n * columns.size());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < columns.size(); ++j)
            data.features[i * columns.size() + j] = columns[j][i];
    return data;
}

}  // namespace

TEST_CASE("spearman is 1 for monotone pairs and -1 for antitone pairs") {
    std::vector<double> x{1, 4, 2, 9, 5, 7};
    std::vector<double> linear(x.size()), cubic(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        linear[i] = 2.0 * x[i] + 3.0;
        cubic[i] = -x[i] * x[i] * x[i];
    }
    const Dataset data = make_dataset({"x", "lin", "cub"}, {x, linear, cubic});
    const std::vector<double> rho = spearman_matrix(data);
    CHECK(rho[0 * 3 + 1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rho[0 * 3 + 2] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(rho[0 * 3 + 0] == 1.0);
}

TEST_CASE("spearman equals the rank-then-Pearson reference on random data") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<double>> columns(3, std::vector<double>(8));
        for (auto& column : columns)
            for (double& v : column) v = std::floor(rng.uniform() * 5.0);  // force ties
        const Dataset data = make_dataset({"a", "b", "c"}, columns);
        const std::vector<double> rho = spearman_matrix(data);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                const double expected =
                    i == j ? 1.0 : oracles::rank_then_pearson(columns[i], columns[j]);
                CHECK(rho[i * 3 + j] == doctest::Approx(expected).epsilon(1e-12));
            }
    }
}

TEST_CASE("constant features get zero correlations and a flag") {
    const Dataset data = make_dataset({"c", "x"}, {{2, 2, 2, 2}, {1, 2, 3, 4}});
    const std::vector<double> rho = spearman_matrix(data);
    CHECK(rho[0 * 2 + 1] == 0.0);
    CHECK(rho[0 * 2 + 0] == 1.0);
    const ReductionReport report = correlation_filter(data, 0.7);
    CHECK(report.constant_features == std::vector<std::string>{"c"});
}

TEST_CASE("correlation filter collapses perfectly correlated triples") {
    std::vector<double> x{1, 2, 3, 4, 5, 6};
    std::vector<double> x2(x), x3(x);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x2[i] = 3.0 * x[i] - 1.0;
        x3[i] = std::pow(x[i], 3);
    }
    const Dataset data = make_dataset({"a", "b", "c"}, {x, x2, x3});
    const ReductionReport report = correlation_filter(data, 0.7);
    CHECK(report.retained.size() == 1);
    CHECK(report.dropped_correlated.size() == 2);
}

TEST_CASE("correlation filter keeps everything below the threshold") {
    Rng rng(7);
    std::vector<std::vector<double>> columns(4, std::vector<double>(200));
    for (auto& column : columns)
        for (double& v : column) v = rng.normal();
    const Dataset data = make_dataset({"a", "b", "c", "d"}, columns);
    const ReductionReport report = correlation_filter(data, 0.7);
    CHECK(report.retained.size() == 4);
}

TEST_CASE("correlation filter matches brute-force grouping on planted duplicates") {
    Rng rng(99);
    const std::size_t n = 150;
    std::vector<std::vector<double>> columns(6, std::vector<double>(n));
    for (std::size_t j : {0u, 1u, 2u, 3u})
        for (double& v : columns[j]) v = rng.normal();
    for (std::size_t i = 0; i < n; ++i) {
        columns[4][i] = columns[0][i] * 2.0 + 1.0;   // duplicate of column 0
        columns[5][i] = -columns[1][i] * 0.5;        // duplicate of column 1 (negated)
    }
    const Dataset data =
        make_dataset({"a", "b", "c", "d", "a2", "b2"}, columns);
    const ReductionReport report = correlation_filter(data, 0.95);
    CHECK(report.retained.size() == 4);

    // Brute force: group features connected by |rho| >= threshold.
    const std::vector<double> rho = spearman_matrix(data);
    std::set<std::set<std::size_t>> expected_groups;
    std::vector<bool> used(6, false);
    for (std::size_t i = 0; i < 6; ++i) {
        if (used[i]) continue;
        std::set<std::size_t> group{i};
        for (std::size_t j = i + 1; j < 6; ++j)
            if (std::abs(rho[i * 6 + j]) >= 0.95) {
                group.insert(j);
                used[j] = true;
            }
        expected_groups.insert(group);
    }
    CHECK(expected_groups.size() == 4);
    // Every dropped feature maps to a representative inside its brute-force group.
    for (const auto& [dropped, representative] : report.dropped_correlated) {
        const auto index_of = [&](const std::string& name) {
            return static_cast<std::size_t>(
                std::find(data.feature_names.begin(), data.feature_names.end(), name) -
                data.feature_names.begin());
        };
        bool together = false;
        for (const auto& group : expected_groups)
            if (group.count(index_of(dropped)) && group.count(index_of(representative)))
                together = true;
        CHECK(together);
    }
}

TEST_CASE("redundancy filter drops an exact linear combination") {
    Rng rng(13);
    const std::size_t n = 120;
    std::vector<std::vector<double>> columns(3, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        columns[0][i] = rng.normal();
        columns[1][i] = rng.normal();
        columns[2][i] = columns[0][i] + columns[1][i];
    }
    const Dataset data = make_dataset({"a", "b", "c"}, columns);
    ReductionReport report = correlation_filter(data, 0.99);
    REQUIRE(report.retained.size() == 3);  // pairwise correlations are moderate
    report = redundancy_filter(data, report, 0.9);
    CHECK(report.retained.size() == 2);
    REQUIRE(report.dropped_redundant.size() == 1);
    CHECK(report.dropped_redundant[0].second == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("redundancy filter keeps independent features") {
    Rng rng(17);
    const std::size_t n = 200;
    std::vector<std::vector<double>> columns(4, std::vector<double>(n));
    for (auto& column : columns)
        for (double& v : column) v = rng.normal();
    const Dataset data = make_dataset({"a", "b", "c", "d"}, columns);
    ReductionReport report = correlation_filter(data, 0.7);
    report = redundancy_filter(data, report, 0.9);
    CHECK(report.retained.size() == 4);

    // Direct R^2 reference stays far from the threshold.
    for (std::size_t j = 0; j < 4; ++j) {
        std::vector<std::vector<double>> predictors;
        for (std::size_t k = 0; k < 4; ++k)
            if (k != j) predictors.push_back(columns[k]);
        CHECK(oracles::direct_ols_r2(predictors, columns[j]) < 0.3);
    }
}

TEST_CASE("redundancy filter leaves a single feature unchanged") {
    const Dataset data = make_dataset({"only"}, {{1, 2, 3, 4, 5}});
    ReductionReport report = correlation_filter(data, 0.7);
    report = redundancy_filter(data, report, 0.9);
    CHECK(report.retained == std::vector<std::string>{"only"});
}

TEST_CASE("full reduction chain is idempotent and never empties the feature set") {
    Rng rng(41);
    const std::size_t n = 150;
    std::vector<std::vector<double>> columns(5, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        columns[0][i] = rng.normal();
        columns[1][i] = rng.normal();
        columns[2][i] = columns[0][i] * 1.01 + 0.01 * rng.normal();  // near-duplicate
        columns[3][i] = columns[0][i] - columns[1][i];               // linear combo
        columns[4][i] = rng.normal();
    }
    const Dataset data = make_dataset({"a", "b", "adup", "combo", "e"}, columns);

    auto [reduced, report] = reduce_features(data, 0.7, 0.9);
    CHECK(!report.retained.empty());
    auto [reduced2, report2] = reduce_features(reduced, 0.7, 0.9);
    CHECK(report2.retained == report.retained);
    CHECK(report2.dropped_correlated.empty());
    CHECK(report2.dropped_redundant.empty());
}

TEST_CASE("retained feature set is column-order independent on duplicate-free data") {
    Rng rng(53);
    const std::size_t n = 180;
    std::vector<std::vector<double>> columns(4, std::vector<double>(n));
    for (auto& column : columns)
        for (double& v : column) v = rng.normal();

    const Dataset data = make_dataset({"a", "b", "c", "d"}, columns);
    auto [reduced, report] = reduce_features(data, 0.7, 0.9);

    const Dataset permuted =
        make_dataset({"d", "b", "a", "c"}, {columns[3], columns[1], columns[0], columns[2]});
    auto [reduced2, report2] = reduce_features(permuted, 0.7, 0.9);

    const std::set<std::string> first(report.retained.begin(), report.retained.end());
    const std::set<std::string> second(report2.retained.begin(), report2.retained.end());
    CHECK(first == second);
}
