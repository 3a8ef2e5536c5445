#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "noisegate/discretize.hpp"
#include "noisegate/errors.hpp"
#include "noisegate/rng.hpp"
#include "oracles.hpp"

using namespace noisegate;

namespace {

Dataset one_feature_dataset(const std::vector<double>& target,
                            const std::vector<double>& feature) {
    Dataset data;
    data.feature_names = {"x"};
    data.features = feature;
    data.target = target;
    return data;
}

Dataset target_only(const std::vector<double>& target) {
    return one_feature_dataset(target, std::vector<double>(target.size(), 0.0));
}

// Dependent variable with clean feature signal outside (9, 11) and
// edge-ramped label scrambling inside; the non-linearity peak sits at the
// planted band edge.
Dataset planted_band_dataset(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Dataset data;
    data.feature_names = {"x"};
    for (std::size_t i = 0; i < n; ++i) {
        const double base = 5.0 + 10.0 * rng.uniform();
        double t = base;
        const double u = std::abs(base - 10.0);
        if (u < 1.0 && rng.uniform() < 0.9 * u) t = 20.0 - base;  // reflect across 10
        data.features.push_back(base);
        data.target.push_back(t);
    }
    return data;
}

}  // namespace

TEST_CASE("median threshold") {
    CHECK(threshold_median(std::vector<double>{1, 2, 3}) == 2.0);
    CHECK(threshold_median(std::vector<double>{1, 2, 3, 4}) == 2.5);

    Rng rng(3);
    std::vector<double> values(1000);
    for (double& v : values) v = rng.uniform();
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const double expected = 0.5 * (sorted[499] + sorted[500]);
    CHECK(threshold_median(values) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("ckmeans threshold on a clear two-cluster target") {
    CHECK(threshold_ckmeans(std::vector<double>{1, 2, 3, 10, 11, 12}) == 3.0);
    CHECK(threshold_ckmeans(std::vector<double>{0, 0, 0, 1}) == 0.0);
    CHECK_THROWS_AS(threshold_ckmeans(std::vector<double>{4, 4, 4, 4}), DegenerateTarget);
}

TEST_CASE("ckmeans split equals the exhaustive optimum for small random samples") {
    Rng rng(29);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.uniform_index(19);
        std::vector<double> values(n);
        for (double& v : values) v = rng.uniform() * 10.0;
        for (std::size_t i = 2; i < n; i += 3) values[i] = values[i - 1];  // duplicates
        std::vector<double> sorted = values;
        std::sort(sorted.begin(), sorted.end());
        if (sorted.front() == sorted.back()) continue;

        const double threshold = threshold_ckmeans(values);
        const std::size_t split = oracles::exhaustive_two_means_split(sorted);
        CHECK(threshold == sorted[split]);
    }
}

TEST_CASE("cart stump threshold") {
    // Six points sit below minsplit, so the bucket constraint relaxes.
    CHECK(threshold_cart(std::vector<double>{1, 2, 3, 10, 11, 12}) == 6.5);

    std::vector<double> balanced(30, 0.0);
    for (std::size_t i = 15; i < 30; ++i) balanced[i] = 1.0;
    CHECK(threshold_cart(balanced) == 0.5);

    CHECK_THROWS_AS(threshold_cart(std::vector<double>{2, 2, 2}), DegenerateTarget);
}

TEST_CASE("cart stump equals the constrained exhaustive minimizer") {
    Rng rng(67);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 21 + rng.uniform_index(30);  // constraints active
        std::vector<double> values(n);
        for (double& v : values) v = rng.uniform() * 12.0;
        for (std::size_t i = 2; i < n; i += 3) values[i] = values[i - 1];  // duplicates
        std::vector<double> sorted = values;
        std::sort(sorted.begin(), sorted.end());
        if (sorted.front() == sorted.back()) continue;

        const double expected = oracles::exhaustive_stump_threshold(values, 7);
        if (std::isnan(expected)) {
            CHECK_THROWS_AS(threshold_cart(values), DegenerateTarget);
        } else {
            CHECK(threshold_cart(values) == expected);
        }
    }
}

TEST_CASE("thresholds are invariant under input permutation") {
    Rng rng(71);
    std::vector<double> values(60);
    for (double& v : values) v = rng.normal();
    std::vector<double> shuffled = values;
    for (std::size_t i = shuffled.size(); i > 1; --i)
        std::swap(shuffled[i - 1], shuffled[rng.uniform_index(i)]);

    CHECK(threshold_median(values) == threshold_median(shuffled));
    CHECK(threshold_ckmeans(values) == threshold_ckmeans(shuffled));
    CHECK(threshold_cart(values) == threshold_cart(shuffled));
}

TEST_CASE("adding a constant shifts every threshold by that constant") {
    Rng rng(73);
    std::vector<double> values(50);
    for (double& v : values) v = rng.normal();
    std::vector<double> shifted = values;
    const double c = 100.0;
    for (double& v : shifted) v += c;

    CHECK(threshold_median(shifted) ==
          doctest::Approx(threshold_median(values) + c).epsilon(1e-12));
    CHECK(threshold_ckmeans(shifted) ==
          doctest::Approx(threshold_ckmeans(values) + c).epsilon(1e-12));
    CHECK(threshold_cart(shifted) ==
          doctest::Approx(threshold_cart(values) + c).epsilon(1e-12));
}

TEST_CASE("discretize applies the <= rule and rejects empty classes") {
    const Dataset data = target_only({1, 2, 3});
    const DiscretizationSpec spec = discretize(data, 2.0);
    CHECK(spec.labels == ClassLabels{ClassLabel::class1, ClassLabel::class1,
                                     ClassLabel::class2});
    CHECK_THROWS_AS(discretize(data, 0.5), EmptyClass);
    CHECK_THROWS_AS(discretize(data, 3.0), EmptyClass);
}

TEST_CASE("noisy area estimation reports no area for non-positive cutpoints") {
    const Dataset data = target_only({-5, -1, 0, 1, 5, 9});
    const NoisyAreaSpec spec = estimate_noisy_area(data, 0.0, 5.0, 1);
    CHECK(!spec.has_noisy_area());
    const NoisyAreaSpec negative = estimate_noisy_area(data, -2.0, 5.0, 1);
    CHECK(!negative.has_noisy_area());
}

TEST_CASE("noisy area estimation with a single candidate window") {
    Rng rng(5);
    Dataset data;
    data.feature_names = {"x"};
    for (int i = 0; i < 60; ++i) {
        const double t = 0.2 + 1.6 * rng.uniform();
        data.target.push_back(t);
        data.features.push_back(rng.normal());
    }
    const NoisyAreaSpec spec = estimate_noisy_area(data, 1.0, 100.0, 1);
    REQUIRE(spec.has_noisy_area());
    CHECK(*spec.limit_pct == 100.0);
    CHECK(spec.per_step_nonlinearity.size() == 1);
}

TEST_CASE("noisy area estimation finds a planted band") {
    const Dataset data = planted_band_dataset(1500, 2024);
    const NoisyAreaSpec spec = estimate_noisy_area(data, 10.0, 5.0, 7);
    REQUIRE(spec.has_noisy_area());
    CHECK(*spec.limit_pct == 10.0);

    // Determinism: same inputs, same result.
    const NoisyAreaSpec again = estimate_noisy_area(data, 10.0, 5.0, 7);
    CHECK(again.limit_pct == spec.limit_pct);
    CHECK(again.per_step_nonlinearity == spec.per_step_nonlinearity);
}

TEST_CASE("noisy fraction matches the window row count at the limit") {
    const Dataset data = planted_band_dataset(800, 7);
    const DiscretizationSpec spec = discretize(data, 10.0);
    const NoisyAreaSpec noisy = estimate_noisy_area(data, 10.0, 5.0, 7);
    REQUIRE(noisy.has_noisy_area());

    auto [retained, labels] = remove_window(data, spec.labels, 10.0, *noisy.limit_pct);
    const double remaining =
        static_cast<double>(retained.n_rows()) / static_cast<double>(data.n_rows());
    CHECK(remaining == doctest::Approx(1.0 - noisy.noisy_fraction).epsilon(1e-12));
}

TEST_CASE("extremes pick the sorted tails") {
    Rng rng(83);
    Dataset data = target_only({});
    for (int i = 0; i < 10; ++i) data.target.push_back(rng.uniform());
    data.features.assign(10, 0.0);
    const ExtremesSpec tails = extremes(data, 0.10);
    CHECK(tails.low_indices.size() == 1);
    CHECK(tails.high_indices.size() == 1);

    Dataset big = target_only({});
    for (int i = 0; i < 100; ++i) big.target.push_back(rng.normal());
    big.features.assign(100, 0.0);
    const ExtremesSpec wide = extremes(big, 0.499999);
    CHECK(wide.low_indices.size() == 49);
    CHECK(wide.high_indices.size() == 49);
    for (std::size_t low : wide.low_indices)
        CHECK(std::find(wide.high_indices.begin(), wide.high_indices.end(), low) ==
              wide.high_indices.end());

    // Against a plain full sort.
    std::vector<std::size_t> order(100);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return big.target[a] < big.target[b];
    });
    std::vector<std::size_t> expected_low(order.begin(), order.begin() + 49);
    std::sort(expected_low.begin(), expected_low.end());
    CHECK(wide.low_indices == expected_low);
}

TEST_CASE("remove_window obeys the open-interval rule") {
    const Dataset data = target_only({1, 2, 3, 4});
    const DiscretizationSpec spec = discretize(data, 2.0);

    auto [identity, labels0] = remove_window(data, spec.labels, 2.0, 0.0);
    CHECK(identity.n_rows() == 4);
    CHECK(identity.target == data.target);

    auto [trimmed, labels50] = remove_window(data, spec.labels, 2.0, 50.0);
    CHECK(trimmed.target == std::vector<double>{1, 3, 4});  // endpoints kept
}

TEST_CASE("windows nest as x grows") {
    Rng rng(90);
    Dataset data = target_only({});
    for (int i = 0; i < 200; ++i) data.target.push_back(20.0 * rng.uniform());
    data.features.assign(200, 0.0);

    const auto small = window_indices(data.target, 10.0, 10.0);
    const auto large = window_indices(data.target, 10.0, 30.0);
    for (std::size_t i : small)
        CHECK(std::find(large.begin(), large.end(), i) != large.end());
}
