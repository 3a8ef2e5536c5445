#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "noisegate/complexity.hpp"
#include "noisegate/errors.hpp"
#include "oracles.hpp"

using namespace noisegate;

namespace {

struct Fixture {
    std::vector<double> rows;  // row-major
    ClassLabels labels;
    std::size_t n = 0;
    std::size_t p = 0;

    void add(std::vector<double> row, ClassLabel label) {
        p = row.size();
        rows.insert(rows.end(), row.begin(), row.end());
        labels.push_back(label);
        ++n;
    }
};

std::vector<bool> class1_mask(const ClassLabels& labels) {
    std::vector<bool> mask(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
        mask[i] = labels[i] == ClassLabel::class1;
    return mask;
}

Fixture two_blobs(std::size_t per_class, double separation, std::uint64_t seed) {
    Rng rng(seed);
    Fixture f;
    for (std::size_t i = 0; i < per_class; ++i)
        f.add({rng.normal(), rng.normal()}, ClassLabel::class1);
    for (std::size_t i = 0; i < per_class; ++i)
        f.add({rng.normal() + separation, rng.normal() + separation}, ClassLabel::class2);
    return f;
}

}  // namespace

TEST_CASE("fisher F1 on exact-moment classes") {
    Fixture f;
    const double s = std::sqrt(0.5);
    f.add({-s}, ClassLabel::class1);
    f.add({s}, ClassLabel::class1);   // mean 0, sample variance 1
    f.add({2.0 - s}, ClassLabel::class2);
    f.add({2.0 + s}, ClassLabel::class2);  // mean 2, sample variance 1
    CHECK(fisher_f1(f.rows, f.n, f.p, f.labels) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("fisher F1 is zero for identical class distributions") {
    Fixture f;
    for (double v : {1.0, 2.0, 3.0}) f.add({v}, ClassLabel::class1);
    for (double v : {1.0, 2.0, 3.0}) f.add({v}, ClassLabel::class2);
    CHECK(fisher_f1(f.rows, f.n, f.p, f.labels) == 0.0);
}

TEST_CASE("fisher F1 equals the direct per-feature formula on random data") {
    Rng rng(19);
    for (int trial = 0; trial < 10; ++trial) {
        Fixture f;
        for (int i = 0; i < 12; ++i)
            f.add({rng.normal(), rng.normal() + 1.0},
                  i % 2 == 0 ? ClassLabel::class1 : ClassLabel::class2);
        const double expected =
            oracles::direct_fisher_f1(f.rows, f.n, f.p, class1_mask(f.labels));
        CHECK(fisher_f1(f.rows, f.n, f.p, f.labels) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("fisher F1 caps the zero-variance different-means case") {
    Fixture f;
    f.add({1.0}, ClassLabel::class1);
    f.add({1.0}, ClassLabel::class1);
    f.add({2.0}, ClassLabel::class2);
    f.add({2.0}, ClassLabel::class2);
    bool capped = false;
    CHECK(fisher_f1(f.rows, f.n, f.p, f.labels, &capped) == 1e12);
    CHECK(capped);
}

TEST_CASE("fisher F1 is invariant under per-feature affine maps") {
    Rng rng(23);
    Fixture f;
    for (int i = 0; i < 16; ++i)
        f.add({rng.normal() + (i % 2), rng.normal()},
              i % 2 == 0 ? ClassLabel::class1 : ClassLabel::class2);

    // Scaling by a power of two is exact in floating point.
    Fixture doubled = f;
    for (double& v : doubled.rows) v *= 2.0;
    CHECK(fisher_f1(f.rows, f.n, f.p, f.labels) ==
          fisher_f1(doubled.rows, doubled.n, doubled.p, doubled.labels));

    // A general affine map agrees up to rounding.
    Fixture warped = f;
    for (std::size_t i = 0; i < warped.n; ++i) {
        warped.rows[i * 2] = -1.5 * f.rows[i * 2] + 3.0;
        warped.rows[i * 2 + 1] = 0.3 * f.rows[i * 2 + 1] - 7.0;
    }
    CHECK(fisher_f1(warped.rows, warped.n, warped.p, warped.labels) ==
          doctest::Approx(fisher_f1(f.rows, f.n, f.p, f.labels)).epsilon(1e-9));
}

TEST_CASE("L2 is zero on separable blobs and near half on random labels") {
    const Fixture separable = two_blobs(30, 8.0, 101);
    CHECK(linear_sep_l2(separable.rows, separable.n, separable.p, separable.labels) == 0.0);

    Rng rng(102);
    Fixture random;
    for (int i = 0; i < 200; ++i)
        random.add({rng.normal(), rng.normal()},
                   rng.uniform() < 0.5 ? ClassLabel::class1 : ClassLabel::class2);
    const double l2 = linear_sep_l2(random.rows, random.n, random.p, random.labels);
    CHECK(l2 > 0.4);
    CHECK(l2 <= 0.6);
}

TEST_CASE("L2 on XOR data cannot beat the linear bound") {
    Rng rng(103);
    Fixture xor_data;
    for (int i = 0; i < 200; ++i) {
        const double x = rng.normal();
        const double y = rng.normal();
        xor_data.add({x, y}, (x > 0) == (y > 0) ? ClassLabel::class1 : ClassLabel::class2);
    }
    CHECK(linear_sep_l2(xor_data.rows, xor_data.n, xor_data.p, xor_data.labels) >= 0.25);
}

TEST_CASE("N2 is small for tight far-apart clusters") {
    Rng rng(104);
    Fixture f;
    for (int i = 0; i < 20; ++i)
        f.add({0.01 * rng.normal(), 0.01 * rng.normal()}, ClassLabel::class1);
    for (int i = 0; i < 20; ++i)
        f.add({5.0 + 0.01 * rng.normal(), 5.0 + 0.01 * rng.normal()}, ClassLabel::class2);
    CHECK(mixture_n2(f.rows, f.n, f.p, f.labels) < 0.05);
}

TEST_CASE("N2 of interleaved identical distributions is near or above one") {
    Rng rng(105);
    Fixture f;
    for (int i = 0; i < 120; ++i)
        f.add({rng.normal(), rng.normal()},
              i % 2 == 0 ? ClassLabel::class1 : ClassLabel::class2);
    const double n2 = mixture_n2(f.rows, f.n, f.p, f.labels);
    CHECK(n2 > 0.8);
    CHECK(n2 == doctest::Approx(oracles::brute_force_n2(f.rows, f.n, f.p,
                                                        class1_mask(f.labels)))
                    .epsilon(1e-12));
}

TEST_CASE("N2 matches a hand-computed four-point table") {
    // Equally spaced points -1.5, -0.5, 0.5, 1.5 (scaled): every point's
    // nearest same-class neighbor is one step away (intra = 4 steps) and the
    // other-class minima are 2 + 1 + 1 + 2 steps, so N2 = 4/6. The scaling
    // cancels because N2 is a ratio.
    Fixture f;
    f.add({-1.5 / std::sqrt(5.0 / 3.0)}, ClassLabel::class1);
    f.add({-0.5 / std::sqrt(5.0 / 3.0)}, ClassLabel::class1);
    f.add({0.5 / std::sqrt(5.0 / 3.0)}, ClassLabel::class2);
    f.add({1.5 / std::sqrt(5.0 / 3.0)}, ClassLabel::class2);
    CHECK(mixture_n2(f.rows, f.n, f.p, f.labels) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("N2 equals the exhaustive oracle for all tiny samples") {
    Rng rng(106);
    for (int trial = 0; trial < 30; ++trial) {
        Fixture f;
        const std::size_t n = 4 + rng.uniform_index(5);  // 4..8
        for (std::size_t i = 0; i < n; ++i)
            f.add({rng.normal(), rng.normal()},
                  i % 2 == 0 ? ClassLabel::class1 : ClassLabel::class2);
        const double expected =
            oracles::brute_force_n2(f.rows, f.n, f.p, class1_mask(f.labels));
        CHECK(mixture_n2(f.rows, f.n, f.p, f.labels) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("N4 is zero for far clusters and near half for identical clouds") {
    const Fixture separable = two_blobs(30, 10.0, 107);
    CHECK(nonlinearity_n4(separable.rows, separable.n, separable.p, separable.labels,
                          std::uint64_t{1}) == 0.0);

    Rng rng(108);
    Fixture overlap;
    for (int i = 0; i < 120; ++i)
        overlap.add({rng.normal(), rng.normal()},
                    i % 2 == 0 ? ClassLabel::class1 : ClassLabel::class2);
    const double n4 =
        nonlinearity_n4(overlap.rows, overlap.n, overlap.p, overlap.labels, std::uint64_t{2});
    CHECK(n4 > 0.35);
    CHECK(n4 < 0.65);
}

TEST_CASE("N4 replays a hand-traceable six-point fixture") {
    Fixture f;
    f.add({0.0}, ClassLabel::class1);
    f.add({1.0}, ClassLabel::class1);
    f.add({2.0}, ClassLabel::class1);
    f.add({10.0}, ClassLabel::class2);
    f.add({11.0}, ClassLabel::class2);
    f.add({12.0}, ClassLabel::class2);

    const double n4 = nonlinearity_n4(f.rows, f.n, f.p, f.labels, std::uint64_t{42});

    // Scripted replay: consume the stream exactly as documented (class draw,
    // two distinct member draws, one alpha) and classify by nearest neighbor.
    std::vector<double> z(f.rows);
    double mean = 0.0;
    for (double v : z) mean += v;
    mean /= 6.0;
    double ss = 0.0;
    for (double v : z) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / 5.0);
    for (double& v : z) v = (v - mean) / sd;

    Rng replay(std::uint64_t{42});
    const std::vector<std::size_t> members[2] = {{0, 1, 2}, {3, 4, 5}};
    std::size_t errors = 0;
    for (int m = 0; m < 6; ++m) {
        const int cls = replay.uniform() < 0.5 ? 0 : 1;
        const std::size_t a = members[cls][replay.uniform_index(3)];
        std::size_t b = a;
        while (b == a) b = members[cls][replay.uniform_index(3)];
        const double alpha = replay.uniform();
        const double point = z[a] + alpha * (z[b] - z[a]);
        double best = 1e300;
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < 6; ++i) {
            const double d = (point - z[i]) * (point - z[i]);
            if (d < best) {
                best = d;
                best_i = i;
            }
        }
        errors += (best_i < 3 ? 0 : 1) != cls;
    }
    CHECK(n4 == static_cast<double>(errors) / 6.0);
}

TEST_CASE("N4 is deterministic and bounded") {
    const Fixture f = two_blobs(25, 1.0, 109);
    const double first = nonlinearity_n4(f.rows, f.n, f.p, f.labels, std::uint64_t{9});
    const double second = nonlinearity_n4(f.rows, f.n, f.p, f.labels, std::uint64_t{9});
    CHECK(first == second);
    CHECK(first >= 0.0);
    CHECK(first <= 1.0);
}

TEST_CASE("N2 and N4 are rotation invariant on exactly isotropic data") {
    // Two concentric regular polygons: per-axis moments are identical before
    // and after rotation, so the internal standardization cancels.
    Fixture f;
    const std::size_t k = 16;
    for (std::size_t i = 0; i < k; ++i) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / k;
        f.add({std::cos(a), std::sin(a)}, ClassLabel::class1);
    }
    for (std::size_t i = 0; i < k; ++i) {
        const double a = 2.0 * std::numbers::pi * (static_cast<double>(i) + 0.5) / k;
        f.add({3.0 * std::cos(a), 3.0 * std::sin(a)}, ClassLabel::class2);
    }

    Fixture rotated = f;
    const double theta = 0.3;
    for (std::size_t i = 0; i < rotated.n; ++i) {
        const double x = f.rows[i * 2];
        const double y = f.rows[i * 2 + 1];
        rotated.rows[i * 2] = std::cos(theta) * x - std::sin(theta) * y;
        rotated.rows[i * 2 + 1] = std::sin(theta) * x + std::cos(theta) * y;
    }

    CHECK(mixture_n2(f.rows, f.n, f.p, f.labels) ==
          doctest::Approx(mixture_n2(rotated.rows, rotated.n, rotated.p, rotated.labels))
              .epsilon(1e-9));
    CHECK(nonlinearity_n4(f.rows, f.n, f.p, f.labels, std::uint64_t{5}) ==
          doctest::Approx(nonlinearity_n4(rotated.rows, rotated.n, rotated.p, rotated.labels,
                                          std::uint64_t{5}))
              .epsilon(1e-9));
}

TEST_CASE("complexity measures reject single-point classes") {
    Fixture f;
    f.add({0.0}, ClassLabel::class1);
    f.add({1.0}, ClassLabel::class2);
    f.add({2.0}, ClassLabel::class2);
    CHECK_THROWS_AS(nonlinearity_n4(f.rows, f.n, f.p, f.labels, std::uint64_t{1}),
                    InsufficientClass);
    CHECK_THROWS_AS(fisher_f1(f.rows, f.n, f.p, f.labels), InsufficientClass);
}

TEST_CASE("quanta profile flags degenerate bins and tracks planted noise") {
    // Clean monotone data: target is an exact function of the feature.
    Dataset clean;
    clean.feature_names = {"x"};
    ClassLabels labels;
    for (int i = 0; i < 400; ++i) {
        const double x = static_cast<double>(i) / 40.0;  // 0..10
        clean.features.push_back(x);
        clean.target.push_back(1.0 + x);
        labels.push_back(clean.target.back() <= 6.0 ? ClassLabel::class1
                                                    : ClassLabel::class2);
    }
    const QuantaAssignment quanta = bin_into_quanta(clean, labels, 5, 1.0);
    const auto profile = quanta_profile(clean, labels, quanta, 3);
    REQUIRE(profile.size() == 5);
    for (const auto& [bin, report] : profile) {
        CHECK(report.n4 <= 0.05);  // clean data stays simple in every bin
    }

    // A bin holding a single class reports zeros with the flag.
    Dataset tiny;
    tiny.feature_names = {"x"};
    tiny.features = {0, 1, 2, 3, 4, 5, 6, 7};
    tiny.target = {1, 2, 3, 4, 10, 11, 12, 13};
    ClassLabels tiny_labels(8, ClassLabel::class1);
    for (int i = 4; i < 8; ++i) tiny_labels[i] = ClassLabel::class2;
    QuantaAssignment manual;
    manual.n_bins = 2;
    manual.bin_index = {1, 1, 1, 1, 1, 2, 2, 2};  // bin 2 is single-class
    const auto flagged = quanta_profile(tiny, tiny_labels, manual, 3);
    CHECK(flagged[1].second.single_class);
    CHECK(flagged[1].second.n4 == 0.0);
    CHECK(flagged[1].second.f1 == 0.0);
}
