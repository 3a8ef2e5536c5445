#include "noisegate/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "noisegate/errors.hpp"
#include "noisegate/parallel.hpp"
#include "noisegate/stats.hpp"

namespace noisegate {

namespace {

constexpr std::size_t kBrierIndex = 3;  // position in PerfVector::measure_names()

std::vector<double> x_grid(const NoisyAreaSpec& noisy) {
    std::vector<double> xs{0.0};
    if (!noisy.has_noisy_area()) return xs;
    const double limit = *noisy.limit_pct;
    for (int k = 1; static_cast<double>(k) * noisy.step_size_pct <= limit + 1e-9; ++k)
        xs.push_back(static_cast<double>(k) * noisy.step_size_pct);
    if (xs.back() < limit - 1e-9) xs.push_back(limit);
    return xs;
}

ClassLabels labels_of(const Dataset& data, double cutpoint) {
    ClassLabels labels(data.n_rows());
    for (std::size_t i = 0; i < data.n_rows(); ++i)
        labels[i] = data.target[i] <= cutpoint ? ClassLabel::class1 : ClassLabel::class2;
    return labels;
}

bool has_both_classes(const ClassLabels& labels, std::size_t min_per_class = 2) {
    std::size_t n1 = 0;
    for (ClassLabel l : labels) n1 += l == ClassLabel::class1;
    return n1 >= min_per_class && labels.size() - n1 >= min_per_class;
}

}  // namespace

std::vector<IncrementalPoint> incremental_analysis(const Dataset& data,
                                                   const DiscretizationSpec& spec,
                                                   const NoisyAreaSpec& noisy,
                                                   ClassifierKind kind, int n_boot,
                                                   std::uint64_t seed, bool reuse_x0_params) {
    std::vector<IncrementalPoint> points;
    std::optional<HyperParams> x0_params;

    for (const double x : x_grid(noisy)) {
        IncrementalPoint point;
        point.x_pct = x;

        auto [retained, labels] = remove_window(data, spec.labels, spec.cutpoint, x);
        point.retained_n = retained.n_rows();

        if (!has_both_classes(labels)) {
            point.infeasible = true;
            points.push_back(std::move(point));
            continue;
        }

        if (reuse_x0_params && x0_params) {
            point.params = *x0_params;
        } else {
            point.params = tune(kind, retained, labels, TuningGrid{},
                                Rng::substream(seed, {streams::kIncrementalTune,
                                                      static_cast<std::uint64_t>(x * 100.0)})
                                    .next_u64());
        }
        if (x == 0.0) x0_params = point.params;

        // The bootstrap seed is shared across x so iteration i pairs with
        // iteration i of the baseline.
        point.boot = bootstrap_validate(kind, retained, labels, n_boot, seed, point.params);
        points.push_back(std::move(point));
    }
    return points;
}

PerformanceImpactTable performance_impact(const std::vector<IncrementalPoint>& points) {
    if (points.size() < 2) throw DataError("performance_impact needs at least 2 points");
    const IncrementalPoint& baseline = points.front();
    if (baseline.x_pct != 0.0 || baseline.infeasible)
        throw DataError("first point must be the feasible x = 0 baseline");

    const IncrementalPoint* limit_point = nullptr;
    for (auto it = points.rbegin(); it != points.rend(); ++it)
        if (!it->infeasible && it->x_pct > 0.0) {
            limit_point = &*it;
            break;
        }
    if (!limit_point) throw DataError("no feasible x > 0 point");

    PerformanceImpactTable table;
    const auto& names = PerfVector::measure_names();
    for (std::size_t m = 0; m < names.size(); ++m) {
        PerformanceImpact impact;
        impact.measure = names[m];

        const std::vector<double> v0 = baseline.boot.measure_column(m);

        for (const IncrementalPoint& point : points) {
            if (point.infeasible || point.x_pct == 0.0) continue;
            const std::vector<double> vx = point.boot.measure_column(m);
            const WilcoxonResult w = wilcoxon_signed_rank(vx, v0);
            const double d = cohens_d(vx, v0);
            impact.steps.push_back({point.x_pct, w.p_value, d});
            if (impact.x_first == 0.0 && w.p_value <= 0.05 &&
                effect_size_label(d) != EffectSize::Negligible)
                impact.x_first = point.x_pct;
            if (&point == limit_point) {
                impact.p_value = w.p_value;
                impact.cohens_d = d;
                impact.effect = effect_size_label(d);
            }
        }

        const double median_0 = median(v0);
        const double median_limit = median(limit_point->boot.measure_column(m));
        if (median_0 == 0.0) {
            impact.undefined_magnitude = true;
        } else {
            impact.magnitude_pct = 100.0 * (median_limit - median_0) / median_0;
            // A falling Brier score is an improvement; flip so '+' means better.
            if (m == kBrierIndex) impact.magnitude_pct = -impact.magnitude_pct;
        }
        table.impacts.push_back(std::move(impact));
    }

    const bool any_impact = std::any_of(table.impacts.begin(), table.impacts.end(),
                                        [](const PerformanceImpact& i) { return i.x_first > 0.0; });
    table.recommendation = any_impact ? "discard noisy area" : "use whole dataset";
    return table;
}

InterpretationImpact interpretation_impact(const std::vector<IncrementalPoint>& points,
                                           int top_k, int n_rep, std::uint64_t seed,
                                           bool absolute_differences) {
    if (points.empty() || points.front().x_pct != 0.0 || points.front().infeasible)
        throw DataError("interpretation_impact needs the x = 0 baseline");
    const IncrementalPoint* limit_point = nullptr;
    for (auto it = points.rbegin(); it != points.rend(); ++it)
        if (!it->infeasible && it->x_pct > 0.0) {
            limit_point = &*it;
            break;
        }
    if (!limit_point) throw DataError("interpretation_impact needs a feasible x = limit point");

    const IncrementalPoint& baseline = points.front();
    const auto& features = baseline.boot.feature_names;

    InterpretationImpact impact;
    impact.absolute_differences = absolute_differences;
    impact.ranks_whole = baseline.boot.sk_ranks;
    impact.ranks_removed = limit_point->boot.sk_ranks;

    std::vector<double> diffs, zeros;
    for (const auto& name : features) {
        double d = static_cast<double>(impact.ranks_whole.at(name)) -
                   static_cast<double>(impact.ranks_removed.at(name));
        if (absolute_differences) d = std::abs(d);
        diffs.push_back(d);
        zeros.push_back(0.0);
    }
    impact.overall_p = wilcoxon_signed_rank(diffs, zeros).p_value;
    impact.overall_d = cohens_d_one_sample(diffs);
    impact.effect = effect_size_label(impact.overall_d);

    // Pool the per-iteration ranks of both configurations for the resampling.
    std::vector<std::vector<int>> pooled_lists = baseline.boot.iteration_ranks;
    pooled_lists.insert(pooled_lists.end(), limit_point->boot.iteration_ranks.begin(),
                        limit_point->boot.iteration_ranks.end());
    impact.rank_shift = rank_shift_likelihood(features, pooled_lists, n_rep, top_k,
                                              Rng::substream(seed, {streams::kRankShiftRep})
                                                  .next_u64());
    return impact;
}

std::vector<OversampleRow> oversample_experiment(const Dataset& data,
                                                 const DiscretizationSpec& spec,
                                                 const NoisyAreaSpec& noisy,
                                                 const ExtremesSpec& ext, ClassifierKind kind,
                                                 const OversampleConfig& cfg, int n_boot,
                                                 std::uint64_t seed) {
    if (!noisy.has_noisy_area()) throw DataError("no noisy area to oversample");
    if (ext.low_indices.empty() && ext.high_indices.empty())
        throw EmptyExtremes("extremes are empty");

    std::vector<std::size_t> extreme_rows = ext.low_indices;
    extreme_rows.insert(extreme_rows.end(), ext.high_indices.begin(), ext.high_indices.end());
    std::sort(extreme_rows.begin(), extreme_rows.end());

    std::vector<std::size_t> noisy_rows =
        window_indices(data.target, noisy.cutpoint, *noisy.limit_pct);
    if (noisy_rows.empty()) throw DataError("noisy area holds no rows");

    std::vector<OversampleRow> rows;
    double base_auc = 0.0;
    for (std::size_t c = 0; c < cfg.over_sample_pcts.size(); ++c) {
        const int pct = cfg.over_sample_pcts[c];
        if (pct < 0) throw ConfigError("over_sample percentages must be non-negative");

        // Pool: extremes + noisy area + pct% extra noisy rows with replacement.
        std::vector<std::size_t> pool = extreme_rows;
        pool.insert(pool.end(), noisy_rows.begin(), noisy_rows.end());
        const std::size_t n_extremes = extreme_rows.size();
        Rng extra_rng = Rng::substream(seed, {streams::kExperiment, c});
        const std::size_t n_extra =
            static_cast<std::size_t>(static_cast<double>(noisy_rows.size()) * pct / 100.0);
        for (std::size_t i = 0; i < n_extra; ++i)
            pool.push_back(noisy_rows[extra_rng.uniform_index(noisy_rows.size())]);

        const Dataset pool_data = data.subset(pool);
        const ClassLabels pool_labels = labels_of(pool_data, spec.cutpoint);
        if (!has_both_classes(pool_labels)) throw DataError("training pool is single-class");

        const HyperParams params =
            tune(kind, pool_data, pool_labels, TuningGrid{},
                 Rng::substream(seed, {streams::kExperiment, c, 1}).next_u64());

        std::vector<double> aucs(static_cast<std::size_t>(n_boot));
        parallel_for(static_cast<std::size_t>(n_boot), [&](std::size_t b) {
            Rng rng = Rng::substream(seed, {streams::kExperiment, c, 2, b});
            for (int attempt = 0;; ++attempt) {
                std::vector<bool> drawn(pool.size(), false);
                std::vector<std::size_t> train_rows(pool.size());
                for (auto& r : train_rows) {
                    r = rng.uniform_index(pool.size());
                    drawn[r] = true;
                }
                // Held-out test: extreme rows of the pool never drawn.
                std::vector<std::size_t> test_rows;
                for (std::size_t i = 0; i < n_extremes; ++i)
                    if (!drawn[i]) test_rows.push_back(i);

                const Dataset train_data = pool_data.subset(train_rows);
                const ClassLabels train_labels = labels_of(train_data, spec.cutpoint);
                const Dataset test_data = pool_data.subset(test_rows);
                const ClassLabels test_labels = labels_of(test_data, spec.cutpoint);
                if (!has_both_classes(train_labels) || !has_both_classes(test_labels, 1)) {
                    if (attempt >= 10)
                        throw DataError("could not draw a usable oversample split");
                    continue;
                }
                const TrainedModel model =
                    train(kind, train_data, train_labels, params,
                          Rng::substream(seed, {streams::kExperiment, c, 3, b}).next_u64());
                aucs[b] = ranking_auc(predict_proba(model, test_data), test_labels);
                break;
            }
        });

        OversampleRow row;
        row.pct = pct;
        row.median_auc = median(aucs);
        if (c == 0) base_auc = row.median_auc;
        row.delta_auc = row.median_auc - base_auc;
        rows.push_back(row);
    }
    return rows;
}

double noisy_to_extremes_experiment(const Dataset& data, const DiscretizationSpec& spec,
                                    const NoisyAreaSpec& noisy, const ExtremesSpec& ext,
                                    int n_boot, std::uint64_t seed) {
    if (!noisy.has_noisy_area()) throw DataError("no noisy area to train on");
    if (ext.low_indices.empty() && ext.high_indices.empty())
        throw EmptyExtremes("extremes are empty");

    std::vector<std::size_t> extreme_rows = ext.low_indices;
    extreme_rows.insert(extreme_rows.end(), ext.high_indices.begin(), ext.high_indices.end());
    std::sort(extreme_rows.begin(), extreme_rows.end());

    const std::vector<std::size_t> noisy_rows =
        window_indices(data.target, noisy.cutpoint, *noisy.limit_pct);
    if (noisy_rows.empty()) throw DataError("noisy area holds no rows");

    const Dataset noisy_data = data.subset(noisy_rows);
    const ClassLabels noisy_labels = labels_of(noisy_data, spec.cutpoint);
    if (!has_both_classes(noisy_labels)) throw DataError("noisy area is single-class");

    const Dataset extremes_data = data.subset(extreme_rows);
    const ClassLabels extremes_labels = labels_of(extremes_data, spec.cutpoint);

    const HyperParams params = tune(ClassifierKind::RandomForest, noisy_data, noisy_labels,
                                    TuningGrid{},
                                    Rng::substream(seed, {streams::kExperiment, 100}).next_u64());

    std::vector<double> aucs(static_cast<std::size_t>(n_boot));
    parallel_for(static_cast<std::size_t>(n_boot), [&](std::size_t b) {
        Rng rng = Rng::substream(seed, {streams::kExperiment, 101, b});
        for (int attempt = 0;; ++attempt) {
            std::vector<std::size_t> train_rows(noisy_rows.size());
            for (auto& r : train_rows) r = rng.uniform_index(noisy_rows.size());
            const Dataset train_data = noisy_data.subset(train_rows);
            const ClassLabels train_labels = labels_of(train_data, spec.cutpoint);
            if (!has_both_classes(train_labels)) {
                if (attempt >= 10) throw DataError("could not draw a two-class noisy resample");
                continue;
            }
            const TrainedModel model =
                train(ClassifierKind::RandomForest, train_data, train_labels, params,
                      Rng::substream(seed, {streams::kExperiment, 102, b}).next_u64());
            aucs[b] = ranking_auc(predict_proba(model, extremes_data), extremes_labels);
            break;
        }
    });
    return median(aucs);
}

Dataset generate_synthetic(std::size_t n, std::size_t p, double noise_band_pct,
                           double signal_strength, std::uint64_t seed) {
    if (n < 50) throw ConfigError("synthetic data needs n >= 50");
    if (p < 2) throw ConfigError("synthetic data needs p >= 2");
    if (noise_band_pct < 0.0 || noise_band_pct > 100.0)
        throw ConfigError("noise_band_pct must be in [0, 100]");
    if (signal_strength < 0.0) throw ConfigError("signal_strength must be non-negative");

    Rng rng = Rng::substream(seed, {streams::kSynthetic});

    // Geometrically decaying weights separate the top features cleanly.
    std::vector<double> weights(p);
    double norm = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        weights[j] = std::pow(0.5, static_cast<double>(j));
        norm += weights[j] * weights[j];
    }
    norm = std::sqrt(norm);
    for (double& w : weights) w /= norm;

    Dataset data;
    data.source_path = "synthetic";
    data.feature_names.resize(p);
    for (std::size_t j = 0; j < p; ++j) data.feature_names[j] = "f" + std::to_string(j + 1);
    data.features.resize(n * p);
    data.target.resize(n);

    // Intrinsic score noise scale exp(-2*strength): a zero-signal dataset
    // stays non-degenerate while strong-signal data is effectively clean, so
    // the reflected band below is the only ambiguity source.
    const double noise_scale = std::exp(-2.0 * signal_strength);

    std::vector<double> base(n);
    for (std::size_t i = 0; i < n; ++i) {
        double score = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            const double x = rng.normal();
            data.features[i * p + j] = x;
            score += weights[j] * x;
        }
        score = signal_strength * score + noise_scale * rng.normal();
        // Bounded monotone response in (1, 9); the center sits near 5.
        base[i] = 1.0 + 8.0 / (1.0 + std::exp(-score / 3.0));
    }

    const double center = median(base);
    const double half_band = center * noise_band_pct / 100.0;
    for (std::size_t i = 0; i < n; ++i) {
        double t = base[i];
        if (half_band > 0.0) {
            const double u = std::abs(t - center) / half_band;
            if (u >= 0.5 && u < 1.0) {
                // Labels scramble in the outer shell of the band only: small
                // windows stay clean, the window covering the whole band has
                // the non-linearity peak, and wider windows dilute it. The
                // flip probability stays below one half so the majority label
                // is intact everywhere and the band still carries signal.
                if (rng.uniform() < 0.5) t = 2.0 * center - t;
            }
        }
        t += 0.005 * center * (rng.uniform() - 0.5);  // break exact duplicates
        data.target[i] = t;
    }
    return data;
}

}  // namespace noisegate
