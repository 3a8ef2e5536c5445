#include "noisegate/evalstats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "noisegate/errors.hpp"
#include "noisegate/parallel.hpp"
#include "noisegate/stats.hpp"

namespace noisegate {

namespace {

constexpr double kEffectCap = 10.0;

// Exact null distribution of 2*W+ via the generating function over doubled
// ranks (average ranks are half-integers, so doubling makes them integral).
std::vector<double> signed_rank_null_counts(const std::vector<int>& doubled_ranks) {
    int total = 0;
    for (int r : doubled_ranks) total += r;
    std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
    counts[0] = 1.0;
    int reached = 0;
    for (int r : doubled_ranks) {
        reached += r;
        for (int s = reached; s >= r; --s) counts[static_cast<std::size_t>(s)] +=
            counts[static_cast<std::size_t>(s - r)];
    }
    return counts;
}

double two_sided_exact_p(const std::vector<double>& counts, double w_plus_doubled) {
    double total = 0.0;
    for (double c : counts) total += c;
    const double max_sum = static_cast<double>(counts.size() - 1);
    const double low = std::min(w_plus_doubled, max_sum - w_plus_doubled);
    const double high = std::max(w_plus_doubled, max_sum - w_plus_doubled);

    double tail = 0.0;
    for (std::size_t s = 0; s < counts.size(); ++s) {
        const double value = static_cast<double>(s);
        if (value <= low + 1e-9 || value >= high - 1e-9) tail += counts[s];
    }
    return std::min(1.0, tail / total);
}

struct RankedDiffs {
    std::vector<double> ranks;      // average ranks of |differences|
    std::vector<bool> positive;     // sign of each retained difference
    double tie_correction = 0.0;    // sum of (t^3 - t) over tie groups
};

RankedDiffs rank_absolute_differences(std::span<const double> a, std::span<const double> b) {
    std::vector<double> abs_diff;
    std::vector<bool> positive;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d == 0.0) continue;  // zero differences are dropped
        abs_diff.push_back(std::abs(d));
        positive.push_back(d > 0.0);
    }

    RankedDiffs out;
    out.positive = std::move(positive);
    out.ranks = average_ranks(abs_diff);

    std::vector<double> sorted = abs_diff;
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        out.tie_correction += t * t * t - t;
        i = j + 1;
    }
    return out;
}

}  // namespace

const std::vector<std::string>& PerfVector::measure_names() {
    static const std::vector<std::string> names = {"accuracy", "precision", "recall", "brier",
                                                   "auc",      "f_measure", "mcc"};
    return names;
}

double PerfVector::measure(std::size_t index) const {
    switch (index) {
        case 0: return accuracy;
        case 1: return precision;
        case 2: return recall;
        case 3: return brier;
        case 4: return auc;
        case 5: return f_measure;
        case 6: return mcc;
    }
    throw ConfigError("measure index out of range");
}

std::string to_string(EffectSize effect) {
    switch (effect) {
        case EffectSize::Negligible: return "negligible";
        case EffectSize::Small: return "small";
        case EffectSize::Medium: return "medium";
        case EffectSize::Large: return "large";
    }
    return "unknown";
}

EffectSize effect_size_label(double d) {
    const double a = std::abs(d);
    if (a <= 0.2) return EffectSize::Negligible;
    if (a <= 0.5) return EffectSize::Small;
    if (a <= 0.8) return EffectSize::Medium;
    return EffectSize::Large;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DataError("paired samples differ in length");
    if (a.empty()) throw DataError("empty samples");

    const RankedDiffs ranked = rank_absolute_differences(a, b);
    const std::size_t n = ranked.ranks.size();

    WilcoxonResult result;
    if (n == 0) return result;  // all differences zero: p = 1, W = 0

    double w_plus = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (ranked.positive[i]) w_plus += ranked.ranks[i];
    result.statistic = w_plus;

    if (n <= 12) {
        result.exact = true;
        std::vector<int> doubled(n);
        for (std::size_t i = 0; i < n; ++i)
            doubled[i] = static_cast<int>(std::llround(2.0 * ranked.ranks[i]));
        const std::vector<double> counts = signed_rank_null_counts(doubled);
        result.p_value = two_sided_exact_p(counts, 2.0 * w_plus);
        return result;
    }

    const double nn = static_cast<double>(n);
    const double mean_w = nn * (nn + 1.0) / 4.0;
    const double var_w = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - ranked.tie_correction / 48.0;
    if (var_w <= 0.0) return result;  // fully tied: no evidence either way

    const double centered = w_plus - mean_w;
    const double continuity = centered > 0.0 ? -0.5 : (centered < 0.0 ? 0.5 : 0.0);
    const double z = (centered + continuity) / std::sqrt(var_w);
    result.p_value = std::min(1.0, 2.0 * (1.0 - normal_cdf(std::abs(z))));
    return result;
}

double wilcoxon_rank_sum_p(std::span<const double> a, std::span<const double> b) {
    const std::size_t n1 = a.size();
    const std::size_t n2 = b.size();
    if (n1 == 0 || n2 == 0) throw DataError("empty samples");

    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const std::vector<double> ranks = average_ranks(pooled);

    double r1 = 0.0;
    for (std::size_t i = 0; i < n1; ++i) r1 += ranks[i];
    const double u1 = r1 - static_cast<double>(n1) * (static_cast<double>(n1) + 1.0) / 2.0;

    const double n = static_cast<double>(n1 + n2);
    double tie_term = 0.0;
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }

    const double mean_u = static_cast<double>(n1) * static_cast<double>(n2) / 2.0;
    const double var_u = static_cast<double>(n1) * static_cast<double>(n2) / 12.0 *
                         ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (var_u <= 0.0) return 1.0;  // everything tied

    const double centered = u1 - mean_u;
    const double continuity = centered > 0.0 ? -0.5 : (centered < 0.0 ? 0.5 : 0.0);
    const double z = (centered + continuity) / std::sqrt(var_u);
    return std::min(1.0, 2.0 * (1.0 - normal_cdf(std::abs(z))));
}

double cohens_d(std::span<const double> a, std::span<const double> b, bool* capped) {
    if (a.size() < 2 || b.size() < 2) throw DataError("cohens_d needs >= 2 points per sample");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double pooled_var =
        ((na - 1.0) * sample_variance(a) + (nb - 1.0) * sample_variance(b)) / (na + nb - 2.0);
    const double diff = mean(a) - mean(b);
    if (pooled_var <= 0.0) {
        if (diff == 0.0) return 0.0;
        if (capped) *capped = true;
        return diff > 0.0 ? kEffectCap : -kEffectCap;
    }
    return diff / std::sqrt(pooled_var);
}

double cohens_d_one_sample(std::span<const double> diffs, bool* capped) {
    if (diffs.size() < 2) throw DataError("cohens_d needs >= 2 points");
    const double sd = std::sqrt(sample_variance(diffs));
    const double m = mean(diffs);
    if (sd <= 0.0) {
        if (m == 0.0) return 0.0;
        if (capped) *capped = true;
        return m > 0.0 ? kEffectCap : -kEffectCap;
    }
    return m / sd;
}

namespace {

struct SkGroup {
    const std::string* name;
    const std::vector<double>* values;
    double group_mean;
};

// Splits [lo, hi) at the maximum between-group sum of squares over the
// ordered group means (each group weighted equally), accepting only
// statistically distinct, non-negligible partitions.
void sk_partition(const std::vector<SkGroup>& ordered, std::size_t lo, std::size_t hi,
                  std::vector<std::vector<std::size_t>>& blocks) {
    if (hi - lo <= 1) {
        std::vector<std::size_t> block;
        for (std::size_t i = lo; i < hi; ++i) block.push_back(i);
        blocks.push_back(std::move(block));
        return;
    }

    double overall = 0.0;
    for (std::size_t i = lo; i < hi; ++i) overall += ordered[i].group_mean;
    overall /= static_cast<double>(hi - lo);

    double best_bss = -1.0;
    std::size_t best_t = lo;
    for (std::size_t t = lo + 1; t < hi; ++t) {
        double left = 0.0, right = 0.0;
        for (std::size_t i = lo; i < t; ++i) left += ordered[i].group_mean;
        for (std::size_t i = t; i < hi; ++i) right += ordered[i].group_mean;
        const double nl = static_cast<double>(t - lo);
        const double nr = static_cast<double>(hi - t);
        const double ml = left / nl;
        const double mr = right / nr;
        const double bss = nl * (ml - overall) * (ml - overall) +
                           nr * (mr - overall) * (mr - overall);
        if (bss > best_bss + 1e-12) {
            best_bss = bss;
            best_t = t;
        }
    }

    std::vector<double> left_values, right_values;
    for (std::size_t i = lo; i < best_t; ++i)
        left_values.insert(left_values.end(), ordered[i].values->begin(),
                           ordered[i].values->end());
    for (std::size_t i = best_t; i < hi; ++i)
        right_values.insert(right_values.end(), ordered[i].values->begin(),
                            ordered[i].values->end());

    const double p = wilcoxon_rank_sum_p(left_values, right_values);
    const double d = cohens_d(left_values, right_values);
    const bool accept = p <= 0.05 && std::abs(d) > 0.2;

    if (!accept) {
        std::vector<std::size_t> block;
        for (std::size_t i = lo; i < hi; ++i) block.push_back(i);
        blocks.push_back(std::move(block));
        return;
    }
    sk_partition(ordered, lo, best_t, blocks);
    sk_partition(ordered, best_t, hi, blocks);
}

}  // namespace

std::map<std::string, int> scott_knott_esd(const std::map<std::string, std::vector<double>>& groups,
                                           bool higher_is_better) {
    if (groups.empty()) throw DataError("no groups to rank");

    std::vector<std::vector<double>> storage;
    storage.reserve(groups.size());
    std::vector<SkGroup> ordered;
    ordered.reserve(groups.size());
    for (const auto& [name, values] : groups) {
        if (values.size() < 2) throw DataError("group '" + name + "' has fewer than 2 values");
        storage.push_back(values);
        if (!higher_is_better)
            for (double& v : storage.back()) v = -v;
    }
    std::size_t idx = 0;
    for (const auto& [name, values] : groups) {
        ordered.push_back({&name, &storage[idx], mean(storage[idx])});
        ++idx;
    }
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const SkGroup& a, const SkGroup& b) { return a.group_mean > b.group_mean; });

    std::vector<std::vector<std::size_t>> blocks;
    sk_partition(ordered, 0, ordered.size(), blocks);

    std::map<std::string, int> ranks;
    int rank = 1;
    for (const auto& block : blocks) {
        for (std::size_t i : block) ranks[*ordered[i].name] = rank;
        ++rank;
    }
    return ranks;
}

double ranking_auc(std::span<const double> scores, const ClassLabels& labels) {
    if (scores.size() != labels.size()) throw DataError("score/label length mismatch");
    std::size_t n1 = 0;
    for (ClassLabel l : labels) n1 += l == ClassLabel::class1;
    const std::size_t n0 = labels.size() - n1;
    if (n1 == 0 || n0 == 0) throw DataError("AUC undefined: single-class truth");

    const std::vector<double> ranks = average_ranks(scores);
    double r1 = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == ClassLabel::class1) r1 += ranks[i];
    const double u = r1 - static_cast<double>(n1) * (static_cast<double>(n1) + 1.0) / 2.0;
    return u / (static_cast<double>(n1) * static_cast<double>(n0));
}

PerfVector perf_measures(const ClassLabels& truth, std::span<const double> probs, double cutoff) {
    if (truth.size() != probs.size()) throw DataError("truth/probability length mismatch");
    if (truth.empty()) throw DataError("empty evaluation set");
    for (double p : probs)
        if (!(p >= 0.0 && p <= 1.0)) throw DataError("probability out of [0, 1]");

    double tp = 0, fp = 0, tn = 0, fn = 0;
    double brier = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool actual = truth[i] == ClassLabel::class1;
        const bool predicted = probs[i] >= cutoff;  // probability ties predict class1
        tp += actual && predicted;
        fp += !actual && predicted;
        tn += !actual && !predicted;
        fn += actual && !predicted;
        const double y = actual ? 1.0 : 0.0;
        brier += (probs[i] - y) * (probs[i] - y);
    }

    PerfVector perf;
    perf.auc = ranking_auc(probs, truth);  // throws on single-class truth
    const double n = static_cast<double>(truth.size());
    perf.accuracy = (tp + tn) / n;
    perf.brier = brier / n;

    if (tp + fp > 0.0) {
        perf.precision = tp / (tp + fp);
    } else {
        perf.degenerate = true;
    }
    perf.recall = tp / (tp + fn);  // tp + fn >= 1 since both classes exist
    if (perf.precision + perf.recall > 0.0) {
        perf.f_measure = 2.0 * perf.precision * perf.recall / (perf.precision + perf.recall);
    } else {
        perf.degenerate = true;
    }

    const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    if (denom > 0.0) {
        perf.mcc = (tp * tn - fp * fn) / std::sqrt(denom);
    } else {
        perf.degenerate = true;
    }
    return perf;
}

std::vector<int> importance_ranks(std::span<const double> importance) {
    const std::size_t p = importance.size();
    std::vector<int> ranks(p, 1);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
            if (importance[j] > importance[i]) ++ranks[i];
    return ranks;
}

std::vector<double> BootstrapResult::measure_column(std::size_t measure_index) const {
    std::vector<double> out(perf.size());
    for (std::size_t i = 0; i < perf.size(); ++i) out[i] = perf[i].measure(measure_index);
    return out;
}

BootstrapResult bootstrap_validate(ClassifierKind kind, const Dataset& data,
                                   const ClassLabels& labels, int n_boot, std::uint64_t seed,
                                   std::optional<HyperParams> tuned, const TuningGrid& grid) {
    if (n_boot < 1) throw ConfigError("n_boot must be >= 1");

    BootstrapResult result;
    result.feature_names = data.feature_names;
    result.perf.resize(static_cast<std::size_t>(n_boot));
    result.importances.resize(static_cast<std::size_t>(n_boot));
    result.iteration_ranks.resize(static_cast<std::size_t>(n_boot));
    std::vector<int> redraws(static_cast<std::size_t>(n_boot), 0);

    parallel_for(static_cast<std::size_t>(n_boot), [&](std::size_t i) {
        Rng rng = Rng::substream(seed, {streams::kBootstrapDraw, i});
        const OobSplit split = draw_oob_split(labels, rng);
        redraws[i] = split.redraws;

        const Dataset train_data = data.subset(split.train);
        ClassLabels train_labels;
        train_labels.reserve(split.train.size());
        for (std::size_t r : split.train) train_labels.push_back(labels[r]);

        const HyperParams params =
            tuned ? *tuned
                  : tune(kind, train_data, train_labels, grid,
                         Rng::substream(seed, {streams::kBootstrapTune, i}).next_u64());
        const TrainedModel model =
            train(kind, train_data, train_labels, params,
                  Rng::substream(seed, {streams::kBootstrapTrain, i}).next_u64());

        const Dataset test_data = data.subset(split.test);
        ClassLabels test_labels;
        test_labels.reserve(split.test.size());
        for (std::size_t r : split.test) test_labels.push_back(labels[r]);

        result.perf[i] = perf_measures(test_labels, predict_proba(model, test_data));
        result.importances[i] = feature_importance(model);
        result.iteration_ranks[i] = importance_ranks(result.importances[i]);
    });

    for (int r : redraws) result.total_redraws += r;

    std::map<std::string, std::vector<double>> groups;
    for (std::size_t j = 0; j < data.n_features(); ++j) {
        std::vector<double> values(result.importances.size());
        for (std::size_t i = 0; i < result.importances.size(); ++i)
            values[i] = result.importances[i][j];
        groups[data.feature_names[j]] = std::move(values);
    }
    result.sk_ranks = scott_knott_esd(groups, /*higher_is_better=*/true);
    return result;
}

std::map<int, double> rank_shift_likelihood(const std::vector<std::string>& feature_names,
                                            const std::vector<std::vector<int>>& rank_lists,
                                            int n_rep, int top_k, std::uint64_t seed) {
    if (rank_lists.empty()) throw DataError("no rank lists supplied");
    if (n_rep < 1) throw ConfigError("n_rep must be >= 1");
    const std::size_t p = feature_names.size();
    for (const auto& list : rank_lists)
        if (list.size() != p) throw DataError("rank list does not cover all features");

    // Pool each feature's observed ranks across all supplied lists.
    std::vector<std::vector<double>> pooled(p);
    for (const auto& list : rank_lists)
        for (std::size_t j = 0; j < p; ++j) pooled[j].push_back(static_cast<double>(list[j]));

    // Nominal rank of a feature: the lower median of its pooled ranks.
    std::vector<int> nominal(p);
    for (std::size_t j = 0; j < p; ++j)
        nominal[j] = static_cast<int>(std::llround(lower_median(pooled[j])));

    // Re-rank resampled pools n_rep times; repetitions use derived streams.
    std::vector<std::map<std::string, int>> reranked(static_cast<std::size_t>(n_rep));
    parallel_for(static_cast<std::size_t>(n_rep), [&](std::size_t rep) {
        Rng rng = Rng::substream(seed, {streams::kRankShiftRep, rep});
        std::map<std::string, std::vector<double>> groups;
        for (std::size_t j = 0; j < p; ++j) {
            std::vector<double> sample(pooled[j].size());
            for (auto& v : sample) v = pooled[j][rng.uniform_index(pooled[j].size())];
            groups[feature_names[j]] = std::move(sample);
        }
        reranked[rep] = scott_knott_esd(groups, /*higher_is_better=*/false);
    });

    std::map<int, double> likelihood;
    for (int x = 1; x <= top_k; ++x) {
        std::size_t shifted = 0;
        std::size_t observations = 0;
        for (std::size_t j = 0; j < p; ++j) {
            if (nominal[j] != x) continue;
            for (const auto& ranks : reranked) {
                shifted += ranks.at(feature_names[j]) != x;
                ++observations;
            }
        }
        if (observations > 0)
            likelihood[x] = static_cast<double>(shifted) / static_cast<double>(observations);
    }
    return likelihood;
}

}  // namespace noisegate
