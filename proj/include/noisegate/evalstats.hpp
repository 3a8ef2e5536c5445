#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noisegate/dataset.hpp"
#include "noisegate/learners.hpp"

namespace noisegate {

/// Binary classification measures with class1 as the positive class.
struct PerfVector {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double brier = 0.0;
    double auc = 0.0;
    double f_measure = 0.0;
    double mcc = 0.0;
    bool degenerate = false;  // a zero denominator was replaced by 0

    double measure(std::size_t index) const;
    static const std::vector<std::string>& measure_names();
};

enum class EffectSize : std::uint8_t { Negligible, Small, Medium, Large };

std::string to_string(EffectSize effect);

/// |d| <= 0.2 negligible, <= 0.5 small, <= 0.8 medium, else large.
EffectSize effect_size_label(double cohens_d);

struct WilcoxonResult {
    double p_value = 1.0;
    double statistic = 0.0;  // W+ = sum of positive signed ranks
    bool exact = false;      // enumeration branch (effective n <= 12)
};

/// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences
/// are dropped; tied |differences| get average ranks. Exact distribution for
/// effective n <= 12, normal approximation with tie and continuity
/// corrections above.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

/// Two-sided Mann-Whitney rank-sum test (normal approximation with tie and
/// continuity corrections). Used by the Scott-Knott ESD acceptance rule.
double wilcoxon_rank_sum_p(std::span<const double> a, std::span<const double> b);

/// Two-sample Cohen's d with (n-1)-weighted pooled standard deviation. A
/// zero pooled sd yields 0 for equal means and +-10 (capped, flagged)
/// otherwise.
double cohens_d(std::span<const double> a, std::span<const double> b, bool* capped = nullptr);

/// One-sample d = mean / sd, same zero-sd conventions.
double cohens_d_one_sample(std::span<const double> diffs, bool* capped = nullptr);

/// Scott-Knott ESD ranking: orders groups by mean (best first), recursively
/// splits the ordered sequence at the maximum between-group sum of squares,
/// and accepts a split only when the two sides differ with rank-sum p <= 0.05
/// and non-negligible |d|. Ranks are contiguous from 1 = best.
/// higher_is_better = false ranks ascending means first (used for rank data).
std::map<std::string, int> scott_knott_esd(
    const std::map<std::string, std::vector<double>>& groups, bool higher_is_better = true);

/// AUC of arbitrary scores for class1 via the rank formulation of the
/// Mann-Whitney statistic (ties get half credit).
double ranking_auc(std::span<const double> scores, const ClassLabels& labels);

/// All measures at the given probability cutoff. Throws when the truth holds
/// a single class (AUC undefined).
PerfVector perf_measures(const ClassLabels& truth, std::span<const double> probs,
                         double cutoff = 0.5);

/// One out-of-sample bootstrap validation run.
struct BootstrapResult {
    std::vector<PerfVector> perf;                    // one per iteration
    std::vector<std::vector<double>> importances;    // [iteration][feature]
    std::vector<std::vector<int>> iteration_ranks;   // competition ranks per iteration
    std::map<std::string, int> sk_ranks;             // Scott-Knott ESD over iterations
    std::vector<std::string> feature_names;
    int total_redraws = 0;

    std::vector<double> measure_column(std::size_t measure_index) const;
};

/// Runs n_boot out-of-sample bootstrap iterations: train rows drawn with
/// replacement, never-drawn rows as the test set; single-class draws are
/// redrawn (capped at 10, then an error). When `tuned` is empty each
/// iteration tunes on its own training resample; otherwise the given
/// hyper-parameters are reused. Iterations use index-derived substreams, so
/// results are independent of execution order.
BootstrapResult bootstrap_validate(ClassifierKind kind, const Dataset& data,
                                   const ClassLabels& labels, int n_boot, std::uint64_t seed,
                                   std::optional<HyperParams> tuned = std::nullopt,
                                   const TuningGrid& grid = {});

/// Competition ("min") ranks of an importance vector: 1 = most important;
/// equal values share the smallest position.
std::vector<int> importance_ranks(std::span<const double> importance);

/// Likelihood that a nominal-rank-x feature shifts away from x under
/// bootstrap re-ranking. Pools each feature's ranks across the supplied
/// lists, resamples each pool with replacement n_rep times, re-ranks with
/// Scott-Knott ESD, and reports, for each x <= top_k claimed by some
/// feature's (lower) median pooled rank, the fraction of repetitions whose
/// re-rank differs from x.
std::map<int, double> rank_shift_likelihood(
    const std::vector<std::string>& feature_names,
    const std::vector<std::vector<int>>& rank_lists, int n_rep, int top_k, std::uint64_t seed);

}  // namespace noisegate
