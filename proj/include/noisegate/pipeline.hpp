#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "noisegate/dataset.hpp"
#include "noisegate/discretize.hpp"
#include "noisegate/evalstats.hpp"
#include "noisegate/learners.hpp"

namespace noisegate {

/// One step of the incremental window analysis.
struct IncrementalPoint {
    double x_pct = 0.0;
    std::size_t retained_n = 0;
    bool infeasible = false;  // window left a single-class dataset; no results
    BootstrapResult boot;
    HyperParams params;
};

/// Per-measure outcome of the incremental analysis.
struct PerformanceImpact {
    std::string measure;
    double magnitude_pct = 0.0;  // 100 * (median@limit - median@0) / median@0,
                                 // sign flipped for the Brier score
    double x_first = 0.0;        // smallest significantly-impacted x; 0 = never
    double p_value = 1.0;        // at x = limit
    double cohens_d = 0.0;       // at x = limit
    EffectSize effect = EffectSize::Negligible;
    bool undefined_magnitude = false;  // baseline median was 0

    /// Per-x test trail kept for re-checking and plot data: (x, p, d).
    struct StepStat {
        double x_pct;
        double p_value;
        double cohens_d;
    };
    std::vector<StepStat> steps;
};

struct PerformanceImpactTable {
    std::vector<PerformanceImpact> impacts;
    std::string recommendation;  // "use whole dataset" or "discard noisy area"
};

struct InterpretationImpact {
    double overall_p = 1.0;
    double overall_d = 0.0;  // one-sample, on signed rank differences
    EffectSize effect = EffectSize::Negligible;
    std::map<int, double> rank_shift;          // rank in 1..top_k -> likelihood
    std::map<std::string, int> ranks_whole;    // Scott-Knott ranks at x = 0
    std::map<std::string, int> ranks_removed;  // Scott-Knott ranks at x = limit
    bool absolute_differences = false;         // tested |diff| instead of diff
};

struct OversampleConfig {
    std::vector<int> over_sample_pcts{0, 100, 200, 300};
};

struct OversampleRow {
    int pct = 0;
    double median_auc = 0.0;
    double delta_auc = 0.0;  // vs the 0% configuration
};

/// For each x in {0, step, ..., limit}: drop the open window around the
/// cutpoint, tune once on the retained data (or reuse the x = 0 parameters),
/// and bootstrap-validate. The bootstrap streams depend only on the iteration
/// index, so iteration i is paired across every x. Without a noisy area only
/// the x = 0 point is produced.
std::vector<IncrementalPoint> incremental_analysis(const Dataset& data,
                                                   const DiscretizationSpec& spec,
                                                   const NoisyAreaSpec& noisy,
                                                   ClassifierKind kind, int n_boot,
                                                   std::uint64_t seed,
                                                   bool reuse_x0_params = false);

/// Paired Wilcoxon + Cohen's d of every measure at each x against x = 0.
PerformanceImpactTable performance_impact(const std::vector<IncrementalPoint>& points);

/// Compares Scott-Knott importance ranks at x = 0 and x = limit (signed
/// differences against a zero null, or absolute when requested) and runs the
/// rank-shift likelihood on the pooled per-iteration ranks of both ends.
InterpretationImpact interpretation_impact(const std::vector<IncrementalPoint>& points,
                                           int top_k, int n_rep, std::uint64_t seed,
                                           bool absolute_differences = false);

/// Trains on extremes plus the noisy area oversampled by pct% (drawn with
/// replacement from the noisy rows), evaluating each bootstrap iteration on
/// the never-drawn extreme rows.
std::vector<OversampleRow> oversample_experiment(const Dataset& data,
                                                 const DiscretizationSpec& spec,
                                                 const NoisyAreaSpec& noisy,
                                                 const ExtremesSpec& ext, ClassifierKind kind,
                                                 const OversampleConfig& cfg, int n_boot,
                                                 std::uint64_t seed);

/// Trains (bootstrap) on the noisy-area rows and evaluates on the extremes;
/// returns the median AUC.
double noisy_to_extremes_experiment(const Dataset& data, const DiscretizationSpec& spec,
                                    const NoisyAreaSpec& noisy, const ExtremesSpec& ext,
                                    int n_boot, std::uint64_t seed);

/// Synthetic benchmark data. Features are standard normal; the target is a
/// bounded monotone function of a geometrically-weighted linear score plus
/// intrinsic noise. Inside the band median +- median*noise_band_pct/100,
/// points are additionally reflected across the median with probability
/// growing toward the band edge, planting a detectable noisy area.
Dataset generate_synthetic(std::size_t n, std::size_t p, double noise_band_pct,
                           double signal_strength, std::uint64_t seed);

}  // namespace noisegate
