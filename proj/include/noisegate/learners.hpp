#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "noisegate/dataset.hpp"
#include "noisegate/logistic.hpp"
#include "noisegate/rng.hpp"
#include "noisegate/stats.hpp"

namespace noisegate {

enum class ClassifierKind : std::uint8_t { RandomForest, LogisticRegression, Cart, Knn };

std::string to_string(ClassifierKind kind);
std::optional<ClassifierKind> classifier_kind_from_string(const std::string& name);

/// Hyper-parameters across all four families; tune() fills in the fields
/// relevant to the chosen kind.
struct HyperParams {
    double lr_ridge = 1e-8;
    double cart_cp = 1e-3;
    int cart_min_leaf = 7;
    int knn_k = 5;
    int rf_trees = 100;
    int rf_mtry = 0;  // 0 means ceil(sqrt(p))
};

/// Grid of candidates evaluated by inner out-of-sample bootstrap on AUC.
struct TuningGrid {
    std::vector<double> lr_ridge{1e-8, 1e-4, 1e-2, 1.0};
    std::vector<double> cart_cp{1e-4, 1e-3, 1e-2, 0.1};
    std::vector<int> knn_k{1, 3, 5, 7, 9, 11, 15, 21};
    std::vector<int> rf_mtry_choices;  // empty: {ceil(sqrt(p)), ceil(p/3), p}
    int inner_bootstraps = 10;
};

/// Binary decision tree grown by Gini-impurity splitting at midpoints.
struct TreeNode {
    int feature = -1;          // -1 marks a leaf
    double threshold = 0.0;    // go left when value <= threshold
    std::int32_t left = -1;
    std::int32_t right = -1;
    double p_class1 = 0.0;     // leaf probability (training class fraction)
};

struct DecisionTree {
    std::vector<TreeNode> nodes;
    std::vector<double> importance;  // per-feature total impurity decrease
};

/// Immutable fitted classifier. predict_proba returns P(class1).
struct TrainedModel {
    ClassifierKind kind = ClassifierKind::RandomForest;
    std::vector<std::string> feature_names;
    HyperParams params;
    Standardizer scaler;  // LR and KNN operate on standardized features

    // Fitted state; only the slot for `kind` is populated.
    LogisticFit logistic;
    DecisionTree tree;
    std::vector<DecisionTree> forest;
    std::vector<double> knn_points;   // standardized, row-major
    ClassLabels knn_labels;
    std::vector<double> knn_feature_auc;  // per-feature filter importance
};

TrainedModel train(ClassifierKind kind, const Dataset& data, const ClassLabels& labels,
                   const HyperParams& params, std::uint64_t seed);

std::vector<double> predict_proba(const TrainedModel& model, const Dataset& data);
double predict_proba_row(const TrainedModel& model, const double* row, std::size_t p);

/// Picks the grid candidate with the highest mean out-of-bag AUC over
/// grid.inner_bootstraps resamples; ties go to the earlier candidate.
HyperParams tune(ClassifierKind kind, const Dataset& data, const ClassLabels& labels,
                 const TuningGrid& grid, std::uint64_t seed);

/// The classifier's default importance: Gini impurity decrease for tree
/// models, absolute standardized coefficients for the logistic model, and a
/// per-feature ROC-AUC filter for the nearest-neighbor model.
std::vector<double> feature_importance(const TrainedModel& model);

/// Out-of-sample bootstrap split: train indices drawn with replacement, test
/// indices the never-drawn rows. Redraws (up to max_redraws) until both sets
/// contain both classes; throws DataError when that fails.
struct OobSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    int redraws = 0;
};
OobSplit draw_oob_split(const ClassLabels& labels, Rng& rng, int max_redraws = 10);

}  // namespace noisegate
