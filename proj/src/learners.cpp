#include "noisegate/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "noisegate/errors.hpp"
#include "noisegate/evalstats.hpp"

namespace noisegate {

namespace {

struct SplitCandidate {
    int feature = -1;
    double threshold = 0.0;
    double decrease = 0.0;  // n-weighted impurity decrease
    std::size_t n_left = 0;
};

double gini(std::size_t n1, std::size_t n) {
    if (n == 0) return 0.0;
    const double p1 = static_cast<double>(n1) / static_cast<double>(n);
    return 2.0 * p1 * (1.0 - p1);
}

// Grows a Gini tree over `rows` (indices into the row-major matrix). mtry = 0
// considers every feature; otherwise a random subset is drawn per split.
class TreeBuilder {
public:
    TreeBuilder(const std::vector<double>& x, std::size_t p, const ClassLabels& y,
                int min_leaf, double cp, int mtry, Rng* rng)
        : x_(x), p_(p), y_(y), min_leaf_(static_cast<std::size_t>(min_leaf)), cp_(cp),
          mtry_(mtry), rng_(rng) {}

    DecisionTree build(std::vector<std::size_t> rows) {
        tree_.importance.assign(p_, 0.0);
        std::size_t n1 = 0;
        for (std::size_t i : rows) n1 += y_[i] == ClassLabel::class1;
        min_decrease_ = cp_ * static_cast<double>(rows.size()) * gini(n1, rows.size());
        grow(std::move(rows));
        return std::move(tree_);
    }

private:
    std::int32_t grow(std::vector<std::size_t> rows) {
        std::size_t n1 = 0;
        for (std::size_t i : rows) n1 += y_[i] == ClassLabel::class1;
        const double node_gini = gini(n1, rows.size());

        const std::int32_t index = static_cast<std::int32_t>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        tree_.nodes[index].p_class1 =
            static_cast<double>(n1) / static_cast<double>(rows.size());

        if (node_gini <= 0.0 || rows.size() < 2 * min_leaf_) return index;

        const SplitCandidate best = best_split(rows, n1, node_gini);
        if (best.feature < 0) return index;

        tree_.importance[static_cast<std::size_t>(best.feature)] += best.decrease;

        std::vector<std::size_t> left, right;
        left.reserve(best.n_left);
        right.reserve(rows.size() - best.n_left);
        for (std::size_t i : rows)
            (x_[i * p_ + static_cast<std::size_t>(best.feature)] <= best.threshold ? left
                                                                                   : right)
                .push_back(i);
        rows.clear();
        rows.shrink_to_fit();

        const std::int32_t left_child = grow(std::move(left));
        const std::int32_t right_child = grow(std::move(right));
        tree_.nodes[index].feature = best.feature;
        tree_.nodes[index].threshold = best.threshold;
        tree_.nodes[index].left = left_child;
        tree_.nodes[index].right = right_child;
        return index;
    }

    SplitCandidate best_split(const std::vector<std::size_t>& rows, std::size_t n1_total,
                              double node_gini) {
        std::vector<std::size_t> features(p_);
        std::iota(features.begin(), features.end(), 0);
        std::size_t n_try = p_;
        if (mtry_ > 0 && static_cast<std::size_t>(mtry_) < p_) {
            n_try = static_cast<std::size_t>(mtry_);
            for (std::size_t j = 0; j < n_try; ++j)  // partial Fisher-Yates
                std::swap(features[j], features[j + rng_->uniform_index(p_ - j)]);
            std::sort(features.begin(), features.begin() + static_cast<std::ptrdiff_t>(n_try));
        }

        const double n = static_cast<double>(rows.size());
        const double parent_cost = n * node_gini;
        SplitCandidate best;
        std::vector<std::pair<double, bool>> column(rows.size());  // (value, is_class1)

        for (std::size_t f = 0; f < n_try; ++f) {
            const std::size_t j = features[f];
            for (std::size_t r = 0; r < rows.size(); ++r)
                column[r] = {x_[rows[r] * p_ + j], y_[rows[r]] == ClassLabel::class1};
            std::sort(column.begin(), column.end());

            std::size_t left_n1 = 0;
            for (std::size_t r = 0; r + 1 < column.size(); ++r) {
                left_n1 += column[r].second;
                if (column[r].first == column[r + 1].first) continue;
                const std::size_t n_left = r + 1;
                const std::size_t n_right = column.size() - n_left;
                if (n_left < min_leaf_ || n_right < min_leaf_) continue;
                const double cost =
                    static_cast<double>(n_left) * gini(left_n1, n_left) +
                    static_cast<double>(n_right) * gini(n1_total - left_n1, n_right);
                const double decrease = parent_cost - cost;
                if (decrease > best.decrease + 1e-12) {  // strict: first best wins
                    best.feature = static_cast<int>(j);
                    best.threshold = 0.5 * (column[r].first + column[r + 1].first);
                    best.decrease = decrease;
                    best.n_left = n_left;
                }
            }
        }
        if (best.feature >= 0 && best.decrease < min_decrease_) best.feature = -1;
        return best;
    }

    const std::vector<double>& x_;
    std::size_t p_;
    const ClassLabels& y_;
    std::size_t min_leaf_;
    double cp_;
    double min_decrease_ = 0.0;
    int mtry_;
    Rng* rng_;
    DecisionTree tree_;
};

double tree_predict(const DecisionTree& tree, const double* row) {
    std::int32_t node = 0;
    while (tree.nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const TreeNode& n = tree.nodes[static_cast<std::size_t>(node)];
        node = row[n.feature] <= n.threshold ? n.left : n.right;
    }
    return tree.nodes[static_cast<std::size_t>(node)].p_class1;
}

void require_trainable(const Dataset& data, const ClassLabels& labels) {
    if (labels.size() != data.n_rows()) throw DataError("label length mismatch");
    std::size_t n1 = 0;
    for (ClassLabel l : labels) n1 += l == ClassLabel::class1;
    if (n1 < 2 || labels.size() - n1 < 2)
        throw InsufficientClass("training needs at least 2 points per class");
    for (double v : data.features)
        if (!std::isfinite(v)) throw DataError("non-finite feature value");
}

int default_mtry(std::size_t p) {
    return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(p))));
}

// AUC of one feature used directly as a score for class1, folded to be
// direction-free: max(auc, 1 - auc).
double single_feature_auc(const std::vector<double>& column, const ClassLabels& labels) {
    const double auc = ranking_auc(column, labels);
    return std::max(auc, 1.0 - auc);
}

}  // namespace

std::string to_string(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::RandomForest: return "rf";
        case ClassifierKind::LogisticRegression: return "lr";
        case ClassifierKind::Cart: return "cart";
        case ClassifierKind::Knn: return "knn";
    }
    return "unknown";
}

std::optional<ClassifierKind> classifier_kind_from_string(const std::string& name) {
    if (name == "rf") return ClassifierKind::RandomForest;
    if (name == "lr") return ClassifierKind::LogisticRegression;
    if (name == "cart") return ClassifierKind::Cart;
    if (name == "knn") return ClassifierKind::Knn;
    return std::nullopt;
}

TrainedModel train(ClassifierKind kind, const Dataset& data, const ClassLabels& labels,
                   const HyperParams& params, std::uint64_t seed) {
    require_trainable(data, labels);
    const std::size_t n = data.n_rows();
    const std::size_t p = data.n_features();

    TrainedModel model;
    model.kind = kind;
    model.feature_names = data.feature_names;
    model.params = params;
    model.scaler = Standardizer::fit(data.features, n, p);

    switch (kind) {
        case ClassifierKind::LogisticRegression: {
            std::vector<double> z = data.features;
            model.scaler.apply(z, n, p);
            std::vector<double> y(n);
            for (std::size_t i = 0; i < n; ++i)
                y[i] = labels[i] == ClassLabel::class1 ? 1.0 : 0.0;
            LogisticOptions options;
            options.ridge = params.lr_ridge;
            model.logistic = fit_logistic(z, n, p, y, options);
            break;
        }
        case ClassifierKind::Cart: {
            std::vector<std::size_t> rows(n);
            std::iota(rows.begin(), rows.end(), 0);
            TreeBuilder builder(data.features, p, labels, params.cart_min_leaf, params.cart_cp,
                                0, nullptr);
            model.tree = builder.build(std::move(rows));
            break;
        }
        case ClassifierKind::RandomForest: {
            const int mtry = params.rf_mtry > 0 ? params.rf_mtry : default_mtry(p);
            model.forest.resize(static_cast<std::size_t>(params.rf_trees));
            for (std::size_t t = 0; t < model.forest.size(); ++t) {
                Rng rng = Rng::substream(seed, {streams::kForestTree, t});
                std::vector<std::size_t> rows(n);
                for (auto& r : rows) r = rng.uniform_index(n);
                TreeBuilder builder(data.features, p, labels, 1, 0.0, mtry, &rng);
                model.forest[t] = builder.build(std::move(rows));
            }
            break;
        }
        case ClassifierKind::Knn: {
            model.knn_points = data.features;
            model.scaler.apply(model.knn_points, n, p);
            model.knn_labels = labels;
            model.knn_feature_auc.resize(p);
            for (std::size_t j = 0; j < p; ++j)
                model.knn_feature_auc[j] = single_feature_auc(data.column(j), labels);
            break;
        }
    }
    return model;
}

double predict_proba_row(const TrainedModel& model, const double* row, std::size_t p) {
    switch (model.kind) {
        case ClassifierKind::LogisticRegression: {
            std::vector<double> z(p);
            for (std::size_t j = 0; j < p; ++j)
                z[j] = (row[j] - model.scaler.means[j]) / model.scaler.sds[j];
            return logistic_predict(model.logistic, z.data(), p);
        }
        case ClassifierKind::Cart:
            return tree_predict(model.tree, row);
        case ClassifierKind::RandomForest: {
            double sum = 0.0;
            for (const auto& tree : model.forest) sum += tree_predict(tree, row);
            return sum / static_cast<double>(model.forest.size());
        }
        case ClassifierKind::Knn: {
            const std::size_t n_train = model.knn_labels.size();
            const std::size_t k =
                std::min<std::size_t>(static_cast<std::size_t>(model.params.knn_k), n_train);
            std::vector<double> z(p);
            for (std::size_t j = 0; j < p; ++j)
                z[j] = (row[j] - model.scaler.means[j]) / model.scaler.sds[j];

            // (distance, index) keeps neighbor selection deterministic on ties.
            std::vector<std::pair<double, std::size_t>> dist(n_train);
            for (std::size_t i = 0; i < n_train; ++i) {
                double d = 0.0;
                for (std::size_t j = 0; j < p; ++j) {
                    const double diff = z[j] - model.knn_points[i * p + j];
                    d += diff * diff;
                }
                dist[i] = {d, i};
            }
            std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k),
                              dist.end());
            std::size_t votes = 0;
            for (std::size_t i = 0; i < k; ++i)
                votes += model.knn_labels[dist[i].second] == ClassLabel::class1;
            return static_cast<double>(votes) / static_cast<double>(k);
        }
    }
    return 0.5;
}

std::vector<double> predict_proba(const TrainedModel& model, const Dataset& data) {
    if (data.n_features() != model.feature_names.size())
        throw DataError("feature count does not match the trained model");
    std::vector<double> out(data.n_rows());
    for (std::size_t i = 0; i < data.n_rows(); ++i)
        out[i] = predict_proba_row(model, data.features.data() + i * data.n_features(),
                                   data.n_features());
    return out;
}

OobSplit draw_oob_split(const ClassLabels& labels, Rng& rng, int max_redraws) {
    const std::size_t n = labels.size();
    for (int attempt = 0; attempt <= max_redraws; ++attempt) {
        std::vector<bool> drawn(n, false);
        OobSplit split;
        split.redraws = attempt;
        split.train.resize(n);
        for (auto& r : split.train) {
            r = rng.uniform_index(n);
            drawn[r] = true;
        }
        for (std::size_t i = 0; i < n; ++i)
            if (!drawn[i]) split.test.push_back(i);

        auto both_classes = [&](const std::vector<std::size_t>& rows) {
            bool c1 = false, c2 = false;
            for (std::size_t i : rows) (labels[i] == ClassLabel::class1 ? c1 : c2) = true;
            return c1 && c2;
        };
        if (!split.test.empty() && both_classes(split.train) && both_classes(split.test))
            return split;
    }
    throw DataError("could not draw a two-class bootstrap split (dataset too small or imbalanced)");
}

HyperParams tune(ClassifierKind kind, const Dataset& data, const ClassLabels& labels,
                 const TuningGrid& grid, std::uint64_t seed) {
    require_trainable(data, labels);

    std::vector<HyperParams> candidates;
    switch (kind) {
        case ClassifierKind::LogisticRegression:
            for (double ridge : grid.lr_ridge) {
                HyperParams h;
                h.lr_ridge = ridge;
                candidates.push_back(h);
            }
            break;
        case ClassifierKind::Cart:
            for (double cp : grid.cart_cp) {
                HyperParams h;
                h.cart_cp = cp;
                candidates.push_back(h);
            }
            break;
        case ClassifierKind::Knn:
            for (int k : grid.knn_k) {
                HyperParams h;
                h.knn_k = k;
                candidates.push_back(h);
            }
            break;
        case ClassifierKind::RandomForest: {
            std::vector<int> mtry = grid.rf_mtry_choices;
            if (mtry.empty()) {
                const std::size_t p = data.n_features();
                mtry = {default_mtry(p),
                        static_cast<int>(std::ceil(static_cast<double>(p) / 3.0)),
                        static_cast<int>(p)};
                mtry.erase(std::unique(mtry.begin(), mtry.end()), mtry.end());
            }
            for (int m : mtry) {
                HyperParams h;
                h.rf_mtry = m;
                candidates.push_back(h);
            }
            break;
        }
    }
    if (candidates.empty()) throw ConfigError("empty tuning grid");
    if (candidates.size() == 1) return candidates.front();

    double best_auc = -std::numeric_limits<double>::infinity();
    std::size_t best_c = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        double auc_sum = 0.0;
        int evaluated = 0;
        for (int b = 0; b < grid.inner_bootstraps; ++b) {
            Rng rng = Rng::substream(
                seed, {streams::kTuneCell, c, static_cast<std::uint64_t>(b)});
            OobSplit split;
            try {
                split = draw_oob_split(labels, rng);
            } catch (const DataError&) {
                continue;  // this resample is unusable; skip it
            }
            const Dataset train_data = data.subset(split.train);
            ClassLabels train_labels;
            train_labels.reserve(split.train.size());
            for (std::size_t i : split.train) train_labels.push_back(labels[i]);

            const TrainedModel model = train(kind, train_data, train_labels, candidates[c],
                                             rng.next_u64());
            const Dataset test_data = data.subset(split.test);
            ClassLabels test_labels;
            test_labels.reserve(split.test.size());
            for (std::size_t i : split.test) test_labels.push_back(labels[i]);

            auc_sum += ranking_auc(predict_proba(model, test_data), test_labels);
            ++evaluated;
        }
        const double mean_auc = evaluated > 0
                                    ? auc_sum / static_cast<double>(evaluated)
                                    : -std::numeric_limits<double>::infinity();
        if (mean_auc > best_auc) {  // strict: earlier candidate wins ties
            best_auc = mean_auc;
            best_c = c;
        }
    }
    return candidates[best_c];
}

std::vector<double> feature_importance(const TrainedModel& model) {
    const std::size_t p = model.feature_names.size();
    std::vector<double> importance(p, 0.0);
    switch (model.kind) {
        case ClassifierKind::LogisticRegression:
            for (std::size_t j = 0; j < p; ++j)
                importance[j] = std::abs(model.logistic.coefficients[j]);
            break;
        case ClassifierKind::Cart:
            importance = model.tree.importance;
            break;
        case ClassifierKind::RandomForest:
            for (const auto& tree : model.forest)
                for (std::size_t j = 0; j < p; ++j) importance[j] += tree.importance[j];
            break;
        case ClassifierKind::Knn:
            importance = model.knn_feature_auc;
            break;
    }
    return importance;
}

}  // namespace noisegate
