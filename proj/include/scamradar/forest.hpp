#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "scamradar/features.hpp"

namespace scamradar {

struct Hyperparams {
    int n_trees = 100;
    int max_depth = 0;  // 0 = unbounded
    int min_leaf = 1;
    int features_per_split = 6;  // floor(sqrt(40))
    uint64_t rng_seed = 0;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0;
    int left = -1;
    int right = -1;
    int64_t count0 = 0;  // leaf class counts from training
    int64_t count1 = 0;
};

// CART tree over the 40-column feature rows; x[feature] < threshold goes left.
struct DecisionTree {
    std::vector<TreeNode> nodes;
    int vote(const std::array<double, kFeatureCount>& x) const;
};

struct ForestModel {
    Hyperparams params;
    std::vector<std::string> feature_order;
    std::vector<DecisionTree> trees;

    std::string to_json() const;
    static ForestModel from_json(const std::string& text);
    void save(const std::filesystem::path& path) const;
    static ForestModel load(const std::filesystem::path& path);
};

struct Dataset {
    std::vector<std::array<double, kFeatureCount>> x;
    std::vector<int> y;  // 0 benign, 1 scam
    size_t size() const { return x.size(); }
};

struct Prediction {
    int label = 0;        // ties break toward 0
    double score = 0.0;   // fraction of trees voting scam
};

// Bagged CART forest, gini criterion, features_per_split random candidates
// per node. Deterministic for a fixed seed, independent of `jobs`.
ForestModel train(const Dataset& data, Hyperparams params, uint64_t seed, unsigned jobs = 1);

Prediction predict(const ForestModel& model, const std::array<double, kFeatureCount>& x);

struct FoldMetrics {
    int64_t tp = 0, fp = 0, fn = 0, tn = 0;
    double precision = 0, recall = 0, f1 = 0;
    void finalize();
};

struct EvalReport {
    std::vector<FoldMetrics> folds;
    FoldMetrics aggregate;  // from summed confusion counts
    std::string to_json() const;
};

// Stratified k-fold cross validation: train on k-1 folds, test on the
// held-out one. Requires at least k rows of each class.
EvalReport cross_validate(const Dataset& data, Hyperparams params, int k, uint64_t seed,
                          unsigned jobs = 1);

// Reference baselines (linear models on standardized features).
enum class BaselineKind { Logistic, LinearSvm };
struct LinearModel {
    std::vector<double> weights;
    double bias = 0;
    std::vector<double> mean, scale;
    int predict(const std::array<double, kFeatureCount>& x) const;
};
LinearModel train_baseline(const Dataset& data, BaselineKind kind, uint64_t seed);
EvalReport cross_validate_baseline(const Dataset& data, BaselineKind kind, int k, uint64_t seed);

}  // namespace scamradar
