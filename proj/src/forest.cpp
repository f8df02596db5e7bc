#include "scamradar/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "scamradar/util.hpp"

namespace scamradar {

namespace {

struct TreeBuilder {
    const Dataset& data;
    const Hyperparams& params;
    Rng rng;
    DecisionTree tree;

    TreeBuilder(const Dataset& d, const Hyperparams& p, Rng r) : data(d), params(p), rng(r) {}

    int64_t count_ones(const std::vector<size_t>& idx) const {
        int64_t ones = 0;
        for (size_t i : idx) ones += data.y[i];
        return ones;
    }

    static double gini(int64_t ones, int64_t n) {
        if (n == 0) return 0;
        double p1 = static_cast<double>(ones) / static_cast<double>(n);
        return 1.0 - p1 * p1 - (1.0 - p1) * (1.0 - p1);
    }

    int make_leaf(const std::vector<size_t>& idx) {
        TreeNode leaf;
        leaf.count1 = count_ones(idx);
        leaf.count0 = static_cast<int64_t>(idx.size()) - leaf.count1;
        tree.nodes.push_back(leaf);
        return static_cast<int>(tree.nodes.size() - 1);
    }

    // Candidate feature indices without replacement, in draw order.
    std::vector<int> sample_features() {
        std::array<int, kFeatureCount> all;
        std::iota(all.begin(), all.end(), 0);
        int take = std::min<int>(params.features_per_split, kFeatureCount);
        for (int i = 0; i < take; ++i) {
            size_t j = i + rng.below(kFeatureCount - i);
            std::swap(all[i], all[j]);
        }
        return std::vector<int>(all.begin(), all.begin() + take);
    }

    int build(std::vector<size_t> idx, int depth) {
        const int64_t n = static_cast<int64_t>(idx.size());
        const int64_t ones = count_ones(idx);
        const double node_gini = gini(ones, n);
        const bool depth_capped = params.max_depth > 0 && depth >= params.max_depth;
        if (ones == 0 || ones == n || n < 2 * params.min_leaf || depth_capped)
            return make_leaf(idx);

        int best_feature = -1;
        double best_threshold = 0;
        double best_score = node_gini;
        std::vector<std::pair<double, int>> column(idx.size());

        for (int feature : sample_features()) {
            for (size_t i = 0; i < idx.size(); ++i)
                column[i] = {data.x[idx[i]][feature], data.y[idx[i]]};
            std::sort(column.begin(), column.end());
            int64_t left_n = 0, left_ones = 0;
            for (size_t i = 0; i + 1 < column.size(); ++i) {
                ++left_n;
                left_ones += column[i].second;
                if (column[i].first == column[i + 1].first) continue;
                int64_t right_n = n - left_n;
                if (left_n < params.min_leaf || right_n < params.min_leaf) continue;
                double score = (static_cast<double>(left_n) * gini(left_ones, left_n) +
                                static_cast<double>(right_n) * gini(ones - left_ones, right_n)) /
                               static_cast<double>(n);
                if (score < best_score - 1e-12) {
                    best_score = score;
                    best_feature = feature;
                    best_threshold = column[i].first / 2 + column[i + 1].first / 2;
                }
            }
        }
        if (best_feature < 0) return make_leaf(idx);

        std::vector<size_t> left_idx, right_idx;
        left_idx.reserve(idx.size());
        right_idx.reserve(idx.size());
        for (size_t i : idx)
            (data.x[i][best_feature] < best_threshold ? left_idx : right_idx).push_back(i);
        if (left_idx.empty() || right_idx.empty()) return make_leaf(idx);
        idx.clear();
        idx.shrink_to_fit();

        TreeNode node;
        node.feature = best_feature;
        node.threshold = best_threshold;
        tree.nodes.push_back(node);
        int self = static_cast<int>(tree.nodes.size() - 1);
        int left = build(std::move(left_idx), depth + 1);
        int right = build(std::move(right_idx), depth + 1);
        tree.nodes[self].left = left;
        tree.nodes[self].right = right;
        return self;
    }
};

DecisionTree train_tree(const Dataset& data, const Hyperparams& params, Rng rng) {
    std::vector<size_t> bootstrap(data.size());
    for (auto& i : bootstrap) i = rng.below(data.size());
    TreeBuilder builder(data, params, rng.fork(1));
    builder.build(std::move(bootstrap), 0);
    return std::move(builder.tree);
}

void check_dataset(const Dataset& data) {
    if (data.size() < 2) throw DegenerateDataset("need at least 2 rows");
    if (data.x.size() != data.y.size()) throw DegenerateDataset("row/label count mismatch");
    bool has0 = false, has1 = false;
    for (size_t i = 0; i < data.size(); ++i) {
        has0 |= data.y[i] == 0;
        has1 |= data.y[i] == 1;
        for (double v : data.x[i])
            if (std::isnan(v)) throw DegenerateDataset("NaN feature value at row " +
                                                       std::to_string(i));
    }
    if (!has0 || !has1) throw DegenerateDataset("both classes must be present");
}

}  // namespace

int DecisionTree::vote(const std::array<double, kFeatureCount>& x) const {
    if (nodes.empty()) return 0;
    size_t at = 0;
    while (nodes[at].feature >= 0)
        at = static_cast<size_t>(x[nodes[at].feature] < nodes[at].threshold ? nodes[at].left
                                                                            : nodes[at].right);
    return nodes[at].count1 > nodes[at].count0 ? 1 : 0;
}

ForestModel train(const Dataset& data, Hyperparams params, uint64_t seed, unsigned jobs) {
    check_dataset(data);
    if (params.n_trees < 1) throw ConfigError("n_trees must be >= 1");
    params.rng_seed = seed;
    ForestModel model;
    model.params = params;
    for (const char* name : FeatureVector::names()) model.feature_order.push_back(name);
    model.trees.resize(params.n_trees);
    Rng base(seed);
    parallel_for(static_cast<size_t>(params.n_trees), jobs, [&](size_t i) {
        model.trees[i] = train_tree(data, params, base.fork(i));
    });
    return model;
}

Prediction predict(const ForestModel& model, const std::array<double, kFeatureCount>& x) {
    int64_t votes1 = 0;
    for (const auto& tree : model.trees) votes1 += tree.vote(x);
    Prediction p;
    p.score = static_cast<double>(votes1) / static_cast<double>(model.trees.size());
    p.label = 2 * votes1 > static_cast<int64_t>(model.trees.size()) ? 1 : 0;
    return p;
}

void FoldMetrics::finalize() {
    precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    f1 = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
}

EvalReport cross_validate(const Dataset& data, Hyperparams params, int k, uint64_t seed,
                          unsigned jobs) {
    if (k < 2) throw ConfigError("cross validation needs k >= 2");
    if (data.size() < static_cast<size_t>(k)) throw InsufficientData("fewer rows than folds");
    check_dataset(data);

    std::vector<size_t> by_class[2];
    for (size_t i = 0; i < data.size(); ++i) by_class[data.y[i]].push_back(i);
    if (by_class[0].size() < static_cast<size_t>(k) || by_class[1].size() < static_cast<size_t>(k))
        throw InsufficientData("a class has fewer rows than folds");

    Rng rng(seed);
    rng.shuffle(by_class[0]);
    rng.shuffle(by_class[1]);
    std::vector<int> fold_of(data.size());
    for (int c = 0; c < 2; ++c)
        for (size_t i = 0; i < by_class[c].size(); ++i)
            fold_of[by_class[c][i]] = static_cast<int>(i % static_cast<size_t>(k));

    EvalReport report;
    for (int fold = 0; fold < k; ++fold) {
        Dataset train_set, test_set;
        std::vector<size_t> test_rows;
        for (size_t i = 0; i < data.size(); ++i) {
            if (fold_of[i] == fold) {
                test_set.x.push_back(data.x[i]);
                test_set.y.push_back(data.y[i]);
            } else {
                train_set.x.push_back(data.x[i]);
                train_set.y.push_back(data.y[i]);
            }
        }
        ForestModel model = train(train_set, params, Rng(seed).fork(100 + fold).next_u64(), jobs);
        FoldMetrics m;
        for (size_t i = 0; i < test_set.size(); ++i) {
            int got = predict(model, test_set.x[i]).label;
            int want = test_set.y[i];
            if (got == 1 && want == 1) ++m.tp;
            else if (got == 1 && want == 0) ++m.fp;
            else if (got == 0 && want == 1) ++m.fn;
            else ++m.tn;
        }
        m.finalize();
        report.folds.push_back(m);
    }
    for (const auto& m : report.folds) {
        report.aggregate.tp += m.tp;
        report.aggregate.fp += m.fp;
        report.aggregate.fn += m.fn;
        report.aggregate.tn += m.tn;
    }
    report.aggregate.finalize();
    return report;
}

// --- serialization ---------------------------------------------------------------

std::string ForestModel::to_json() const {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["hyperparams"] = {{"nTrees", params.n_trees},
                        {"maxDepth", params.max_depth},
                        {"minLeaf", params.min_leaf},
                        {"featuresPerSplit", params.features_per_split},
                        {"rngSeed", params.rng_seed}};
    j["featureOrder"] = feature_order;
    auto trees_json = nlohmann::ordered_json::array();
    for (const auto& tree : trees) {
        auto nodes = nlohmann::ordered_json::array();
        for (const auto& n : tree.nodes)
            nodes.push_back({n.feature, n.threshold, n.left, n.right, n.count0, n.count1});
        trees_json.push_back({{"nodes", nodes}});
    }
    j["trees"] = trees_json;
    return j.dump();
}

ForestModel ForestModel::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    if (j.at("version").get<int>() != 1) throw ConfigError("unsupported model version");
    ForestModel m;
    const auto& h = j.at("hyperparams");
    m.params.n_trees = h.at("nTrees").get<int>();
    m.params.max_depth = h.at("maxDepth").get<int>();
    m.params.min_leaf = h.at("minLeaf").get<int>();
    m.params.features_per_split = h.at("featuresPerSplit").get<int>();
    m.params.rng_seed = h.at("rngSeed").get<uint64_t>();
    m.feature_order = j.at("featureOrder").get<std::vector<std::string>>();
    for (const auto& tj : j.at("trees")) {
        DecisionTree tree;
        for (const auto& nj : tj.at("nodes")) {
            TreeNode n;
            n.feature = nj.at(0).get<int>();
            n.threshold = nj.at(1).get<double>();
            n.left = nj.at(2).get<int>();
            n.right = nj.at(3).get<int>();
            n.count0 = nj.at(4).get<int64_t>();
            n.count1 = nj.at(5).get<int64_t>();
            tree.nodes.push_back(n);
        }
        m.trees.push_back(std::move(tree));
    }
    return m;
}

void ForestModel::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IngestError("cannot open " + path.string() + " for writing", 0, "file");
    out << to_json() << '\n';
}

ForestModel ForestModel::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open " + path.string(), 0, "file");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json(text);
}

std::string EvalReport::to_json() const {
    nlohmann::ordered_json j;
    auto fold_json = [](const FoldMetrics& m) {
        return nlohmann::ordered_json{{"tp", m.tp},        {"fp", m.fp},
                                      {"fn", m.fn},        {"tn", m.tn},
                                      {"precision", m.precision}, {"recall", m.recall},
                                      {"f1", m.f1}};
    };
    auto folds = nlohmann::ordered_json::array();
    for (const auto& m : this->folds) folds.push_back(fold_json(m));
    j["folds"] = folds;
    j["aggregate"] = fold_json(aggregate);
    return j.dump(2);
}

// --- baselines --------------------------------------------------------------------

namespace {

LinearModel fit_linear(const Dataset& data, BaselineKind kind, uint64_t seed) {
    check_dataset(data);
    const size_t n = data.size();
    LinearModel m;
    m.mean.assign(kFeatureCount, 0.0);
    m.scale.assign(kFeatureCount, 1.0);
    for (size_t f = 0; f < kFeatureCount; ++f) {
        double s = 0;
        for (size_t i = 0; i < n; ++i) s += data.x[i][f];
        m.mean[f] = s / static_cast<double>(n);
        double var = 0;
        for (size_t i = 0; i < n; ++i) {
            double d = data.x[i][f] - m.mean[f];
            var += d * d;
        }
        m.scale[f] = std::sqrt(var / static_cast<double>(n));
        if (m.scale[f] < 1e-12) m.scale[f] = 1.0;
    }
    m.weights.assign(kFeatureCount, 0.0);
    m.bias = 0;

    Rng rng(seed);
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const int epochs = 60;
    const double lambda = 1e-4;
    double step = 0.1;
    for (int e = 0; e < epochs; ++e) {
        rng.shuffle(order);
        for (size_t i : order) {
            double z = m.bias;
            for (size_t f = 0; f < kFeatureCount; ++f)
                z += m.weights[f] * (data.x[i][f] - m.mean[f]) / m.scale[f];
            if (kind == BaselineKind::Logistic) {
                double p = 1.0 / (1.0 + std::exp(-z));
                double g = p - data.y[i];
                for (size_t f = 0; f < kFeatureCount; ++f)
                    m.weights[f] -= step * (g * (data.x[i][f] - m.mean[f]) / m.scale[f] +
                                            lambda * m.weights[f]);
                m.bias -= step * g;
            } else {
                double yi = data.y[i] == 1 ? 1.0 : -1.0;
                bool margin_violated = yi * z < 1.0;
                for (size_t f = 0; f < kFeatureCount; ++f) {
                    double g = lambda * m.weights[f];
                    if (margin_violated) g -= yi * (data.x[i][f] - m.mean[f]) / m.scale[f];
                    m.weights[f] -= step * g;
                }
                if (margin_violated) m.bias += step * yi;
            }
        }
        step *= 0.97;
    }
    return m;
}

}  // namespace

int LinearModel::predict(const std::array<double, kFeatureCount>& x) const {
    double z = bias;
    for (size_t f = 0; f < kFeatureCount; ++f) z += weights[f] * (x[f] - mean[f]) / scale[f];
    return z > 0 ? 1 : 0;
}

LinearModel train_baseline(const Dataset& data, BaselineKind kind, uint64_t seed) {
    return fit_linear(data, kind, seed);
}

EvalReport cross_validate_baseline(const Dataset& data, BaselineKind kind, int k, uint64_t seed) {
    if (k < 2) throw ConfigError("cross validation needs k >= 2");
    check_dataset(data);
    std::vector<size_t> by_class[2];
    for (size_t i = 0; i < data.size(); ++i) by_class[data.y[i]].push_back(i);
    if (by_class[0].size() < static_cast<size_t>(k) || by_class[1].size() < static_cast<size_t>(k))
        throw InsufficientData("a class has fewer rows than folds");
    Rng rng(seed);
    rng.shuffle(by_class[0]);
    rng.shuffle(by_class[1]);
    std::vector<int> fold_of(data.size());
    for (int c = 0; c < 2; ++c)
        for (size_t i = 0; i < by_class[c].size(); ++i)
            fold_of[by_class[c][i]] = static_cast<int>(i % static_cast<size_t>(k));
    EvalReport report;
    for (int fold = 0; fold < k; ++fold) {
        Dataset train_set, test_set;
        for (size_t i = 0; i < data.size(); ++i) {
            (fold_of[i] == fold ? test_set : train_set).x.push_back(data.x[i]);
            (fold_of[i] == fold ? test_set : train_set).y.push_back(data.y[i]);
        }
        LinearModel m = fit_linear(train_set, kind, Rng(seed).fork(200 + fold).next_u64());
        FoldMetrics fm;
        for (size_t i = 0; i < test_set.size(); ++i) {
            int got = m.predict(test_set.x[i]);
            int want = test_set.y[i];
            if (got == 1 && want == 1) ++fm.tp;
            else if (got == 1 && want == 0) ++fm.fp;
            else if (got == 0 && want == 1) ++fm.fn;
            else ++fm.tn;
        }
        fm.finalize();
        report.folds.push_back(fm);
    }
    for (const auto& m : report.folds) {
        report.aggregate.tp += m.tp;
        report.aggregate.fp += m.fp;
        report.aggregate.fn += m.fn;
        report.aggregate.tn += m.tn;
    }
    report.aggregate.finalize();
    return report;
}

}  // namespace scamradar
