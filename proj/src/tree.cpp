#include "ens/tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ens/rng.hpp"

namespace ens {

namespace {

double gini_from_counts(const std::vector<double>& counts, double total) {
    if (total <= 0.0) return 0.0;
    double g = 1.0;
    for (double c : counts) {
        const double p = c / total;
        g -= p * p;
    }
    return g;
}

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double weighted_gini = 0.0;
};

struct TreeBuilder {
    const FeatureMatrix& fm;
    const std::vector<int>& labels;
    int num_classes;
    const TreeParams& params;
    SplitMix64* rng = nullptr;  // forest mode: feature subsetting per split
    int mtry = 0;
    TreeModel& out;

    // Best split over one feature; samples enter sorted by feature value.
    void scan_feature(int f, const std::vector<int>& idx, SplitChoice& best) const {
        const std::size_t n = idx.size();
        std::vector<std::pair<double, int>> vals(n);
        for (std::size_t p = 0; p < n; ++p)
            vals[p] = {fm.columns[static_cast<std::size_t>(idx[p])][static_cast<std::size_t>(f)], idx[p]};
        std::sort(vals.begin(), vals.end());

        std::vector<double> left_counts(static_cast<std::size_t>(num_classes), 0.0);
        std::vector<double> right_counts(static_cast<std::size_t>(num_classes), 0.0);
        for (std::size_t p = 0; p < n; ++p)
            right_counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(vals[p].second)])] += 1.0;

        const double total = static_cast<double>(n);
        for (std::size_t p = 0; p + 1 < n; ++p) {
            const int y = labels[static_cast<std::size_t>(vals[p].second)];
            left_counts[static_cast<std::size_t>(y)] += 1.0;
            right_counts[static_cast<std::size_t>(y)] -= 1.0;
            if (vals[p].first == vals[p + 1].first) continue;
            const double n_left = static_cast<double>(p + 1);
            const double n_right = total - n_left;
            if (n_left < params.min_samples_leaf || n_right < params.min_samples_leaf) continue;
            const double wg = (n_left * gini_from_counts(left_counts, n_left) +
                               n_right * gini_from_counts(right_counts, n_right)) / total;
            const double thr = (vals[p].first + vals[p + 1].first) / 2.0;
            if (!best.found || wg < best.weighted_gini ||
                (wg == best.weighted_gini &&
                 (f < best.feature || (f == best.feature && thr < best.threshold)))) {
                best.found = true;
                best.feature = f;
                best.threshold = thr;
                best.weighted_gini = wg;
            }
        }
    }

    std::vector<int> candidate_features() const {
        const int m = static_cast<int>(fm.m);
        if (!rng || mtry >= m) {
            std::vector<int> all(static_cast<std::size_t>(m));
            for (int f = 0; f < m; ++f) all[static_cast<std::size_t>(f)] = f;
            return all;
        }
        std::vector<int> pool(static_cast<std::size_t>(m));
        for (int f = 0; f < m; ++f) pool[static_cast<std::size_t>(f)] = f;
        for (int k = 0; k < mtry; ++k) {
            const std::size_t j = static_cast<std::size_t>(k) +
                                  rng->index(static_cast<std::size_t>(m - k));
            std::swap(pool[static_cast<std::size_t>(k)], pool[j]);
        }
        pool.resize(static_cast<std::size_t>(mtry));
        std::sort(pool.begin(), pool.end());  // canonical scan order
        return pool;
    }

    int build(const std::vector<int>& idx, int depth) {
        std::vector<double> counts(static_cast<std::size_t>(num_classes), 0.0);
        for (int i : idx) counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] += 1.0;

        const bool pure = gini_from_counts(counts, static_cast<double>(idx.size())) == 0.0;
        if (pure || depth >= params.max_depth ||
            static_cast<int>(idx.size()) < params.min_samples_split) {
            return make_leaf(std::move(counts));
        }

        SplitChoice best;
        for (int f : candidate_features()) scan_feature(f, idx, best);
        if (!best.found) return make_leaf(std::move(counts));

        std::vector<int> left_idx, right_idx;
        for (int i : idx) {
            if (fm.columns[static_cast<std::size_t>(i)][static_cast<std::size_t>(best.feature)] < best.threshold)
                left_idx.push_back(i);
            else
                right_idx.push_back(i);
        }

        const int node = static_cast<int>(out.nodes.size());
        out.nodes.emplace_back();
        out.nodes[static_cast<std::size_t>(node)].feature = best.feature;
        out.nodes[static_cast<std::size_t>(node)].threshold = best.threshold;
        const int l = build(left_idx, depth + 1);
        const int r = build(right_idx, depth + 1);
        out.nodes[static_cast<std::size_t>(node)].left = l;
        out.nodes[static_cast<std::size_t>(node)].right = r;
        return node;
    }

    int make_leaf(std::vector<double> counts) {
        const int node = static_cast<int>(out.nodes.size());
        out.nodes.emplace_back();
        out.nodes[static_cast<std::size_t>(node)].class_counts = std::move(counts);
        return node;
    }
};

const TreeNode& descend(const TreeModel& t, const Instance& x) {
    int node = 0;
    while (t.nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const TreeNode& nd = t.nodes[static_cast<std::size_t>(node)];
        node = x.features[static_cast<std::size_t>(nd.feature)] < nd.threshold ? nd.left : nd.right;
    }
    return t.nodes[static_cast<std::size_t>(node)];
}

}  // namespace

std::vector<double> TreeModel::class_scores(const Instance& x) const {
    const TreeNode& leaf = descend(*this, x);
    double total = 0.0;
    for (double c : leaf.class_counts) total += c;
    std::vector<double> probs(leaf.class_counts.size(), 0.0);
    if (total > 0.0)
        for (std::size_t k = 0; k < probs.size(); ++k) probs[k] = leaf.class_counts[k] / total;
    return probs;
}

int TreeModel::predict(const Instance& x) const {
    const TreeNode& leaf = descend(*this, x);
    int best = 0;
    for (int k = 1; k < num_classes; ++k)
        if (leaf.class_counts[static_cast<std::size_t>(k)] > leaf.class_counts[static_cast<std::size_t>(best)])
            best = k;
    return best;
}

double TreeModel::score(const Instance& x) const {
    const std::vector<double> p = class_scores(x);
    if (num_classes == 2) return p[1];
    return *std::max_element(p.begin(), p.end());
}

std::shared_ptr<const TreeModel> train_tree(const FeatureMatrix& fm,
                                            const std::vector<int>& labels,
                                            int num_classes,
                                            const TreeParams& params) {
    if (params.max_depth < 1) throw std::invalid_argument("train_tree: max_depth < 1");
    if (params.min_samples_leaf < 1) throw std::invalid_argument("train_tree: min_samples_leaf < 1");
    if (params.min_samples_split < 2) throw std::invalid_argument("train_tree: min_samples_split < 2");
    if (labels.size() != fm.n) throw std::invalid_argument("train_tree: labels length mismatch");
    if (num_classes < 2) throw std::invalid_argument("train_tree: need K >= 2");

    auto model = std::make_shared<TreeModel>();
    model->num_classes = num_classes;
    std::vector<int> idx(fm.n);
    for (std::size_t i = 0; i < fm.n; ++i) idx[i] = static_cast<int>(i);
    TreeBuilder builder{fm, labels, num_classes, params, nullptr, 0, *model};
    builder.build(idx, 0);
    return model;
}

int forest_mtry(const std::string& max_features, std::size_t m) {
    if (max_features == "auto" || max_features == "sqrt")
        return std::max(1, static_cast<int>(std::sqrt(static_cast<double>(m))));
    if (max_features == "log2")
        return std::max(1, static_cast<int>(std::log2(static_cast<double>(m))));
    throw std::invalid_argument("train_forest: max_features must be auto|sqrt|log2");
}

std::vector<double> ForestModel::class_scores(const Instance& x) const {
    std::vector<double> votes(static_cast<std::size_t>(num_classes), 0.0);
    for (const auto& t : trees) votes[static_cast<std::size_t>(t->predict(x))] += 1.0;
    const double inv = 1.0 / static_cast<double>(trees.size());
    for (double& v : votes) v *= inv;
    return votes;
}

double ForestModel::score(const Instance& x) const {
    const std::vector<double> p = class_scores(x);
    if (num_classes == 2) return p[1];
    return *std::max_element(p.begin(), p.end());
}

std::shared_ptr<const ForestModel> train_forest(const FeatureMatrix& fm,
                                                const std::vector<int>& labels,
                                                int num_classes,
                                                const ForestParams& params,
                                                Exec exec) {
    if (params.n_estimators < 1) throw std::invalid_argument("train_forest: n_estimators < 1");
    const int mtry = forest_mtry(params.max_features, fm.m);
    TreeParams tp{params.max_depth, params.min_samples_split, params.min_samples_leaf};
    if (tp.max_depth < 1) throw std::invalid_argument("train_forest: max_depth < 1");
    if (tp.min_samples_leaf < 1) throw std::invalid_argument("train_forest: min_samples_leaf < 1");
    if (labels.size() != fm.n) throw std::invalid_argument("train_forest: labels length mismatch");

    auto model = std::make_shared<ForestModel>();
    model->num_classes = num_classes;
    model->trees.resize(static_cast<std::size_t>(params.n_estimators));

    // One tree per slot, one seed stream per tree: identical forests under
    // any policy or thread count.
    parallel_for(exec, static_cast<std::size_t>(params.n_estimators), [&](std::size_t t) {
        SplitMix64 rng(derive_seed(params.seed, t));
        std::vector<int> boot(fm.n);
        for (std::size_t i = 0; i < fm.n; ++i)
            boot[i] = static_cast<int>(rng.index(fm.n));
        std::sort(boot.begin(), boot.end());

        auto tree = std::make_shared<TreeModel>();
        tree->num_classes = num_classes;
        TreeBuilder builder{fm, labels, num_classes, tp, &rng, mtry, *tree};
        builder.build(boot, 0);
        model->trees[t] = std::move(tree);
    });
    return model;
}

nlohmann::json TreeModel::to_json() const {
    nlohmann::json nodes_j = nlohmann::json::array();
    for (const TreeNode& nd : nodes) {
        nodes_j.push_back(nlohmann::json{{"feature", nd.feature},
                                         {"threshold", nd.threshold},
                                         {"left", nd.left},
                                         {"right", nd.right},
                                         {"class_counts", nd.class_counts}});
    }
    return nlohmann::json{{"format", "ens-model"},
                          {"version", 1},
                          {"family", "tree"},
                          {"classes", num_classes},
                          {"nodes", nodes_j}};
}

std::shared_ptr<TreeModel> TreeModel::from_json(const nlohmann::json& j) {
    auto m = std::make_shared<TreeModel>();
    m->num_classes = j.at("classes").get<int>();
    for (const auto& nd_j : j.at("nodes")) {
        TreeNode nd;
        nd.feature = nd_j.at("feature").get<int>();
        nd.threshold = nd_j.at("threshold").get<double>();
        nd.left = nd_j.at("left").get<int>();
        nd.right = nd_j.at("right").get<int>();
        nd.class_counts = nd_j.at("class_counts").get<std::vector<double>>();
        m->nodes.push_back(std::move(nd));
    }
    return m;
}

nlohmann::json ForestModel::to_json() const {
    nlohmann::json trees_j = nlohmann::json::array();
    for (const auto& t : trees) trees_j.push_back(t->to_json());
    return nlohmann::json{{"format", "ens-model"},
                          {"version", 1},
                          {"family", "forest"},
                          {"classes", num_classes},
                          {"trees", trees_j}};
}

std::shared_ptr<ForestModel> ForestModel::from_json(const nlohmann::json& j) {
    auto m = std::make_shared<ForestModel>();
    m->num_classes = j.at("classes").get<int>();
    for (const auto& t_j : j.at("trees")) m->trees.push_back(TreeModel::from_json(t_j));
    return m;
}

}  // namespace ens
