#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ens/parallel.hpp"
#include "ens/scorer.hpp"
#include "ens/types.hpp"

namespace ens {

struct TreeParams {
    int max_depth = 10;
    int min_samples_split = 2;
    int min_samples_leaf = 1;
};

struct TreeNode {
    int feature = -1;     // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<double> class_counts;  // leaves only
};

// Gini-impurity greedy CART tree over the vector view. Split ties resolve
// to the lowest feature index, then the lowest threshold.
class TreeModel final : public Scorer {
public:
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    int num_classes = 0;

    std::string family() const override { return "tree"; }
    int class_count() const override { return num_classes; }
    double score(const Instance& x) const override;
    std::vector<double> class_scores(const Instance& x) const override;
    int predict(const Instance& x) const;  // argmax leaf class, ties to lowest class

    nlohmann::json to_json() const override;
    static std::shared_ptr<TreeModel> from_json(const nlohmann::json& j);
};

std::shared_ptr<const TreeModel> train_tree(const FeatureMatrix& fm,
                                            const std::vector<int>& labels,
                                            int num_classes,
                                            const TreeParams& params);

struct ForestParams {
    int n_estimators = 100;
    std::string max_features = "auto";  // auto | sqrt | log2 (auto == sqrt)
    int max_depth = 10;
    int min_samples_split = 2;
    int min_samples_leaf = 1;
    std::uint64_t seed = 0;
};

// Bagged trees: each tree trains on a bootstrap sample of the columns with
// a fresh feature subset of the configured size at every split. Class
// score = fraction of tree votes.
class ForestModel final : public Scorer {
public:
    std::vector<std::shared_ptr<const TreeModel>> trees;
    int num_classes = 0;

    std::string family() const override { return "forest"; }
    int class_count() const override { return num_classes; }
    double score(const Instance& x) const override;
    std::vector<double> class_scores(const Instance& x) const override;

    nlohmann::json to_json() const override;
    static std::shared_ptr<ForestModel> from_json(const nlohmann::json& j);
};

std::shared_ptr<const ForestModel> train_forest(const FeatureMatrix& fm,
                                                const std::vector<int>& labels,
                                                int num_classes,
                                                const ForestParams& params,
                                                Exec exec = Exec::parallel);

// Features examined per split for a given mode and feature count.
int forest_mtry(const std::string& max_features, std::size_t m);

}  // namespace ens
