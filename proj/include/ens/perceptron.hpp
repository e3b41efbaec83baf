#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ens/scorer.hpp"
#include "ens/types.hpp"

namespace ens {

struct PerceptronParams {
    int epochs = 100;
    double learning_rate = 1.0;
    std::uint64_t init_seed = 0;
};

// Mistake-driven linear classifier on the vector view (histogram columns).
// score(x) = w . x + b. Multiclass is the caller's job (one-vs-rest).
class PerceptronModel final : public Scorer {
public:
    std::vector<double> weights;
    double bias = 0.0;
    int epochs_run = 0;

    std::string family() const override { return "perceptron"; }
    double score(const Instance& x) const override;
    nlohmann::json to_json() const override;
    static std::shared_ptr<PerceptronModel> from_json(const nlohmann::json& j);
};

// labels must be 0/1. Random initial weights and a per-epoch visiting
// order both derive from init_seed; training stops early once an epoch
// makes no mistakes. Single-class label sets train but come back with
// meta().degenerate set.
std::shared_ptr<const PerceptronModel> train_perceptron(const FeatureMatrix& fm,
                                                        const std::vector<int>& labels,
                                                        const PerceptronParams& params);

// Smallest geometric margin min_i y_i (w.x_i + b) / |w| over a labeled set;
// negative when any point is misclassified.
double perceptron_min_margin(const PerceptronModel& model,
                             const FeatureMatrix& fm,
                             const std::vector<int>& labels);

}  // namespace ens
