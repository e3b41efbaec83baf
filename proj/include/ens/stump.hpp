#pragma once

#include <memory>
#include <vector>

#include "ens/parallel.hpp"
#include "ens/scorer.hpp"
#include "ens/types.hpp"

namespace ens {

// Depth-1 weighted weak learner. predict(x) = left_class when
// x[feature] < threshold, else right_class. A constant stump carries
// threshold = -inf so every sample falls right.
class StumpModel final : public Scorer {
public:
    int feature = 0;
    double threshold = 0.0;
    int left_class = 0;
    int right_class = 0;
    int polarity = 1;  // +1 when left_class <= right_class, informational
    double weighted_error = 0.0;
    int num_classes = 0;

    std::string family() const override { return "stump"; }
    int class_count() const override { return num_classes; }
    int predict(const Instance& x) const;
    double score(const Instance& x) const override;
    std::vector<double> class_scores(const Instance& x) const override;

    nlohmann::json to_json() const override;
    static std::shared_ptr<StumpModel> from_json(const nlohmann::json& j);
};

// Exhaustive search over all features and midpoints of sorted distinct
// values (plus the constant stump) for the minimum weighted error. Each
// side predicts its weighted-majority class, so for binary labels the
// returned error never exceeds 0.5. weights must sum to 1 within 1e-9.
std::shared_ptr<const StumpModel> train_stump(const FeatureMatrix& fm,
                                              const std::vector<int>& labels,
                                              int num_classes,
                                              const std::vector<double>& weights,
                                              Exec exec = Exec::parallel);

}  // namespace ens
