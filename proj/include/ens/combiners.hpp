#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace ens {

// Component scores S_1..S_l for one sample.
struct ScoreVector {
    std::vector<double> values;
    std::vector<std::string> component_ids;  // optional, parallel to values
};

// Component class labels, each in 0..K-1.
struct VoteVector {
    std::vector<int> values;
};

double combine_max(const ScoreVector& s);
double combine_average(const ScoreVector& s);

// Plurality label. Exact ties among the top labels are broken uniformly at
// random, seeded from tie_seed mixed with the vote tally (not the vote
// order), so the result is deterministic per input and invariant under
// permutation of the l votes.
int combine_majority(const VoteVector& v, int num_classes, std::uint64_t tie_seed);

// Instrumentation: number of times combine_majority had to consult the tie
// RNG since the last reset. Test hook only.
std::uint64_t majority_tie_count();
void reset_majority_tie_count();

// A learned linear combiner over component scores (the "ML as F" route):
// one-vs-rest hinge-loss linear classifiers trained by stochastic
// subgradient descent on z-scored component scores.
struct MetaParams {
    int epochs = 400;
    double learning_rate = 0.5;
    double l2 = 1e-4;
    std::uint64_t seed = 0;
    bool zscore = true;
};

class MetaCombiner {
public:
    int components() const { return ell_; }
    int classes() const { return num_classes_; }

    // Final decision for one sample's component scores.
    int apply(std::span<const double> scores) const;

    // Decision margin per class (binary: single margin for class 1).
    std::vector<double> margins(std::span<const double> scores) const;

    nlohmann::json to_json() const;
    static MetaCombiner from_json(const nlohmann::json& j);

    friend MetaCombiner train_meta_combiner(const std::vector<std::vector<double>>&,
                                            const std::vector<int>&, int, const MetaParams&);

private:
    int ell_ = 0;
    int num_classes_ = 0;
    std::vector<double> weights_;  // binary: ell; multiclass: K x ell row-major
    std::vector<double> bias_;     // binary: 1; multiclass: K
    std::vector<double> mean_;     // per-component normalization stats
    std::vector<double> stdev_;
    bool zscore_ = true;
};

// component_scores: n rows of l component scores, produced out-of-fold
// (see stacking.hpp); labels in 0..K-1.
MetaCombiner train_meta_combiner(const std::vector<std::vector<double>>& component_scores,
                                 const std::vector<int>& labels,
                                 int num_classes,
                                 const MetaParams& params);

}  // namespace ens
