#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ens/scorer.hpp"
#include "ens/types.hpp"

namespace ens {

enum class Normalizer { none, zscore };

// Per-class score statistics, recorded on the training set, used when a
// zscore normalizer makes heterogeneous scores commensurable.
struct ScoreStats {
    double mean = 0.0;
    double stdev = 1.0;
};

// Thresholded (binary) or argmax (multiclass) classification function over
// trained scorers. Immutable and cheap to copy; safe to share across
// threads.
class Classifier {
public:
    // classify(x) = 1 iff S(x) >= theta. Boundary classifies positive.
    static Classifier threshold(ScorerPtr scorer, double theta);

    // One scorer per class; classify(x) = argmax over (optionally
    // normalized) class scores. Exact ties break uniformly at random,
    // seeded from tie_seed mixed with the tied index set, so identical
    // inputs always resolve identically.
    static Classifier argmax(std::vector<ScorerPtr> per_class,
                             Normalizer norm,
                             std::vector<ScoreStats> stats,
                             std::uint64_t tie_seed);
    static Classifier argmax(std::vector<ScorerPtr> per_class, std::uint64_t tie_seed);

    // A natively multiclass scorer (tree, forest, boosted model).
    static Classifier native(ScorerPtr multiclass, std::uint64_t tie_seed);

    // Majority vote over member classifiers (a voting stack).
    static Classifier vote(std::vector<Classifier> members, std::uint64_t tie_seed);

    int classify(const Instance& x) const;
    std::vector<int> classify_batch(const FeatureMatrix& fm) const;

    // Raw (pre-normalization) per-class scores; empty for vote stacks.
    std::vector<double> raw_scores(const Instance& x) const;

    int class_count() const { return num_classes_; }

private:
    enum class Mode { threshold, argmax, native, vote };

    Classifier() = default;

    Mode mode_ = Mode::threshold;
    int num_classes_ = 2;
    std::uint64_t tie_seed_ = 0;
    double theta_ = 0.0;
    ScorerPtr scorer_;                     // threshold / native
    std::vector<ScorerPtr> per_class_;     // argmax
    Normalizer norm_ = Normalizer::none;
    std::vector<ScoreStats> stats_;
    std::vector<Classifier> members_;      // vote

    int argmax_with_ties(const std::vector<double>& scores) const;
};

}  // namespace ens
