#include "ens/classifier.hpp"

#include <stdexcept>

#include "ens/combiners.hpp"
#include "ens/rng.hpp"

namespace ens {

Classifier Classifier::threshold(ScorerPtr scorer, double theta) {
    if (!scorer) throw std::invalid_argument("threshold classifier: null scorer");
    Classifier c;
    c.mode_ = Mode::threshold;
    c.num_classes_ = 2;
    c.scorer_ = std::move(scorer);
    c.theta_ = theta;
    return c;
}

Classifier Classifier::argmax(std::vector<ScorerPtr> per_class,
                              Normalizer norm,
                              std::vector<ScoreStats> stats,
                              std::uint64_t tie_seed) {
    if (per_class.size() < 2) throw std::invalid_argument("argmax classifier: need K >= 2 scorers");
    for (const auto& s : per_class)
        if (!s) throw std::invalid_argument("argmax classifier: null scorer");
    if (norm == Normalizer::zscore && stats.size() != per_class.size())
        throw std::invalid_argument("argmax classifier: missing normalization statistics");
    Classifier c;
    c.mode_ = Mode::argmax;
    c.num_classes_ = static_cast<int>(per_class.size());
    c.per_class_ = std::move(per_class);
    c.norm_ = norm;
    c.stats_ = std::move(stats);
    c.tie_seed_ = tie_seed;
    return c;
}

Classifier Classifier::argmax(std::vector<ScorerPtr> per_class, std::uint64_t tie_seed) {
    return argmax(std::move(per_class), Normalizer::none, {}, tie_seed);
}

Classifier Classifier::native(ScorerPtr multiclass, std::uint64_t tie_seed) {
    if (!multiclass) throw std::invalid_argument("native classifier: null scorer");
    if (multiclass->class_count() < 2)
        throw std::invalid_argument("native classifier: scorer is not multiclass");
    Classifier c;
    c.mode_ = Mode::native;
    c.num_classes_ = multiclass->class_count();
    c.scorer_ = std::move(multiclass);
    c.tie_seed_ = tie_seed;
    return c;
}

Classifier Classifier::vote(std::vector<Classifier> members, std::uint64_t tie_seed) {
    if (members.empty()) throw std::invalid_argument("voting stack: no members");
    const int k = members.front().class_count();
    for (const Classifier& m : members)
        if (m.class_count() != k)
            throw std::invalid_argument("voting stack: inconsistent label spaces");
    Classifier c;
    c.mode_ = Mode::vote;
    c.num_classes_ = k;
    c.members_ = std::move(members);
    c.tie_seed_ = tie_seed;
    return c;
}

int Classifier::argmax_with_ties(const std::vector<double>& scores) const {
    int best = 0;
    for (int k = 1; k < static_cast<int>(scores.size()); ++k)
        if (scores[static_cast<std::size_t>(k)] > scores[static_cast<std::size_t>(best)]) best = k;
    std::vector<int> tied;
    for (int k = 0; k < static_cast<int>(scores.size()); ++k)
        if (scores[static_cast<std::size_t>(k)] == scores[static_cast<std::size_t>(best)]) tied.push_back(k);
    if (tied.size() == 1) return tied.front();
    // Seed from the tied index set: stable per input, and unchanged when a
    // common constant shifts every score.
    SplitMix64 rng(derive_seed(tie_seed_, fnv1a64(tied.data(), tied.size() * sizeof(int))));
    return tied[rng.index(tied.size())];
}

std::vector<double> Classifier::raw_scores(const Instance& x) const {
    switch (mode_) {
        case Mode::threshold:
            return {scorer_->score(x)};
        case Mode::argmax: {
            std::vector<double> s;
            s.reserve(per_class_.size());
            for (const auto& sc : per_class_) s.push_back(sc->score(x));
            return s;
        }
        case Mode::native:
            return scorer_->class_scores(x);
        case Mode::vote:
            return {};
    }
    return {};
}

int Classifier::classify(const Instance& x) const {
    switch (mode_) {
        case Mode::threshold:
            return scorer_->score(x) >= theta_ ? 1 : 0;
        case Mode::argmax: {
            std::vector<double> s = raw_scores(x);
            if (norm_ == Normalizer::zscore) {
                for (std::size_t k = 0; k < s.size(); ++k) {
                    const double sd = stats_[k].stdev < 1e-12 ? 1.0 : stats_[k].stdev;
                    s[k] = (s[k] - stats_[k].mean) / sd;
                }
            }
            return argmax_with_ties(s);
        }
        case Mode::native:
            return argmax_with_ties(scorer_->class_scores(x));
        case Mode::vote: {
            VoteVector votes;
            votes.values.reserve(members_.size());
            for (const Classifier& m : members_) votes.values.push_back(m.classify(x));
            return combine_majority(votes, num_classes_, tie_seed_);
        }
    }
    throw std::logic_error("Classifier: bad mode");
}

std::vector<int> Classifier::classify_batch(const FeatureMatrix& fm) const {
    std::vector<int> out(fm.n);
    for (std::size_t i = 0; i < fm.n; ++i) out[i] = classify(instance_at(fm, i));
    return out;
}

}  // namespace ens
