#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ens/types.hpp"

#include "json.hpp"

namespace ens {

struct TrainingMeta {
    double objective = 0.0;       // final training objective (log-likelihood, error, ...)
    int iterations = 0;
    std::vector<double> curve;    // per-iteration objective, when the trainer tracks one
    bool degenerate = false;      // set instead of throwing for soft failure modes
    std::string note;
};

// A trained real-valued scoring function. Scoring is const, deterministic
// and never touches trained state, so a finished Scorer can be shared
// freely between threads (we pass shared_ptr<const Scorer> around).
class Scorer {
public:
    virtual ~Scorer() = default;

    virtual std::string family() const = 0;

    // S(x): the real-valued score. For natively multiclass scorers this is
    // a convenience projection of class_scores(); classification goes
    // through class_scores() instead.
    virtual double score(const Instance& x) const = 0;

    // 0 for scorers that emit a single score (one model per family,
    // combined by the caller); K for natively multiclass scorers.
    virtual int class_count() const { return 0; }

    virtual std::vector<double> class_scores(const Instance& x) const {
        return {score(x)};
    }

    const TrainingMeta& meta() const { return meta_; }
    TrainingMeta& meta() { return meta_; }

    // Every model serializes to a self-describing JSON document; see
    // serialize.hpp for the file roundtrip.
    virtual nlohmann::json to_json() const = 0;

protected:
    TrainingMeta meta_;
};

using ScorerPtr = std::shared_ptr<const Scorer>;

}  // namespace ens
