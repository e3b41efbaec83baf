#pragma once

#include <span>
#include <string>
#include <vector>

#include "ens/types.hpp"

namespace ens {

// How sample token sequences become columns of V.
//   histogram  : m = vocab size, relative token frequencies (column sums to 1)
//   ngram(n)   : m = vocab^n, relative n-gram frequencies over all n-grams
//   sequence   : histogram columns plus the aligned token-sequence view,
//                so the same matrix feeds vector and sequence scorers
struct Representation {
    enum class Kind { histogram, ngram, sequence };
    Kind kind = Kind::histogram;
    int ngram_order = 2;

    static Representation histogram() { return {Kind::histogram, 0}; }
    static Representation ngram(int order) { return {Kind::ngram, order}; }
    static Representation sequence() { return {Kind::sequence, 0}; }
};

FeatureMatrix build_feature_matrix(std::span<const Sample> samples,
                                   std::size_t vocab_size,
                                   const Representation& repr);

}  // namespace ens
