#include "ens/feature_matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace ens {

namespace {

void check_tokens(const Sample& s, std::size_t vocab_size) {
    if (s.tokens.empty()) throw std::invalid_argument("sample '" + s.id + "' has no tokens");
    for (int t : s.tokens) {
        if (t < 0 || static_cast<std::size_t>(t) >= vocab_size)
            throw std::invalid_argument("sample '" + s.id + "' has token " + std::to_string(t) +
                                        " outside vocabulary of size " + std::to_string(vocab_size));
    }
}

std::vector<double> histogram_column(const Sample& s, std::size_t vocab_size) {
    std::vector<double> col(vocab_size, 0.0);
    for (int t : s.tokens) col[static_cast<std::size_t>(t)] += 1.0;
    const double inv = 1.0 / static_cast<double>(s.tokens.size());
    for (double& v : col) v *= inv;
    return col;
}

}  // namespace

FeatureMatrix build_feature_matrix(std::span<const Sample> samples,
                                   std::size_t vocab_size,
                                   const Representation& repr) {
    if (samples.empty()) throw std::invalid_argument("build_feature_matrix: empty sample list");
    if (vocab_size == 0) throw std::invalid_argument("build_feature_matrix: vocabulary size 0");
    for (const Sample& s : samples) check_tokens(s, vocab_size);

    FeatureMatrix fm;
    fm.n = samples.size();
    fm.vocab_size = vocab_size;

    switch (repr.kind) {
        case Representation::Kind::histogram:
        case Representation::Kind::sequence: {
            fm.m = vocab_size;
            fm.row_labels.reserve(vocab_size);
            for (std::size_t v = 0; v < vocab_size; ++v)
                fm.row_labels.push_back("tok" + std::to_string(v));
            fm.columns.reserve(fm.n);
            for (const Sample& s : samples) fm.columns.push_back(histogram_column(s, vocab_size));
            if (repr.kind == Representation::Kind::sequence) {
                fm.sequence_view.reserve(fm.n);
                for (const Sample& s : samples) fm.sequence_view.push_back(s.tokens);
            }
            break;
        }
        case Representation::Kind::ngram: {
            const int order = repr.ngram_order;
            if (order < 1) throw std::invalid_argument("build_feature_matrix: ngram order < 1");
            std::size_t rows = 1;
            for (int i = 0; i < order; ++i) {
                if (rows > 2'000'000 / vocab_size)
                    throw std::invalid_argument("build_feature_matrix: ngram space too large");
                rows *= vocab_size;
            }
            fm.m = rows;
            fm.row_labels.reserve(rows);
            for (std::size_t g = 0; g < rows; ++g) {
                // row label lists the token ids of the n-gram, most significant first
                std::string label;
                std::size_t rest = g;
                std::vector<int> toks(static_cast<std::size_t>(order));
                for (int i = order - 1; i >= 0; --i) {
                    toks[static_cast<std::size_t>(i)] = static_cast<int>(rest % vocab_size);
                    rest /= vocab_size;
                }
                for (int i = 0; i < order; ++i) {
                    if (i) label += '|';
                    label += std::to_string(toks[static_cast<std::size_t>(i)]);
                }
                fm.row_labels.push_back(std::move(label));
            }
            fm.columns.reserve(fm.n);
            for (const Sample& s : samples) {
                std::vector<double> col(rows, 0.0);
                if (s.tokens.size() >= static_cast<std::size_t>(order)) {
                    const std::size_t windows = s.tokens.size() - static_cast<std::size_t>(order) + 1;
                    for (std::size_t p = 0; p < windows; ++p) {
                        std::size_t idx = 0;
                        for (int i = 0; i < order; ++i)
                            idx = idx * vocab_size + static_cast<std::size_t>(s.tokens[p + static_cast<std::size_t>(i)]);
                        col[idx] += 1.0;
                    }
                    const double inv = 1.0 / static_cast<double>(windows);
                    for (double& v : col) v *= inv;
                }
                fm.columns.push_back(std::move(col));
            }
            break;
        }
    }
    fm.check();
    return fm;
}

}  // namespace ens
