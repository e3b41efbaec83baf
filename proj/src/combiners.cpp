#include "ens/combiners.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "ens/rng.hpp"

namespace ens {

double combine_max(const ScoreVector& s) {
    if (s.values.empty()) throw std::invalid_argument("combine_max: empty score vector");
    return *std::max_element(s.values.begin(), s.values.end());
}

double combine_average(const ScoreVector& s) {
    if (s.values.empty()) throw std::invalid_argument("combine_average: empty score vector");
    double sum = 0.0;
    for (double v : s.values) sum += v;
    return sum / static_cast<double>(s.values.size());
}

namespace {
std::atomic<std::uint64_t> g_tie_count{0};
}

std::uint64_t majority_tie_count() { return g_tie_count.load(); }
void reset_majority_tie_count() { g_tie_count.store(0); }

int combine_majority(const VoteVector& v, int num_classes, std::uint64_t tie_seed) {
    if (v.values.empty()) throw std::invalid_argument("combine_majority: empty vote vector");
    if (num_classes < 1) throw std::invalid_argument("combine_majority: num_classes < 1");
    std::vector<std::int64_t> tally(static_cast<std::size_t>(num_classes), 0);
    for (int label : v.values) {
        if (label < 0 || label >= num_classes)
            throw std::invalid_argument("combine_majority: label out of range");
        ++tally[static_cast<std::size_t>(label)];
    }
    std::int64_t best = *std::max_element(tally.begin(), tally.end());
    std::vector<int> tied;
    for (int k = 0; k < num_classes; ++k)
        if (tally[static_cast<std::size_t>(k)] == best) tied.push_back(k);
    if (tied.size() == 1) return tied.front();

    ++g_tie_count;
    // Seed from the tally so permuting the votes cannot change the pick.
    SplitMix64 rng(derive_seed(tie_seed, fnv1a64(tally.data(), tally.size() * sizeof(tally[0]))));
    return tied[rng.index(tied.size())];
}

MetaCombiner train_meta_combiner(const std::vector<std::vector<double>>& component_scores,
                                 const std::vector<int>& labels,
                                 int num_classes,
                                 const MetaParams& params) {
    const std::size_t n = component_scores.size();
    if (n == 0) throw std::invalid_argument("train_meta_combiner: no rows");
    if (labels.size() != n) throw std::invalid_argument("train_meta_combiner: labels/scores length mismatch");
    const std::size_t ell = component_scores.front().size();
    if (ell == 0) throw std::invalid_argument("train_meta_combiner: zero components");
    for (const auto& row : component_scores)
        if (row.size() != ell) throw std::invalid_argument("train_meta_combiner: ragged score matrix");
    if (num_classes < 2) throw std::invalid_argument("train_meta_combiner: need K >= 2");

    bool all_same = true;
    for (std::size_t i = 1; i < n; ++i)
        if (labels[i] != labels[0]) { all_same = false; break; }
    if (all_same) throw std::invalid_argument("train_meta_combiner: degenerate single-class labels");

    MetaCombiner mc;
    mc.ell_ = static_cast<int>(ell);
    mc.num_classes_ = num_classes;
    mc.zscore_ = params.zscore;
    mc.mean_.assign(ell, 0.0);
    mc.stdev_.assign(ell, 1.0);
    if (params.zscore) {
        for (std::size_t j = 0; j < ell; ++j) {
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) sum += component_scores[i][j];
            const double mean = sum / static_cast<double>(n);
            double ss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = component_scores[i][j] - mean;
                ss += d * d;
            }
            double sd = std::sqrt(ss / static_cast<double>(n));
            if (sd < 1e-12) sd = 1.0;  // constant component carries no signal
            mc.mean_[j] = mean;
            mc.stdev_[j] = sd;
        }
    }

    // Normalized design matrix, reused every epoch.
    std::vector<std::vector<double>> X(n, std::vector<double>(ell));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < ell; ++j)
            X[i][j] = (component_scores[i][j] - mc.mean_[j]) / mc.stdev_[j];

    const int heads = num_classes == 2 ? 1 : num_classes;
    mc.weights_.assign(static_cast<std::size_t>(heads) * ell, 0.0);
    mc.bias_.assign(static_cast<std::size_t>(heads), 0.0);

    SplitMix64 rng(derive_seed(params.seed, 0x6d657461ULL));
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        const double lr = params.learning_rate / (1.0 + 0.05 * epoch);
        for (std::size_t i = n; i > 1; --i) {  // Fisher-Yates
            std::size_t j = rng.index(i);
            std::swap(order[i - 1], order[j]);
        }
        for (std::size_t pos = 0; pos < n; ++pos) {
            const std::size_t i = order[pos];
            const auto& x = X[i];
            for (int h = 0; h < heads; ++h) {
                const int positive = heads == 1 ? 1 : h;
                const double y = labels[i] == positive ? 1.0 : -1.0;
                double* w = &mc.weights_[static_cast<std::size_t>(h) * ell];
                double margin = mc.bias_[static_cast<std::size_t>(h)];
                for (std::size_t j = 0; j < ell; ++j) margin += w[j] * x[j];
                margin *= y;
                for (std::size_t j = 0; j < ell; ++j) w[j] -= lr * params.l2 * w[j];
                if (margin < 1.0) {
                    for (std::size_t j = 0; j < ell; ++j) w[j] += lr * y * x[j];
                    mc.bias_[static_cast<std::size_t>(h)] += lr * y;
                }
            }
        }
    }
    return mc;
}

std::vector<double> MetaCombiner::margins(std::span<const double> scores) const {
    if (static_cast<int>(scores.size()) != ell_)
        throw std::invalid_argument("MetaCombiner: wrong score vector length");
    std::vector<double> x(scores.size());
    for (std::size_t j = 0; j < scores.size(); ++j)
        x[j] = zscore_ ? (scores[j] - mean_[j]) / stdev_[j] : scores[j];
    const int heads = static_cast<int>(bias_.size());
    std::vector<double> out(static_cast<std::size_t>(heads));
    for (int h = 0; h < heads; ++h) {
        const double* w = &weights_[static_cast<std::size_t>(h) * static_cast<std::size_t>(ell_)];
        double m = bias_[static_cast<std::size_t>(h)];
        for (std::size_t j = 0; j < x.size(); ++j) m += w[j] * x[j];
        out[static_cast<std::size_t>(h)] = m;
    }
    return out;
}

int MetaCombiner::apply(std::span<const double> scores) const {
    const std::vector<double> m = margins(scores);
    if (num_classes_ == 2) return m[0] >= 0.0 ? 1 : 0;
    int best = 0;
    for (int k = 1; k < num_classes_; ++k)
        if (m[static_cast<std::size_t>(k)] > m[static_cast<std::size_t>(best)]) best = k;
    return best;
}

nlohmann::json MetaCombiner::to_json() const {
    return nlohmann::json{{"format", "ens-model"},
                          {"version", 1},
                          {"family", "meta"},
                          {"components", ell_},
                          {"classes", num_classes_},
                          {"weights", weights_},
                          {"bias", bias_},
                          {"mean", mean_},
                          {"stdev", stdev_},
                          {"zscore", zscore_}};
}

MetaCombiner MetaCombiner::from_json(const nlohmann::json& j) {
    MetaCombiner mc;
    mc.ell_ = j.at("components").get<int>();
    mc.num_classes_ = j.at("classes").get<int>();
    mc.weights_ = j.at("weights").get<std::vector<double>>();
    mc.bias_ = j.at("bias").get<std::vector<double>>();
    mc.mean_ = j.at("mean").get<std::vector<double>>();
    mc.stdev_ = j.at("stdev").get<std::vector<double>>();
    mc.zscore_ = j.at("zscore").get<bool>();
    return mc;
}

}  // namespace ens
