#include "ens/stump.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ens {

namespace {

struct StumpCandidate {
    bool found = false;
    double error = 0.0;
    double threshold = 0.0;
    int left_class = 0;
    int right_class = 0;
};

int weighted_majority(const std::vector<double>& class_weights) {
    int best = 0;
    for (int k = 1; k < static_cast<int>(class_weights.size()); ++k)
        if (class_weights[static_cast<std::size_t>(k)] > class_weights[static_cast<std::size_t>(best)])
            best = k;
    return best;  // ties resolve to the lowest class
}

// Best threshold for a single feature. Sweeps midpoints of sorted distinct
// values; errors come from running per-class weight tallies.
StumpCandidate scan_feature(const FeatureMatrix& fm, const std::vector<int>& labels,
                            const std::vector<double>& weights, int num_classes, int f) {
    const std::size_t n = fm.n;
    std::vector<std::pair<double, int>> vals(n);
    for (std::size_t i = 0; i < n; ++i)
        vals[i] = {fm.columns[i][static_cast<std::size_t>(f)], static_cast<int>(i)};
    std::sort(vals.begin(), vals.end());

    std::vector<double> left_w(static_cast<std::size_t>(num_classes), 0.0);
    std::vector<double> right_w(static_cast<std::size_t>(num_classes), 0.0);
    double total_right = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        right_w[static_cast<std::size_t>(labels[static_cast<std::size_t>(vals[i].second)])] +=
            weights[static_cast<std::size_t>(vals[i].second)];
        total_right += weights[static_cast<std::size_t>(vals[i].second)];
    }

    StumpCandidate best;
    double total_left = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
        const int i = vals[p].second;
        const double w = weights[static_cast<std::size_t>(i)];
        const int y = labels[static_cast<std::size_t>(i)];
        left_w[static_cast<std::size_t>(y)] += w;
        right_w[static_cast<std::size_t>(y)] -= w;
        total_left += w;
        if (vals[p].first == vals[p + 1].first) continue;
        const int lc = weighted_majority(left_w);
        const int rc = weighted_majority(right_w);
        const double err = (total_left - left_w[static_cast<std::size_t>(lc)]) +
                           ((total_right - total_left) - right_w[static_cast<std::size_t>(rc)]);
        const double thr = (vals[p].first + vals[p + 1].first) / 2.0;
        if (!best.found || err < best.error) {
            best = {true, err, thr, lc, rc};
        }
    }
    return best;
}

}  // namespace

int StumpModel::predict(const Instance& x) const {
    return x.features[static_cast<std::size_t>(feature)] < threshold ? left_class : right_class;
}

double StumpModel::score(const Instance& x) const {
    const int p = predict(x);
    if (num_classes == 2) return p == 1 ? 1.0 : -1.0;
    return static_cast<double>(p);
}

std::vector<double> StumpModel::class_scores(const Instance& x) const {
    std::vector<double> s(static_cast<std::size_t>(num_classes), 0.0);
    s[static_cast<std::size_t>(predict(x))] = 1.0;
    return s;
}

std::shared_ptr<const StumpModel> train_stump(const FeatureMatrix& fm,
                                              const std::vector<int>& labels,
                                              int num_classes,
                                              const std::vector<double>& weights,
                                              Exec exec) {
    if (labels.size() != fm.n || weights.size() != fm.n)
        throw std::invalid_argument("train_stump: labels/weights length mismatch");
    if (num_classes < 2) throw std::invalid_argument("train_stump: need K >= 2");
    double wsum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("train_stump: negative weight");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-9)
        throw std::invalid_argument("train_stump: weights must sum to 1");

    // Constant stump: the fallback when every feature column is constant.
    std::vector<double> class_w(static_cast<std::size_t>(num_classes), 0.0);
    for (std::size_t i = 0; i < fm.n; ++i)
        class_w[static_cast<std::size_t>(labels[i])] += weights[i];
    const int const_class = weighted_majority(class_w);
    const double const_error = wsum - class_w[static_cast<std::size_t>(const_class)];

    // Per-feature candidates computed independently, winner picked in
    // feature order afterwards (lowest feature, then lowest threshold).
    std::vector<StumpCandidate> per_feature(fm.m);
    parallel_for(exec, fm.m, [&](std::size_t f) {
        per_feature[f] = scan_feature(fm, labels, weights, num_classes, static_cast<int>(f));
    });

    auto model = std::make_shared<StumpModel>();
    model->num_classes = num_classes;
    model->feature = 0;
    model->threshold = std::numeric_limits<double>::lowest();
    model->left_class = const_class;
    model->right_class = const_class;
    model->weighted_error = const_error;
    for (std::size_t f = 0; f < fm.m; ++f) {
        const StumpCandidate& c = per_feature[f];
        if (c.found && c.error < model->weighted_error) {
            model->feature = static_cast<int>(f);
            model->threshold = c.threshold;
            model->left_class = c.left_class;
            model->right_class = c.right_class;
            model->weighted_error = c.error;
        }
    }
    model->polarity = model->left_class <= model->right_class ? 1 : -1;
    model->meta().objective = model->weighted_error;
    return model;
}

nlohmann::json StumpModel::to_json() const {
    return nlohmann::json{{"format", "ens-model"},
                          {"version", 1},
                          {"family", "stump"},
                          {"classes", num_classes},
                          {"feature", feature},
                          {"threshold", threshold},
                          {"left_class", left_class},
                          {"right_class", right_class},
                          {"polarity", polarity},
                          {"weighted_error", weighted_error}};
}

std::shared_ptr<StumpModel> StumpModel::from_json(const nlohmann::json& j) {
    auto m = std::make_shared<StumpModel>();
    m->num_classes = j.at("classes").get<int>();
    m->feature = j.at("feature").get<int>();
    m->threshold = j.at("threshold").get<double>();
    m->left_class = j.at("left_class").get<int>();
    m->right_class = j.at("right_class").get<int>();
    m->polarity = j.at("polarity").get<int>();
    m->weighted_error = j.at("weighted_error").get<double>();
    return m;
}

}  // namespace ens
