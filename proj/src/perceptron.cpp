#include "ens/perceptron.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ens/rng.hpp"

namespace ens {

double PerceptronModel::score(const Instance& x) const {
    if (x.features.size() != weights.size())
        throw std::invalid_argument("perceptron: feature length mismatch");
    double s = bias;
    for (std::size_t j = 0; j < weights.size(); ++j) s += weights[j] * x.features[j];
    return s;
}

std::shared_ptr<const PerceptronModel> train_perceptron(const FeatureMatrix& fm,
                                                        const std::vector<int>& labels,
                                                        const PerceptronParams& params) {
    if (fm.m < 1) throw std::invalid_argument("train_perceptron: m < 1");
    if (labels.size() != fm.n) throw std::invalid_argument("train_perceptron: labels length mismatch");
    if (params.epochs < 1) throw std::invalid_argument("train_perceptron: epochs < 1");
    for (int y : labels)
        if (y != 0 && y != 1) throw std::invalid_argument("train_perceptron: labels must be 0/1");

    auto model = std::make_shared<PerceptronModel>();
    SplitMix64 rng(derive_seed(params.init_seed, 0x70637074ULL));
    model->weights.resize(fm.m);
    for (double& w : model->weights) w = rng.next_double(-0.5, 0.5);
    model->bias = 0.0;

    bool single_class = true;
    for (std::size_t i = 1; i < labels.size(); ++i)
        if (labels[i] != labels[0]) { single_class = false; break; }
    if (single_class) {
        model->meta().degenerate = true;
        model->meta().note = "all training labels identical";
    }

    std::vector<std::size_t> order(fm.n);
    for (std::size_t i = 0; i < fm.n; ++i) order[i] = i;

    int epochs_run = 0;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        for (std::size_t i = fm.n; i > 1; --i) {
            std::size_t j = rng.index(i);
            std::swap(order[i - 1], order[j]);
        }
        int mistakes = 0;
        for (std::size_t pos = 0; pos < fm.n; ++pos) {
            const std::size_t i = order[pos];
            const std::vector<double>& x = fm.columns[i];
            const double y = labels[i] == 1 ? 1.0 : -1.0;
            double s = model->bias;
            for (std::size_t j = 0; j < fm.m; ++j) s += model->weights[j] * x[j];
            if (y * s <= 0.0) {
                ++mistakes;
                for (std::size_t j = 0; j < fm.m; ++j)
                    model->weights[j] += params.learning_rate * y * x[j];
                model->bias += params.learning_rate * y;
            }
        }
        ++epochs_run;
        if (mistakes == 0) break;
    }

    model->epochs_run = epochs_run;
    model->meta().iterations = epochs_run;

    // final training error, for the record
    int errors = 0;
    for (std::size_t i = 0; i < fm.n; ++i) {
        const int pred = model->score(instance_at(fm, i)) >= 0.0 ? 1 : 0;
        if (pred != labels[i]) ++errors;
    }
    model->meta().objective = static_cast<double>(errors) / static_cast<double>(fm.n);
    return model;
}

double perceptron_min_margin(const PerceptronModel& model,
                             const FeatureMatrix& fm,
                             const std::vector<int>& labels) {
    double norm = 0.0;
    for (double w : model.weights) norm += w * w;
    norm = std::sqrt(norm);
    if (norm < 1e-300) return -std::numeric_limits<double>::infinity();
    double min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fm.n; ++i) {
        const double y = labels[i] == 1 ? 1.0 : -1.0;
        const double m = y * model.score(instance_at(fm, i)) / norm;
        if (m < min_margin) min_margin = m;
    }
    return min_margin;
}

nlohmann::json PerceptronModel::to_json() const {
    return nlohmann::json{{"format", "ens-model"},
                          {"version", 1},
                          {"family", "perceptron"},
                          {"weights", weights},
                          {"bias", bias},
                          {"epochs_run", epochs_run}};
}

std::shared_ptr<PerceptronModel> PerceptronModel::from_json(const nlohmann::json& j) {
    auto m = std::make_shared<PerceptronModel>();
    m->weights = j.at("weights").get<std::vector<double>>();
    m->bias = j.at("bias").get<double>();
    m->epochs_run = j.at("epochs_run").get<int>();
    return m;
}

}  // namespace ens
