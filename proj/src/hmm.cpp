#include "ens/hmm.hpp"

#include <cmath>
#include <stdexcept>

#include "ens/rng.hpp"

namespace ens {

namespace {

// Scaling follows the classic tutorial treatment: alpha rows are
// normalized to sum 1 at every position, beta rows reuse the same scale
// factors, and with that pairing
//   digamma_t(i,j) = alphahat_t(i) * A(i,j) * B(j, o_{t+1}) * betahat_{t+1}(j)
// needs no further normalization. log P(O) falls out as the sum of the
// log scale factors.

struct SequenceScratch {
    std::vector<double> alpha;  // T x N, scaled
    std::vector<double> beta;   // T x N, scaled
    std::vector<double> scale;  // T
};

// Forward pass. Returns log P(seq | model); fills scratch when given.
double scaled_forward(const HmmModel& hm, std::span<const int> obs, SequenceScratch* scratch) {
    const int N = hm.states();
    const std::size_t T = obs.size();
    const double* A = hm.transition.data();
    const double* B = hm.emission.data();
    const int V = hm.vocab();

    std::vector<double> prev(static_cast<std::size_t>(N));
    std::vector<double> cur(static_cast<std::size_t>(N));
    if (scratch) {
        scratch->alpha.resize(T * static_cast<std::size_t>(N));
        scratch->scale.resize(T);
    }

    double loglik = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        const int o = obs[t];
        if (o < 0 || o >= V) throw std::invalid_argument("hmm: token outside model vocabulary");
        double s = 0.0;
        if (t == 0) {
            for (int i = 0; i < N; ++i) {
                cur[static_cast<std::size_t>(i)] =
                    hm.initial[static_cast<std::size_t>(i)] * B[static_cast<std::size_t>(i) * V + o];
                s += cur[static_cast<std::size_t>(i)];
            }
        } else {
            for (int i = 0; i < N; ++i) {
                double acc = 0.0;
                for (int j = 0; j < N; ++j)
                    acc += prev[static_cast<std::size_t>(j)] * A[static_cast<std::size_t>(j) * N + i];
                cur[static_cast<std::size_t>(i)] = acc * B[static_cast<std::size_t>(i) * V + o];
                s += cur[static_cast<std::size_t>(i)];
            }
        }
        if (!(s > 0.0)) throw std::runtime_error("hmm: forward scale collapsed to zero");
        for (int i = 0; i < N; ++i) cur[static_cast<std::size_t>(i)] /= s;
        loglik += std::log(s);
        if (scratch) {
            scratch->scale[t] = s;
            for (int i = 0; i < N; ++i)
                scratch->alpha[t * static_cast<std::size_t>(N) + static_cast<std::size_t>(i)] =
                    cur[static_cast<std::size_t>(i)];
        }
        std::swap(prev, cur);
    }
    return loglik;
}

void scaled_backward(const HmmModel& hm, std::span<const int> obs, SequenceScratch& scratch) {
    const int N = hm.states();
    const std::size_t T = obs.size();
    const double* A = hm.transition.data();
    const double* B = hm.emission.data();
    const int V = hm.vocab();

    scratch.beta.resize(T * static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i)
        scratch.beta[(T - 1) * static_cast<std::size_t>(N) + static_cast<std::size_t>(i)] =
            1.0 / scratch.scale[T - 1];
    for (std::size_t t = T - 1; t-- > 0;) {
        const int onext = obs[t + 1];
        for (int i = 0; i < N; ++i) {
            double acc = 0.0;
            for (int j = 0; j < N; ++j)
                acc += A[static_cast<std::size_t>(i) * N + j] * B[static_cast<std::size_t>(j) * V + onext] *
                       scratch.beta[(t + 1) * static_cast<std::size_t>(N) + static_cast<std::size_t>(j)];
            scratch.beta[t * static_cast<std::size_t>(N) + static_cast<std::size_t>(i)] =
                acc / scratch.scale[t];
        }
    }
}

struct BlockLayout {
    int N, V;
    std::size_t trans_num, trans_den, emis_num, emis_den, pi_acc, loglik, total;
    BlockLayout(int n, int v) : N(n), V(v) {
        trans_num = 0;
        trans_den = trans_num + static_cast<std::size_t>(N) * static_cast<std::size_t>(N);
        emis_num = trans_den + static_cast<std::size_t>(N);
        emis_den = emis_num + static_cast<std::size_t>(N) * static_cast<std::size_t>(V);
        pi_acc = emis_den + static_cast<std::size_t>(N);
        loglik = pi_acc + static_cast<std::size_t>(N);
        total = loglik + 1;
    }
};

// Expected counts for one sequence, written into `block` (layout above).
void sequence_estep(const HmmModel& hm, std::span<const int> obs, const BlockLayout& L,
                    double* block, SequenceScratch& scratch) {
    const int N = hm.states();
    const int V = hm.vocab();
    const double* A = hm.transition.data();
    const double* B = hm.emission.data();
    const std::size_t T = obs.size();

    for (std::size_t k = 0; k < L.total; ++k) block[k] = 0.0;
    block[L.loglik] = scaled_forward(hm, obs, &scratch);
    scaled_backward(hm, obs, scratch);

    double* tn = block + L.trans_num;
    double* td = block + L.trans_den;
    double* en = block + L.emis_num;
    double* ed = block + L.emis_den;
    double* pa = block + L.pi_acc;

    for (std::size_t t = 0; t + 1 < T; ++t) {
        const int onext = obs[t + 1];
        const double* a_row = &scratch.alpha[t * static_cast<std::size_t>(N)];
        const double* b_row = &scratch.beta[(t + 1) * static_cast<std::size_t>(N)];
        for (int i = 0; i < N; ++i) {
            double gamma_i = 0.0;
            for (int j = 0; j < N; ++j) {
                const double dg = a_row[i] * A[static_cast<std::size_t>(i) * N + j] *
                                  B[static_cast<std::size_t>(j) * V + onext] * b_row[j];
                tn[static_cast<std::size_t>(i) * N + j] += dg;
                gamma_i += dg;
            }
            td[i] += gamma_i;
            en[static_cast<std::size_t>(i) * V + obs[t]] += gamma_i;
            ed[i] += gamma_i;
            if (t == 0) pa[i] = gamma_i;
        }
    }
    // last position: gamma equals the normalized alpha row
    const double* a_last = &scratch.alpha[(T - 1) * static_cast<std::size_t>(N)];
    for (int i = 0; i < N; ++i) {
        en[static_cast<std::size_t>(i) * V + obs[T - 1]] += a_last[i];
        ed[i] += a_last[i];
        if (T == 1) pa[i] = a_last[i];
    }
}

// Lift entries below `floor` and renormalize the row; rows already above
// the floor are left bit-for-bit untouched.
void floor_row(double* row, std::size_t len, double floor) {
    bool touched = false;
    for (std::size_t k = 0; k < len; ++k)
        if (row[k] < floor) { row[k] = floor; touched = true; }
    if (!touched) return;
    double sum = 0.0;
    for (std::size_t k = 0; k < len; ++k) sum += row[k];
    for (std::size_t k = 0; k < len; ++k) row[k] /= sum;
}

void random_stochastic_row(SplitMix64& rng, double* row, std::size_t len) {
    double sum = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
        row[k] = rng.next_double();
        sum += row[k];
    }
    for (std::size_t k = 0; k < len; ++k) row[k] /= sum;
}

}  // namespace

double hmm_forward_loglik(const HmmModel& model, std::span<const int> tokens) {
    if (tokens.empty()) throw std::invalid_argument("hmm_forward_loglik: empty sequence");
    return scaled_forward(model, tokens, nullptr);
}

double HmmModel::score(const Instance& x) const {
    return hmm_forward_loglik(*this, x.tokens);
}

HmmEstepStats hmm_estep(const HmmModel& model, std::span<const TokenSeq> seqs, Exec exec) {
    const int N = model.states();
    const int V = model.vocab();
    const BlockLayout L(N, V);

    HmmEstepStats stats;
    stats.trans_num.assign(static_cast<std::size_t>(N) * static_cast<std::size_t>(N), 0.0);
    stats.trans_den.assign(static_cast<std::size_t>(N), 0.0);
    stats.emis_num.assign(static_cast<std::size_t>(N) * static_cast<std::size_t>(V), 0.0);
    stats.emis_den.assign(static_cast<std::size_t>(N), 0.0);
    stats.pi_acc.assign(static_cast<std::size_t>(N), 0.0);

    // Bounded batches: every sequence gets its own accumulator block, the
    // blocks are reduced serially in sequence order, so the result is
    // identical under any policy and thread count.
    const std::size_t batch = 256;
    std::vector<double> blocks(batch * L.total);
    std::vector<SequenceScratch> scratch;

    for (std::size_t base = 0; base < seqs.size(); base += batch) {
        const std::size_t count = std::min(batch, seqs.size() - base);
        parallel_for(exec, count, [&](std::size_t k) {
            thread_local SequenceScratch ts;
            sequence_estep(model, seqs[base + k], L, &blocks[k * L.total], ts);
        });
        for (std::size_t k = 0; k < count; ++k) {
            const double* b = &blocks[k * L.total];
            for (std::size_t q = 0; q < L.trans_den - L.trans_num; ++q) stats.trans_num[q] += b[L.trans_num + q];
            for (int i = 0; i < N; ++i) stats.trans_den[static_cast<std::size_t>(i)] += b[L.trans_den + static_cast<std::size_t>(i)];
            for (std::size_t q = 0; q < static_cast<std::size_t>(N) * static_cast<std::size_t>(V); ++q) stats.emis_num[q] += b[L.emis_num + q];
            for (int i = 0; i < N; ++i) stats.emis_den[static_cast<std::size_t>(i)] += b[L.emis_den + static_cast<std::size_t>(i)];
            for (int i = 0; i < N; ++i) stats.pi_acc[static_cast<std::size_t>(i)] += b[L.pi_acc + static_cast<std::size_t>(i)];
            stats.loglik += b[L.loglik];
        }
    }
    return stats;
}

double hmm_dataset_loglik(const HmmModel& model, std::span<const TokenSeq> seqs, Exec exec) {
    std::vector<double> lls(seqs.size());
    parallel_for(exec, seqs.size(), [&](std::size_t s) {
        lls[s] = scaled_forward(model, seqs[s], nullptr);
    });
    double total = 0.0;
    for (double ll : lls) total += ll;
    return total;
}

std::shared_ptr<const HmmModel> train_hmm(const FeatureMatrix& fm,
                                          const HmmParams& params,
                                          Exec exec) {
    if (!fm.has_sequences()) throw std::invalid_argument("train_hmm: feature matrix has no sequence view");
    if (fm.vocab_size == 0) throw std::invalid_argument("train_hmm: vocabulary size 0");
    if (params.n_components < 1) throw std::invalid_argument("train_hmm: n_components < 1");
    if (params.n_iter < 1) throw std::invalid_argument("train_hmm: n_iter < 1");
    if (!(params.tol > 0.0)) throw std::invalid_argument("train_hmm: tol must be > 0");
    for (const TokenSeq& s : fm.sequence_view)
        if (s.empty()) throw std::invalid_argument("train_hmm: empty sequence in training data");

    const int N = params.n_components;
    const int V = static_cast<int>(fm.vocab_size);
    auto model = std::make_shared<HmmModel>(N, V);

    // Random row-stochastic init; restart diversity comes entirely from the seed.
    SplitMix64 rng(derive_seed(params.seed, 0x686d6dULL));
    for (int i = 0; i < N; ++i)
        random_stochastic_row(rng, &model->transition[static_cast<std::size_t>(i) * N], static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i)
        random_stochastic_row(rng, &model->emission[static_cast<std::size_t>(i) * V], static_cast<std::size_t>(V));
    random_stochastic_row(rng, model->initial.data(), static_cast<std::size_t>(N));

    std::span<const TokenSeq> seqs(fm.sequence_view);
    const double n_seqs = static_cast<double>(seqs.size());

    double prev_ll = 0.0;
    int updates = 0;
    for (int iter = 0; iter < params.n_iter; ++iter) {
        HmmEstepStats st = hmm_estep(*model, seqs, exec);
        model->meta().curve.push_back(st.loglik);
        if (iter > 0 && std::abs(st.loglik - prev_ll) < params.tol) {
            prev_ll = st.loglik;
            break;
        }
        prev_ll = st.loglik;

        for (int i = 0; i < N; ++i) {
            if (st.trans_den[static_cast<std::size_t>(i)] > 0.0) {
                for (int j = 0; j < N; ++j)
                    model->transition[static_cast<std::size_t>(i) * N + j] =
                        st.trans_num[static_cast<std::size_t>(i) * N + j] / st.trans_den[static_cast<std::size_t>(i)];
            }
            if (st.emis_den[static_cast<std::size_t>(i)] > 0.0) {
                for (int k = 0; k < V; ++k)
                    model->emission[static_cast<std::size_t>(i) * V + k] =
                        st.emis_num[static_cast<std::size_t>(i) * V + k] / st.emis_den[static_cast<std::size_t>(i)];
            }
            model->initial[static_cast<std::size_t>(i)] = st.pi_acc[static_cast<std::size_t>(i)] / n_seqs;
        }
        for (int i = 0; i < N; ++i)
            floor_row(&model->transition[static_cast<std::size_t>(i) * N], static_cast<std::size_t>(N), params.emission_floor);
        for (int i = 0; i < N; ++i)
            floor_row(&model->emission[static_cast<std::size_t>(i) * V], static_cast<std::size_t>(V), params.emission_floor);
        floor_row(model->initial.data(), static_cast<std::size_t>(N), params.emission_floor);
        ++updates;
    }

    model->iters_run = updates;
    model->train_loglik = hmm_dataset_loglik(*model, seqs, exec);
    model->meta().iterations = updates;
    model->meta().objective = model->train_loglik;
    return model;
}

nlohmann::json HmmModel::to_json() const {
    return nlohmann::json{{"format", "ens-model"},
                          {"version", 1},
                          {"family", "hmm"},
                          {"states", states_},
                          {"vocab", vocab_},
                          {"transition", transition},
                          {"emission", emission},
                          {"initial", initial},
                          {"train_loglik", train_loglik},
                          {"iters_run", iters_run}};
}

std::shared_ptr<HmmModel> HmmModel::from_json(const nlohmann::json& j) {
    auto m = std::make_shared<HmmModel>(j.at("states").get<int>(), j.at("vocab").get<int>());
    m->transition = j.at("transition").get<std::vector<double>>();
    m->emission = j.at("emission").get<std::vector<double>>();
    m->initial = j.at("initial").get<std::vector<double>>();
    m->train_loglik = j.at("train_loglik").get<double>();
    m->iters_run = j.at("iters_run").get<int>();
    return m;
}

}  // namespace ens
