#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ens/parallel.hpp"
#include "ens/scorer.hpp"
#include "ens/types.hpp"

namespace ens {

// Table-4-shaped knobs plus the numerical floor. The floor keeps every
// row entry strictly positive so 1000-token sequences with unseen symbols
// still score finite; rows are renormalized whenever flooring fires.
struct HmmParams {
    int n_components = 2;
    int n_iter = 100;
    double tol = 0.01;
    std::uint64_t seed = 0;
    double emission_floor = 1e-10;
};

// Discrete-observation HMM. Matrices are row-major and row-stochastic;
// score(x) is the scaled-forward log-likelihood of x's token sequence.
class HmmModel final : public Scorer {
public:
    HmmModel(int states, int vocab)
        : states_(states),
          vocab_(vocab),
          transition(static_cast<std::size_t>(states) * static_cast<std::size_t>(states), 0.0),
          emission(static_cast<std::size_t>(states) * static_cast<std::size_t>(vocab), 0.0),
          initial(static_cast<std::size_t>(states), 0.0) {}

    int states() const { return states_; }
    int vocab() const { return vocab_; }

    std::vector<double> transition;  // N x N
    std::vector<double> emission;    // N x V
    std::vector<double> initial;     // N

    double train_loglik = 0.0;
    int iters_run = 0;

    std::string family() const override { return "hmm"; }
    double score(const Instance& x) const override;
    nlohmann::json to_json() const override;
    static std::shared_ptr<HmmModel> from_json(const nlohmann::json& j);

    friend std::shared_ptr<const HmmModel> train_hmm(const FeatureMatrix&, const HmmParams&, Exec);

private:
    int states_;
    int vocab_;
};

// Scaled forward pass; log P(tokens | model). Never underflows for valid
// tokens because every model row is floored strictly above zero.
double hmm_forward_loglik(const HmmModel& model, std::span<const int> tokens);

// One E-step over a sequence set: expected-count accumulators plus the
// dataset log-likelihood under the current parameters. Exposed so tests
// can pin the parallel path to the serial reference and the bench target
// can time both. Accumulation order is sequence order under either policy.
struct HmmEstepStats {
    std::vector<double> trans_num;  // N x N
    std::vector<double> trans_den;  // N
    std::vector<double> emis_num;   // N x V
    std::vector<double> emis_den;   // N
    std::vector<double> pi_acc;     // N
    double loglik = 0.0;
};

HmmEstepStats hmm_estep(const HmmModel& model, std::span<const TokenSeq> seqs, Exec exec);

// Dataset log-likelihood under fixed parameters (sum over sequences).
double hmm_dataset_loglik(const HmmModel& model, std::span<const TokenSeq> seqs, Exec exec);

// Baum-Welch from a seeded random row-stochastic initialization, run until
// |delta log-likelihood| < tol or n_iter iterations. The per-iteration
// log-likelihood curve lands in meta().curve.
std::shared_ptr<const HmmModel> train_hmm(const FeatureMatrix& fm,
                                          const HmmParams& params,
                                          Exec exec = Exec::parallel);

}  // namespace ens
