#pragma once

#include "divw/types.hpp"
#include "divw/vendi.hpp"

#include <cstdint>
#include <vector>

namespace divw {

struct OptimizerConfig {
    double gamma = 0.8;          // loss balance: 1 = pure diversity, 0 = pure entropy
    int iterations = 100;
    double learning_rate = 0.1;  // initial Adam step size
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    double lr_decay_factor = 0.99;
    int lr_decay_every = 5;
    std::uint64_t seed = 0;      // reserved for stochastic variants; unused today

    void validate() const;
};

/// Log-space weights u with Adam moment accumulators. Effective weights
/// w = exp(u) are strictly positive, so p = w / sum(w) always lies on the simplex.
struct LogWeightState {
    Vector u;
    Vector adam_m;
    Vector adam_v;
    long step_count = 0;

    static LogWeightState zeros(Index n);
    ProbabilityVector probabilities() const;
};

struct LossValue {
    double loss;     // -gamma * VS - (1 - gamma) * H
    double vendi;
    double entropy;
};

LossValue loss(const SimilarityMatrix& K, const ProbabilityVector& p, double gamma);

/// One bias-corrected Adam update on the log-weights, minimizing the loss.
LogWeightState adam_step(const LogWeightState& state, const Vector& gradient, double lr,
                         const OptimizerConfig& config);

struct TraceRow {
    int iteration;
    double loss;
    double vendi_score;
    double entropy;
    double learning_rate;
};

struct OptimizationTrace {
    std::vector<TraceRow> rows;  // iterations + 1 entries; row 0 is the initial state
    ProbabilityVector final_probabilities;
    Vector final_relative_weights;  // n * p_i, 1 at uniform
};

/// Diversity-weight optimization: maximize gamma * VS(K, p) + (1 - gamma) * H(p)
/// over the simplex via Adam on log-weights, with the learning rate multiplied
/// by lr_decay_factor every lr_decay_every iterations. Deterministic.
OptimizationTrace optimize_weights(const SimilarityMatrix& K, const OptimizerConfig& config);

/// Same optimization for the implicit Gram similarity of row-normalized
/// features; O(n d^2) per iteration instead of O(n^3).
OptimizationTrace optimize_weights_features(const Matrix& X_normalized,
                                            const OptimizerConfig& config);

}  // namespace divw
