#include "divw/optimizer.hpp"

#include <cmath>
#include <functional>

namespace divw {

void OptimizerConfig::validate() const {
    if (gamma < 0.0 || gamma > 1.0)
        throw ValidationError("gamma must lie in [0, 1], got " + std::to_string(gamma));
    if (iterations < 1) throw ValidationError("iterations must be positive");
    if (learning_rate <= 0.0) throw ValidationError("learning rate must be positive");
    if (adam_beta1 <= 0.0 || adam_beta1 >= 1.0 || adam_beta2 <= 0.0 || adam_beta2 >= 1.0)
        throw ValidationError("Adam betas must lie in (0, 1)");
    if (adam_epsilon <= 0.0) throw ValidationError("Adam epsilon must be positive");
    if (lr_decay_every < 1) throw ValidationError("lr_decay_every must be positive");
}

LogWeightState LogWeightState::zeros(Index n) {
    return LogWeightState{Vector::Zero(n), Vector::Zero(n), Vector::Zero(n), 0};
}

ProbabilityVector LogWeightState::probabilities() const {
    // Stable softmax; exp(u) > 0 keeps p strictly inside the simplex.
    const Vector w = (u.array() - u.maxCoeff()).exp();
    return ProbabilityVector{w / w.sum()};
}

LossValue loss(const SimilarityMatrix& K, const ProbabilityVector& p, double gamma) {
    if (gamma < 0.0 || gamma > 1.0)
        throw ValidationError("gamma must lie in [0, 1], got " + std::to_string(gamma));
    const VendiEvaluation ev = vendi_score(K, p);
    const double h = shannon_entropy(p);
    return LossValue{-gamma * ev.score - (1.0 - gamma) * h, ev.score, h};
}

LogWeightState adam_step(const LogWeightState& state, const Vector& gradient, double lr,
                         const OptimizerConfig& config) {
    if (gradient.size() != state.u.size())
        throw ValidationError("adam_step: gradient length " + std::to_string(gradient.size()) +
                              " does not match state length " + std::to_string(state.u.size()));
    LogWeightState next = state;
    next.step_count = state.step_count + 1;
    next.adam_m = config.adam_beta1 * state.adam_m + (1.0 - config.adam_beta1) * gradient;
    next.adam_v = config.adam_beta2 * state.adam_v +
                  (1.0 - config.adam_beta2) * gradient.array().square().matrix();
    const double t = static_cast<double>(next.step_count);
    const Vector m_hat = next.adam_m / (1.0 - std::pow(config.adam_beta1, t));
    const Vector v_hat = next.adam_v / (1.0 - std::pow(config.adam_beta2, t));
    next.u = state.u.array() - lr * m_hat.array() / (v_hat.array().sqrt() + config.adam_epsilon);
    return next;
}

namespace {

OptimizationTrace run_optimization(Index n,
                                   const std::function<VendiGradEval(const ProbabilityVector&)>& f,
                                   const OptimizerConfig& config) {
    config.validate();
    if (n < 2) throw ValidationError("optimization needs at least 2 items");

    LogWeightState state = LogWeightState::zeros(n);
    double lr = config.learning_rate;

    OptimizationTrace trace;
    trace.rows.reserve(static_cast<std::size_t>(config.iterations) + 1);

    ProbabilityVector p = state.probabilities();
    VendiGradEval ve = f(p);
    double h = shannon_entropy(p);
    auto loss_at = [&](double vs, double ent) {
        return -config.gamma * vs - (1.0 - config.gamma) * ent;
    };
    trace.rows.push_back({0, loss_at(ve.eval.score, h), ve.eval.score, h, lr});

    for (int iter = 1; iter <= config.iterations; ++iter) {
        if (iter % config.lr_decay_every == 0) lr *= config.lr_decay_factor;

        // dL/dp, then chained through p = exp(u) / sum(exp(u)).
        Vector dldp(n);
        for (Index i = 0; i < n; ++i)
            dldp(i) = -config.gamma * ve.eval.score * ve.entropy_gradient(i) +
                      (1.0 - config.gamma) * (std::log(p.v(i)) + 1.0);
        const double mean_pull = p.v.dot(dldp);
        const Vector dldu = p.v.array() * (dldp.array() - mean_pull);

        if (!dldu.allFinite())
            throw NumericalError("non-finite gradient at iteration " + std::to_string(iter));

        state = adam_step(state, dldu, lr, config);
        p = state.probabilities();
        ve = f(p);
        h = shannon_entropy(p);
        const double l = loss_at(ve.eval.score, h);
        if (!std::isfinite(l))
            throw NumericalError("non-finite loss at iteration " + std::to_string(iter));
        trace.rows.push_back({iter, l, ve.eval.score, h, lr});
    }

    trace.final_relative_weights = static_cast<double>(n) * p.v;
    trace.final_probabilities = std::move(p);
    return trace;
}

}  // namespace

OptimizationTrace optimize_weights(const SimilarityMatrix& K, const OptimizerConfig& config) {
    return run_optimization(K.size(),
                            [&](const ProbabilityVector& p) { return vendi_with_gradient(K, p); },
                            config);
}

OptimizationTrace optimize_weights_features(const Matrix& X, const OptimizerConfig& config) {
    return run_optimization(
        X.rows(),
        [&](const ProbabilityVector& p) { return vendi_with_gradient_features(X, p); }, config);
}

}  // namespace divw
