#include "divw/vendi.hpp"

#include "divw/linalg.hpp"

#include <cmath>

namespace divw {

namespace {

constexpr double kEigClamp = 1e-12;

void check_dims(Index k, Index n) {
    if (k != n)
        throw ValidationError("dimension mismatch: similarity is " + std::to_string(k) +
                              ", probability vector is " + std::to_string(n));
}

double entropy_of_eigenvalues(const Vector& lambda) {
    double h = 0.0;
    for (Index i = 0; i < lambda.size(); ++i) {
        const double l = lambda(i);
        if (l < -1e-6)
            throw NumericalError("similarity matrix is not PSD: eigenvalue " +
                                 std::to_string(l));
        if (l > kEigClamp) h -= l * std::log(l);
    }
    return h;
}

VendiEvaluation make_eval(Vector lambda) {
    VendiEvaluation ev;
    ev.eigen_entropy = entropy_of_eigenvalues(lambda);
    ev.score = std::exp(ev.eigen_entropy);
    ev.eigenvalues = std::move(lambda);
    return ev;
}

void require_positive(const ProbabilityVector& p) {
    for (Index i = 0; i < p.size(); ++i)
        if (p.v(i) <= 0.0)
            throw ValidationError("gradient requires strictly positive probabilities; p[" +
                                  std::to_string(i) + "] = " + std::to_string(p.v(i)));
}

// d/dlambda of -lambda ln lambda; eigenvalues at or below the clamp are
// treated as exact zeros and contribute nothing.
inline double entropy_deriv(double l) { return -(std::log(l) + 1.0); }

}  // namespace

Matrix weighted_similarity(const SimilarityMatrix& K, const ProbabilityVector& p) {
    check_dims(K.size(), p.size());
    const Vector s = p.v.array().sqrt();
    return s.asDiagonal() * K.entries * s.asDiagonal();
}

VendiEvaluation vendi_score(const SimilarityMatrix& K, const ProbabilityVector& p) {
    EigenResult er = eigh(weighted_similarity(K, p));
    return make_eval(std::move(er.eigenvalues));
}

VendiEvaluation vendi_score_features(const Matrix& X, const ProbabilityVector& p) {
    check_dims(X.rows(), p.size());
    const Vector s = p.v.array().sqrt();
    const Matrix Y = s.asDiagonal() * X;
    const Matrix M = Y.transpose() * Y;  // shares the nonzero spectrum of K^p
    const double trace_err = std::abs(M.trace() - 1.0);
    if (trace_err > 1e-6)
        throw ValidationError("features are not row-normalized (weighted trace off by " +
                              std::to_string(trace_err) + ")");
    EigenResult er = eigh(M);
    return make_eval(std::move(er.eigenvalues));
}

double shannon_entropy(const ProbabilityVector& p) {
    double h = 0.0;
    for (Index i = 0; i < p.size(); ++i)
        if (p.v(i) > 0.0) h -= p.v(i) * std::log(p.v(i));
    return h;
}

VendiGradEval vendi_with_gradient(const SimilarityMatrix& K, const ProbabilityVector& p) {
    check_dims(K.size(), p.size());
    require_positive(p);
    const Index n = p.size();
    EigenResult er = eigh(weighted_similarity(K, p));

    // g_i = (1/p_i) sum_k Q_ik^2 lambda_k h'(lambda_k), which is the
    // matrix-function derivative dH/dK^p = Q diag(h'(lambda)) Q^T chained
    // through (K^p)_ij = sqrt(p_i p_j) K_ij and contracted in O(n^2).
    Vector g = Vector::Zero(n);
    for (Index k = 0; k < n; ++k) {
        const double l = er.eigenvalues(k);
        if (l <= kEigClamp) continue;
        const double c = l * entropy_deriv(l);
        g += c * er.eigenvectors.col(k).array().square().matrix();
    }
    g.array() /= p.v.array();

    return VendiGradEval{make_eval(std::move(er.eigenvalues)), std::move(g)};
}

VendiGradEval vendi_with_gradient_features(const Matrix& X, const ProbabilityVector& p) {
    check_dims(X.rows(), p.size());
    require_positive(p);
    const Vector s = p.v.array().sqrt();
    const Matrix Y = s.asDiagonal() * X;
    const Matrix M = Y.transpose() * Y;
    const double trace_err = std::abs(M.trace() - 1.0);
    if (trace_err > 1e-6)
        throw ValidationError("features are not row-normalized (weighted trace off by " +
                              std::to_string(trace_err) + ")");
    EigenResult er = eigh(M);

    // Nonzero eigenvectors of K^p are Y v_k / sqrt(lambda_k), so
    // Q_ik^2 lambda_k = (Y v_k)_i^2 and the contraction is O(n d).
    const Matrix Z = Y * er.eigenvectors;
    Vector g = Vector::Zero(X.rows());
    for (Index k = 0; k < er.eigenvalues.size(); ++k) {
        const double l = er.eigenvalues(k);
        if (l <= kEigClamp) continue;
        g += entropy_deriv(l) * Z.col(k).array().square().matrix();
    }
    g.array() /= p.v.array();

    return VendiGradEval{make_eval(std::move(er.eigenvalues)), std::move(g)};
}

Vector vendi_entropy_gradient(const SimilarityMatrix& K, const ProbabilityVector& p) {
    return vendi_with_gradient(K, p).entropy_gradient;
}

Vector vendi_entropy_gradient_features(const Matrix& X, const ProbabilityVector& p) {
    return vendi_with_gradient_features(X, p).entropy_gradient;
}

}  // namespace divw
