#pragma once

#include "divw/types.hpp"

namespace divw {

struct VendiEvaluation {
    double score;          // exp(eigen_entropy), in [1, n]
    double eigen_entropy;  // -sum lambda ln lambda over eigenvalues of K^p
    Vector eigenvalues;    // descending; sums to 1 for a valid K, p
};

/// (K^p)_ij = sqrt(p_i p_j) K_ij. Trace equals 1 for unit-diagonal K.
Matrix weighted_similarity(const SimilarityMatrix& K, const ProbabilityVector& p);

/// Probability-weighted Vendi Score: exponential of the Shannon entropy of the
/// eigenvalues of K^p. Eigenvalues below 1e-12 contribute nothing (0 ln 0 = 0);
/// an eigenvalue below -1e-6 means K was badly non-PSD and raises NumericalError.
VendiEvaluation vendi_score(const SimilarityMatrix& K, const ProbabilityVector& p);

/// Same score for the implicit Gram similarity K = X X^T of row-normalized X,
/// computed through the d x d matrix Y^T Y with Y = diag(sqrt(p)) X. Only the
/// (at most d) nonzero eigenvalues are materialized, so this is O(n d^2)
/// instead of O(n^3).
VendiEvaluation vendi_score_features(const Matrix& X_normalized, const ProbabilityVector& p);

/// -sum p_i ln p_i, with 0 ln 0 = 0. In [0, ln n].
double shannon_entropy(const ProbabilityVector& p);

/// Gradient of the eigenvalue entropy H_lambda = -sum lambda ln lambda with
/// respect to p. Requires all p_i > 0. The gradient of the score itself is
/// score * g by the chain rule.
Vector vendi_entropy_gradient(const SimilarityMatrix& K, const ProbabilityVector& p);
Vector vendi_entropy_gradient_features(const Matrix& X_normalized, const ProbabilityVector& p);

// Score and gradient from one eigendecomposition; the optimizer's inner loop.
struct VendiGradEval {
    VendiEvaluation eval;
    Vector entropy_gradient;
};
VendiGradEval vendi_with_gradient(const SimilarityMatrix& K, const ProbabilityVector& p);
VendiGradEval vendi_with_gradient_features(const Matrix& X_normalized, const ProbabilityVector& p);

}  // namespace divw
