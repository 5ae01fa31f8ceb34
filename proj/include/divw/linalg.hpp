#pragma once

#include "divw/types.hpp"

namespace divw {

// Hard cap on dense eigendecomposition size; the optimizer calls eigh every
// iteration, so O(n^3) work beyond this is almost certainly a mistake.
inline constexpr Index kDefaultMaxEighSize = 8192;

/// Divides every row by its Euclidean norm. Rows with norm below 1e-12 are rejected.
FeatureMatrix normalize_rows(const FeatureMatrix& X);

/// K = X * X^T for row-normalized X. Rejects input whose rows deviate from
/// unit norm by more than 1e-6.
SimilarityMatrix gram_matrix(const FeatureMatrix& X);

/// Dense symmetric eigendecomposition, eigenvalues descending.
/// Input must be symmetric within 1e-9.
EigenResult eigh(const Matrix& A, Index max_size = kDefaultMaxEighSize);

/// Full SimilarityMatrix invariant check including the PSD bound
/// (smallest eigenvalue >= -1e-8 * n). Throws ValidationError on failure.
void validate_similarity(const Matrix& K);

}  // namespace divw
