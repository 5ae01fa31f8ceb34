#pragma once

#include "divw/types.hpp"

namespace divw {

struct GaussianStats {
    Vector mean;
    Matrix covariance;
    bool weighted = false;
    double total_weight = 0.0;
};

/// Mean and covariance with 1/n normalization (no Bessel correction), so the
/// uniform-weight call of weighted_gaussian_stats reduces to this exactly.
GaussianStats gaussian_stats(const Matrix& X);

/// mu* = sum(w_i x_i) / sum(w), C = sum(w_i (x_i - mu*)(x_i - mu*)^T) / sum(w).
/// Scale-invariant in w; requires sum(w) > 0, all w_i >= 0.
GaussianStats weighted_gaussian_stats(const Matrix& X, const Vector& w);

/// Frechet distance between Gaussians:
/// |mu_a - mu_b|^2 + Tr(C_a + C_b - 2 (C_a C_b)^{1/2}), with the cross term
/// computed through the symmetric form (C_a^{1/2} C_b C_a^{1/2})^{1/2} and
/// round-off negatives clamped to zero.
double frechet_distance(const GaussianStats& a, const GaussianStats& b);

double fid(const Matrix& model_features, const Matrix& data_features);

/// Weighted FID: data-side statistics use the weights, model-side statistics
/// stay unweighted.
double wfid(const Matrix& model_features, const Matrix& data_features, const Vector& w);

/// Barratt-style inception score over the whole set, without subset splits and
/// without the exponential: H(mean_i p(y|x_i)) - mean_i H(p(y|x_i)), natural log.
/// Rows of cond must lie on the k-simplex within 1e-6.
double mutual_information_score(const Matrix& cond);

enum class PrDistance { euclidean, cosine };

struct PrResult {
    double precision;
    double recall;
};

/// Improved precision/recall via k-NN manifold estimates: a generated point
/// counts toward precision when it falls within some real point's k-th-nearest-
/// neighbor radius; recall with the roles swapped.
PrResult precision_recall(const Matrix& real_features, const Matrix& gen_features, int k = 3,
                          PrDistance distance = PrDistance::euclidean);

/// Vendi Score of a sample under uniform probabilities:
/// vendi_score(gram_matrix(normalize_rows(features)), uniform).
double sample_vendi(const FeatureMatrix& features);

}  // namespace divw
