#include "divw/metrics.hpp"

#include "divw/linalg.hpp"
#include "divw/vendi.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <vector>

namespace divw {

namespace {

Matrix sqrt_psd(const Matrix& C, const char* what) {
    EigenResult er = eigh(C);
    Vector l = er.eigenvalues;
    for (Index i = 0; i < l.size(); ++i) {
        if (l(i) < 0.0) {
            if (l(i) < -1e-6)
                std::cerr << "warning: clamping negative eigenvalue " << l(i) << " in " << what
                          << "\n";
            l(i) = 0.0;
        }
    }
    return er.eigenvectors * l.array().sqrt().matrix().asDiagonal() * er.eigenvectors.transpose();
}

double pair_distance(const Matrix& A, Index i, const Matrix& B, Index j, PrDistance metric) {
    if (metric == PrDistance::euclidean) return (A.row(i) - B.row(j)).norm();
    const double na = A.row(i).norm(), nb = B.row(j).norm();
    if (na < 1e-12 || nb < 1e-12) return 1.0;
    return 1.0 - A.row(i).dot(B.row(j)) / (na * nb);
}

// k-th nearest-neighbor radius of each point within its own set, self excluded,
// ties broken by lower index.
Vector knn_radii(const Matrix& X, int k, PrDistance metric) {
    const Index n = X.rows();
    Vector radii(n);
    std::vector<std::pair<double, Index>> d;
    d.reserve(static_cast<std::size_t>(n) - 1);
    for (Index i = 0; i < n; ++i) {
        d.clear();
        for (Index j = 0; j < n; ++j)
            if (j != i) d.emplace_back(pair_distance(X, i, X, j, metric), j);
        std::nth_element(d.begin(), d.begin() + (k - 1), d.end());
        radii(i) = d[static_cast<std::size_t>(k) - 1].first;
    }
    return radii;
}

// Fraction of query points lying within any support point's radius.
double manifold_fraction(const Matrix& support, const Vector& radii, const Matrix& query,
                         PrDistance metric) {
    Index hits = 0;
    for (Index q = 0; q < query.rows(); ++q) {
        for (Index s = 0; s < support.rows(); ++s) {
            if (pair_distance(query, q, support, s, metric) <= radii(s)) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(query.rows());
}

}  // namespace

GaussianStats gaussian_stats(const Matrix& X) {
    if (X.rows() < 2) throw ValidationError("gaussian_stats needs at least 2 rows");
    GaussianStats g = weighted_gaussian_stats(X, Vector::Ones(X.rows()));
    g.weighted = false;
    return g;
}

GaussianStats weighted_gaussian_stats(const Matrix& X, const Vector& w) {
    if (X.rows() < 1) throw ValidationError("empty feature matrix");
    if (w.size() != X.rows())
        throw ValidationError("weight length " + std::to_string(w.size()) +
                              " does not match row count " + std::to_string(X.rows()));
    for (Index i = 0; i < w.size(); ++i)
        if (!(w(i) >= 0.0)) throw ValidationError("negative weight at index " + std::to_string(i));
    const double total = w.sum();
    if (total <= 0.0) throw ValidationError("weights sum to zero");

    GaussianStats g;
    g.mean = X.transpose() * w / total;
    const Matrix centered = X.rowwise() - g.mean.transpose();
    g.covariance = centered.transpose() * w.asDiagonal() * centered / total;
    g.covariance = ((g.covariance + g.covariance.transpose()) * 0.5).eval();
    g.weighted = true;
    g.total_weight = total;
    return g;
}

double frechet_distance(const GaussianStats& a, const GaussianStats& b) {
    if (a.mean.size() != b.mean.size())
        throw ValidationError("frechet_distance: dimension mismatch " +
                              std::to_string(a.mean.size()) + " vs " +
                              std::to_string(b.mean.size()));
    const Matrix a_half = sqrt_psd(a.covariance, "covariance");
    const Matrix inner = a_half * b.covariance * a_half;
    EigenResult er = eigh(((inner + inner.transpose()) * 0.5).eval());
    double cross = 0.0;
    for (Index i = 0; i < er.eigenvalues.size(); ++i) {
        const double l = er.eigenvalues(i);
        if (l < -1e-6)
            std::cerr << "warning: clamping negative eigenvalue " << l
                      << " in frechet cross term\n";
        if (l > 0.0) cross += std::sqrt(l);
    }
    return (a.mean - b.mean).squaredNorm() + a.covariance.trace() + b.covariance.trace() -
           2.0 * cross;
}

double fid(const Matrix& model_features, const Matrix& data_features) {
    return frechet_distance(gaussian_stats(model_features), gaussian_stats(data_features));
}

double wfid(const Matrix& model_features, const Matrix& data_features, const Vector& w) {
    if (model_features.cols() != data_features.cols())
        throw ValidationError("model and data feature dimensions differ");
    return frechet_distance(gaussian_stats(model_features),
                            weighted_gaussian_stats(data_features, w));
}

double mutual_information_score(const Matrix& cond) {
    if (cond.rows() < 1 || cond.cols() < 1)
        throw ValidationError("empty class-probability matrix");
    for (Index i = 0; i < cond.rows(); ++i) {
        double s = 0.0;
        for (Index j = 0; j < cond.cols(); ++j) {
            if (cond(i, j) < -1e-9 || cond(i, j) > 1.0 + 1e-9)
                throw ValidationError("row " + std::to_string(i) + " has entry outside [0, 1]");
            s += cond(i, j);
        }
        if (std::abs(s - 1.0) > 1e-6)
            throw ValidationError("row " + std::to_string(i) + " sums to " + std::to_string(s));
    }

    auto entropy = [](const Vector& q) {
        double h = 0.0;
        for (Index j = 0; j < q.size(); ++j)
            if (q(j) > 0.0) h -= q(j) * std::log(q(j));
        return h;
    };
    const Vector marginal = cond.colwise().mean();
    double mean_cond_entropy = 0.0;
    for (Index i = 0; i < cond.rows(); ++i)
        mean_cond_entropy += entropy(cond.row(i).transpose());
    mean_cond_entropy /= static_cast<double>(cond.rows());
    return entropy(marginal) - mean_cond_entropy;
}

PrResult precision_recall(const Matrix& real_features, const Matrix& gen_features, int k,
                          PrDistance distance) {
    if (real_features.rows() < 1 || gen_features.rows() < 1)
        throw ValidationError("precision_recall: both sets must be non-empty");
    if (real_features.cols() != gen_features.cols())
        throw ValidationError("precision_recall: feature dimensions differ");
    if (k < 1 || k >= real_features.rows() || k >= gen_features.rows())
        throw ValidationError("precision_recall: k must satisfy 1 <= k < each set size");

    const Vector real_radii = knn_radii(real_features, k, distance);
    const Vector gen_radii = knn_radii(gen_features, k, distance);
    return PrResult{manifold_fraction(real_features, real_radii, gen_features, distance),
                    manifold_fraction(gen_features, gen_radii, real_features, distance)};
}

double sample_vendi(const FeatureMatrix& features) {
    const FeatureMatrix X = normalize_rows(features);
    const ProbabilityVector p = ProbabilityVector::uniform(X.rows());
    // Low-rank route when the Gram matrix would be larger than d x d.
    if (X.cols() < X.rows()) return vendi_score_features(X.data, p).score;
    return vendi_score(gram_matrix(X), p).score;
}

}  // namespace divw
