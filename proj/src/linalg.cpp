#include "divw/linalg.hpp"

#include <lapacke.h>

#include <cmath>

namespace divw {

SimilarityMatrix SimilarityMatrix::from(Matrix m, bool check_psd) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw ValidationError("similarity matrix must be square and non-empty");
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12)
        throw ValidationError("similarity matrix not symmetric (max |K_ij - K_ji| = " +
                              std::to_string(asym) + ")");
    const double diag_err = (m.diagonal().array() - 1.0).abs().maxCoeff();
    if (diag_err > 1e-9)
        throw ValidationError("similarity matrix diagonal deviates from 1 by " +
                              std::to_string(diag_err));
    if (check_psd) {
        EigenResult er = eigh(m);
        const double lambda_min = er.eigenvalues(er.eigenvalues.size() - 1);
        if (lambda_min < -1e-8 * static_cast<double>(m.rows()))
            throw ValidationError("similarity matrix not PSD (smallest eigenvalue " +
                                  std::to_string(lambda_min) + ")");
    }
    return SimilarityMatrix{std::move(m)};
}

ProbabilityVector ProbabilityVector::from(Vector p) {
    if (p.size() < 1) throw ValidationError("probability vector is empty");
    for (Index i = 0; i < p.size(); ++i) {
        if (!std::isfinite(p(i)) || p(i) < 0.0 || p(i) > 1.0)
            throw ValidationError("probability entry " + std::to_string(i) +
                                  " outside [0, 1]: " + std::to_string(p(i)));
    }
    const double sum = p.sum();
    if (std::abs(sum - 1.0) > 1e-9)
        throw ValidationError("probabilities sum to " + std::to_string(sum) + ", expected 1");
    return ProbabilityVector{std::move(p)};
}

ProbabilityVector ProbabilityVector::uniform(Index n) {
    if (n < 1) throw ValidationError("probability vector is empty");
    return ProbabilityVector{Vector::Constant(n, 1.0 / static_cast<double>(n))};
}

FeatureMatrix normalize_rows(const FeatureMatrix& X) {
    if (X.rows() < 1 || X.cols() < 1) throw ValidationError("feature matrix is empty");
    FeatureMatrix out = X;
    for (Index i = 0; i < X.rows(); ++i) {
        const double norm = X.data.row(i).norm();
        if (norm < 1e-12)
            throw ValidationError("row " + std::to_string(i) + " has zero norm, cannot normalize");
        out.data.row(i) /= norm;
    }
    return out;
}

SimilarityMatrix gram_matrix(const FeatureMatrix& X) {
    if (X.rows() < 1 || X.cols() < 1) throw ValidationError("feature matrix is empty");
    for (Index i = 0; i < X.rows(); ++i) {
        const double norm = X.data.row(i).norm();
        if (std::abs(norm - 1.0) > 1e-6)
            throw ValidationError("row " + std::to_string(i) + " is not unit-norm (" +
                                  std::to_string(norm) + "); call normalize_rows first");
    }
    Matrix K = X.data * X.data.transpose();
    // The product is symmetric up to rounding; symmetrize so downstream
    // tolerance checks see exact symmetry.
    K = ((K + K.transpose()) * 0.5).eval();
    return SimilarityMatrix{std::move(K)};
}

EigenResult eigh(const Matrix& A, Index max_size) {
    const Index n = A.rows();
    if (n != A.cols() || n < 1) throw ValidationError("eigh: matrix must be square and non-empty");
    if (n > max_size)
        throw ValidationError("eigh: matrix size " + std::to_string(n) +
                              " exceeds configured cap " + std::to_string(max_size));
    const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9)
        throw ValidationError("eigh: input not symmetric (max asymmetry " +
                              std::to_string(asym) + ")");

    Matrix Q = ((A + A.transpose()) * 0.5).eval();
    Vector w(n);
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L',
                                           static_cast<lapack_int>(n), Q.data(),
                                           static_cast<lapack_int>(n), w.data());
    if (info != 0)
        throw NumericalError("dsyevd failed to converge (info=" + std::to_string(info) + ")");

    // LAPACK returns ascending order.
    EigenResult res;
    res.eigenvalues = w.reverse();
    res.eigenvectors = Q.rowwise().reverse();
    return res;
}

void validate_similarity(const Matrix& K) {
    (void)SimilarityMatrix::from(K, /*check_psd=*/true);
}

}  // namespace divw
