#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace divw {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Bad user input: malformed files, out-of-contract arguments. CLI exit 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical breakdown at runtime (non-finite values, badly non-PSD input). CLI exit 1.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// n examples (rows) by d features (columns), optionally with integer class labels.
struct FeatureMatrix {
    Matrix data;
    std::vector<long> labels;  // empty when the source had no label column

    Index rows() const { return data.rows(); }
    Index cols() const { return data.cols(); }
    bool has_labels() const { return !labels.empty(); }
};

/// Symmetric PSD matrix with unit diagonal. Construct through from() or gram_matrix()
/// so the invariants have been checked at least once.
struct SimilarityMatrix {
    Matrix entries;

    Index size() const { return entries.rows(); }

    // Checks symmetry (1e-12) and unit diagonal (1e-9); the PSD check costs an
    // eigendecomposition and is opt-in.
    static SimilarityMatrix from(Matrix m, bool check_psd = false);
};

/// Point on the (n-1)-simplex: entries in [0,1], summing to 1 within 1e-9.
struct ProbabilityVector {
    Vector v;

    Index size() const { return v.size(); }

    static ProbabilityVector from(Vector p);
    static ProbabilityVector uniform(Index n);
};

struct EigenResult {
    Vector eigenvalues;   // descending
    Matrix eigenvectors;  // orthonormal columns, matching order
};

}  // namespace divw
