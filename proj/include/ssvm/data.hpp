#pragma once
#include <Eigen/Dense>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssvm {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Input could not be read or violates a data invariant.
class data_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Feature matrix (n x p, column-major) and labels in {-1, +1}.
 * Construction validates the invariants; the object is immutable afterwards.
 */
class Dataset {
public:
    Dataset(Matrix X, Vector y);

    const Matrix& X() const { return X_; }
    const Vector& y() const { return y_; }
    Index n() const { return X_.rows(); }
    Index p() const { return X_.cols(); }

private:
    Matrix X_;
    Vector y_;
};

/// Contiguous column blocks [boundaries[g], boundaries[g+1]).
class BlockPartition {
public:
    explicit BlockPartition(std::vector<Index> boundaries);

    Index blocks() const { return static_cast<Index>(boundaries_.size()) - 1; }
    Index begin(Index g) const { return boundaries_[g]; }
    Index end(Index g) const { return boundaries_[g + 1]; }
    Index size(Index g) const { return boundaries_[g + 1] - boundaries_[g]; }
    Index total() const { return boundaries_.back(); }
    const std::vector<Index>& boundaries() const { return boundaries_; }

private:
    std::vector<Index> boundaries_;
};

/// Equal-size contiguous blocks; the first p mod G blocks get one extra column.
BlockPartition make_partition(Index p, Index G);

/**
 * The signed design A = [A0, A1, ..., AG] where A0 = y and row i of
 * [A1 ... AG] is y_i x_i^T. Column squared norms are cached per block, and
 * the largest eigenvalue of A_g^T A_g is estimated on first request.
 */
class SignedDesign {
public:
    SignedDesign(const Dataset& data, BlockPartition partition);

    Index n() const { return a0_.size(); }
    Index p() const { return partition_.total(); }
    Index blocks() const { return partition_.blocks(); }

    const Vector& a0() const { return a0_; }
    const Matrix& block(Index g) const { return blocks_[g]; }
    const Vector& col_sq_norms(Index g) const { return col_sq_norms_[g]; }
    const BlockPartition& partition() const { return partition_; }

    /// lambda_max(A_g^T A_g) by power iteration, computed once per design.
    double block_spectral(Index g) const;

    /// Margins y_i (beta0 + x_i^T beta_plus) = A0 beta0 + sum_g A_g beta_g.
    Vector margins(double beta0, const Vector& beta_plus) const;

    /// Undo the row signing: returns X.
    Matrix unsigned_features() const;

private:
    Vector a0_;
    std::vector<Matrix> blocks_;
    std::vector<Vector> col_sq_norms_;
    BlockPartition partition_;

    struct SpectralCache {
        std::once_flag once;
        std::vector<double> values;
    };
    std::shared_ptr<SpectralCache> spectral_;
};

SignedDesign build_signed_design(const Dataset& data, const BlockPartition& partition);

/// Per-feature penalty weights, non-negative and finite. The intercept has none.
class PenaltyWeights {
public:
    explicit PenaltyWeights(Vector alpha);
    static PenaltyWeights ones(Index p) { return PenaltyWeights(Vector::Ones(p)); }

    const Vector& values() const { return alpha_; }
    Index size() const { return alpha_.size(); }
    double operator[](Index j) const { return alpha_[j]; }
    auto segment(Index begin, Index len) const { return alpha_.segment(begin, len); }

private:
    Vector alpha_;
};

enum class BetaVariant { cd, prox };

struct SolverConfig {
    double phi = 1.0;
    double theta = 1.618;
    double tol = 1e-6;
    int max_iter = 20000;
    int inner_sweeps = 10;
    double inner_tol = 1e-8;
    double eta_safety = 1.01;
    BetaVariant variant = BetaVariant::cd;
    double support_eps = 1e-6;
    /// Every this many iterations a snapshot is offered to a trajectory recorder.
    int snapshot_interval = 10;
    int max_snapshots = 500;

    /// Throws std::invalid_argument on an out-of-domain field.
    void validate() const;
};

enum class DataFormat { csv, sparse };

/**
 * Reads a dataset. CSV: optional header row, label in the first column.
 * Sparse: `<label> <idx>:<value> ...` with 1-based increasing indices.
 * Labels {0, 1} are mapped to {-1, +1}. For the sparse format the feature
 * count is the largest index seen unless `min_features` is larger.
 */
Dataset load_dataset(const std::filesystem::path& path, DataFormat format, Index min_features = 0);
Dataset parse_csv(std::istream& in);
Dataset parse_sparse(std::istream& in, Index min_features = 0);

/// Writes the CSV layout understood by parse_csv (header y,f1,...,fp).
void write_csv(std::ostream& out, const Dataset& data);

/**
 * (1/n) sum_i (1 - y_i x_i^T beta_plus - y_i beta0)_+ + lambda * sum_j alpha_j |beta_j|.
 */
double objective(const Dataset& data, const PenaltyWeights& w, double lambda, double beta0,
                 const Vector& beta_plus);

/// Same objective evaluated through the signed design.
double objective(const SignedDesign& design, const PenaltyWeights& w, double lambda, double beta0,
                 const Vector& beta_plus);

/// Sum of hinge losses (not averaged) given the margins y_i f(x_i).
double hinge_sum(const Vector& margins);

}  // namespace ssvm
