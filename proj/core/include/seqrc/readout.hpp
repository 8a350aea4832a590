#pragma once

// Linear readout over the concatenated feature [1, x_t, r^1_t, ..., r^n_t],
// fitted in closed form by Tikhonov-regularized least squares.

#include "seqrc/reservoir.hpp"

namespace seqrc {

/// Feature length F = 1 + D + total reservoir state.
inline Index feature_size(Index input_dim, Index state_size) noexcept { return 1 + input_dim + state_size; }

/// [1, x, r^1, ..., r^n]
Vector assemble_feature(const Eigen::Ref<const Vector>& input, const LayerStates& states);
void assemble_feature_into(const Eigen::Ref<const Vector>& input, const LayerStates& states, Eigen::Ref<Vector> out);
/// Same layout from an already-concatenated state vector.
void assemble_feature_into(const Eigen::Ref<const Vector>& input, const Eigen::Ref<const Vector>& state,
                           Eigen::Ref<Vector> out);

struct RidgeReadout {
    /// F x D_out
    Matrix weights;
    double regularization = 0.0;

    Index feature_size() const noexcept { return weights.rows(); }
    Index output_size() const noexcept { return weights.cols(); }

    Vector apply(const Eigen::Ref<const Vector>& feature) const;
    void apply_into(const Eigen::Ref<const Vector>& feature, Eigen::Ref<Vector> out) const;
};

/// Streaming accumulator for R^T R and R^T Y. Memory is O(F^2 + F D_out)
/// regardless of series length; partial accumulators can be merged.
class NormalEquations {
public:
    NormalEquations(Index features, Index outputs);

    /// Adds a block of rows (features: k x F, targets: k x D_out).
    void add(const Eigen::Ref<const RowMatrix>& features, const Eigen::Ref<const RowMatrix>& targets);
    void merge(const NormalEquations& other);

    Index rows_seen() const noexcept { return rows_; }
    Index feature_size() const noexcept { return gram_.rows(); }
    Index output_size() const noexcept { return cross_.cols(); }

    /// Solves (R^T R + beta I) W = R^T Y by Cholesky. Throws
    /// SingularNormalMatrix when the factorization fails.
    RidgeReadout solve(double regularization) const;

    /// Full symmetric R^T R (the accumulator only fills the lower triangle).
    Matrix gram() const;
    const Matrix& cross() const noexcept { return cross_; }

private:
    Matrix gram_;
    Matrix cross_;
    Index rows_ = 0;
};

/// W_o = (R^T R + beta I)^{-1} R^T Y
RidgeReadout fit_ridge(const Eigen::Ref<const RowMatrix>& features, const Eigen::Ref<const RowMatrix>& targets,
                       double regularization);

}  // namespace seqrc
