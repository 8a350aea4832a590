#include "seqrc/readout.hpp"

#include "seqrc/error.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <string>

namespace seqrc {

void assemble_feature_into(const Eigen::Ref<const Vector>& input, const LayerStates& states, Eigen::Ref<Vector> out)
{
    const Index expected = feature_size(input.size(), states.total_size());
    if (out.size() != expected) throw Error(ErrorCode::DimensionMismatch, "feature buffer has the wrong length");
    out[0] = 1.0;
    out.segment(1, input.size()) = input;
    states.copy_concatenated(out.tail(states.total_size()));
}

void assemble_feature_into(const Eigen::Ref<const Vector>& input, const Eigen::Ref<const Vector>& state,
                           Eigen::Ref<Vector> out)
{
    const Index expected = feature_size(input.size(), state.size());
    if (out.size() != expected) throw Error(ErrorCode::DimensionMismatch, "feature buffer has the wrong length");
    out[0] = 1.0;
    out.segment(1, input.size()) = input;
    out.tail(state.size()) = state;
}

Vector assemble_feature(const Eigen::Ref<const Vector>& input, const LayerStates& states)
{
    Vector out(feature_size(input.size(), states.total_size()));
    assemble_feature_into(input, states, out);
    return out;
}

Vector RidgeReadout::apply(const Eigen::Ref<const Vector>& feature) const
{
    Vector out(output_size());
    apply_into(feature, out);
    return out;
}

void RidgeReadout::apply_into(const Eigen::Ref<const Vector>& feature, Eigen::Ref<Vector> out) const
{
    if (feature.size() != feature_size() || out.size() != output_size())
        throw Error(ErrorCode::DimensionMismatch, "readout expects a feature of length " +
                                                      std::to_string(feature_size()));
    out.noalias() = weights.transpose() * feature;
}

NormalEquations::NormalEquations(Index features, Index outputs)
    : gram_(Matrix::Zero(features, features)), cross_(Matrix::Zero(features, outputs))
{
}

void NormalEquations::add(const Eigen::Ref<const RowMatrix>& features, const Eigen::Ref<const RowMatrix>& targets)
{
    if (features.cols() != gram_.rows() || targets.cols() != cross_.cols() || features.rows() != targets.rows())
        throw Error(ErrorCode::DimensionMismatch, "normal-equation block has inconsistent shape");
    if (features.rows() == 0) return;
    gram_.selfadjointView<Eigen::Lower>().rankUpdate(features.transpose());
    cross_.noalias() += features.transpose() * targets;
    rows_ += features.rows();
}

void NormalEquations::merge(const NormalEquations& other)
{
    if (other.gram_.rows() != gram_.rows() || other.cross_.cols() != cross_.cols())
        throw Error(ErrorCode::DimensionMismatch, "cannot merge normal equations of different shape");
    gram_.triangularView<Eigen::Lower>() += other.gram_;
    cross_ += other.cross_;
    rows_ += other.rows_;
}

Matrix NormalEquations::gram() const
{
    return gram_.selfadjointView<Eigen::Lower>();
}

RidgeReadout NormalEquations::solve(double regularization) const
{
    if (!(regularization >= 0.0) || !std::isfinite(regularization))
        throw Error(ErrorCode::InvalidSpec, "regularization must be a finite value >= 0");
    if (rows_ < 1) throw Error(ErrorCode::SeriesTooShort, "no rows accumulated for the readout fit");

    Matrix system = gram_;
    system.diagonal().array() += regularization;
    Eigen::LLT<Matrix, Eigen::Lower> llt(system);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::SingularNormalMatrix, "Cholesky factorization of R^T R + beta I failed; raise beta");
    if (regularization == 0.0) {
        // squared pivot ratio approximates the inverse condition number
        const auto diag = llt.matrixLLT().diagonal();
        const double largest = diag.cwiseAbs().maxCoeff();
        const double smallest = diag.cwiseAbs().minCoeff();
        const double ratio = smallest / largest;
        if (!(smallest > 0.0) || ratio * ratio < 1e-15 * static_cast<double>(diag.size()))
            throw Error(ErrorCode::SingularNormalMatrix, "normal matrix is numerically singular; raise beta");
    }

    RidgeReadout readout;
    readout.regularization = regularization;
    readout.weights = llt.solve(cross_);
    if (!readout.weights.allFinite())
        throw Error(ErrorCode::SingularNormalMatrix, "readout solve produced non-finite weights");
    return readout;
}

RidgeReadout fit_ridge(const Eigen::Ref<const RowMatrix>& features, const Eigen::Ref<const RowMatrix>& targets,
                       double regularization)
{
    if (features.rows() < 1) throw Error(ErrorCode::SeriesTooShort, "fit_ridge needs at least one row");
    NormalEquations normal(features.cols(), targets.cols());
    normal.add(features, targets);
    return normal.solve(regularization);
}

}  // namespace seqrc
