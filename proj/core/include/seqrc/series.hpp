#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace seqrc {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
/// Time-major storage: one row per time step, contiguous.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Spatial layout of a flattened field; component index = row * width + col.
struct FieldShape {
    Index height = 0;
    Index width = 0;

    friend bool operator==(const FieldShape&, const FieldShape&) = default;
};

/// A (time x dimension) real sequence. The universal dataset and forecast container.
struct SeriesData {
    RowMatrix values;
    /// Time units per row.
    double dt = 1.0;
    /// Either empty or one label per component.
    std::vector<std::string> labels;
    std::optional<FieldShape> shape;

    Index steps() const { return values.rows(); }
    Index dim() const { return values.cols(); }

    /// Throws InvalidSpec / NonFiniteValue when the invariants do not hold.
    void validate() const;

    /// Rows [first, first + count) with metadata carried over.
    SeriesData slice(Index first, Index count) const;
};

/// Default labels: x, y, z for three components, c0..c{D-1} otherwise.
std::vector<std::string> default_labels(Index dim);

}  // namespace seqrc
