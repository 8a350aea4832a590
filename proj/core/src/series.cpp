#include "seqrc/series.hpp"

#include "seqrc/error.hpp"

#include <cmath>

namespace seqrc {

void SeriesData::validate() const
{
    if (values.rows() < 1 || values.cols() < 1)
        throw Error(ErrorCode::InvalidSpec, "series must have at least one step and one component");
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw Error(ErrorCode::InvalidSpec, "series dt must be positive and finite");
    if (!labels.empty() && static_cast<Index>(labels.size()) != values.cols())
        throw Error(ErrorCode::InvalidSpec, "label count does not match series dimension");
    if (shape && shape->height * shape->width != values.cols())
        throw Error(ErrorCode::InvalidSpec, "field shape " + std::to_string(shape->height) + "x" +
                                              std::to_string(shape->width) + " does not match dimension " +
                                              std::to_string(values.cols()));
    if (!values.allFinite()) throw Error(ErrorCode::NonFiniteValue, "series contains non-finite values");
}

SeriesData SeriesData::slice(Index first, Index count) const
{
    SeriesData out;
    out.values = values.middleRows(first, count);
    out.dt = dt;
    out.labels = labels;
    out.shape = shape;
    return out;
}

std::vector<std::string> default_labels(Index dim)
{
    if (dim == 3) return {"x", "y", "z"};
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(dim));
    for (Index i = 0; i < dim; ++i) labels.push_back("c" + std::to_string(i));
    return labels;
}

}  // namespace seqrc
