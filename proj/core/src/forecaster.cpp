#include "seqrc/forecaster.hpp"

#include "binary_io.hpp"
#include "seqrc/error.hpp"

#include <algorithm>
#include <cmath>

namespace seqrc {

namespace {

constexpr std::string_view kModelMagic = "SRCM";

void check_dim(const SeriesData& series, Index expected, const char* what)
{
    if (series.dim() != expected)
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has dimension " + std::to_string(series.dim()) +
                                                      ", model expects " + std::to_string(expected));
}

}  // namespace

// --- normalization ---------------------------------------------------------

Normalization Normalization::fit(const RowMatrix& data, NormalizationMode mode)
{
    if (data.rows() < 1) throw Error(ErrorCode::SeriesTooShort, "cannot normalize an empty series");
    Normalization n;
    n.mode = mode;
    const auto count = static_cast<double>(data.rows());
    n.mean = data.colwise().sum().transpose() / count;
    n.std.resize(data.cols());
    n.flagged.assign(static_cast<std::size_t>(data.cols()), false);
    for (Index c = 0; c < data.cols(); ++c) {
        const double var = (data.col(c).array() - n.mean[c]).square().sum() / count;
        const double sd = std::sqrt(var);
        // rounding in the mean leaves ~1e-16 scatter on constant columns
        if (!(sd > 1e-12 * std::max(1.0, std::abs(n.mean[c])))) {
            n.std[c] = 1.0;
            n.flagged[static_cast<std::size_t>(c)] = true;
        } else {
            n.std[c] = sd;
        }
    }
    return n;
}

Vector Normalization::offset() const
{
    return mode == NormalizationMode::zscore ? mean : Vector::Zero(mean.size());
}

RowMatrix Normalization::normalize(const RowMatrix& data) const
{
    if (data.cols() != mean.size()) throw Error(ErrorCode::DimensionMismatch, "normalization dimension mismatch");
    RowMatrix out = data;
    out.rowwise() -= offset().transpose();
    out.array().rowwise() /= std.transpose().array();
    return out;
}

RowMatrix Normalization::denormalize(const RowMatrix& data) const
{
    if (data.cols() != mean.size()) throw Error(ErrorCode::DimensionMismatch, "normalization dimension mismatch");
    RowMatrix out = data;
    out.array().rowwise() *= std.transpose().array();
    out.rowwise() += offset().transpose();
    return out;
}

void Normalization::normalize_row(Eigen::Ref<Vector> row) const
{
    row = ((row - offset()).array() / std.array()).matrix();
}

void Normalization::denormalize_row(Eigen::Ref<Vector> row) const
{
    row = (row.array() * std.array()).matrix() + offset();
}

// --- training and forecasting ----------------------------------------------

TrainedModel train(const ModelSpec& spec, const SeriesData& series, const TrainOptions& options)
{
    validate(spec);
    series.validate();
    check_dim(series, input_dim_of(spec), "training series");
    if (options.washout < 0 || series.steps() <= options.washout + 1)
        throw Error(ErrorCode::SeriesTooShort, "training series of length " + std::to_string(series.steps()) +
                                                   " is too short for washout " + std::to_string(options.washout));

    TrainedModel model;
    model.normalization = Normalization::fit(series.values, options.normalization);
    model.reservoir = Reservoir::build(spec);
    model.washout = options.washout;
    model.dt = series.dt;
    model.labels = series.labels;
    model.shape = series.shape;

    const RowMatrix z = model.normalization.normalize(series.values);
    const Index d = series.dim();
    const Index f = feature_size(d, model.reservoir.state_size());
    const Index chunk = std::max<Index>(1, options.chunk_rows);

    NormalEquations normal(f, d);
    RowMatrix features(chunk, f);
    RowMatrix targets(chunk, d);
    Index filled = 0;
    LayerStates state = model.reservoir.zero_state();
    for (Index t = 0; t + 1 < z.rows(); ++t) {
        model.reservoir.step(state, z.row(t).transpose());
        if (t < options.washout) continue;
        assemble_feature_into(z.row(t).transpose(), state, features.row(filled).transpose());
        targets.row(filled) = z.row(t + 1);
        if (++filled == chunk) {
            normal.add(features, targets);
            filled = 0;
        }
    }
    if (filled > 0) normal.add(features.topRows(filled), targets.topRows(filled));
    model.readout = normal.solve(options.regularization);
    return model;
}

ForecastResult rollout(const TrainedModel& model, const SeriesData& warmup, Index horizon)
{
    warmup.validate();
    check_dim(warmup, model.input_dim(), "warmup series");
    if (horizon < 0) throw Error(ErrorCode::InvalidSpec, "horizon must be >= 0");
    if (warmup.steps() < std::max<Index>(model.washout, 1))
        throw Error(ErrorCode::WarmupTooShort, "warmup of length " + std::to_string(warmup.steps()) +
                                                   " is shorter than the washout " + std::to_string(model.washout));

    const Reservoir& reservoir = model.reservoir;
    const RowMatrix z = model.normalization.normalize(warmup.values);
    LayerStates state = reservoir.zero_state();
    for (Index t = 0; t < z.rows(); ++t) reservoir.step(state, z.row(t).transpose());

    const Index d = model.input_dim();
    ForecastResult result;
    RowMatrix predicted(horizon, d);
    result.states.resize(horizon, reservoir.state_size());
    Vector input = z.row(z.rows() - 1).transpose();
    Vector feature(feature_size(d, reservoir.state_size()));
    Vector output(d);
    for (Index k = 0; k < horizon; ++k) {
        if (k > 0) reservoir.step(state, input);
        state.copy_concatenated(result.states.row(k).transpose());
        assemble_feature_into(input, state, feature);
        model.readout.apply_into(feature, output);
        if (!output.allFinite())
            throw Error(ErrorCode::NonFiniteState, "closed-loop forecast diverged at lead step " + std::to_string(k + 1));
        predicted.row(k) = output.transpose();
        input = output;
    }
    result.prediction.values = model.normalization.denormalize(predicted);
    result.prediction.dt = model.dt;
    result.prediction.labels = warmup.labels;
    result.prediction.shape = warmup.shape;
    result.final_state = std::move(state);
    return result;
}

RowMatrix predict_one_step(const TrainedModel& model, const SeriesData& series, Index washout)
{
    check_dim(series, model.input_dim(), "series");
    if (washout < 0 || series.steps() <= washout + 1)
        throw Error(ErrorCode::SeriesTooShort, "series too short for one-step prediction");
    const RowMatrix z = model.normalization.normalize(series.values);
    const Index d = model.input_dim();
    RowMatrix out(series.steps() - 1 - washout, d);
    LayerStates state = model.reservoir.zero_state();
    Vector feature(feature_size(d, model.reservoir.state_size()));
    Vector output(d);
    for (Index t = 0; t + 1 < z.rows(); ++t) {
        model.reservoir.step(state, z.row(t).transpose());
        if (t < washout) continue;
        assemble_feature_into(z.row(t).transpose(), state, feature);
        model.readout.apply_into(feature, output);
        out.row(t - washout) = output.transpose();
    }
    return model.normalization.denormalize(out);
}

// --- persistence -----------------------------------------------------------

std::vector<std::uint8_t> encode_model(const TrainedModel& model)
{
    detail::ByteWriter w;
    w.magic(kModelMagic);
    w.u16(kModelFormatVersion);

    const ModelSpec& spec = model.spec();
    const ReservoirParams& p = params_of(spec);
    w.u8(static_cast<std::uint8_t>(kind_of(spec)));
    w.u64(static_cast<std::uint64_t>(input_dim_of(spec)));
    w.u64(static_cast<std::uint64_t>(layer_count_of(spec)));
    w.u64(static_cast<std::uint64_t>(layer_size_of(spec)));
    w.f64(p.spectral_radius);
    w.f64(p.leak_rate);
    w.f64(p.sparsity);
    w.f64(p.input_scale);
    w.u8(static_cast<std::uint8_t>(p.activation));
    w.u64(p.seed);

    w.u64(static_cast<std::uint64_t>(model.washout));
    w.f64(model.dt);
    w.f64(model.readout.regularization);
    w.u8(model.shape ? 1 : 0);
    if (model.shape) {
        w.u64(static_cast<std::uint64_t>(model.shape->height));
        w.u64(static_cast<std::uint64_t>(model.shape->width));
    }
    w.u32(static_cast<std::uint32_t>(model.labels.size()));
    for (const auto& label : model.labels) w.string(label);

    const Normalization& n = model.normalization;
    w.u8(static_cast<std::uint8_t>(n.mode));
    w.raw_values(n.mean.transpose());
    w.raw_values(n.std.transpose());
    for (bool flag : n.flagged) w.u8(flag ? 1 : 0);

    w.matrix(model.reservoir.input_matrix().weights);
    for (Index i = 0; i < model.reservoir.layer_count(); ++i) {
        const ReservoirMatrix& layer = model.reservoir.layer(i);
        w.u8(layer.is_sparse() ? 1 : 0);
        w.f64(layer.achieved_radius());
        w.matrix(layer.to_dense());
    }
    w.matrix(model.readout.weights);
    w.seal();
    return w.buffer();
}

void save_model(const TrainedModel& model, const std::filesystem::path& path)
{
    detail::write_file(path, encode_model(model));
}

TrainedModel decode_model(const std::vector<std::uint8_t>& bytes)
{
    detail::ByteReader r = detail::open_sealed(bytes, kModelMagic, kModelFormatVersion, "model file");

    const auto kind = static_cast<ModelKind>(r.u8());
    const auto input_dim = static_cast<Index>(r.u64());
    const auto layer_count = static_cast<Index>(r.u64());
    const auto layer_size = static_cast<Index>(r.u64());
    ReservoirParams p;
    p.spectral_radius = r.f64();
    p.leak_rate = r.f64();
    p.sparsity = r.f64();
    p.input_scale = r.f64();
    p.activation = static_cast<Activation>(r.u8());
    p.seed = r.u64();

    ModelSpec spec;
    if (kind == ModelKind::single) {
        if (layer_count != 1) throw Error(ErrorCode::FormatVersionMismatch, "single model with several layers");
        spec = ReservoirSpec{input_dim, layer_size, p};
    } else if (kind == ModelKind::sequential) {
        spec = SequentialSpec{input_dim, layer_count, layer_size, p};
    } else {
        throw Error(ErrorCode::FormatVersionMismatch, "unknown model kind tag");
    }

    TrainedModel model;
    model.washout = static_cast<Index>(r.u64());
    model.dt = r.f64();
    const double regularization = r.f64();
    if (r.u8() != 0) {
        FieldShape shape;
        shape.height = static_cast<Index>(r.u64());
        shape.width = static_cast<Index>(r.u64());
        model.shape = shape;
    }
    const auto label_count = r.u32();
    for (std::uint32_t i = 0; i < label_count; ++i) model.labels.push_back(r.string());

    Normalization& n = model.normalization;
    const auto mode = r.u8();
    if (mode > static_cast<std::uint8_t>(NormalizationMode::zscore))
        throw Error(ErrorCode::FormatVersionMismatch, "unknown normalization mode tag");
    n.mode = static_cast<NormalizationMode>(mode);
    n.mean.resize(input_dim);
    n.std.resize(input_dim);
    for (Index i = 0; i < input_dim; ++i) n.mean[i] = r.f64();
    for (Index i = 0; i < input_dim; ++i) n.std[i] = r.f64();
    n.flagged.resize(static_cast<std::size_t>(input_dim));
    for (Index i = 0; i < input_dim; ++i) n.flagged[static_cast<std::size_t>(i)] = r.u8() != 0;

    InputMatrix input{r.matrix()};
    std::vector<ReservoirMatrix> layers;
    for (Index i = 0; i < layer_count; ++i) {
        const bool sparse = r.u8() != 0;
        const double radius = r.f64();
        layers.push_back(ReservoirMatrix::from_scaled(r.matrix(), radius, sparse));
    }
    model.reservoir = Reservoir(spec, std::move(input), std::move(layers));
    model.readout.weights = r.matrix();
    model.readout.regularization = regularization;
    if (model.readout.feature_size() != feature_size(input_dim, state_size_of(spec)) ||
        model.readout.output_size() != input_dim)
        throw Error(ErrorCode::FormatVersionMismatch, "readout shape does not match the stored spec");
    if (r.remaining() != 0) throw Error(ErrorCode::FormatVersionMismatch, "trailing bytes after model body");
    return model;
}

TrainedModel load_model(const std::filesystem::path& path)
{
    return decode_model(detail::read_file(path));
}

}  // namespace seqrc
