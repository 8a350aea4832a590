#include "seqrc/reservoir.hpp"

#include "seqrc/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>
#include <string>

namespace seqrc {

namespace {

constexpr double kMinRawRadius = 1e-12;

void require(bool ok, const std::string& what)
{
    if (!ok) throw Error(ErrorCode::InvalidSpec, what);
}

Matrix orthonormal_columns(const Matrix& z)
{
    Eigen::HouseholderQR<Matrix> qr(z);
    return qr.householderQ() * Matrix::Identity(z.rows(), z.cols());
}

double max_ritz_modulus(const Matrix& h)
{
    if (h.rows() == 1) return std::abs(h(0, 0));
    Eigen::EigenSolver<Matrix> solver(h, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

template <typename MatrixType>
RadiusEstimate block_power_iteration(const MatrixType& w, const RadiusOptions& options)
{
    const Index n = w.rows();
    const Index width = std::max<Index>(1, std::min(options.block_size, n));

    // Fixed start block so the estimate is a pure function of the matrix.
    RandomStream rng(0x5eedULL, 0);
    Matrix start(n, width);
    for (Index c = 0; c < width; ++c)
        for (Index r = 0; r < n; ++r) start(r, c) = rng.normal();
    Matrix q = orthonormal_columns(start);

    RadiusEstimate result;
    double previous = -1.0;
    int stable = 0;
    for (Index it = 1; it <= options.max_iterations; ++it) {
        const Matrix z = w * q;
        const Matrix projected = q.transpose() * z;
        const double estimate = max_ritz_modulus(projected);
        result.radius = estimate;
        result.iterations = it;
        if (z.norm() == 0.0) {
            result.radius = 0.0;
            result.converged = true;
            return result;
        }
        q = orthonormal_columns(z);
        if (previous >= 0.0 && std::abs(estimate - previous) <= options.tolerance * estimate) {
            // two quiet iterations in a row guard against a lucky crossing
            if (++stable >= 2) {
                result.converged = true;
                return result;
            }
        } else {
            stable = 0;
        }
        previous = estimate;
    }
    return result;
}

}  // namespace

void ReservoirParams::validate() const
{
    require(spectral_radius > 0.0 && std::isfinite(spectral_radius), "spectral_radius must be > 0");
    require(leak_rate >= 0.0 && leak_rate <= 1.0, "leak_rate must lie in [0, 1]");
    require(sparsity >= 0.0 && sparsity < 1.0, "sparsity must lie in [0, 1)");
    require(input_scale >= 0.0 && std::isfinite(input_scale), "input_scale must be >= 0");
}

void ReservoirSpec::validate() const
{
    require(input_dim >= 1, "input_dim must be >= 1");
    require(reservoir_size >= 1, "reservoir_size must be >= 1");
    params.validate();
}

void SequentialSpec::validate() const
{
    require(input_dim >= 1, "input_dim must be >= 1");
    require(layer_count >= 1, "layer_count must be >= 1");
    require(layer_size >= 1, "layer_size must be >= 1");
    params.validate();
}

ModelKind kind_of(const ModelSpec& spec) noexcept
{
    return std::holds_alternative<ReservoirSpec>(spec) ? ModelKind::single : ModelKind::sequential;
}

Index input_dim_of(const ModelSpec& spec) noexcept
{
    return std::visit([](const auto& s) { return s.input_dim; }, spec);
}

Index layer_count_of(const ModelSpec& spec) noexcept
{
    if (const auto* s = std::get_if<SequentialSpec>(&spec)) return s->layer_count;
    return 1;
}

Index layer_size_of(const ModelSpec& spec) noexcept
{
    if (const auto* s = std::get_if<SequentialSpec>(&spec)) return s->layer_size;
    return std::get<ReservoirSpec>(spec).reservoir_size;
}

Index state_size_of(const ModelSpec& spec) noexcept
{
    return layer_count_of(spec) * layer_size_of(spec);
}

const ReservoirParams& params_of(const ModelSpec& spec) noexcept
{
    return std::visit([](const auto& s) -> const ReservoirParams& { return s.params; }, spec);
}

ReservoirParams& params_of(ModelSpec& spec) noexcept
{
    return std::visit([](auto& s) -> ReservoirParams& { return s.params; }, spec);
}

void validate(const ModelSpec& spec)
{
    std::visit([](const auto& s) { s.validate(); }, spec);
}

// --- ReservoirMatrix -------------------------------------------------------

ReservoirMatrix ReservoirMatrix::from_raw(const Matrix& raw, double target_radius, bool sparse_storage)
{
    if (raw.rows() != raw.cols()) throw Error(ErrorCode::DimensionMismatch, "reservoir matrix must be square");
    RadiusEstimate estimate = estimate_spectral_radius(raw);
    if (!estimate.converged) {
        estimate.radius = exact_spectral_radius(raw);
    }
    if (estimate.radius < kMinRawRadius)
        throw Error(ErrorCode::EstimatedRadiusZero,
                    "raw reservoir matrix has spectral radius " + std::to_string(estimate.radius));
    const double scale = target_radius / estimate.radius;
    return from_scaled(raw * scale, estimate.radius * scale, sparse_storage);
}

ReservoirMatrix ReservoirMatrix::from_scaled(const Matrix& weights, double achieved_radius, bool sparse_storage)
{
    if (weights.rows() != weights.cols())
        throw Error(ErrorCode::DimensionMismatch, "reservoir matrix must be square");
    ReservoirMatrix m;
    m.size_ = weights.rows();
    m.sparse_storage_ = sparse_storage;
    m.achieved_radius_ = achieved_radius;
    if (sparse_storage) {
        m.sparse_ = weights.sparseView(0.0, 0.0);
        m.sparse_.makeCompressed();
    } else {
        m.dense_ = weights;
    }
    return m;
}

Index ReservoirMatrix::stored_entries() const noexcept
{
    return sparse_storage_ ? sparse_.nonZeros() : size_ * size_;
}

void ReservoirMatrix::multiply(const Eigen::Ref<const Vector>& v, Eigen::Ref<Vector> out) const
{
    if (v.size() != size_ || out.size() != size_)
        throw Error(ErrorCode::DimensionMismatch, "reservoir matvec size mismatch");
    if (sparse_storage_)
        out.noalias() = sparse_ * v;
    else
        out.noalias() = dense_ * v;
}

Vector ReservoirMatrix::operator*(const Eigen::Ref<const Vector>& v) const
{
    Vector out(size_);
    multiply(v, out);
    return out;
}

Matrix ReservoirMatrix::to_dense() const
{
    return sparse_storage_ ? Matrix(sparse_) : dense_;
}

// --- spectral radius -------------------------------------------------------

double exact_spectral_radius(const Matrix& w)
{
    if (w.rows() != w.cols()) throw Error(ErrorCode::DimensionMismatch, "spectral radius of a non-square matrix");
    if (w.rows() == 0) return 0.0;
    Eigen::EigenSolver<Matrix> solver(w, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

RadiusEstimate power_iteration_radius(const Matrix& w, const RadiusOptions& options)
{
    if (w.rows() != w.cols()) throw Error(ErrorCode::DimensionMismatch, "spectral radius of a non-square matrix");
    return block_power_iteration(w, options);
}

RadiusEstimate estimate_spectral_radius(const Matrix& w, const RadiusOptions& options)
{
    if (w.rows() != w.cols()) throw Error(ErrorCode::DimensionMismatch, "spectral radius of a non-square matrix");
    if (w.rows() <= options.exact_threshold) {
        RadiusEstimate r;
        r.radius = exact_spectral_radius(w);
        r.converged = true;
        r.exact = true;
        return r;
    }
    return block_power_iteration(w, options);
}

RadiusEstimate estimate_spectral_radius(const SparseMatrix& w, const RadiusOptions& options)
{
    if (w.rows() != w.cols()) throw Error(ErrorCode::DimensionMismatch, "spectral radius of a non-square matrix");
    if (w.rows() <= options.exact_threshold) return estimate_spectral_radius(Matrix(w), options);
    return block_power_iteration(w, options);
}

// --- construction ----------------------------------------------------------

InputMatrix build_input_layer(const ModelSpec& spec, RandomStream& rng)
{
    validate(spec);
    const double scale = params_of(spec).input_scale;
    const Index rows = layer_size_of(spec);
    const Index cols = input_dim_of(spec);
    InputMatrix input{Matrix(rows, cols)};
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c) input.weights(r, c) = rng.uniform(-scale, scale);
    return input;
}

ReservoirMatrix build_reservoir_matrix(Index size, const ReservoirParams& params, RandomStream& rng)
{
    params.validate();
    require(size >= 1, "reservoir size must be >= 1");
    const bool sparse = params.sparsity > 0.0;
    Matrix raw = Matrix::Zero(size, size);
    for (Index r = 0; r < size; ++r) {
        for (Index c = 0; c < size; ++c) {
            if (sparse && rng.uniform01() < params.sparsity) continue;
            raw(r, c) = rng.uniform(-1.0, 1.0);
        }
    }
    return ReservoirMatrix::from_raw(raw, params.spectral_radius, sparse);
}

// --- dynamics --------------------------------------------------------------

void apply_activation(Activation g, Eigen::Ref<Vector> v)
{
    if (g == Activation::identity) return;
    for (Index i = 0; i < v.size(); ++i) v[i] = std::tanh(v[i]);
}

Vector step_single(const Matrix& w_x, const ReservoirMatrix& w_r, const Vector& state, const Vector& input,
                   double leak_rate, Activation g)
{
    if (w_x.rows() != w_r.size() || state.size() != w_r.size() || input.size() != w_x.cols())
        throw Error(ErrorCode::DimensionMismatch, "step_single dimensions are inconsistent");
    Vector drive(w_x.rows());
    drive.noalias() = w_x * input;
    Vector pre = w_r * state;
    pre += drive;
    apply_activation(g, pre);
    return (1.0 - leak_rate) * state + leak_rate * pre;
}

Index LayerStates::total_size() const noexcept
{
    Index total = 0;
    for (const auto& l : layers_) total += l.size();
    return total;
}

Vector LayerStates::concatenated() const
{
    Vector out(total_size());
    copy_concatenated(out);
    return out;
}

void LayerStates::copy_concatenated(Eigen::Ref<Vector> out) const
{
    Index offset = 0;
    for (const auto& l : layers_) {
        out.segment(offset, l.size()) = l;
        offset += l.size();
    }
}

Reservoir::Reservoir(ModelSpec spec, InputMatrix input, std::vector<ReservoirMatrix> layers)
    : spec_(std::move(spec)), input_(std::move(input)), layers_(std::move(layers))
{
    validate(spec_);
    const Index n = layer_size_of(spec_);
    if (static_cast<Index>(layers_.size()) != layer_count_of(spec_))
        throw Error(ErrorCode::DimensionMismatch, "layer count does not match spec");
    if (input_.weights.rows() != n || input_.weights.cols() != input_dim_of(spec_))
        throw Error(ErrorCode::DimensionMismatch, "input matrix shape does not match spec");
    for (const auto& l : layers_)
        if (l.size() != n) throw Error(ErrorCode::DimensionMismatch, "reservoir layer size does not match spec");
}

Reservoir Reservoir::build(const ModelSpec& spec)
{
    validate(spec);
    const auto& params = params_of(spec);
    RandomStream input_rng(params.seed, 0);
    InputMatrix input = build_input_layer(spec, input_rng);
    std::vector<ReservoirMatrix> layers;
    const Index count = layer_count_of(spec);
    layers.reserve(static_cast<std::size_t>(count));
    for (Index i = 0; i < count; ++i) {
        RandomStream layer_rng(params.seed, static_cast<std::uint64_t>(i) + 1);
        layers.push_back(build_reservoir_matrix(layer_size_of(spec), params, layer_rng));
    }
    return Reservoir(spec, std::move(input), std::move(layers));
}

LayerStates Reservoir::zero_state() const
{
    LayerStates s;
    const Index n = layer_size_of(spec_);
    s.layers_.assign(layers_.size(), Vector::Zero(n));
    s.recurrent_.assign(layers_.size(), Vector::Zero(n));
    s.drive_ = Vector::Zero(n);
    return s;
}

LayerStates Reservoir::make_state(std::vector<Vector> layers) const
{
    if (layers.size() != layers_.size()) throw Error(ErrorCode::DimensionMismatch, "state layer count mismatch");
    LayerStates s;
    s.layers_ = std::move(layers);
    s.recurrent_.resize(layers_.size());
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        if (s.layers_[i].size() != layers_[i].size())
            throw Error(ErrorCode::DimensionMismatch, "state layer size mismatch");
        s.recurrent_[i] = layers_[i] * s.layers_[i];
    }
    s.drive_ = Vector::Zero(layer_size_of(spec_));
    return s;
}

void Reservoir::step(LayerStates& states, const Eigen::Ref<const Vector>& input) const
{
    if (input.size() != input_dim()) throw Error(ErrorCode::DimensionMismatch, "input dimension mismatch");
    if (states.layers_.size() != layers_.size())
        throw Error(ErrorCode::DimensionMismatch, "state layer count mismatch");
    const double leak = params().leak_rate;
    const Activation g = params().activation;
    Vector& pre = states.drive_;
    pre.noalias() = input_.weights * input;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        // layer 1: W_r r + W_x x;  layer i > 1: W_r^i r^i + W_r^{i-1} r^{i-1}_t
        if (i == 0)
            pre += states.recurrent_[0];
        else
            pre.noalias() = states.recurrent_[i] + states.recurrent_[i - 1];
        apply_activation(g, pre);
        Vector& r = states.layers_[i];
        r = (1.0 - leak) * r + leak * pre;
        layers_[i].multiply(r, states.recurrent_[i]);
    }
}

void step_sequential(const Reservoir& model, LayerStates& states, const Eigen::Ref<const Vector>& input)
{
    model.step(states, input);
}

TeacherForcedRun run_teacher_forced(const Reservoir& model, const RowMatrix& series, Index washout)
{
    if (series.cols() != model.input_dim()) throw Error(ErrorCode::DimensionMismatch, "series dimension mismatch");
    if (washout < 0 || series.rows() <= washout + 1)
        throw Error(ErrorCode::SeriesTooShort, "series of length " + std::to_string(series.rows()) +
                                                   " leaves no training pair after washout " +
                                                   std::to_string(washout));
    const Index kept = series.rows() - 1 - washout;
    TeacherForcedRun run;
    run.states.resize(kept, model.state_size());
    run.inputs = series.middleRows(washout, kept);
    run.targets = series.middleRows(washout + 1, kept);
    LayerStates state = model.zero_state();
    for (Index t = 0; t + 1 < series.rows(); ++t) {
        model.step(state, series.row(t).transpose());
        if (t >= washout) state.copy_concatenated(run.states.row(t - washout).transpose());
    }
    run.final_state = std::move(state);
    return run;
}

}  // namespace seqrc
