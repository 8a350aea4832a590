#pragma once

// Fixed random reservoirs: construction of the input and recurrent matrices
// and the leaky-integrator state update for single and sequential models.

#include "seqrc/random.hpp"
#include "seqrc/series.hpp"

#include <Eigen/Sparse>

#include <cstdint>
#include <variant>
#include <vector>

namespace seqrc {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class Activation : std::uint8_t { tanh = 0, identity = 1 };

/// Scalar hyperparameters shared by every reservoir layer of a model.
struct ReservoirParams {
    double spectral_radius = 1.1;
    double leak_rate = 0.7;
    /// Probability that an edge is absent. 0 means fully dense.
    double sparsity = 0.0;
    double input_scale = 1.0;
    Activation activation = Activation::tanh;
    std::uint64_t seed = 0;

    void validate() const;
};

/// One reservoir of size N fed directly by the input.
struct ReservoirSpec {
    Index input_dim = 0;
    Index reservoir_size = 0;
    ReservoirParams params;

    void validate() const;
};

/// A chain of `layer_count` reservoirs of `layer_size` each.
struct SequentialSpec {
    Index input_dim = 0;
    Index layer_count = 0;
    Index layer_size = 0;
    ReservoirParams params;

    Index total_state() const { return layer_count * layer_size; }
    void validate() const;
};

enum class ModelKind : std::uint8_t { single = 0, sequential = 1 };

using ModelSpec = std::variant<ReservoirSpec, SequentialSpec>;

ModelKind kind_of(const ModelSpec& spec) noexcept;
Index input_dim_of(const ModelSpec& spec) noexcept;
Index layer_count_of(const ModelSpec& spec) noexcept;
Index layer_size_of(const ModelSpec& spec) noexcept;
Index state_size_of(const ModelSpec& spec) noexcept;
const ReservoirParams& params_of(const ModelSpec& spec) noexcept;
ReservoirParams& params_of(ModelSpec& spec) noexcept;
void validate(const ModelSpec& spec);

/// Dense W_x of shape (first-layer size x input_dim).
struct InputMatrix {
    Matrix weights;
};

/// Recurrent matrix W_r, held sparse when any edge was dropped.
class ReservoirMatrix {
public:
    ReservoirMatrix() = default;

    /// Rescales `raw` so that its spectral radius equals `target_radius`.
    /// Throws EstimatedRadiusZero when the raw radius is below 1e-12.
    static ReservoirMatrix from_raw(const Matrix& raw, double target_radius, bool sparse_storage);
    /// Wraps already-scaled weights without rescaling (model loading).
    static ReservoirMatrix from_scaled(const Matrix& weights, double achieved_radius, bool sparse_storage);

    Index size() const noexcept { return size_; }
    bool is_sparse() const noexcept { return sparse_storage_; }
    double achieved_radius() const noexcept { return achieved_radius_; }
    Index stored_entries() const noexcept;

    /// out = W_r * v
    void multiply(const Eigen::Ref<const Vector>& v, Eigen::Ref<Vector> out) const;
    Vector operator*(const Eigen::Ref<const Vector>& v) const;
    Matrix to_dense() const;

private:
    Index size_ = 0;
    bool sparse_storage_ = false;
    double achieved_radius_ = 0.0;
    Matrix dense_;
    SparseMatrix sparse_;
};

struct RadiusOptions {
    Index max_iterations = 10'000;
    double tolerance = 1e-10;
    /// Matrices up to this size are solved exactly.
    Index exact_threshold = 64;
    /// Width of the iterated block; 2 or more resolves complex-conjugate pairs.
    Index block_size = 8;
};

struct RadiusEstimate {
    double radius = 0.0;
    bool converged = false;
    bool exact = false;
    Index iterations = 0;
};

/// |lambda_max| of a square matrix. Exact for size <= exact_threshold,
/// otherwise block power iteration with Rayleigh-Ritz extraction.
RadiusEstimate estimate_spectral_radius(const Matrix& w, const RadiusOptions& options = {});
RadiusEstimate estimate_spectral_radius(const SparseMatrix& w, const RadiusOptions& options = {});
/// The iterative path alone, regardless of size.
RadiusEstimate power_iteration_radius(const Matrix& w, const RadiusOptions& options = {});
/// Dense nonsymmetric eigensolve.
double exact_spectral_radius(const Matrix& w);

/// Entries uniform in [-input_scale, input_scale], row-major draw order.
InputMatrix build_input_layer(const ModelSpec& spec, RandomStream& rng);
/// Erdos-Renyi adjacency with uniform [-1, 1] weights, rescaled to the target radius.
ReservoirMatrix build_reservoir_matrix(Index size, const ReservoirParams& params, RandomStream& rng);

void apply_activation(Activation g, Eigen::Ref<Vector> v);

/// r_t = (1 - a) r + a g(W_r r + W_x x)
Vector step_single(const Matrix& w_x, const ReservoirMatrix& w_r, const Vector& state, const Vector& input,
                   double leak_rate, Activation g);

/// States of every layer plus the cached products W_r^i r^i. The cached
/// product of layer i drives layer i+1 within the step and is reused as
/// layer i's recurrent term on the next step.
class LayerStates {
public:
    const std::vector<Vector>& layers() const noexcept { return layers_; }
    const Vector& layer(Index i) const { return layers_.at(static_cast<std::size_t>(i)); }
    Index layer_count() const noexcept { return static_cast<Index>(layers_.size()); }
    Index total_size() const noexcept;
    Vector concatenated() const;
    void copy_concatenated(Eigen::Ref<Vector> out) const;

private:
    friend class Reservoir;
    std::vector<Vector> layers_;
    std::vector<Vector> recurrent_;
    Vector drive_;
};

/// The fixed (untrained) part of a model.
class Reservoir {
public:
    Reservoir() = default;
    Reservoir(ModelSpec spec, InputMatrix input, std::vector<ReservoirMatrix> layers);

    /// Draws W_x from stream 0 and W_r^i from stream i + 1 of the spec seed.
    static Reservoir build(const ModelSpec& spec);

    const ModelSpec& spec() const noexcept { return spec_; }
    ModelKind kind() const noexcept { return kind_of(spec_); }
    Index input_dim() const noexcept { return input_dim_of(spec_); }
    Index layer_count() const noexcept { return static_cast<Index>(layers_.size()); }
    Index state_size() const noexcept { return state_size_of(spec_); }
    const InputMatrix& input_matrix() const noexcept { return input_; }
    const ReservoirMatrix& layer(Index i) const { return layers_.at(static_cast<std::size_t>(i)); }
    const ReservoirParams& params() const noexcept { return params_of(spec_); }

    LayerStates zero_state() const;
    /// States from explicit per-layer vectors; caches are computed here.
    LayerStates make_state(std::vector<Vector> layers) const;

    /// Advances every layer by one step in place, layer 1 first.
    void step(LayerStates& states, const Eigen::Ref<const Vector>& input) const;

private:
    ModelSpec spec_;
    InputMatrix input_;
    std::vector<ReservoirMatrix> layers_;
};

/// Layer-sequential update; same as Reservoir::step.
void step_sequential(const Reservoir& model, LayerStates& states, const Eigen::Ref<const Vector>& input);

/// Aligned teacher-forced samples after washout: row k holds the state after
/// consuming inputs[k], and targets[k] is the next true value.
struct TeacherForcedRun {
    RowMatrix states;
    RowMatrix inputs;
    RowMatrix targets;
    LayerStates final_state;
};

/// Drives the reservoir from the zero state with the true series. Requires
/// series.rows() > washout + 1 (SeriesTooShort otherwise).
TeacherForcedRun run_teacher_forced(const Reservoir& model, const RowMatrix& series, Index washout);

}  // namespace seqrc
