#pragma once

// End-to-end training (teacher-forced state collection + ridge fit),
// closed-loop autoregressive forecasting, and model persistence.

#include "seqrc/readout.hpp"
#include "seqrc/reservoir.hpp"
#include "seqrc/series.hpp"

#include <filesystem>
#include <vector>

namespace seqrc {

/// How inputs are standardized before they reach the reservoir.
enum class NormalizationMode : std::uint8_t {
    /// x / std. Keeps each component's offset, which gives the bias-free
    /// reservoir an asymmetric drive.
    scale = 0,
    /// (x - mean) / std
    zscore = 1,
};

/// Per-component statistics from the training data.
struct Normalization {
    NormalizationMode mode = NormalizationMode::scale;
    Vector mean;
    Vector std;
    /// Components whose training variance was zero; their std is set to 1.
    std::vector<bool> flagged;

    static Normalization fit(const RowMatrix& data, NormalizationMode mode = NormalizationMode::scale);

    /// The value subtracted before scaling: mean for zscore, zero for scale.
    Vector offset() const;

    RowMatrix normalize(const RowMatrix& data) const;
    RowMatrix denormalize(const RowMatrix& data) const;
    void normalize_row(Eigen::Ref<Vector> row) const;
    void denormalize_row(Eigen::Ref<Vector> row) const;
};

struct TrainOptions {
    Index washout = 100;
    double regularization = 1e-8;
    NormalizationMode normalization = NormalizationMode::scale;
    /// Rows per R^T R accumulation block.
    Index chunk_rows = 256;
};

struct TrainedModel {
    Reservoir reservoir;
    RidgeReadout readout;
    Normalization normalization;
    Index washout = 100;
    /// Time units per step of the training series.
    double dt = 1.0;
    std::vector<std::string> labels;
    std::optional<FieldShape> shape;

    const ModelSpec& spec() const noexcept { return reservoir.spec(); }
    ModelKind kind() const noexcept { return reservoir.kind(); }
    Index input_dim() const noexcept { return reservoir.input_dim(); }
};

/// Requires series length > washout + 1. Standardizes with training
/// statistics and fits the readout on (feature_t -> x_{t+1}) pairs.
TrainedModel train(const ModelSpec& spec, const SeriesData& series, const TrainOptions& options = {});

struct ForecastResult {
    SeriesData prediction;
    /// Closed-loop states; row k is the state the k-th prediction was read from.
    RowMatrix states;
    LayerStates final_state;
};

/// Teacher-forces the warmup (length >= max(washout, 1)), then feeds each
/// readout output back as the next input for `horizon` steps.
ForecastResult rollout(const TrainedModel& model, const SeriesData& warmup, Index horizon);

/// One-step-ahead predictions with true inputs (teacher forcing) over the
/// whole series after `washout`; row k predicts series[washout + k + 1].
RowMatrix predict_one_step(const TrainedModel& model, const SeriesData& series, Index washout);

inline constexpr std::uint16_t kModelFormatVersion = 1;

/// Little-endian "SRCM" file with a trailing CRC-32.
void save_model(const TrainedModel& model, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_model(const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);
TrainedModel decode_model(const std::vector<std::uint8_t>& bytes);

}  // namespace seqrc
