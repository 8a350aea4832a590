#pragma once

// Forecast skill measures: normalized-error valid prediction time, return
// maps of successive maxima, and field-image scores (RMSE, PSNR, SSIM).

#include "seqrc/series.hpp"

#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

namespace seqrc {

struct VptConfig {
    double threshold = 0.3;
    /// Per-component scale, normally the training-set standard deviation.
    Vector sigma;
    double dt = 1.0;

    void validate(Index dim) const;
};

/// sqrt(mean(((pred - truth) / sigma)^2))
double nrmse_at(const Eigen::Ref<const Vector>& pred, const Eigen::Ref<const Vector>& truth,
                const Eigen::Ref<const Vector>& sigma);

/// NRMSE per lead step (row k is lead k + 1).
Vector nrmse_curve(const RowMatrix& pred, const RowMatrix& truth, const Vector& sigma);

/// k * dt for the first 1-based lead k whose NRMSE reaches the threshold,
/// horizon * dt when it never does.
double vpt(const SeriesData& pred, const SeriesData& truth, const VptConfig& config);
/// The same from a precomputed curve.
double vpt_from_curve(const Vector& nrmse, double threshold, double dt);

struct ReturnMap {
    /// Indices of the strict local maxima, in time order.
    std::vector<Index> peaks;
    /// (z_max_i, z_max_{i+1})
    std::vector<std::pair<double, double>> pairs;
};

/// Strict local maxima; a flat top counts once, at its first index, when the
/// values on both sides of the plateau are lower.
ReturnMap return_map(const Eigen::Ref<const Vector>& z);

double rmse(const Eigen::Ref<const Vector>& pred, const Eigen::Ref<const Vector>& truth);

/// 10 log10(max_val^2 / MSE); nullopt when the inputs are identical.
std::optional<double> psnr(const Eigen::Ref<const Vector>& pred, const Eigen::Ref<const Vector>& truth,
                           double max_val);

enum class SsimMode { gaussian_window, global };

struct SsimOptions {
    SsimMode mode = SsimMode::gaussian_window;
    Index window = 7;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
};

/// Single-scale SSIM of two fields stored row-major with the given shape.
/// The windowed mode averages the index map over fully covered positions.
double ssim(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b, FieldShape shape,
            double dynamic_range, const SsimOptions& options = {});

/// Normalized 1D Gaussian taps; the 2D window is their outer product.
Vector gaussian_taps(Index size, double sigma);

/// Per-lead field scores for one forecast.
struct FieldCurves {
    Vector rmse;
    /// NaN stands for identical frames.
    Vector psnr;
    Vector ssim;
};

FieldCurves field_curves(const RowMatrix& pred, const RowMatrix& truth, FieldShape shape, double dynamic_range,
                         const SsimOptions& options = {});

/// First 1-based lead step whose SSIM falls below the threshold; curve length
/// when it never does.
Index ssim_horizon(const Vector& ssim_curve, double threshold);

/// CSV with columns lead_step,rmse,psnr,ssim (psnr empty when identical).
void write_field_curves_csv(const FieldCurves& curves, const std::filesystem::path& path);
/// CSV with columns lead_step,nrmse.
void write_nrmse_csv(const Vector& nrmse, const std::filesystem::path& path);
/// CSV with columns z_i,z_next.
void write_return_map_csv(const ReturnMap& map, const std::filesystem::path& path);

}  // namespace seqrc
