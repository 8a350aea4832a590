#pragma once

// Config-driven experiment runner: data -> split -> train -> rollout ->
// metrics, repeated per seed, with CSV/PGM reports and a checksummed manifest.

#include "seqrc/config.hpp"
#include "seqrc/cost.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace seqrc {

/// Generates (or loads) the series one seed consumes. Generated data has
/// exactly config.required_length() rows.
SeriesData make_dataset(const ExperimentConfig& config, std::uint64_t seed);

struct Snapshot {
    Index lead = 0;
    Vector predicted;
    Vector truth;
};

struct SeedOutcome {
    std::uint64_t seed = 0;
    std::optional<std::string> error;
    double train_seconds = 0.0;

    /// Low-dimensional data.
    std::optional<double> vpt;
    Vector nrmse;
    std::optional<ReturnMap> truth_map;
    std::optional<ReturnMap> predicted_map;

    /// Field data.
    std::optional<Index> ssim_horizon;
    std::optional<FieldCurves> curves;
    std::vector<Snapshot> snapshots;
    std::optional<FieldShape> shape;
};

/// Everything for one seed, kept in memory.
SeedOutcome run_seed(const ExperimentConfig& config, const SeriesData& data, std::uint64_t seed);

struct ExperimentReport {
    std::vector<SeedOutcome> seeds;
    CostReport cost;
    std::filesystem::path manifest;
    double wall_seconds = 0.0;

    std::size_t failures() const;
};

using ProgressFn = std::function<void(const std::string&)>;

/// Runs every seed with up to run.jobs in flight and writes the report into
/// run.output_dir from the calling thread only.
ExperimentReport run_experiment(const ExperimentConfig& config, const ProgressFn& progress = {});

/// 8-bit binary PGM of a field, scaled linearly from [lo, hi] to [0, 255].
void write_pgm(const Eigen::Ref<const Vector>& field, FieldShape shape, double lo, double hi,
               const std::filesystem::path& path);

}  // namespace seqrc
