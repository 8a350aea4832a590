#pragma once

// Experiment configuration: a TOML subset (tables, dotted table headers,
// key = value with strings, integers, floats, booleans and flat arrays).

#include "seqrc/forecaster.hpp"
#include "seqrc/lorenz63.hpp"
#include "seqrc/metrics.hpp"
#include "seqrc/shallow_water.hpp"
#include "seqrc/vorticity.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace seqrc {

struct ConfigValue {
    using Array = std::vector<ConfigValue>;
    std::variant<bool, std::int64_t, double, std::string, Array> value;
    std::size_t line = 0;

    double as_double(const std::string& key) const;
    std::int64_t as_int(const std::string& key) const;
    bool as_bool(const std::string& key) const;
    const std::string& as_string(const std::string& key) const;
    const Array& as_array(const std::string& key) const;
};

/// Flat "table.key" -> value view of a parsed document.
struct ConfigDocument {
    std::map<std::string, ConfigValue> entries;
    std::string source;

    static ConfigDocument parse(const std::string& text, const std::string& source = "<config>");
    static ConfigDocument load(const std::filesystem::path& path);

    const ConfigValue* find(const std::string& key) const;
};

/// Parses a single value literal (used for environment overrides).
ConfigValue parse_config_value(const std::string& text, const std::string& where);

enum class DatasetKind { lorenz63, shallow_water, vorticity, file };

struct SweBump {
    double amplitude = 1.0;
    /// Fractions of the domain lengths.
    double center_x = 0.5;
    double center_y = 0.5;
    /// Metres.
    double width = 5e4;
};

struct DatasetConfig {
    DatasetKind kind = DatasetKind::lorenz63;
    std::filesystem::path path;
    double file_dt = 1.0;
    Lorenz63Params lorenz;
    SWEParams swe;
    SweBump bump;
    VorticityParams vorticity;
    /// Spin-up Lorenz63 steps derived from the run seed (0 keeps one trajectory).
    Index seed_discard_span = 0;
};

struct SplitConfig {
    Index n_train = 2000;
    Index gap = 0;
    /// Teacher-forced context before each forecast; -1 means the washout.
    Index warmup = -1;
    Index horizon = 1000;
};

struct MetricsConfig {
    double vpt_threshold = 0.3;
    SsimOptions ssim;
    double ssim_threshold = 0.6;
    /// 0 takes max - min of the training data.
    double dynamic_range = 0.0;
    std::vector<Index> snapshot_leads;
};

struct RunConfig {
    std::vector<std::uint64_t> seeds{0};
    std::filesystem::path output_dir = "results";
    Index jobs = 1;
};

struct ExperimentConfig {
    DatasetConfig dataset;
    ModelSpec model;
    TrainOptions train;
    SplitConfig split;
    MetricsConfig metrics;
    RunConfig run;
    /// Echo of the document after overrides, for the manifest.
    std::map<std::string, std::string> resolved;

    Index warmup() const;
    /// Rows of data each seed needs: n_train + gap + warmup + horizon.
    Index required_length() const;
    void validate() const;
};

/// Environment variables named SEQRC_<TABLE>_<KEY> (dots and dashes as
/// underscores, upper case) replace the matching key. A value that does not
/// parse as a literal is used as a bare string.
ExperimentConfig parse_config(const ConfigDocument& doc, bool apply_environment = true);
ExperimentConfig parse_config(const std::filesystem::path& path, bool apply_environment = true);

const char* to_string(DatasetKind kind);

}  // namespace seqrc
