#pragma once

#include "seqrc/series.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace seqrc {

inline constexpr std::uint16_t kSeriesFormatVersion = 1;
/// CSV import/export is limited to low-dimensional series.
inline constexpr Index kMaxCsvDim = 16;

/// "RCDS" little-endian binary: magic, u16 version, u8 dtype (1 = f64),
/// u64 T, u64 D, u8 has_shape [u64 h, u64 w], f64 dt, u32 label count,
/// labels (u32 length + bytes), T*D row-major f64 payload, CRC-32 footer.
void save_series(const SeriesData& series, const std::filesystem::path& path);
SeriesData load_series(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_series(const SeriesData& series);
SeriesData decode_series(const std::vector<std::uint8_t>& bytes);

/// Comma-separated, header row of labels, one time step per line. A leading
/// "# dt=<value>" comment carries the step size.
void write_csv(const SeriesData& series, const std::filesystem::path& path);
SeriesData read_csv(const std::filesystem::path& path, double default_dt = 1.0);

/// Dispatch on extension: ".csv" is CSV, anything else RCDS.
SeriesData load_any(const std::filesystem::path& path, double default_dt = 1.0);
void save_any(const SeriesData& series, const std::filesystem::path& path);

struct SeriesSplit {
    SeriesData train;
    SeriesData test;
};

/// Contiguous prefix of n_train rows, then the rest after skipping `gap` rows.
SeriesSplit split_series(const SeriesData& series, Index n_train, Index gap);

}  // namespace seqrc
