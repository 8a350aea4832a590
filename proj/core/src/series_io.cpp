#include "seqrc/series_io.hpp"

#include "binary_io.hpp"
#include "seqrc/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace seqrc {

namespace {

constexpr std::string_view kSeriesMagic = "RCDS";
constexpr std::uint8_t kDtypeF64 = 1;

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, std::size_t line, const std::string& path)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw Error(ErrorCode::ParseError, path + ":" + std::to_string(line) + ": not a number: '" + std::string(text) + "'");
    return value;
}

std::vector<std::string> split_commas(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

std::vector<std::uint8_t> encode_series(const SeriesData& series)
{
    series.validate();
    detail::ByteWriter w;
    w.magic(kSeriesMagic);
    w.u16(kSeriesFormatVersion);
    w.u8(kDtypeF64);
    w.u64(static_cast<std::uint64_t>(series.steps()));
    w.u64(static_cast<std::uint64_t>(series.dim()));
    w.u8(series.shape ? 1 : 0);
    if (series.shape) {
        w.u64(static_cast<std::uint64_t>(series.shape->height));
        w.u64(static_cast<std::uint64_t>(series.shape->width));
    }
    w.f64(series.dt);
    w.u32(static_cast<std::uint32_t>(series.labels.size()));
    for (const auto& label : series.labels) w.string(label);
    w.raw_values(series.values);
    w.seal();
    return w.buffer();
}

SeriesData decode_series(const std::vector<std::uint8_t>& bytes)
{
    detail::ByteReader r = detail::open_sealed(bytes, kSeriesMagic, kSeriesFormatVersion, "series file");
    if (r.u8() != kDtypeF64) throw Error(ErrorCode::FormatVersionMismatch, "unsupported series dtype tag");
    const auto steps = r.u64();
    const auto dim = r.u64();
    SeriesData s;
    if (r.u8() != 0) {
        FieldShape shape;
        shape.height = static_cast<Index>(r.u64());
        shape.width = static_cast<Index>(r.u64());
        s.shape = shape;
    }
    s.dt = r.f64();
    const auto label_count = r.u32();
    for (std::uint32_t i = 0; i < label_count; ++i) s.labels.push_back(r.string());
    if (dim != 0 && steps > r.remaining() / 8 / dim)
        throw Error(ErrorCode::FormatVersionMismatch, "series header exceeds file size");
    s.values.resize(static_cast<Index>(steps), static_cast<Index>(dim));
    for (Index t = 0; t < s.values.rows(); ++t)
        for (Index c = 0; c < s.values.cols(); ++c) s.values(t, c) = r.f64();
    if (r.remaining() != 0) throw Error(ErrorCode::FormatVersionMismatch, "trailing bytes after series payload");
    s.validate();
    return s;
}

void save_series(const SeriesData& series, const std::filesystem::path& path)
{
    detail::write_file(path, encode_series(series));
}

SeriesData load_series(const std::filesystem::path& path)
{
    return decode_series(detail::read_file(path));
}

void write_csv(const SeriesData& series, const std::filesystem::path& path)
{
    series.validate();
    if (series.dim() > kMaxCsvDim)
        throw Error(ErrorCode::InvalidSpec, "CSV export supports at most " + std::to_string(kMaxCsvDim) +
                                                " components, series has " + std::to_string(series.dim()));
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    const auto labels = series.labels.empty() ? default_labels(series.dim()) : series.labels;
    out << "# dt=" << format_double(series.dt) << '\n';
    for (std::size_t i = 0; i < labels.size(); ++i) out << (i ? "," : "") << labels[i];
    out << '\n';
    for (Index t = 0; t < series.steps(); ++t) {
        for (Index c = 0; c < series.dim(); ++c) out << (c ? "," : "") << format_double(series.values(t, c));
        out << '\n';
    }
    if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

SeriesData read_csv(const std::filesystem::path& path, double default_dt)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    const std::string name = path.string();
    SeriesData s;
    s.dt = default_dt;
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            const auto pos = line.find("dt=");
            if (pos != std::string::npos) s.dt = parse_double(std::string_view(line).substr(pos + 3), line_no, name);
            continue;
        }
        auto cells = split_commas(line);
        if (!have_header) {
            s.labels = std::move(cells);
            if (static_cast<Index>(s.labels.size()) > kMaxCsvDim)
                throw Error(ErrorCode::InvalidSpec, "CSV import supports at most " + std::to_string(kMaxCsvDim) +
                                                        " columns");
            have_header = true;
            continue;
        }
        if (cells.size() != s.labels.size())
            throw Error(ErrorCode::ParseError, name + ":" + std::to_string(line_no) + ": expected " +
                                                   std::to_string(s.labels.size()) + " columns, found " +
                                                   std::to_string(cells.size()));
        for (const auto& cell : cells) values.push_back(parse_double(cell, line_no, name));
    }
    if (!have_header) throw Error(ErrorCode::ParseError, name + ": missing header row");
    const auto dim = static_cast<Index>(s.labels.size());
    const auto steps = static_cast<Index>(values.size()) / dim;
    s.values = Eigen::Map<const RowMatrix>(values.data(), steps, dim);
    s.validate();
    return s;
}

SeriesData load_any(const std::filesystem::path& path, double default_dt)
{
    return path.extension() == ".csv" ? read_csv(path, default_dt) : load_series(path);
}

void save_any(const SeriesData& series, const std::filesystem::path& path)
{
    if (path.extension() == ".csv")
        write_csv(series, path);
    else
        save_series(series, path);
}

SeriesSplit split_series(const SeriesData& series, Index n_train, Index gap)
{
    if (n_train < 1 || gap < 0) throw Error(ErrorCode::InvalidSpec, "split needs n_train >= 1 and gap >= 0");
    if (n_train + gap >= series.steps())
        throw Error(ErrorCode::SeriesTooShort, "series of length " + std::to_string(series.steps()) +
                                                   " cannot hold n_train=" + std::to_string(n_train) +
                                                   " plus gap=" + std::to_string(gap) + " and a test segment");
    SeriesSplit split;
    split.train = series.slice(0, n_train);
    split.test = series.slice(n_train + gap, series.steps() - n_train - gap);
    return split;
}

}  // namespace seqrc
