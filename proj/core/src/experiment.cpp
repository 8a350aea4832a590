#include "seqrc/experiment.hpp"

#include "binary_io.hpp"
#include "seqrc/error.hpp"
#include "seqrc/series_io.hpp"
#include "seqrc/version.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

namespace seqrc {

namespace {

using Clock = std::chrono::steady_clock;

bool dataset_depends_on_seed(const ExperimentConfig& config)
{
    return config.dataset.kind == DatasetKind::lorenz63 && config.dataset.seed_discard_span > 0;
}

std::string fmt(double v)
{
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

std::string brief(double v)
{
    std::ostringstream out;
    out << std::setprecision(4) << v;
    return out.str();
}

// Tracks every file written into the output directory for the manifest.
class ArtifactWriter {
public:
    explicit ArtifactWriter(std::filesystem::path root) : root_(std::move(root))
    {
        std::error_code ec;
        std::filesystem::create_directories(root_, ec);
        if (ec) throw Error(ErrorCode::IoError, "cannot create " + root_.string() + ": " + ec.message());
    }

    std::filesystem::path path(const std::string& relative)
    {
        auto p = root_ / relative;
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
        if (ec) throw Error(ErrorCode::IoError, "cannot create " + p.parent_path().string() + ": " + ec.message());
        return p;
    }

    void text(const std::string& relative, const std::string& content)
    {
        const auto p = path(relative);
        detail::write_file(p, std::vector<std::uint8_t>(content.begin(), content.end()));
        record(relative);
    }

    /// Call after writing root/relative by other means.
    void record(const std::string& relative)
    {
        const auto bytes = detail::read_file(root_ / relative);
        files_.push_back({relative, bytes.size(), detail::crc32_of(bytes.data(), bytes.size())});
    }

    struct Entry {
        std::string path;
        std::size_t bytes;
        std::uint32_t crc32;
    };
    const std::vector<Entry>& files() const noexcept { return files_; }

private:
    std::filesystem::path root_;
    std::vector<Entry> files_;
};

std::string seed_dir(std::uint64_t seed)
{
    return "seed_" + std::to_string(seed);
}

void write_seed(ArtifactWriter& out, const SeedOutcome& r)
{
    const std::string dir = seed_dir(r.seed) + "/";
    if (r.error) {
        out.text(dir + "FAILED", *r.error + "\n");
        return;
    }
    if (r.vpt) {
        write_nrmse_csv(r.nrmse, out.path(dir + "nrmse.csv"));
        out.record(dir + "nrmse.csv");
    }
    if (r.truth_map) {
        write_return_map_csv(*r.truth_map, out.path(dir + "return_map_truth.csv"));
        out.record(dir + "return_map_truth.csv");
    }
    if (r.predicted_map) {
        write_return_map_csv(*r.predicted_map, out.path(dir + "return_map_pred.csv"));
        out.record(dir + "return_map_pred.csv");
    }
    if (r.curves) {
        write_field_curves_csv(*r.curves, out.path(dir + "field_curves.csv"));
        out.record(dir + "field_curves.csv");
    }
    for (const auto& snap : r.snapshots) {
        const double lo = std::min(snap.predicted.minCoeff(), snap.truth.minCoeff());
        const double hi = std::max(snap.predicted.maxCoeff(), snap.truth.maxCoeff());
        const std::string stem = dir + "lead_" + std::to_string(snap.lead);
        write_pgm(snap.predicted, *r.shape, lo, hi, out.path(stem + "_pred.pgm"));
        out.record(stem + "_pred.pgm");
        write_pgm(snap.truth, *r.shape, lo, hi, out.path(stem + "_truth.pgm"));
        out.record(stem + "_truth.pgm");
        out.text(stem + "_scale.txt", "min " + fmt(lo) + "\nmax " + fmt(hi) + "\n");
    }
}

std::string summary_csv(const std::vector<SeedOutcome>& seeds, bool fields)
{
    const std::string metric = fields ? "ssim_horizon" : "vpt";
    std::ostringstream out;
    out << std::setprecision(17);
    out << "seed,status," << metric << '\n';
    std::vector<double> values;
    for (const auto& r : seeds) {
        out << r.seed << ',' << (r.error ? "failed" : "ok") << ',';
        if (!r.error) {
            const double v = fields ? static_cast<double>(r.ssim_horizon.value_or(0)) : r.vpt.value_or(0.0);
            values.push_back(v);
            out << v;
        }
        out << '\n';
    }
    if (!values.empty()) {
        double sum = 0.0;
        for (double v : values) sum += v;
        out << "mean,summary," << sum / static_cast<double>(values.size()) << '\n';
        out << "min,summary," << *std::min_element(values.begin(), values.end()) << '\n';
        out << "max,summary," << *std::max_element(values.begin(), values.end()) << '\n';
    }
    return out.str();
}

}  // namespace

SeriesData make_dataset(const ExperimentConfig& config, std::uint64_t seed)
{
    const Index rows = config.required_length();
    const DatasetConfig& d = config.dataset;
    switch (d.kind) {
    case DatasetKind::lorenz63: {
        Lorenz63Params p = d.lorenz;
        p.n_steps = rows;
        p.discard += static_cast<Index>(seed) * d.seed_discard_span;
        return lorenz63_generate(p);
    }
    case DatasetKind::shallow_water: {
        SWEParams p = d.swe;
        p.n_steps = (rows - 1) * p.output_stride;
        const auto init = swe_gaussian_bump(p, d.bump.amplitude, d.bump.center_x * p.lx, d.bump.center_y * p.ly,
                                            d.bump.width);
        return swe_simulate(p, init);
    }
    case DatasetKind::vorticity: {
        VorticityParams p = d.vorticity;
        p.n_steps = (rows - 1) * p.output_stride;
        return vorticity_simulate(p, grf_initial(p));
    }
    case DatasetKind::file: {
        SeriesData s = load_any(d.path, d.file_dt);
        if (s.steps() < rows)
            throw Error(ErrorCode::SeriesTooShort, d.path.string() + " has " + std::to_string(s.steps()) +
                                                       " rows, the split needs " + std::to_string(rows));
        return s;
    }
    }
    throw Error(ErrorCode::InvalidSpec, "unknown dataset kind");
}

SeedOutcome run_seed(const ExperimentConfig& config, const SeriesData& data, std::uint64_t seed)
{
    SeedOutcome r;
    r.seed = seed;
    ModelSpec spec = config.model;
    params_of(spec).seed = seed;
    std::visit([&](auto& s) { s.input_dim = data.dim(); }, spec);

    const auto split = split_series(data, config.split.n_train, config.split.gap);
    const auto t0 = Clock::now();
    const TrainedModel model = train(spec, split.train, config.train);
    r.train_seconds = std::chrono::duration<double>(Clock::now() - t0).count();

    const Index warmup = config.warmup();
    const Index horizon = config.split.horizon;
    if (split.test.steps() < warmup + horizon)
        throw Error(ErrorCode::SeriesTooShort, "test segment of " + std::to_string(split.test.steps()) +
                                                   " rows cannot hold warmup " + std::to_string(warmup) +
                                                   " plus horizon " + std::to_string(horizon));
    const SeriesData context = split.test.slice(0, warmup);
    const SeriesData truth = split.test.slice(warmup, horizon);
    const ForecastResult forecast = rollout(model, context, horizon);
    const RowMatrix& pred = forecast.prediction.values;

    if (data.shape) {
        r.shape = data.shape;
        double range = config.metrics.dynamic_range;
        if (range == 0.0) range = split.train.values.maxCoeff() - split.train.values.minCoeff();
        if (!(range > 0.0)) range = 1.0;
        r.curves = field_curves(pred, truth.values, *data.shape, range, config.metrics.ssim);
        r.ssim_horizon = ssim_horizon(r.curves->ssim, config.metrics.ssim_threshold);
        for (Index lead : config.metrics.snapshot_leads) {
            if (lead > horizon) continue;
            r.snapshots.push_back({lead, pred.row(lead - 1).transpose(), truth.values.row(lead - 1).transpose()});
        }
    } else {
        r.nrmse = nrmse_curve(pred, truth.values, model.normalization.std);
        r.vpt = vpt_from_curve(r.nrmse, config.metrics.vpt_threshold, data.dt);
        const auto& labels = data.labels;
        const bool has_z = data.dim() == 3 && (labels.empty() || labels[2] == "z");
        if (has_z) {
            r.truth_map = return_map(truth.values.col(2));
            r.predicted_map = return_map(pred.col(2));
        }
    }
    return r;
}

std::size_t ExperimentReport::failures() const
{
    return static_cast<std::size_t>(
        std::count_if(seeds.begin(), seeds.end(), [](const SeedOutcome& s) { return s.error.has_value(); }));
}

ExperimentReport run_experiment(const ExperimentConfig& config, const ProgressFn& progress)
{
    config.validate();
    const auto start = Clock::now();
    auto say = [&](const std::string& msg) {
        if (progress) progress(msg);
    };

    std::optional<SeriesData> shared;
    if (!dataset_depends_on_seed(config)) {
        say(std::string("generating ") + to_string(config.dataset.kind) + " data");
        shared = make_dataset(config, 0);
    }

    ExperimentReport report;
    report.seeds.resize(config.run.seeds.size());
    std::atomic<std::size_t> next{0};
    std::mutex progress_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < config.run.seeds.size(); i = next++) {
            const auto seed = config.run.seeds[i];
            SeedOutcome outcome;
            try {
                const SeriesData data = shared ? *shared : make_dataset(config, seed);
                outcome = run_seed(config, data, seed);
            } catch (const std::exception& e) {
                outcome = SeedOutcome{};
                outcome.seed = seed;
                outcome.error = e.what();
            }
            {
                std::lock_guard lock(progress_mutex);
                if (outcome.error)
                    say("seed " + std::to_string(seed) + " failed: " + *outcome.error);
                else if (outcome.vpt)
                    say("seed " + std::to_string(seed) + " vpt " + brief(*outcome.vpt));
                else if (outcome.ssim_horizon)
                    say("seed " + std::to_string(seed) + " ssim horizon " + std::to_string(*outcome.ssim_horizon));
            }
            report.seeds[i] = std::move(outcome);
        }
    };
    const auto jobs = static_cast<std::size_t>(std::min<Index>(config.run.jobs, static_cast<Index>(config.run.seeds.size())));
    std::vector<std::thread> threads;
    for (std::size_t j = 1; j < jobs; ++j) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();

    // Everything below runs on this thread only.
    ArtifactWriter out(config.run.output_dir);
    for (const auto& seed : report.seeds) write_seed(out, seed);

    ModelSpec spec = config.model;
    if (shared) std::visit([&](auto& s) { s.input_dim = shared->dim(); }, spec);
    const bool fields = shared ? shared->shape.has_value() : false;
    if (input_dim_of(spec) > 0) {
        report.cost = cost_report(spec);
        out.text("cost_report.txt", format_cost_report(spec, report.cost));
    }
    out.text("summary.csv", summary_csv(report.seeds, fields));

    report.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    nlohmann::ordered_json manifest;
    manifest["seqrc_version"] = kVersion;
    manifest["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION);
    manifest["config"] = config.resolved;
    manifest["dataset"] = to_string(config.dataset.kind);
    manifest["seeds"] = config.run.seeds;
    auto& timing = manifest["wall_clock"];
    timing["total_seconds"] = report.wall_seconds;
    for (const auto& s : report.seeds) timing["train_seconds"][std::to_string(s.seed)] = s.train_seconds;
    manifest["failures"] = report.failures();
    auto& files = manifest["files"];
    files = nlohmann::json::array();
    for (const auto& f : out.files()) {
        std::ostringstream crc;
        crc << std::hex << std::setw(8) << std::setfill('0') << f.crc32;
        files.push_back({{"path", f.path}, {"bytes", f.bytes}, {"crc32", crc.str()}});
    }
    report.manifest = config.run.output_dir / "manifest.json";
    const std::string text = manifest.dump(2) + "\n";
    detail::write_file(report.manifest, std::vector<std::uint8_t>(text.begin(), text.end()));
    return report;
}

void write_pgm(const Eigen::Ref<const Vector>& field, FieldShape shape, double lo, double hi,
               const std::filesystem::path& path)
{
    if (field.size() != shape.height * shape.width)
        throw Error(ErrorCode::DimensionMismatch, "field does not match its shape");
    std::string header = "P5\n" + std::to_string(shape.width) + " " + std::to_string(shape.height) + "\n255\n";
    std::vector<std::uint8_t> bytes(header.begin(), header.end());
    const double span = hi > lo ? hi - lo : 1.0;
    for (Index i = 0; i < field.size(); ++i) {
        const double scaled = std::clamp((field[i] - lo) / span, 0.0, 1.0) * 255.0;
        bytes.push_back(static_cast<std::uint8_t>(std::lround(scaled)));
    }
    detail::write_file(path, bytes);
}

}  // namespace seqrc
