// Acceptance suite: one PASS/FAIL line per criterion.
//
// Exit status is nonzero on any failure, except criteria named with
// `--expect-fail 3,4`: those still print FAIL but do not fail the run.

#include "seqrc/config.hpp"
#include "seqrc/cost.hpp"
#include "seqrc/error.hpp"
#include "seqrc/experiment.hpp"
#include "seqrc/forecaster.hpp"
#include "seqrc/lorenz63.hpp"
#include "seqrc/metrics.hpp"
#include "seqrc/readout.hpp"
#include "seqrc/reservoir.hpp"
#include "seqrc/series_io.hpp"
#include "seqrc/shallow_water.hpp"
#include "seqrc/vorticity.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace seqrc;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kFlopBand = 0.005;
constexpr double kRcFlopTarget = 67'300.0;
constexpr double kMinMeanVpt = 4.0;
constexpr double kVptSlack = 0.5;
constexpr double kReturnMapDistance = 3.0;
constexpr double kRidgeTolerance = 1e-8;
constexpr double kRadiusRelative = 1e-6;
constexpr double kRadiusSelfConsistency = 1e-8;
constexpr double kMassRelative = 1e-8;
constexpr double kShearDecayRelative = 1e-4;
constexpr double kMeanDrift = 1e-12;
constexpr double kEnstrophyRoundoff = 1e-12;
constexpr Index kMinSsimHorizon = 20;
constexpr double kSsimOracleTolerance = 1e-10;

const fs::path kSource = SEQRC_SOURCE_DIR;

struct Verdict {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* pattern, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

Verdict parameter_counts()
{
    struct Golden {
        const char* name;
        ModelSpec spec;
        std::uint64_t trainable, fixed;
    };
    const std::vector<Golden> goldens{
        {"RC(3,256)", ReservoirSpec{3, 256, {}}, 780, 66'304},
        {"SeqRC(3,8x32)", SequentialSpec{3, 8, 32, {}}, 780, 8'288},
        {"SeqRC(4096,8x64)", SequentialSpec{4096, 8, 64, {}}, 18'878'464, 294'912},
    };
    Verdict v;
    for (const auto& g : goldens) {
        const auto c = count_parameters(g.spec);
        const bool ok = c.trainable == g.trainable && c.fixed == g.fixed;
        v.pass = v.pass && ok;
        v.detail += fmt("%s %llu/%llu%s ", g.name, static_cast<unsigned long long>(c.trainable),
                        static_cast<unsigned long long>(c.fixed), ok ? "" : " (mismatch)");
    }
    return v;
}

Verdict flop_counts()
{
    const auto seq = estimate_flops(SequentialSpec{3, 8, 32, {}});
    const auto rc = estimate_flops(ReservoirSpec{3, 256, {}});
    const double rel = std::abs(static_cast<double>(rc) / kRcFlopTarget - 1.0);
    Verdict v;
    v.pass = seq == 9'068 && rel <= kFlopBand;
    v.detail = fmt("SeqRC %llu ops (%.4f MFLOPs), RC %llu ops (%.2f%% from 0.0673 MFLOPs)",
                   static_cast<unsigned long long>(seq), static_cast<double>(seq) * 1e-6,
                   static_cast<unsigned long long>(rc), 100.0 * rel);
    return v;
}

struct LorenzRuns {
    std::vector<SeedOutcome> seqrc, rc;
    std::string error;
};

std::vector<SeedOutcome> run_all(const ExperimentConfig& config)
{
    std::vector<SeedOutcome> out;
    for (auto seed : config.run.seeds) out.push_back(run_seed(config, make_dataset(config, seed), seed));
    return out;
}

LorenzRuns lorenz_runs()
{
    LorenzRuns runs;
    try {
        runs.seqrc = run_all(parse_config(kSource / "configs/lorenz63_seqrc.toml", false));
        runs.rc = run_all(parse_config(kSource / "configs/lorenz63_rc.toml", false));
    } catch (const std::exception& e) {
        runs.error = e.what();
    }
    return runs;
}

std::optional<double> mean_vpt(const std::vector<SeedOutcome>& outcomes)
{
    double sum = 0.0;
    for (const auto& o : outcomes) {
        if (o.error || !o.vpt) return std::nullopt;
        sum += *o.vpt;
    }
    return sum / static_cast<double>(outcomes.size());
}

Verdict lorenz_forecast(const LorenzRuns& runs)
{
    if (!runs.error.empty()) return {false, runs.error};
    const auto seq = mean_vpt(runs.seqrc), rc = mean_vpt(runs.rc);
    if (!seq || !rc || runs.seqrc.size() < 10 || runs.rc.size() < 10) return {false, "a seed failed or fewer than 10 seeds"};
    Verdict v;
    const bool floor = *seq >= kMinMeanVpt && *rc >= kMinMeanVpt;
    const bool order = *seq >= *rc - kVptSlack;
    v.pass = floor && order;
    v.detail = fmt("mean VPT over %zu seeds: SeqRC %.2f, RC %.2f (floor %.1f %s; SeqRC >= RC - %.1f %s)",
                   runs.seqrc.size(), *seq, *rc, kMinMeanVpt, floor ? "met" : "missed", kVptSlack,
                   order ? "met" : "missed");
    return v;
}

Verdict return_map_fidelity(const LorenzRuns& runs)
{
    if (!runs.error.empty()) return {false, runs.error};
    Lorenz63Params p;
    p.discard = 1000;
    p.n_steps = 200'000;
    const auto reference = oracle::maxima_pairs(lorenz63_generate(p).values.col(2));

    Verdict v;
    double worst = 0.0;
    std::size_t pairs = 0;
    int off_seeds = 0;
    for (const auto& o : runs.seqrc) {
        if (!o.predicted_map || o.predicted_map->pairs.empty()) {
            v.pass = false;
            v.detail = fmt("seed %llu produced no z-maxima pairs; ", static_cast<unsigned long long>(o.seed));
            continue;
        }
        double seed_worst = 0.0;
        for (const auto& [a, b] : o.predicted_map->pairs) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& [ra, rb] : reference) best = std::min(best, std::hypot(a - ra, b - rb));
            seed_worst = std::max(seed_worst, best);
            ++pairs;
        }
        off_seeds += seed_worst > kReturnMapDistance;
        worst = std::max(worst, seed_worst);
    }
    v.pass = v.pass && worst <= kReturnMapDistance;
    v.detail += fmt("%zu predicted pairs over %zu seeds, largest distance to reference %.3f (limit %.1f), %d seeds off the attractor",
                    pairs, runs.seqrc.size(), worst, kReturnMapDistance, off_seeds);
    return v;
}

Verdict ridge_oracle()
{
    std::mt19937_64 gen(7);
    std::normal_distribution<double> normal;
    RowMatrix r(50, 10), y(50, 2);
    for (Index i = 0; i < r.size(); ++i) r.data()[i] = normal(gen);
    for (Index i = 0; i < y.size(); ++i) y.data()[i] = normal(gen);
    const auto fitted = fit_ridge(r, y, 1e-3);
    const double err = (fitted.weights - oracle::ridge_augmented(r, y, 1e-3)).cwiseAbs().maxCoeff();
    return {err <= kRidgeTolerance, fmt("max |W - W_oracle| = %.2e (limit %.0e)", err, kRidgeTolerance)};
}

Verdict spectral_radius()
{
    Verdict v;
    double worst = 0.0;
    int built = 0;
    for (Index n : {1, 4, 8, 16, 32, 64})
        for (double sparsity : {0.0, 0.5, 0.9})
            for (std::uint64_t seed = 0; seed < 3; ++seed) {
                ReservoirParams params;
                params.sparsity = sparsity;
                params.spectral_radius = 0.9 + 0.1 * static_cast<double>(seed);
                RandomStream rng(seed, 1);
                ReservoirMatrix m;
                try {
                    m = build_reservoir_matrix(n, params, rng);
                } catch (const Error& e) {
                    // a very sparse tiny draw can be nilpotent; that is rejected, not mis-scaled
                    if (e.code() == ErrorCode::EstimatedRadiusZero) continue;
                    throw;
                }
                worst = std::max(worst, std::abs(exact_spectral_radius(m.to_dense()) / params.spectral_radius - 1.0));
                ++built;
            }
    const bool small_ok = worst <= kRadiusRelative;

    ReservoirParams params;
    RandomStream rng(3, 1);
    const Matrix w = build_reservoir_matrix(256, params, rng).to_dense();
    const auto converged = power_iteration_radius(w);
    RadiusOptions fixed;
    fixed.tolerance = 0.0;
    fixed.max_iterations = converged.iterations;
    const double once = power_iteration_radius(w, fixed).radius;
    fixed.max_iterations *= 2;
    const double twice = power_iteration_radius(w, fixed).radius;
    const double change = std::abs(twice - once);
    const bool large_ok = converged.converged && change < kRadiusSelfConsistency;

    v.pass = small_ok && large_ok;
    v.detail = fmt("%d reservoirs N<=64: worst relative error %.1e; N=256: %lld vs %lld iterations differ by %.1e", built,
                   worst, static_cast<long long>(converged.iterations),
                   static_cast<long long>(2 * converged.iterations), change);
    return v;
}

Verdict swe_mass()
{
    SWEParams p;
    p.nx = p.ny = 64;
    auto s = swe_gaussian_bump(p, 1.0, 0.5, 0.5, 5e4);
    const double before = s.eta.sum();
    for (int k = 0; k < 1000; ++k) swe_step(p, s);
    const double rel = std::abs(s.eta.sum() - before) / std::abs(before);
    return {rel <= kMassRelative, fmt("relative change in sum(eta) after 1000 steps: %.2e (limit %.0e)", rel, kMassRelative)};
}

Verdict vorticity_properties()
{
    VorticityParams p;
    p.n = 64;
    p.forcing = false;
    VorticityField shear(p.n * p.n);
    for (Index r = 0; r < p.n; ++r)
        for (Index c = 0; c < p.n; ++c) shear[r * p.n + c] = std::sin(2.0 * M_PI * static_cast<double>(r) / static_cast<double>(p.n));
    VorticitySolver decay(p, shear);
    for (int k = 0; k < 100; ++k) decay.step();
    const double expected = std::exp(-4.0 * M_PI * M_PI * p.viscosity() * decay.time());
    const double decay_err = (decay.field() - expected * shear).cwiseAbs().maxCoeff() / expected;

    auto forced = p;
    forced.forcing = true;
    const auto w0 = grf_initial(forced);
    VorticitySolver mean_run(forced, w0);
    for (int k = 0; k < 300; ++k) mean_run.step();
    const double drift = std::abs(field_mean(mean_run.field()) - field_mean(w0));

    VorticitySolver free_run(p, grf_initial(p));
    double previous = enstrophy(free_run.field());
    int increases = 0;
    for (int k = 0; k < 500; ++k) {
        free_run.step();
        const double now = enstrophy(free_run.field());
        if (now > previous * (1.0 + kEnstrophyRoundoff)) ++increases;
        previous = now;
    }
    Verdict v;
    v.pass = decay_err <= kShearDecayRelative && drift < kMeanDrift && increases == 0;
    v.detail = fmt("shear decay error %.1e, mean drift %.1e, enstrophy increases in 500 steps: %d", decay_err, drift,
                   increases);
    return v;
}

Verdict vorticity_forecast()
{
    ExperimentConfig seq_cfg, rc_cfg;
    std::vector<SeedOutcome> seq, rc;
    try {
        seq_cfg = parse_config(kSource / "configs/vorticity_seqrc.toml", false);
        rc_cfg = parse_config(kSource / "configs/vorticity_rc.toml", false);
        // Field data do not depend on the seed, so both models share one simulation.
        const auto data = make_dataset(seq_cfg, seq_cfg.run.seeds.front());
        for (auto seed : seq_cfg.run.seeds) seq.push_back(run_seed(seq_cfg, data, seed));
        for (auto seed : rc_cfg.run.seeds) rc.push_back(run_seed(rc_cfg, data, seed));
    } catch (const std::exception& e) {
        return {false, e.what()};
    }
    if (seq.size() < 3 || seq.size() != rc.size()) return {false, "need at least 3 matching seeds"};

    Verdict v;
    int wins = 0;
    bool floor = true;
    std::ostringstream detail;
    detail << "SSIM horizon SeqRC/RC per seed:";
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (seq[i].error || rc[i].error || !seq[i].ssim_horizon || !rc[i].ssim_horizon || !seq[i].curves ||
            !rc[i].curves)
            return {false, "seed " + std::to_string(seq[i].seed) + " failed"};
        const Index hs = *seq[i].ssim_horizon, hr = *rc[i].ssim_horizon;
        wins += hs >= hr;
        floor = floor && hs >= kMinSsimHorizon && hr >= kMinSsimHorizon;
        detail << ' ' << hs << '/' << hr;
        const auto last = seq[i].curves->rmse.size() - 1;
        detail << fmt(" (RMSE@%lld %.1e/%.1e)", static_cast<long long>(last + 1), seq[i].curves->rmse[last],
                      rc[i].curves->rmse[last]);
    }
    const int needed = static_cast<int>(seq.size()) - static_cast<int>(seq.size()) / 3;
    v.pass = wins >= needed && floor;
    detail << "; SeqRC >= RC in " << wins << '/' << seq.size();
    v.detail = detail.str();
    return v;
}

Verdict metric_examples()
{
    const Index n = 32;
    const FieldShape shape{n, n};
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    RowMatrix a(n, n), b(n, n);
    for (Index i = 0; i < a.size(); ++i) a.data()[i] = u(gen);
    for (Index i = 0; i < b.size(); ++i) b.data()[i] = 0.6 * a.data()[i] + 0.4 * u(gen);
    const Vector fa = Eigen::Map<const Vector>(a.data(), a.size());
    const Vector fb = Eigen::Map<const Vector>(b.data(), b.size());

    const double ssim_err = std::abs(ssim(fa, fb, shape, 2.0) - oracle::ssim_direct(a, b, 2.0));
    const bool identical = ssim(fa, fa, shape, 2.0) == 1.0;

    // pred all zero, truth all one, max value 1: MSE = 1 so PSNR = 0 dB
    const auto zero_db = psnr(Vector::Zero(16), Vector::Ones(16), 1.0);
    const bool psnr_ok = zero_db && *zero_db == 0.0;

    // NRMSE rises by 0.01 per step from 0.01; the first value >= 0.3 is at lead 30
    Vector curve(100);
    for (Index k = 0; k < 100; ++k) curve[k] = 0.01 * static_cast<double>(k + 1);
    const double crossing = vpt_from_curve(curve, 0.3, 0.01);
    const bool vpt_ok = std::abs(crossing - 0.3) < 1e-15;

    Verdict v;
    v.pass = ssim_err <= kSsimOracleTolerance && identical && psnr_ok && vpt_ok;
    v.detail = fmt("SSIM vs oracle %.1e, identical SSIM %s, PSNR %s dB, VPT crossing %.4f", ssim_err,
                   identical ? "== 1" : "!= 1", zero_db ? fmt("%.1f", *zero_db).c_str() : "none", crossing);
    return v;
}

template <class Fn>
std::string error_of(Fn&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return std::string(to_string(e.code()));
    }
    return "no error";
}

void rewrite(const fs::path& path, const std::function<void(std::vector<char>&)>& edit)
{
    std::ifstream in(path, std::ios::binary);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    edit(bytes);
    std::ofstream(path, std::ios::binary | std::ios::trunc).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Verdict persistence()
{
    const fs::path dir = fs::temp_directory_path() / ("seqrc_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    Verdict v;
    std::vector<std::string> failures;
    try {
        Lorenz63Params p;
        p.discard = 1000;
        p.n_steps = 900;
        const auto data = lorenz63_generate(p);
        ReservoirParams rp;
        rp.input_scale = 0.3;
        for (ModelSpec spec : {ModelSpec(SequentialSpec{3, 8, 32, rp}), ModelSpec(ReservoirSpec{3, 256, rp})}) {
            const auto model = train(spec, data.slice(0, 700));
            save_model(model, dir / "m.srcm");
            const auto loaded = load_model(dir / "m.srcm");
            const auto a = rollout(model, data.slice(700, 100), 100);
            const auto b = rollout(loaded, data.slice(700, 100), 100);
            if (encode_model(loaded) != encode_model(model) || a.prediction.values != b.prediction.values)
                failures.push_back("model round trip");
        }
        save_series(data, dir / "s.rcds");
        const auto back = load_series(dir / "s.rcds");
        if (back.values != data.values || back.dt != data.dt || back.labels != data.labels)
            failures.push_back("series round trip");

        const auto model = train(SequentialSpec{3, 8, 32, rp}, data.slice(0, 700));
        struct Case {
            const char* what;
            fs::path file;
            std::function<void(std::vector<char>&)> edit;
            std::function<void()> load;
            ErrorCode expected;
        };
        const auto load_m = [&] { load_model(dir / "m.srcm"); };
        const auto load_s = [&] { load_series(dir / "s.rcds"); };
        const std::vector<Case> cases{
            {"truncated model", "m.srcm", [](auto& b) { b.resize(b.size() / 2); }, load_m, ErrorCode::ChecksumMismatch},
            {"flipped model byte", "m.srcm", [](auto& b) { b[b.size() / 2] ^= 0x10; }, load_m, ErrorCode::ChecksumMismatch},
            {"future model version", "m.srcm", [](auto& b) { b[4] = 9; }, load_m, ErrorCode::FormatVersionMismatch},
            {"truncated series", "s.rcds", [](auto& b) { b.resize(b.size() - 9); }, load_s, ErrorCode::ChecksumMismatch},
            {"flipped series byte", "s.rcds", [](auto& b) { b[b.size() / 2] ^= 0x01; }, load_s, ErrorCode::ChecksumMismatch},
            {"future series version", "s.rcds", [](auto& b) { b[4] = 9; }, load_s, ErrorCode::FormatVersionMismatch},
        };
        for (const auto& c : cases) {
            if (c.file == "m.srcm") save_model(model, dir / c.file);
            else save_series(data, dir / c.file);
            rewrite(dir / c.file, c.edit);
            const auto got = error_of(c.load);
            if (got != to_string(c.expected)) failures.push_back(std::string(c.what) + " gave " + got);
        }
        const auto missing = error_of([&] { load_model(dir / "absent.srcm"); });
        if (missing != to_string(ErrorCode::IoError)) failures.push_back("missing file gave " + missing);
    } catch (const std::exception& e) {
        failures.push_back(e.what());
    }
    fs::remove_all(dir);
    v.pass = failures.empty();
    if (v.pass) {
        v.detail = "model and series round trips bitwise; 7 corrupted or missing files rejected with the expected error";
    } else {
        for (const auto& f : failures) v.detail += f + "; ";
    }
    return v;
}

std::set<int> parse_ids(const std::string& list)
{
    std::set<int> ids;
    std::istringstream in(list);
    for (std::string item; std::getline(in, item, ',');) ids.insert(std::stoi(item));
    return ids;
}

}  // namespace

int main(int argc, char** argv)
{
    std::set<int> expected_red;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--expect-fail" && i + 1 < argc) {
            expected_red = parse_ids(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--expect-fail ID[,ID...]]\n", argv[0]);
            return 2;
        }
    }

    int failed = 0, unexpected = 0;
    const auto report = [&](int id, const char* name, const std::function<Verdict()>& check) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] %2d %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !v.pass;
        if (!v.pass && !expected_red.contains(id)) ++unexpected;
        if (v.pass && expected_red.contains(id)) std::printf("     note: %d is listed as expected to fail but passed\n", id);
    };

    report(1, "parameter counts", parameter_counts);
    report(2, "FLOP counts", flop_counts);
    LorenzRuns lorenz;
    report(3, "Lorenz63 forecasting", [&] {
        lorenz = lorenz_runs();
        return lorenz_forecast(lorenz);
    });
    report(4, "return-map fidelity", [&] { return return_map_fidelity(lorenz); });
    report(5, "ridge oracle", ridge_oracle);
    report(6, "spectral radius", spectral_radius);
    report(7, "SWE mass conservation", swe_mass);
    report(8, "vorticity solver properties", vorticity_properties);
    report(9, "vorticity forecast ordering", vorticity_forecast);
    report(10, "metric examples", metric_examples);
    report(11, "persistence", persistence);

    std::printf("%d of 11 criteria failed, %d unexpectedly\n", failed, unexpected);
    return unexpected == 0 ? 0 : 1;
}
