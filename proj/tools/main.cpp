// seqrc command-line interface.

#include "seqrc/config.hpp"
#include "seqrc/cost.hpp"
#include "seqrc/error.hpp"
#include "seqrc/experiment.hpp"
#include "seqrc/forecaster.hpp"
#include "seqrc/lorenz63.hpp"
#include "seqrc/metrics.hpp"
#include "seqrc/series_io.hpp"
#include "seqrc/shallow_water.hpp"
#include "seqrc/version.hpp"
#include "seqrc/vorticity.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>

using namespace seqrc;

namespace {

struct SpecArgs {
    std::string kind = "seqrc";
    Index input_dim = 3;
    Index reservoir_size = 256;
    Index layers = 8;
    Index layer_size = 32;
    ReservoirParams params;
    std::string activation = "tanh";

    void add_to(CLI::App* app, bool with_input_dim)
    {
        app->add_option("--kind", kind, "rc or seqrc")->check(CLI::IsMember({"rc", "seqrc"}));
        if (with_input_dim) app->add_option("--input-dim", input_dim, "Input dimension D");
        app->add_option("--size", reservoir_size, "Reservoir size N (rc)");
        app->add_option("--layers", layers, "Layer count (seqrc)");
        app->add_option("--layer-size", layer_size, "Units per layer (seqrc)");
        app->add_option("--spectral-radius", params.spectral_radius);
        app->add_option("--leak-rate", params.leak_rate);
        app->add_option("--sparsity", params.sparsity, "Probability that an edge is absent");
        app->add_option("--input-scale", params.input_scale);
        app->add_option("--activation", activation)->check(CLI::IsMember({"tanh", "identity"}));
        app->add_option("--seed", params.seed);
    }

    ModelSpec build(Index dim) const
    {
        ReservoirParams p = params;
        p.activation = activation == "identity" ? Activation::identity : Activation::tanh;
        ModelSpec spec;
        if (kind == "rc")
            spec = ReservoirSpec{dim, reservoir_size, p};
        else
            spec = SequentialSpec{dim, layers, layer_size, p};
        validate(spec);
        return spec;
    }
};

void print_progress(const std::string& msg)
{
    std::cerr << msg << '\n';
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Reservoir and sequential-reservoir forecasting toolkit"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Simulate a benchmark dataset");
    std::string gen_kind;
    std::string gen_config;
    std::filesystem::path gen_out;
    Index gen_rows = 2000;
    Lorenz63Params lorenz;
    std::string lorenz_reading = "initial_state";
    SWEParams swe;
    SweBump bump;
    VorticityParams vort;
    gen->add_option("dataset", gen_kind, "lorenz63, shallow_water or vorticity")
        ->check(CLI::IsMember({"lorenz63", "shallow_water", "vorticity"}));
    gen->add_option("--config", gen_config, "Take the dataset block and length from an experiment config");
    gen->add_option("-o,--out", gen_out, "Output file (.csv or .rcds)")->required();
    gen->add_option("--rows", gen_rows, "Rows to emit");
    gen->add_option("--dt", lorenz.dt, "Lorenz63 step");
    gen->add_option("--discard", lorenz.discard, "Lorenz63 steps before the first row");
    gen->add_option("--reading", lorenz_reading, "initial_state or parameters")
        ->check(CLI::IsMember({"initial_state", "parameters"}));
    gen->add_option("--grid", vort.n, "Vorticity grid size");
    gen->add_option("--reynolds", vort.reynolds);
    gen->add_option("--grf-seed", vort.grf_seed);
    gen->add_option("--spinup", vort.spinup_steps);
    gen->add_option("--stride", vort.output_stride, "Solver steps per emitted row");
    gen->add_flag("!--no-forcing", vort.forcing);
    gen->add_option("--swe-grid", swe.nx, "Shallow-water cells per side");
    gen->add_option("--swe-stride", swe.output_stride);
    gen->add_option("--bump-amplitude", bump.amplitude);
    gen->add_option("--bump-width", bump.width);
    gen->add_flag("--include-velocity", swe.include_velocity);

    // train
    auto* tr = app.add_subcommand("train", "Fit a model to a series");
    std::filesystem::path train_data, train_out;
    SpecArgs train_spec;
    TrainOptions train_opts;
    Index train_rows = 0;
    tr->add_option("--data", train_data, "Training series (.csv or .rcds)")->required();
    tr->add_option("-o,--out", train_out, "Model file")->required();
    tr->add_option("--rows", train_rows, "Use only the first rows (0 = all)");
    tr->add_option("--washout", train_opts.washout);
    tr->add_option("--regularization", train_opts.regularization);
    std::string train_norm = "scale";
    tr->add_option("--normalization", train_norm, "scale (x / std) or zscore ((x - mean) / std)")
        ->check(CLI::IsMember({"scale", "zscore"}));
    train_spec.add_to(tr, false);

    // forecast
    auto* fc = app.add_subcommand("forecast", "Closed-loop forecast from a warmup series");
    std::filesystem::path fc_model, fc_warmup, fc_out;
    Index fc_horizon = 100;
    Index fc_first = 0, fc_count = 0;
    fc->add_option("--model", fc_model)->required();
    fc->add_option("--warmup", fc_warmup, "Series whose rows seed the forecast")->required();
    fc->add_option("--first", fc_first, "First warmup row");
    fc->add_option("--count", fc_count, "Warmup rows (0 = to the end)");
    fc->add_option("--horizon", fc_horizon);
    fc->add_option("-o,--out", fc_out)->required();

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "Score a forecast, or run a full experiment from a config");
    std::filesystem::path ev_config, ev_pred, ev_truth, ev_model, ev_out;
    Index ev_truth_first = 0;
    double ev_threshold = 0.3;
    double ev_range = 0.0;
    std::string ev_ssim = "window";
    ev->add_option("--config", ev_config, "Experiment config; runs every seed");
    ev->add_option("--pred", ev_pred);
    ev->add_option("--truth", ev_truth);
    ev->add_option("--truth-first", ev_truth_first, "Row of the truth series aligned with lead 1");
    ev->add_option("--model", ev_model, "Model whose training std normalizes the VPT error");
    ev->add_option("--threshold", ev_threshold, "VPT threshold");
    ev->add_option("--dynamic-range", ev_range, "SSIM/PSNR range (0 = truth max - min)");
    ev->add_option("--ssim-mode", ev_ssim)->check(CLI::IsMember({"window", "global"}));
    ev->add_option("-o,--out", ev_out, "Curve CSV");
    Index ev_jobs = 0;
    ev->add_option("--jobs", ev_jobs, "Override run.jobs");

    // bench
    auto* bn = app.add_subcommand("bench", "Time reservoir steps for a spec");
    SpecArgs bench_spec;
    Index bench_steps = 10000;
    bench_spec.add_to(bn, true);
    bn->add_option("--steps", bench_steps);

    // inspect
    auto* in = app.add_subcommand("inspect", "Print parameter, FLOP and memory counts");
    SpecArgs inspect_spec;
    std::filesystem::path inspect_model;
    Index inspect_out = -1;
    inspect_spec.add_to(in, true);
    in->add_option("--model", inspect_model, "Read the spec from a model file");
    in->add_option("--output-dim", inspect_out, "Readout outputs (default D)");

    // convert
    auto* cv = app.add_subcommand("convert", "Convert between CSV and RCDS");
    std::filesystem::path cv_in, cv_out;
    double cv_dt = 1.0;
    cv->add_option("input", cv_in)->required();
    cv->add_option("output", cv_out)->required();
    cv->add_option("--dt", cv_dt, "Step size for CSV input without a dt comment");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*gen) {
            SeriesData data;
            if (!gen_config.empty()) {
                const ExperimentConfig config = parse_config(std::filesystem::path(gen_config));
                data = make_dataset(config, 0);
            } else if (gen_kind == "lorenz63") {
                if (lorenz_reading == "parameters") {
                    const Lorenz63Params lit = Lorenz63Params::literal_parameter_reading();
                    lorenz.sigma = lit.sigma;
                    lorenz.rho = lit.rho;
                    lorenz.beta = lit.beta;
                    lorenz.initial = lit.initial;
                }
                lorenz.n_steps = gen_rows;
                data = lorenz63_generate(lorenz);
            } else if (gen_kind == "shallow_water") {
                swe.ny = swe.nx;
                swe.n_steps = (gen_rows - 1) * swe.output_stride;
                data = swe_simulate(swe, swe_gaussian_bump(swe, bump.amplitude, bump.center_x * swe.lx,
                                                           bump.center_y * swe.ly, bump.width));
            } else if (gen_kind == "vorticity") {
                vort.n_steps = (gen_rows - 1) * vort.output_stride;
                data = vorticity_simulate(vort, grf_initial(vort));
            } else {
                throw Error(ErrorCode::MissingRequired, "generate needs a dataset name or --config");
            }
            save_any(data, gen_out);
            std::cout << "wrote " << data.steps() << " x " << data.dim() << " series to " << gen_out.string() << '\n';
        } else if (*tr) {
            SeriesData data = load_any(train_data);
            if (train_rows > 0) data = data.slice(0, std::min(train_rows, data.steps()));
            const ModelSpec spec = train_spec.build(data.dim());
            train_opts.normalization = train_norm == "zscore" ? NormalizationMode::zscore : NormalizationMode::scale;
            const auto t0 = std::chrono::steady_clock::now();
            const TrainedModel model = train(spec, data, train_opts);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            save_model(model, train_out);
            std::cout << "trained on " << data.steps() << " rows in " << secs << " s; model written to "
                      << train_out.string() << '\n';
        } else if (*fc) {
            const TrainedModel model = load_model(fc_model);
            SeriesData warm = load_any(fc_warmup, model.dt);
            if (fc_first < 0 || fc_first > warm.steps())
                throw Error(ErrorCode::InvalidSpec, "--first lies outside the warmup series");
            const Index count = fc_count > 0 ? fc_count : warm.steps() - fc_first;
            if (fc_first + count > warm.steps())
                throw Error(ErrorCode::SeriesTooShort, "warmup series has fewer rows than requested");
            warm = warm.slice(fc_first, count);
            const ForecastResult result = rollout(model, warm, fc_horizon);
            if (result.prediction.steps() == 0) {
                std::cout << "horizon 0: nothing to write\n";
            } else {
                save_any(result.prediction, fc_out);
                std::cout << "wrote " << result.prediction.steps() << "-step forecast to " << fc_out.string() << '\n';
            }
        } else if (*ev) {
            if (!ev_config.empty()) {
                ExperimentConfig config = parse_config(ev_config);
                if (ev_jobs > 0) config.run.jobs = ev_jobs;
                const ExperimentReport report = run_experiment(config, print_progress);
                std::cout << "results in " << config.run.output_dir.string() << " (" << report.failures()
                          << " failed seeds)\n";
                return report.failures() == report.seeds.size() ? 3 : 0;
            }
            if (ev_pred.empty() || ev_truth.empty())
                throw Error(ErrorCode::MissingRequired, "evaluate needs --config or both --pred and --truth");
            const SeriesData pred = load_any(ev_pred);
            SeriesData truth = load_any(ev_truth, pred.dt);
            if (ev_truth_first + pred.steps() > truth.steps())
                throw Error(ErrorCode::SeriesTooShort, "truth series is shorter than the forecast");
            truth = truth.slice(ev_truth_first, pred.steps());
            if (truth.shape) {
                double range = ev_range > 0.0 ? ev_range : truth.values.maxCoeff() - truth.values.minCoeff();
                if (!(range > 0.0)) range = 1.0;
                SsimOptions opts;
                opts.mode = ev_ssim == "global" ? SsimMode::global : SsimMode::gaussian_window;
                const FieldCurves curves = field_curves(pred.values, truth.values, *truth.shape, range, opts);
                std::cout << "ssim_horizon(0.6) " << ssim_horizon(curves.ssim, 0.6) << " steps\n";
                if (!ev_out.empty()) write_field_curves_csv(curves, ev_out);
            } else {
                Vector sigma;
                if (!ev_model.empty())
                    sigma = load_model(ev_model).normalization.std;
                else
                    sigma = Vector::Ones(truth.dim());
                const Vector curve = nrmse_curve(pred.values, truth.values, sigma);
                std::cout << "vpt " << vpt_from_curve(curve, ev_threshold, truth.dt) << '\n';
                if (!ev_out.empty()) write_nrmse_csv(curve, ev_out);
            }
        } else if (*bn) {
            const ModelSpec spec = bench_spec.build(bench_spec.input_dim);
            const Reservoir reservoir = Reservoir::build(spec);
            LayerStates state = reservoir.zero_state();
            RandomStream rng(bench_spec.params.seed, 99);
            Vector input(bench_spec.input_dim);
            for (Index i = 0; i < input.size(); ++i) input[i] = rng.uniform(-1.0, 1.0);
            const auto t0 = std::chrono::steady_clock::now();
            for (Index s = 0; s < bench_steps; ++s) reservoir.step(state, input);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const CostReport cost = cost_report(spec);
            std::cout << format_cost_report(spec, cost);
            std::cout << "steps            " << bench_steps << '\n'
                      << "seconds          " << secs << '\n'
                      << "us_per_step      " << 1e6 * secs / static_cast<double>(std::max<Index>(bench_steps, 1)) << '\n';
        } else if (*in) {
            const ModelSpec spec = inspect_model.empty() ? inspect_spec.build(inspect_spec.input_dim)
                                                         : load_model(inspect_model).spec();
            std::cout << format_cost_report(spec, cost_report(spec, inspect_out));
        } else if (*cv) {
            const SeriesData data = load_any(cv_in, cv_dt);
            save_any(data, cv_out);
            std::cout << "converted " << data.steps() << " x " << data.dim() << '\n';
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
