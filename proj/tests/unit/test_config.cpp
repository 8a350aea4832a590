#include "seqrc/config.hpp"

#include "test_support.hpp"

#include <cstdlib>

using namespace seqrc;

namespace {

const std::string kMinimal = R"(
[dataset]
generator = "lorenz63"

[model]
kind = "seqrc"

[split]
n_train = 500
horizon = 100
)";

ExperimentConfig parse(const std::string& text) { return parse_config(ConfigDocument::parse(text), false); }

}  // namespace

TEST(Document, ScalarsArraysAndTables)
{
    auto doc = ConfigDocument::parse(R"(
# comment
top = 1
[a.b]
s = "hi # not a comment"
f = -2.5e-3
flag = true
list = [
  1, 2,
  3,
]
)");
    EXPECT_EQ(doc.find("top")->as_int("top"), 1);
    EXPECT_EQ(doc.find("a.b.s")->as_string("s"), "hi # not a comment");
    EXPECT_DOUBLE_EQ(doc.find("a.b.f")->as_double("f"), -2.5e-3);
    EXPECT_TRUE(doc.find("a.b.flag")->as_bool("flag"));
    EXPECT_EQ(doc.find("a.b.list")->as_array("list").size(), 3u);
    EXPECT_EQ(doc.find("a.b.list")->line, 8u);
    EXPECT_EQ(doc.find("missing"), nullptr);
}

TEST(Document, IntegerAcceptedAsDouble)
{
    auto doc = ConfigDocument::parse("x = 3\n");
    EXPECT_DOUBLE_EQ(doc.find("x")->as_double("x"), 3.0);
}

TEST(Document, SyntaxErrorsCarryLine)
{
    for (const std::string text : {"a = \n", "[unclosed\n", "x = \"open\n", "x = 1\nx = 2\n", "= 3\n", "x = [1, 2\n"}) {
        try {
            ConfigDocument::parse(text, "cfg.toml");
            ADD_FAILURE() << "accepted: " << text;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::ParseError) << text;
            EXPECT_NE(std::string(e.what()).find("cfg.toml:"), std::string::npos) << e.what();
        }
    }
}

TEST(Experiment, MinimalDefaults)
{
    auto cfg = parse(kMinimal);
    EXPECT_EQ(cfg.dataset.kind, DatasetKind::lorenz63);
    ASSERT_EQ(kind_of(cfg.model), ModelKind::sequential);
    EXPECT_EQ(layer_count_of(cfg.model), 8);
    EXPECT_EQ(layer_size_of(cfg.model), 32);
    EXPECT_EQ(input_dim_of(cfg.model), 3);
    EXPECT_DOUBLE_EQ(params_of(cfg.model).spectral_radius, 1.1);
    EXPECT_EQ(cfg.train.washout, 100);
    EXPECT_EQ(cfg.train.normalization, NormalizationMode::scale);
    EXPECT_EQ(cfg.warmup(), 100);
    EXPECT_EQ(cfg.required_length(), 700);
}

TEST(Experiment, FullLorenzConfig)
{
    auto cfg = parse(kMinimal + R"(
[dataset.lorenz63]
discard = 10
dt = 0.02
initial = [1.0, 2.0, 3.0]
[metrics]
vpt_threshold = 0.4
ssim_mode = "global"
[run]
seeds = [3, 4]
jobs = 2
)");
    EXPECT_EQ(cfg.dataset.lorenz.discard, 10);
    EXPECT_DOUBLE_EQ(cfg.dataset.lorenz.dt, 0.02);
    EXPECT_EQ(cfg.dataset.lorenz.initial[2], 3.0);
    EXPECT_DOUBLE_EQ(cfg.metrics.vpt_threshold, 0.4);
    EXPECT_EQ(cfg.metrics.ssim.mode, SsimMode::global);
    EXPECT_EQ(cfg.run.seeds, (std::vector<std::uint64_t>{3, 4}));
}

TEST(Experiment, UnknownKeyNamesTheLine)
{
    try {
        parse(R"(
[dataset]
generator = "lorenz63"
[model]
kind = "rc"
leak_rat = 0.5
[split]
n_train = 500
horizon = 10
)");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownKey);
        EXPECT_NE(std::string(e.what()).find("line 6"), std::string::npos) << e.what();
    }
}

TEST(Experiment, MissingRequired)
{
    EXPECT_SEQRC_ERROR(parse("[dataset]\ngenerator = \"lorenz63\"\n[model]\nkind = \"rc\"\n[split]\nhorizon = 5\n"),
                       ErrorCode::MissingRequired);
    EXPECT_SEQRC_ERROR(parse("[model]\nkind = \"rc\"\n[split]\nn_train = 500\nhorizon = 5\n"),
                       ErrorCode::MissingRequired);
}

TEST(Experiment, OutOfRangeLeakRate)
{
    const std::string text = R"(
[dataset]
generator = "lorenz63"
[model]
kind = "rc"
leak_rate = 1.5
[split]
n_train = 500
horizon = 10
)";
    EXPECT_SEQRC_ERROR(parse(text), ErrorCode::InvalidSpec);
}

TEST(Experiment, KindSpecificKeys)
{
    const std::string rc_with_layers = R"(
[dataset]
generator = "lorenz63"
[model]
kind = "rc"
layer_count = 4
[split]
n_train = 500
horizon = 10
)";
    EXPECT_SEQRC_ERROR(parse(rc_with_layers), ErrorCode::InvalidSpec);
}

TEST(Experiment, WrongValueType)
{
    EXPECT_SEQRC_ERROR(parse(kMinimal + "[run]\njobs = \"four\"\n"), ErrorCode::ParseError);
}

TEST(Experiment, EnvironmentOverride)
{
    ::setenv("SEQRC_MODEL_LEAK_RATE", "0.25", 1);
    ::setenv("SEQRC_SPLIT_HORIZON", "42", 1);
    ::setenv("SEQRC_RUN_OUTPUT_DIR", "/tmp/out dir", 1);
    auto cfg = parse_config(ConfigDocument::parse(kMinimal), true);
    ::unsetenv("SEQRC_MODEL_LEAK_RATE");
    ::unsetenv("SEQRC_SPLIT_HORIZON");
    ::unsetenv("SEQRC_RUN_OUTPUT_DIR");
    EXPECT_EQ(cfg.run.output_dir, "/tmp/out dir");
    EXPECT_DOUBLE_EQ(params_of(cfg.model).leak_rate, 0.25);
    EXPECT_EQ(cfg.split.horizon, 42);
    EXPECT_DOUBLE_EQ(params_of(parse(kMinimal).model).leak_rate, 0.7);

    ::setenv("SEQRC_SPLIT_HORIZON", "4x2", 1);
    EXPECT_SEQRC_ERROR(parse_config(ConfigDocument::parse(kMinimal), true), ErrorCode::ParseError);
    ::unsetenv("SEQRC_SPLIT_HORIZON");
}

TEST(Experiment, FieldGenerators)
{
    auto swe = parse(R"(
[dataset]
generator = "shallow_water"
[dataset.shallow_water]
nx = 16
ny = 16
output_stride = 5
[model]
kind = "rc"
reservoir_size = 64
[split]
n_train = 200
horizon = 20
)");
    EXPECT_EQ(swe.dataset.kind, DatasetKind::shallow_water);
    EXPECT_EQ(input_dim_of(swe.model), 256);

    auto vort = parse(R"(
[dataset]
generator = "vorticity"
[dataset.vorticity]
n = 32
reynolds = 400
[model]
kind = "seqrc"
layer_count = 2
layer_size = 16
[split]
n_train = 200
horizon = 20
)");
    EXPECT_EQ(vort.dataset.vorticity.n, 32);
    EXPECT_EQ(input_dim_of(vort.model), 1024);
}

TEST(Experiment, ReadingSwitch)
{
    auto cfg = parse(kMinimal + "[dataset.lorenz63]\nreading = \"parameters\"\n");
    EXPECT_NEAR(cfg.dataset.lorenz.sigma, 17.677, 1e-3);
    EXPECT_SEQRC_ERROR(parse(kMinimal + "[dataset.lorenz63]\nreading = \"other\"\n"), ErrorCode::InvalidSpec);
}

TEST(Experiment, ShippedConfigsParse)
{
    for (const char* name : {"lorenz63_seqrc.toml", "lorenz63_rc.toml", "vorticity_seqrc.toml", "vorticity_rc.toml",
                             "shallow_water_seqrc.toml", "shallow_water_rc.toml"}) {
        const auto path = std::filesystem::path(SEQRC_SOURCE_DIR) / "configs" / name;
        EXPECT_NO_THROW(parse_config(path, false)) << name;
    }
}
