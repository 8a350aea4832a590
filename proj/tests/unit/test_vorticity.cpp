#include "seqrc/vorticity.hpp"

#include "test_support.hpp"

#include <complex>
#include <map>

using namespace seqrc;

namespace {

VorticityParams params(Index n = 64)
{
    VorticityParams p;
    p.n = n;
    return p;
}

VorticityField shear_mode(Index n)
{
    VorticityField w(n * n);
    for (Index r = 0; r < n; ++r)
        for (Index c = 0; c < n; ++c) w[r * n + c] = std::sin(2.0 * M_PI * static_cast<double>(r) / static_cast<double>(n));
    return w;
}

// Direct 2D DFT by separable O(n^3) sums; entry (ky, kx) in row-major order.
std::vector<std::complex<double>> dft2(const VorticityField& w, Index n)
{
    std::vector<std::complex<double>> twiddle(static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k) twiddle[k] = std::polar(1.0, -2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n));
    std::vector<std::complex<double>> rows(static_cast<std::size_t>(n * n)), out(static_cast<std::size_t>(n * n));
    for (Index r = 0; r < n; ++r)
        for (Index kx = 0; kx < n; ++kx) {
            std::complex<double> acc = 0.0;
            for (Index c = 0; c < n; ++c) acc += w[r * n + c] * twiddle[(kx * c) % n];
            rows[r * n + kx] = acc;
        }
    for (Index ky = 0; ky < n; ++ky)
        for (Index kx = 0; kx < n; ++kx) {
            std::complex<double> acc = 0.0;
            for (Index r = 0; r < n; ++r) acc += rows[r * n + kx] * twiddle[(ky * r) % n];
            out[ky * n + kx] = acc;
        }
    return out;
}

}  // namespace

TEST(GaussianRandomField, SameSeedSameField)
{
    auto p = params();
    p.grf_seed = 12;
    EXPECT_EQ(grf_initial(p), grf_initial(p));
    auto q = p;
    q.grf_seed = 13;
    EXPECT_NE(grf_initial(p), grf_initial(q));
}

TEST(GaussianRandomField, ZeroMean)
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto p = params();
        p.grf_seed = seed;
        EXPECT_NEAR(field_mean(grf_initial(p)), 0.0, 1e-12);
    }
}

TEST(GaussianRandomField, RadialSpectrumFollowsCovariance)
{
    const Index n = 64;
    auto p = params(n);
    RandomStream rng(2024);
    std::map<Index, double> measured, expected;
    std::map<Index, int> modes;
    for (int sample = 0; sample < 50; ++sample) {
        const auto spec = dft2(grf_initial(p, rng), n);
        for (Index ky = 0; ky < n; ++ky)
            for (Index kx = 0; kx < n; ++kx) {
                const double fx = static_cast<double>(kx <= n / 2 ? kx : kx - n);
                const double fy = static_cast<double>(ky <= n / 2 ? ky : ky - n);
                const double k = std::hypot(fx, fy);
                const auto shell = static_cast<Index>(std::lround(k));
                if (shell < 1 || shell > 16) continue;
                measured[shell] += std::norm(spec[ky * n + kx]);
                expected[shell] += std::pow(4.0 * M_PI * M_PI * k * k + 49.0, -2.5);
                ++modes[shell];
            }
    }
    std::vector<double> ratio;
    for (auto& [shell, power] : measured) ratio.push_back(power / expected[shell]);
    double mean = 0.0;
    for (double r : ratio) mean += r;
    mean /= static_cast<double>(ratio.size());
    for (std::size_t i = 0; i < ratio.size(); ++i) EXPECT_NEAR(ratio[i] / mean, 1.0, 0.2) << "shell " << i + 1;
}

TEST(VorticitySolverTest, ShearModeDecaysAtViscousRate)
{
    auto p = params(32);
    p.forcing = false;
    const auto w0 = shear_mode(32);
    VorticitySolver solver(p, w0);
    for (int k = 0; k < 100; ++k) solver.step();
    const double decay = std::exp(-4.0 * M_PI * M_PI * p.viscosity() * solver.time());
    const auto w = solver.field();
    EXPECT_LE((w - decay * w0).cwiseAbs().maxCoeff() / decay, 1e-4);
}

TEST(VorticitySolverTest, MeanIsConservedWithForcing)
{
    auto p = params(32);
    const auto w0 = grf_initial(p);
    VorticitySolver solver(p, w0);
    for (int k = 0; k < 300; ++k) solver.step();
    EXPECT_LT(std::abs(field_mean(solver.field()) - field_mean(w0)), 1e-12);
}

TEST(VorticitySolverTest, UnforcedEnstrophyNeverIncreases)
{
    auto p = params(32);
    p.forcing = false;
    VorticitySolver solver(p, grf_initial(p));
    double previous = enstrophy(solver.field());
    for (int k = 0; k < 500; ++k) {
        solver.step();
        const double now = enstrophy(solver.field());
        ASSERT_LE(now, previous * (1.0 + 1e-12)) << "step " << k;
        previous = now;
    }
}

TEST(VorticitySolverTest, CourantViolation)
{
    auto p = params(32);
    p.dt = 0.5;
    VorticitySolver solver(p, 100.0 * grf_initial(p));
    EXPECT_SEQRC_ERROR(solver.step(), ErrorCode::CflViolation);
}

TEST(VorticitySimulate, SnapshotLayoutAndDeterminism)
{
    auto p = params(32);
    p.n_steps = 40;
    p.output_stride = 10;
    p.spinup_steps = 5;
    const auto w0 = grf_initial(p);
    auto a = vorticity_simulate(p, w0);
    auto b = vorticity_simulate(p, w0);
    EXPECT_EQ(a.steps(), 5);
    EXPECT_EQ(a.dim(), 32 * 32);
    ASSERT_TRUE(a.shape.has_value());
    EXPECT_EQ(*a.shape, (FieldShape{32, 32}));
    EXPECT_DOUBLE_EQ(a.dt, 10 * p.dt);
    EXPECT_EQ(a.values, b.values);
}

TEST(VorticityForcing, MatchesFormula)
{
    const Index n = 16;
    auto f = vorticity_forcing(n);
    for (Index r = 0; r < n; ++r)
        for (Index c = 0; c < n; ++c) {
            const double s = 2.0 * M_PI * (static_cast<double>(c) + static_cast<double>(r)) / static_cast<double>(n);
            EXPECT_NEAR(f[r * n + c], 0.1 * (std::sin(s) + std::cos(s)), 1e-15);
        }
}

TEST(VorticityParamsTest, Validation)
{
    auto p = params(48);
    EXPECT_SEQRC_ERROR(p.validate(), ErrorCode::InvalidSpec);
    p = params();
    p.reynolds = 0.0;
    EXPECT_SEQRC_ERROR(p.validate(), ErrorCode::InvalidSpec);
}
