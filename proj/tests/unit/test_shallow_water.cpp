#include "seqrc/shallow_water.hpp"

#include "test_support.hpp"

using namespace seqrc;

namespace {

SWEParams small_grid()
{
    SWEParams p;
    p.nx = 32;
    p.ny = 32;
    return p;
}

}  // namespace

TEST(SWEBump, ZeroAmplitudeIsRest)
{
    SWEParams p = small_grid();
    auto s = swe_gaussian_bump(p, 0.0, 5e5, 5e5, 5e4);
    EXPECT_TRUE(s.eta.isZero(0.0));
    EXPECT_EQ(s.u.rows(), 32);
    EXPECT_EQ(s.u.cols(), 33);
    EXPECT_EQ(s.v.rows(), 33);
    EXPECT_EQ(s.v.cols(), 32);
}

TEST(SWEBump, CenteredBumpIsSymmetric)
{
    SWEParams p;
    auto s = swe_gaussian_bump(p, 1.0, p.lx / 2, p.ly / 2, 8e4);
    EXPECT_EQ(s.eta, s.eta.transpose());
    EXPECT_EQ(s.eta, s.eta.rowwise().reverse());
}

TEST(SWEBump, PeakEqualsAmplitudeAtCellCentre)
{
    SWEParams p;
    const double cx = 20.5 * p.dx(), cy = 40.5 * p.dy();
    auto s = swe_gaussian_bump(p, 2.0, cx, cy, 6e4);
    Index r, c;
    EXPECT_DOUBLE_EQ(s.eta.maxCoeff(&r, &c), 2.0);
    EXPECT_EQ(r, 40);
    EXPECT_EQ(c, 20);
}

TEST(SWEStep, RestStateIsEquilibrium)
{
    SWEParams p = small_grid();
    auto s = SWEState::rest(p);
    for (int k = 0; k < 200; ++k) swe_step(p, s);
    EXPECT_LE(s.eta.cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE(s.u.cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE(s.v.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SWEStep, MassIsConserved)
{
    SWEParams p;
    auto s = swe_gaussian_bump(p, 1.0, 0.4 * p.lx, 0.55 * p.ly, 5e4);
    const double before = s.eta.sum();
    for (int k = 0; k < 1000; ++k) swe_step(p, s);
    EXPECT_LE(std::abs(s.eta.sum() - before) / std::abs(before), 1e-8);
    EXPECT_TRUE(s.eta.allFinite());
}

TEST(SWEStep, WallFacesStayClosed)
{
    SWEParams p = small_grid();
    auto s = swe_gaussian_bump(p, 1.0, 0.3 * p.lx, 0.3 * p.ly, 8e4);
    for (int k = 0; k < 300; ++k) swe_step(p, s);
    EXPECT_TRUE(s.u.col(0).isZero(0.0));
    EXPECT_TRUE(s.u.col(p.nx).isZero(0.0));
    EXPECT_TRUE(s.v.row(0).isZero(0.0));
    EXPECT_TRUE(s.v.row(p.ny).isZero(0.0));
}

TEST(SWEStep, NonRotatingReleaseKeepsDiagonalSymmetry)
{
    SWEParams p = small_grid();
    p.f0 = 0.0;
    p.beta = 0.0;
    auto s = swe_gaussian_bump(p, 1.0, p.lx / 2, p.ly / 2, 1e5);
    for (int k = 0; k < 200; ++k) swe_step(p, s);
    EXPECT_LE((s.eta - s.eta.transpose()).cwiseAbs().maxCoeff(), 1e-12 * s.eta.cwiseAbs().maxCoeff());
}

TEST(SWESimulate, WaveReachesTheWalls)
{
    SWEParams p;
    p.n_steps = 600;
    p.output_stride = 50;
    auto data = swe_simulate(p, swe_gaussian_bump(p, 1.0, p.lx / 2, p.ly / 2, 5e4));
    ASSERT_EQ(data.steps(), 13);
    ASSERT_TRUE(data.shape.has_value());
    EXPECT_EQ(data.shape->height, 64);
    const Eigen::Map<const RowMatrix> first(data.values.row(0).data(), 64, 64);
    const Eigen::Map<const RowMatrix> last(data.values.row(12).data(), 64, 64);
    EXPECT_LT(first.col(0).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_GT(last.col(0).cwiseAbs().maxCoeff(), 1e-3);
    EXPECT_LT(last.maxCoeff(), first.maxCoeff());
}

TEST(SWESimulate, VelocityOutputLayout)
{
    SWEParams p = small_grid();
    p.n_steps = 20;
    p.output_stride = 10;
    p.include_velocity = true;
    auto data = swe_simulate(p, swe_gaussian_bump(p, 1.0, p.lx / 2, p.ly / 2, 1e5));
    EXPECT_EQ(data.dim(), 3 * 32 * 32);
    EXPECT_EQ(data.steps(), 3);
    EXPECT_FALSE(data.shape.has_value());
}

TEST(SWESimulate, Deterministic)
{
    SWEParams p = small_grid();
    p.n_steps = 50;
    auto init = swe_gaussian_bump(p, 1.0, 0.3 * p.lx, 0.6 * p.ly, 7e4);
    EXPECT_EQ(swe_simulate(p, init).values, swe_simulate(p, init).values);
}

TEST(SWEParamsTest, CflViolationAndDefaults)
{
    SWEParams p;
    EXPECT_NEAR(p.cfl_limit(), p.dx() / std::sqrt(9.81 * 100.0), 1e-12);
    EXPECT_DOUBLE_EQ(p.effective_dt(), 0.5 * p.cfl_limit());
    p.dt = 1.01 * p.cfl_limit();
    EXPECT_SEQRC_ERROR(p.validate(), ErrorCode::CflViolation);
    p.dt = 0.0;
    p.nx = 2;
    EXPECT_SEQRC_ERROR(p.validate(), ErrorCode::InvalidSpec);
}
