#include "seqrc/cost.hpp"

#include "test_support.hpp"

using namespace seqrc;

namespace {

ReservoirSpec rc(Index d, Index n) { return ReservoirSpec{d, n, {}}; }
SequentialSpec seq(Index d, Index layers, Index size) { return SequentialSpec{d, layers, size, {}}; }

}  // namespace

TEST(Parameters, SmallModelGoldens)
{
    auto single = count_parameters(rc(3, 256));
    EXPECT_EQ(single.trainable, 780u);
    EXPECT_EQ(single.fixed, 66'304u);
    auto sequential = count_parameters(seq(3, 8, 32));
    EXPECT_EQ(sequential.trainable, 780u);
    EXPECT_EQ(sequential.fixed, 8'288u);
}

TEST(Parameters, HighDimensionalGoldens)
{
    auto sequential = count_parameters(seq(4096, 8, 64));
    EXPECT_EQ(sequential.trainable, 18'878'464u);
    EXPECT_EQ(sequential.fixed, 294'912u);
    // 4097 + 1024 = 5121 features per output.
    auto wide = count_parameters(rc(4096, 1024));
    EXPECT_EQ(wide.trainable, 20'975'616u);
    EXPECT_EQ(wide.fixed, 5'242'880u);
}

TEST(Parameters, SparsityDoesNotChangeCounts)
{
    ReservoirSpec sparse = rc(3, 256);
    sparse.params.sparsity = 0.9;
    EXPECT_EQ(count_parameters(sparse).fixed, count_parameters(rc(3, 256)).fixed);
}

TEST(Parameters, OutputDimensionOverride)
{
    EXPECT_EQ(count_parameters(rc(3, 256), 1).trainable, 260u);
}

TEST(Flops, Goldens)
{
    EXPECT_EQ(estimate_flops(rc(3, 256)), 67'084u);
    EXPECT_EQ(estimate_flops(seq(3, 8, 32)), 9'068u);
    EXPECT_NEAR(static_cast<double>(estimate_flops(rc(3, 256))) / 67'300.0, 1.0, 0.005);
}

TEST(Flops, OneLayerReducesToSingle)
{
    EXPECT_EQ(estimate_flops(seq(5, 1, 40)), estimate_flops(rc(5, 40)));
    EXPECT_EQ(count_parameters(seq(5, 1, 40)).fixed, count_parameters(rc(5, 40)).fixed);
}

TEST(Memory, SequentialGolden)
{
    EXPECT_EQ(estimate_memory(seq(3, 8, 32)), 76'672u);
}

TEST(Memory, SequentialIsSmallerAtEqualState)
{
    for (Index layers : {2, 4, 8}) {
        const Index total = 256;
        EXPECT_LT(count_parameters(seq(3, layers, total / layers)).fixed, count_parameters(rc(3, total)).fixed);
        EXPECT_LT(estimate_memory(seq(3, layers, total / layers)), estimate_memory(rc(3, total)));
    }
}

TEST(Report, FieldsAndFormatting)
{
    auto report = cost_report(rc(3, 256));
    EXPECT_EQ(report.state_size, 256u);
    EXPECT_EQ(report.feature_size, 260u);
    const auto text = format_cost_report(rc(3, 256), report);
    EXPECT_NE(text.find("780"), std::string::npos);
    EXPECT_NE(text.find("66304"), std::string::npos);
}

TEST(Report, DegenerateSpecRejected)
{
    EXPECT_SEQRC_ERROR(count_parameters(rc(3, 0)), ErrorCode::InvalidSpec);
}
