#include "hdcov/errors.hpp"
#include "hdcov/sample.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <limits>

using namespace hdcov;
using hdcov::testing::random_sample;

TEST(SampleMatrix, RejectsBadInput) {
    EXPECT_THROW(SampleMatrix(RowMatrix(0, 3)), std::invalid_argument);
    EXPECT_THROW(SampleMatrix(RowMatrix(3, 0)), std::invalid_argument);
    RowMatrix x = RowMatrix::Zero(2, 2);
    x(1, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(SampleMatrix{x}, std::invalid_argument);
    const std::vector<double> v{1, 2, 3};
    EXPECT_THROW(SampleMatrix(2, 2, v), std::invalid_argument);
}

TEST(SampleMatrix, RowMajorConstructor) {
    const std::vector<double> v{1, 2, 3, 4, 5, 6};
    SampleMatrix x(2, 3, v);
    EXPECT_EQ(x(0, 2), 3.0);
    EXPECT_EQ(x(1, 0), 4.0);
    const auto c = x.columns(1, 2);
    EXPECT_EQ(c.p(), 2);
    EXPECT_EQ(c(1, 1), 6.0);
}

TEST(Gram, SmallExample) {
    const std::vector<double> v{1, 2, 3, 4};
    SampleMatrix x(2, 2, v);
    const auto g = compute_gram(x);
    EXPECT_EQ(g.kind(), GramKind::Within);
    EXPECT_EQ(g(0, 0), 5.0);
    EXPECT_EQ(g(0, 1), 11.0);
    EXPECT_EQ(g(1, 0), 11.0);
    EXPECT_EQ(g(1, 1), 25.0);
    EXPECT_EQ(g.total(), 52.0);
    EXPECT_EQ(g.sum_sq(), 25.0 + 121.0 * 2 + 625.0);
    EXPECT_EQ(g.diagonal()(1), 25.0);
}

TEST(Gram, MatchesNaiveLoops) {
    const auto a = random_sample(1, 0, 9, 13);
    const auto b = random_sample(1, 1, 7, 13);
    const auto g = compute_gram(a);
    const auto h = compute_gram(a, b);
    EXPECT_EQ(h.kind(), GramKind::Cross);
    EXPECT_EQ(h.diagonal().size(), 0);
    for (Index i = 0; i < 9; ++i) {
        for (Index j = 0; j < 9; ++j) {
            double s = 0;
            for (Index k = 0; k < 13; ++k) s += a(i, k) * a(j, k);
            EXPECT_NEAR(g(i, j), s, 1e-12 * (1 + std::abs(s)));
            EXPECT_EQ(g(i, j), g(j, i));
        }
        for (Index j = 0; j < 7; ++j) {
            double s = 0;
            for (Index k = 0; k < 13; ++k) s += a(i, k) * b(j, k);
            EXPECT_NEAR(h(i, j), s, 1e-12 * (1 + std::abs(s)));
        }
    }
    EXPECT_NEAR(h.row_sums().sum(), h.total(), 1e-10);
    EXPECT_NEAR(h.col_sums().sum(), h.total(), 1e-10);
}

TEST(Gram, CrossDimensionMismatch) {
    EXPECT_THROW(compute_gram(random_sample(1, 0, 4, 3), random_sample(1, 1, 4, 4)), DimensionError);
}

TEST(Gram, CenteringIdentity) {
    // Gram of centered data equals H G H with H the centering projector.
    const auto x = random_sample(2, 0, 8, 5, 3.0);
    const auto g = compute_gram(x).entries();
    const Matrix h = Matrix::Identity(8, 8) - Matrix::Constant(8, 8, 1.0 / 8);
    const auto gc = compute_gram(center_columns(x)).entries();
    EXPECT_LT((gc - h * g * h).norm(), 1e-10 * g.norm());
    EXPECT_LT(center_columns(x).values().colwise().sum().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BlockPartition, Validation) {
    EXPECT_THROW(BlockPartition(0, 3), std::invalid_argument);
    EXPECT_THROW(BlockPartition::halves(1), std::invalid_argument);
    const auto h = BlockPartition::halves(5);
    EXPECT_EQ(h.p1(), 2);
    EXPECT_EQ(h.p2(), 3);
}

TEST(BlockPartition, Split) {
    const auto x = random_sample(3, 0, 4, 5);
    const auto [a, b] = split_blocks(x, BlockPartition::halves(5));
    EXPECT_EQ(a.p(), 2);
    EXPECT_EQ(b.p(), 3);
    EXPECT_EQ(b(2, 0), x(2, 2));
    EXPECT_THROW(split_blocks(x, BlockPartition(2, 2)), DimensionError);
}
