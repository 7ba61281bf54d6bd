#include <array>
#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "reds/elm.hpp"

using namespace reds;

TEST(Elm, DrawsStayInsideRanges) {
    HyperRanges r;
    r.depth_lo = 1;
    r.depth_hi = 4;
    r.width_lo = 1000;
    r.width_hi = 1200;
    r.lambda_lo = 0.001;
    r.lambda_hi = 0.005;
    for (int j = 0; j < 500; ++j) {
        const NetworkConfig c = sample_network_config(r, j, 42);
        EXPECT_GE(c.depth, 1);
        EXPECT_LE(c.depth, 4);
        EXPECT_GE(c.width, 1000);
        EXPECT_LE(c.width, 1200);
        EXPECT_GE(c.lambda, 0.001);
        EXPECT_LE(c.lambda, 0.005);
        EXPECT_EQ(c.member_index, j);
    }
}

TEST(Elm, PointMassDepth) {
    HyperRanges r;
    r.depth_lo = r.depth_hi = 2;
    for (int j = 0; j < 50; ++j) EXPECT_EQ(sample_network_config(r, j, 3).depth, 2);
}

TEST(Elm, ConfigDependsOnlyOnSeedAndIndex) {
    HyperRanges r;
    const NetworkConfig a = sample_network_config(r, 17, 5);
    const NetworkConfig b = sample_network_config(r, 17, 5);
    EXPECT_EQ(a.depth, b.depth);
    EXPECT_EQ(a.width, b.width);
    EXPECT_EQ(a.lambda, b.lambda);
    EXPECT_EQ(a.member_seed, b.member_seed);
    EXPECT_NE(a.member_seed, sample_network_config(r, 18, 5).member_seed);
}

TEST(Elm, DepthFrequenciesAreUniform) {
    HyperRanges r;
    r.depth_lo = 1;
    r.depth_hi = 4;
    std::array<int, 4> counts{};
    const int n = 10000;
    for (int j = 0; j < n; ++j) ++counts[sample_network_config(r, j, 2024).depth - 1];
    const double sigma = std::sqrt(0.25 * 0.75 / n);
    for (int c : counts) EXPECT_NEAR(static_cast<double>(c) / n, 0.25, 3.0 * sigma);
}

TEST(Elm, InvertedRangesAreConfigErrors) {
    HyperRanges r;
    r.depth_lo = 3;
    r.depth_hi = 2;
    EXPECT_THROW(sample_network_config(r, 0, 0), ConfigError);
    r = HyperRanges{};
    r.width_lo = 10;
    r.width_hi = 5;
    EXPECT_THROW(sample_network_config(r, 0, 0), ConfigError);
    r = HyperRanges{};
    r.lambda_lo = 0.01;
    r.lambda_hi = 0.001;
    EXPECT_THROW(sample_network_config(r, 0, 0), ConfigError);
    r = HyperRanges{};
    r.lambda_lo = 0.0;
    EXPECT_THROW(sample_network_config(r, 0, 0), ConfigError);
}

TEST(Elm, ZeroDepthGivesEmptyStackAndIdentityForward) {
    NetworkConfig c;
    c.depth = 0;
    c.width = 10;
    const WeightStack s = sample_weights(c, 6);
    EXPECT_TRUE(s.empty());
    const Eigen::VectorXd h0 = Eigen::VectorXd::LinSpaced(6, -1.0, 1.0);
    EXPECT_EQ(elm_forward(h0, s), h0);
}

TEST(Elm, ShapeContract) {
    NetworkConfig c;
    c.depth = 3;
    c.width = 500;
    c.member_seed = 77;
    const WeightStack s = sample_weights(c, 2000);
    ASSERT_EQ(s.depth(), 3);
    EXPECT_EQ(s.matrices[0].rows(), 500);
    EXPECT_EQ(s.matrices[0].cols(), 2000);
    for (int l = 1; l < 3; ++l) {
        EXPECT_EQ(s.matrices[l].rows(), 500);
        EXPECT_EQ(s.matrices[l].cols(), 500);
    }
}

TEST(Elm, WeightMoments) {
    NetworkConfig c;
    c.depth = 1;
    c.width = 500;
    c.member_seed = 9;
    const WeightStack stack = sample_weights(c, 2000);
    const Eigen::MatrixXd& v = stack.matrices[0];
    EXPECT_GE(v.minCoeff(), -0.1);
    EXPECT_LE(v.maxCoeff(), 0.1);
    EXPECT_NEAR(v.mean(), 0.0, 0.002);
}

TEST(Elm, WeightsAreDeterministic) {
    NetworkConfig c;
    c.depth = 2;
    c.width = 8;
    c.member_seed = 1234;
    const WeightStack a = sample_weights(c, 5);
    const WeightStack b = sample_weights(c, 5);
    for (int l = 0; l < 2; ++l) EXPECT_EQ(a.matrices[l], b.matrices[l]);
}

TEST(Elm, ZeroAndIdentityLayers) {
    const Eigen::VectorXd h0 = Eigen::VectorXd::LinSpaced(8, -1.0, 1.0);
    WeightStack zero{{Eigen::MatrixXd::Zero(5, 8)}};
    EXPECT_EQ(elm_forward(h0, zero), Eigen::VectorXd::Zero(5));
    WeightStack ident{{Eigen::MatrixXd::Identity(8, 8)}};
    EXPECT_EQ(elm_forward(h0, ident), h0.cwiseMax(0.0));
}

TEST(Elm, MatchesStraightLineOracle) {
    NetworkConfig c;
    c.depth = 3;
    c.width = 40;
    c.member_seed = 31;
    const WeightStack s = sample_weights(c, 60);
    const Eigen::VectorXd h0 = Eigen::VectorXd::Random(60);
    const Eigen::VectorXd got = elm_forward(h0, s);
    const std::vector<double> want = oracle::elm_naive(std::vector<double>(h0.data(), h0.data() + 60), s);
    ASSERT_EQ(got.size(), static_cast<Eigen::Index>(want.size()));
    for (Eigen::Index i = 0; i < got.size(); ++i)
        EXPECT_LE(std::abs(got(i) - want[i]), 1e-12 * std::max(1.0, std::abs(want[i])));
}

TEST(Elm, BatchedRowsMatchVectorForward) {
    NetworkConfig c;
    c.depth = 2;
    c.width = 12;
    c.member_seed = 5;
    const WeightStack s = sample_weights(c, 10);
    const Eigen::MatrixXd rows = Eigen::MatrixXd::Random(9, 10);
    const Eigen::MatrixXd out = elm_forward_rows(rows, s);
    for (Eigen::Index i = 0; i < rows.rows(); ++i)
        EXPECT_LT((out.row(i).transpose() - elm_forward(rows.row(i).transpose(), s)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Elm, PositiveHomogeneityAndNonNegativity) {
    NetworkConfig c;
    c.depth = 3;
    c.width = 16;
    c.member_seed = 8;
    const WeightStack s = sample_weights(c, 20);
    WeightStack scaled = s;
    for (auto& m : scaled.matrices) m *= 2.0;
    const Eigen::VectorXd h0 = Eigen::VectorXd::Random(20);
    const Eigen::VectorXd base = elm_forward(h0, s);
    EXPECT_GE(base.minCoeff(), 0.0);
    EXPECT_EQ(elm_forward(h0, scaled), base * 8.0);
}

TEST(Elm, ShapeMismatchIsAnInvariantViolation) {
    WeightStack s{{Eigen::MatrixXd::Ones(3, 4)}};
    EXPECT_THROW(elm_forward(Eigen::VectorXd::Ones(5), s), std::logic_error);
}
