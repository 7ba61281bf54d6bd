#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "reds/csv.hpp"
#include "reds/dataset.hpp"
#include "reds/pipeline.hpp"

using namespace reds;

TEST(Csv, ParsesHeaderAndRows) {
    const CsvTable t = parse_csv("x,response,split\n0.1,2,train\n\n0.5,,test\n");
    ASSERT_EQ(t.header.size(), 3u);
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.line_numbers[1], 4u);
    EXPECT_EQ(t.rows[1][1], "");
    EXPECT_EQ(*t.column("split"), 2u);
    EXPECT_FALSE(t.column("nope").has_value());
}

TEST(Csv, MalformedRowNamesItsLine) {
    try {
        parse_csv("x,response\n0.1,1\n0.2\n", "data.csv");
        FAIL() << "expected InputError";
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("data.csv:3"), std::string::npos) << e.what();
    }
}

TEST(Csv, DoublesRoundTrip) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, (i % 40) - 20);
        EXPECT_EQ(*parse_double(format_double(v)), v);
    }
    EXPECT_FALSE(parse_double("").has_value());
    EXPECT_FALSE(parse_double("1.5x").has_value());
    EXPECT_EQ(*parse_double("-2.5e-3"), -2.5e-3);
}

TEST(Dataset, UnitAxisKeepsIdentity) {
    Eigen::MatrixXd raw(3, 1);
    raw << 0.1, 0.5, 0.9;
    const auto t = fit_unit_transform(raw);
    EXPECT_EQ(t[0].offset, 0.0);
    EXPECT_EQ(t[0].scale, 1.0);
}

TEST(Dataset, LongitudeRangeMapsToUnitInterval) {
    Eigen::MatrixXd raw(3, 2);
    raw << -95.91153, 0.2, -93.0, 0.4, -91.28381, 0.6;
    const Dataset d = make_dataset(raw, Eigen::Vector3d(1, 2, 3), {Split::Train, Split::Train, Split::Train});
    EXPECT_EQ(d.locations(0, 0), 0.0);
    EXPECT_EQ(d.locations(2, 0), 1.0);
    EXPECT_EQ(d.locations(1, 1), 0.4);
    for (int i = 0; i < 3; ++i)
        EXPECT_NEAR(d.transform[0].inverse(d.locations(i, 0)), raw(i, 0), 1e-12);
}

TEST(Dataset, SplitRules) {
    const CsvTable t = parse_csv(
        "lon,lat,response,split\n"
        "0.1,0.1,1.0,train\n"
        "0.2,0.1,2.0,test\n"
        "0.3,0.1,,test\n"
        "0.4,0.1,3.0,\n"
        "0.5,0.1,,\n"
        "0.5,0.1,4.0,predict\n");
    const Dataset d = parse_dataset(t, {});
    ASSERT_EQ(d.size(), 6);
    EXPECT_EQ(d.dim(), 2);
    EXPECT_EQ(d.split[0], Split::Train);
    EXPECT_EQ(d.split[1], Split::Test);
    EXPECT_EQ(d.split[2], Split::Predict);
    EXPECT_EQ(d.split[3], Split::Train);
    EXPECT_EQ(d.split[4], Split::Predict);
    EXPECT_EQ(d.split[5], Split::Predict);
    EXPECT_EQ(d.duplicate_locations, 1);
    EXPECT_EQ(d.scored_test_rows(), (std::vector<Eigen::Index>{1}));
    EXPECT_EQ(d.coordinate_names, (std::vector<std::string>{"lon", "lat"}));
}

TEST(Dataset, BadInputsAreInputErrors) {
    EXPECT_THROW(parse_dataset(parse_csv("x,response,split\n0.1,,train\n"), {}), InputError);
    EXPECT_THROW(parse_dataset(parse_csv("x,response,split\n0.1,1,validate\n"), {}), InputError);
    EXPECT_THROW(parse_dataset(parse_csv("x,response\nfoo,1\n"), {}), InputError);
    EXPECT_THROW(parse_dataset(parse_csv("x,value\n0.1,1\n"), {}), InputError);
    EXPECT_THROW(parse_dataset(parse_csv("a,b,c,response\n0,0,0,1\n"), {}), InputError);
    EXPECT_THROW(load_dataset("/nonexistent/file.csv"), InputError);
}

TEST(Dataset, CsvRoundTrip) {
    Eigen::MatrixXd raw(3, 2);
    raw << 10.5, -3.0, 12.25, -2.0, 11.0, -1.0;
    Eigen::Vector3d y(1.0 / 3.0, std::nan(""), 2.0);
    const Dataset d = make_dataset(raw, y, {Split::Train, Split::Predict, Split::Test}, {"e", "n"});
    const Dataset back = parse_dataset(parse_csv(dataset_to_csv(d)), {});
    EXPECT_EQ(back.raw_locations, d.raw_locations);
    EXPECT_EQ(back.responses(0), d.responses(0));
    EXPECT_TRUE(std::isnan(back.responses(1)));
    EXPECT_EQ(back.split, d.split);
}

TEST(Detrend, RemovesAnExactPlane) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd raw(30, 2);
    Eigen::VectorXd y(30);
    for (int i = 0; i < 30; ++i) {
        raw(i, 0) = u(rng);
        raw(i, 1) = u(rng);
        y(i) = 1.5 - 2.0 * raw(i, 0) + 0.75 * raw(i, 1);
    }
    const Dataset d = make_dataset(raw, y, std::vector<Split>(30, Split::Train));
    const auto [flat, trend] = detrend_linear(d);
    EXPECT_LT(flat.responses.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(trend.coefficients(0), 1.5, 1e-12);
    EXPECT_NEAR(trend.coefficients(1), -2.0, 1e-12);
    EXPECT_NEAR(trend.coefficients(2), 0.75, 1e-12);
    EXPECT_LT((retrend(trend, d.locations, flat.responses) - y).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Detrend, MatchesNormalEquationsAndLeavesConstantsAlone) {
    Eigen::MatrixXd raw(5, 1);
    raw << 0.0, 0.25, 0.5, 0.75, 1.0;
    const Eigen::VectorXd y = (Eigen::VectorXd(5) << 1.0, 3.0, 2.0, 5.0, 4.0).finished();
    const Dataset d = make_dataset(raw, y, std::vector<Split>(5, Split::Train));
    const auto [flat, trend] = detrend_linear(d);
    // Hand-solved least squares line: slope 3.2, intercept 1.4.
    EXPECT_NEAR(trend.coefficients(1), 3.2, 1e-12);
    EXPECT_NEAR(trend.coefficients(0), 1.4, 1e-12);
    EXPECT_NEAR(flat.responses.sum(), 0.0, 1e-12);

    const Dataset c = make_dataset(raw, Eigen::VectorXd::Constant(5, 7.0), std::vector<Split>(5, Split::Train));
    const auto [cflat, ctrend] = detrend_linear(c);
    EXPECT_NEAR(ctrend.coefficients(0), 7.0, 1e-12);
    EXPECT_NEAR(ctrend.coefficients(1), 0.0, 1e-12);
}

TEST(Detrend, CollinearLocationsAreNumericalError) {
    Eigen::MatrixXd raw(4, 2);
    raw << 0.1, 0.2, 0.2, 0.4, 0.3, 0.6, 0.4, 0.8;
    const Dataset d = make_dataset(raw, Eigen::Vector4d(1, 2, 3, 4), std::vector<Split>(4, Split::Train));
    EXPECT_THROW(detrend_linear(d), NumericalError);
}

namespace {

RunConfig tiny_config() {
    RunConfig c;
    c.master_seed = 12;
    c.resolutions = {{0.2, 10}};
    c.ensemble.n_members = 10;
    c.ensemble.ranges.depth_lo = 1;
    c.ensemble.ranges.depth_hi = 2;
    c.ensemble.ranges.width_lo = 20;
    c.ensemble.ranges.width_hi = 30;
    c.ensemble.minibatch_fraction = 0.5;
    return c;
}

Dataset wave(double scale, double offset, int n) {
    Eigen::MatrixXd raw(n, 1);
    Eigen::VectorXd y(n);
    std::vector<Split> split(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double s = static_cast<double>(i) / (n - 1);
        raw(i, 0) = offset + scale * s;
        y(i) = std::sin(5.0 * s) + 0.1 * std::cos(37.0 * s);
        split[i] = i % 4 == 0 ? Split::Test : Split::Train;
    }
    return make_dataset(raw, y, split);
}

}  // namespace

TEST(Pipeline, PredictionsLieInsideIntervals) {
    const Dataset d = wave(1.0, 0.0, 60);
    const PipelineResult r = run_pipeline(tiny_config(), d);
    ASSERT_TRUE(r.calibration.has_value());
    ASSERT_TRUE(r.metrics.has_value());
    EXPECT_EQ(r.metrics->n, 15);
    EXPECT_TRUE(((r.lower.array() <= r.prediction.array()) && (r.prediction.array() <= r.upper.array())).all());
    const std::string csv = predictions_csv(d, r);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 61);
}

TEST(Pipeline, SinglePredictionRow) {
    Dataset d = wave(1.0, 0.0, 20);
    Eigen::MatrixXd raw(21, 1);
    raw << d.raw_locations, 0.5;
    Eigen::VectorXd y(21);
    y << d.responses, std::nan("");
    std::vector<Split> split(20, Split::Train);
    split.push_back(Split::Predict);
    const Dataset full = make_dataset(raw, y, split);
    const PipelineResult r = run_pipeline(tiny_config(), full);
    EXPECT_FALSE(r.metrics.has_value());
    const CsvTable t = parse_csv(predictions_csv(full, r));
    EXPECT_EQ(t.rows.back()[t.header.size() - 1], "predict");
}

TEST(Pipeline, CoordinateRescalingDoesNotChangePredictions) {
    const PipelineResult a = run_pipeline(tiny_config(), wave(1.0, 0.0, 40));
    const PipelineResult b = run_pipeline(tiny_config(), wave(100.0, 5.0, 40));
    EXPECT_LT((a.prediction - b.prediction).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Pipeline, DetrendedRunRestoresTrend) {
    Dataset d = wave(1.0, 0.0, 60);
    const Eigen::VectorXd tilt = 10.0 + 4.0 * d.locations.col(0).array();
    Dataset tilted = d;
    tilted.responses += tilt;
    RunConfig c = tiny_config();
    c.detrend = true;
    const PipelineResult r = run_pipeline(c, tilted);
    ASSERT_TRUE(r.trend.has_value());
    EXPECT_LT((r.prediction - tilted.responses).cwiseAbs().mean(), 1.0);
}

TEST(Pipeline, ResolutionTextRoundTrip) {
    const auto r = parse_resolutions("0.1:500,0.2:300,0.3:200");
    ASSERT_EQ(r.size(), 3u);
    EXPECT_EQ(r[1].radius, 0.2);
    EXPECT_EQ(r[2].count, 200);
    EXPECT_EQ(format_resolutions(r), "0.1:500,0.2:300,0.3:200");
    EXPECT_THROW(parse_resolutions("0.1-500"), ConfigError);
    EXPECT_THROW(parse_resolutions("0.1:2.5"), ConfigError);
}

TEST(Pipeline, NoTrainingRowsIsInputError) {
    Eigen::MatrixXd raw(2, 1);
    raw << 0.1, 0.2;
    const Dataset d = make_dataset(raw, Eigen::Vector2d(1, 2), {Split::Test, Split::Test});
    EXPECT_THROW(run_pipeline(tiny_config(), d), InputError);
}
