#include "reds/pipeline.hpp"

#include <cmath>
#include <sstream>

#include "reds/random.hpp"

namespace reds {

namespace {

// Member seeds use tags 0..N-1; the frequency draw takes the top of the range.
constexpr std::uint64_t frequency_tag = ~std::uint64_t{0};

}  // namespace

void RunConfig::validate() const {
    ensemble.validate();
    if (resolutions.empty()) throw ConfigError("at least one RFF resolution is required");
    for (const auto& r : resolutions)
        if (!(r.radius > 0.0) || r.count < 1) throw ConfigError("RFF resolutions need radius > 0 and count >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
}

std::vector<Resolution> parse_resolutions(const std::string& text) {
    std::vector<Resolution> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError("resolution '" + item + "' is not radius:count");
        const auto radius = parse_double(item.substr(0, colon));
        const auto count = parse_double(item.substr(colon + 1));
        if (!radius || !count || *count != std::floor(*count))
            throw ConfigError("resolution '" + item + "' is not radius:count");
        out.push_back({*radius, static_cast<int>(*count)});
    }
    if (out.empty()) throw ConfigError("at least one RFF resolution is required");
    return out;
}

std::string format_resolutions(const std::vector<Resolution>& resolutions) {
    std::string s;
    for (const auto& r : resolutions) {
        if (!s.empty()) s += ',';
        s += format_double(r.radius) + ':' + std::to_string(r.count);
    }
    return s;
}

std::string RunConfig::to_text() const {
    const auto& e = ensemble;
    const auto& h = e.ranges;
    std::ostringstream os;
    os << "seed = " << master_seed << '\n'
       << "n_ensembles = " << e.n_members << '\n'
       << "n_keep = " << e.n_keep << '\n'
       << "keep_fraction = " << format_double(e.keep_fraction) << '\n'
       << "minibatch_fraction = " << format_double(e.minibatch_fraction) << '\n'
       << "resolutions = \"" << format_resolutions(resolutions) << "\"\n"
       << "depth_min = " << h.depth_lo << '\n'
       << "depth_max = " << h.depth_hi << '\n'
       << "width_min = " << h.width_lo << '\n'
       << "width_max = " << h.width_hi << '\n'
       << "lambda_min = " << format_double(h.lambda_lo) << '\n'
       << "lambda_max = " << format_double(h.lambda_hi) << '\n'
       << "weight_min = " << format_double(h.weight_lo) << '\n'
       << "weight_max = " << format_double(h.weight_hi) << '\n'
       << "lasso_tolerance = " << format_double(e.lasso.tolerance) << '\n'
       << "lasso_max_sweeps = " << e.lasso.max_sweeps << '\n'
       << "alpha = " << format_double(alpha) << '\n'
       << "detrend = " << (detrend ? "true" : "false") << '\n'
       << "crps_scale = " << (crps_scale == CrpsScale::Iqr ? "iqr" : "interval") << '\n'
       << "workers = " << e.workers << '\n'
       << "prediction_budget = " << e.prediction_budget << '\n';
    return os.str();
}

PipelineResult run_pipeline(const RunConfig& config, const Dataset& data) {
    config.validate();
    const auto train = data.rows(Split::Train);
    if (train.empty()) throw InputError("dataset has no training rows");

    PipelineResult result;
    const Dataset* work = &data;
    Dataset detrended;
    if (config.detrend) {
        auto [d, t] = detrend_linear(data);
        detrended = std::move(d);
        result.trend = std::move(t);
        work = &detrended;
    }

    const FrequencySet fs =
        sample_frequencies(config.resolutions, data.dim(), derive_seed(config.master_seed, frequency_tag));
    const Eigen::MatrixXd features = rff_transform_rows(work->locations, fs);

    Eigen::VectorXd train_y(static_cast<Eigen::Index>(train.size()));
    for (std::size_t k = 0; k < train.size(); ++k) train_y(static_cast<Eigen::Index>(k)) = work->responses(train[k]);

    EnsembleOptions opts = config.ensemble;
    opts.master_seed = config.master_seed;
    result.ensemble = run_ensemble(features, train, train_y, opts);
    const EnsembleSummary& summary = result.ensemble.summary;

    Eigen::VectorXd center(train_y.size());
    Eigen::VectorXd spread(train_y.size());
    for (std::size_t k = 0; k < train.size(); ++k) {
        center(static_cast<Eigen::Index>(k)) = summary.median(train[k]);
        spread(static_cast<Eigen::Index>(k)) = summary.iqr(train[k]);
    }

    result.sigma = summary.iqr;
    result.prediction = summary.median;
    try {
        result.calibration = calibrate_cutoff(center, spread, train_y, config.alpha);
        const CalibratedIntervals iv = emit_intervals(summary.median, summary.iqr, *result.calibration);
        result.lower = iv.lower;
        result.upper = iv.upper;
    } catch (const CalibrationError& e) {
        result.calibration_failure = e.what();
    }

    if (result.trend) {
        const Eigen::VectorXd t = result.trend->evaluate(data.locations);
        result.prediction += t;
        if (result.calibration) {
            result.lower += t;
            result.upper += t;
        }
    }

    const auto scored = data.scored_test_rows();
    if (!scored.empty() && result.calibration) {
        const auto n = static_cast<Eigen::Index>(scored.size());
        Eigen::VectorXd y(n), pred(n), lo(n), hi(n), sig(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            const Eigen::Index i = scored[k];
            y(k) = data.responses(i);
            pred(k) = result.prediction(i);
            lo(k) = result.lower(i);
            hi(k) = result.upper(i);
            sig(k) = result.sigma(i);
        }
        result.metrics = report(y, pred, lo, hi, config.alpha, config.crps_scale, sig);
    }
    return result;
}

std::string predictions_csv(const Dataset& data, const PipelineResult& result) {
    std::ostringstream os;
    for (const auto& name : data.coordinate_names) os << name << ',';
    os << "prediction,lower,upper,sigma_en,split\n";
    const bool intervals = result.calibration.has_value();
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        if (intervals && !(result.lower(i) <= result.prediction(i) && result.prediction(i) <= result.upper(i)))
            throw NumericalError("row " + std::to_string(i) + ": prediction lies outside its interval");
        for (Eigen::Index c = 0; c < data.raw_locations.cols(); ++c) os << format_double(data.raw_locations(i, c)) << ',';
        os << format_double(result.prediction(i)) << ',';
        if (intervals) os << format_double(result.lower(i)) << ',' << format_double(result.upper(i));
        else os << ',';
        os << ',' << format_double(result.sigma(i)) << ',' << to_string(data.split[i]) << '\n';
    }
    return os.str();
}

std::string grid_csv(const Dataset& data, const Eigen::Ref<const Eigen::VectorXd>& values) {
    if (data.dim() != 2) throw InputError("plot grids need 2D locations");
    std::ostringstream os;
    os << data.coordinate_names[0] << ',' << data.coordinate_names[1] << ",value\n";
    for (Eigen::Index i = 0; i < data.size(); ++i)
        os << format_double(data.raw_locations(i, 0)) << ',' << format_double(data.raw_locations(i, 1)) << ','
           << format_double(values(i)) << '\n';
    return os.str();
}

void write_outputs(const RunConfig& config, const Dataset& data, const PipelineResult& result) {
    if (!config.predictions_path.empty()) write_text_file(config.predictions_path, predictions_csv(data, result));
    if (!config.metrics_path.empty()) {
        std::string text;
        if (result.calibration) {
            text += "v_hat = " + format_double(result.calibration->v_hat) + '\n';
            text += "train_coverage = " + format_double(result.calibration->achieved_coverage) + '\n';
            text += "degenerate_count = " + std::to_string(result.calibration->degenerate_count) + '\n';
        }
        if (result.calibration_failure) text += "calibration_error = \"" + *result.calibration_failure + "\"\n";
        text += "retained = " + std::to_string(result.ensemble.summary.retained) + '\n';
        text += "duplicate_locations = " + std::to_string(data.duplicate_locations) + '\n';
        if (result.metrics) text += format_report(*result.metrics);
        write_text_file(config.metrics_path, text);
        if (result.metrics)
            write_text_file(config.metrics_path + ".csv",
                            report_csv_header() + '\n' + report_csv_row(*result.metrics) + '\n');
    }
    if (!config.grid_prefix.empty() && data.dim() == 2) {
        write_text_file(config.grid_prefix + "_prediction.csv", grid_csv(data, result.prediction));
        if (result.calibration) {
            write_text_file(config.grid_prefix + "_lower.csv", grid_csv(data, result.lower));
            write_text_file(config.grid_prefix + "_upper.csv", grid_csv(data, result.upper));
        }
    }
}

}  // namespace reds
