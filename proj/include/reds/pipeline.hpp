#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reds/calibrate.hpp"
#include "reds/dataset.hpp"
#include "reds/ensemble.hpp"
#include "reds/metrics.hpp"
#include "reds/rff.hpp"

namespace reds {

/// Everything a `fit` run needs. Defaults are the standard REDS settings:
/// 500 members, best 20% kept, minibatch n/10, three RFF bands, alpha 0.05.
struct RunConfig {
    std::uint64_t master_seed = 0;
    EnsembleOptions ensemble;
    std::vector<Resolution> resolutions = default_resolutions();
    double alpha = 0.05;
    bool detrend = false;
    CrpsScale crps_scale = CrpsScale::IntervalHalfWidth;

    std::string predictions_path;
    std::string metrics_path;
    /// Prefix for the 2D plot-grid files; empty disables them.
    std::string grid_prefix;

    void validate() const;
    /// Flat `key = value` text, readable back as a config file.
    std::string to_text() const;
};

/// "0.1:500,0.2:300,0.3:200"
std::vector<Resolution> parse_resolutions(const std::string& text);
std::string format_resolutions(const std::vector<Resolution>& resolutions);

struct PipelineResult {
    EnsembleResult ensemble;
    /// Empty when the coverage target was unreachable; see calibration_failure.
    std::optional<CalibrationResult> calibration;
    std::optional<std::string> calibration_failure;
    std::optional<TrendFit> trend;

    /// Point prediction and interval bounds on the response scale, for every row.
    Eigen::VectorXd prediction;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    /// Raw ensemble IQR for every row.
    Eigen::VectorXd sigma;

    /// Test-set scores; absent when there are no scored test rows or calibration failed.
    std::optional<MetricReport> metrics;
};

PipelineResult run_pipeline(const RunConfig& config, const Dataset& data);

/// Predictions CSV: coordinates (raw units), prediction, lower, upper, sigma_en, split.
std::string predictions_csv(const Dataset& data, const PipelineResult& result);

/// Long-format x,y,value grid of one surface (2D only).
std::string grid_csv(const Dataset& data, const Eigen::Ref<const Eigen::VectorXd>& values);

/// Writes the predictions file, the metrics text block and CSV (`<metrics_path>.csv`),
/// and for 2D data the prediction/lower/upper grids. Paths left empty are skipped.
void write_outputs(const RunConfig& config, const Dataset& data, const PipelineResult& result);

}  // namespace reds
