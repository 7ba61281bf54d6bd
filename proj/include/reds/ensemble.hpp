#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "reds/elm.hpp"
#include "reds/lasso.hpp"

namespace reds {

struct EnsembleOptions {
    int n_members = 500;
    /// Number of members kept; 0 means ceil(keep_fraction * n_members).
    int n_keep = 0;
    double keep_fraction = 0.2;
    /// Minibatch size is ceil(minibatch_fraction * n_train).
    double minibatch_fraction = 0.1;
    HyperRanges ranges;
    LassoOptions lasso;
    std::uint64_t master_seed = 0;
    int workers = 1;
    /// Above n_members * n_locations stored doubles, member predictions are not kept during
    /// scoring; the retained members are recomputed from their seeds instead.
    std::size_t prediction_budget = std::size_t{1} << 27;

    int resolved_keep() const;
    Eigen::Index resolved_minibatch(Eigen::Index n_train) const;
    void validate() const;
};

/// One ensemble member after fitting and scoring.
struct NetworkRealization {
    NetworkConfig config;
    LassoFit fit;
    /// RMSE over the full training set; +inf marks an invalid member.
    double training_rmse = 0.0;
    /// Predictions at every location (rows of the feature matrix); empty when not materialized.
    Eigen::VectorXd predictions;

    bool valid() const noexcept { return std::isfinite(training_rmse); }
};

/// Per-location median and IQR over the retained members.
struct EnsembleSummary {
    Eigen::VectorXd median;
    Eigen::VectorXd iqr;
    int retained = 0;
};

struct EnsembleResult {
    EnsembleSummary summary;
    std::vector<double> training_rmse;  ///< all N members, by index
    std::vector<int> selected;          ///< retained member indices, best first
    std::vector<NetworkConfig> configs;
};

/// Fits member `member_index` on `features` (n_locations x 2J Fourier features).
/// `train_rows` index the training rows of `features`; `train_y` is aligned with them.
NetworkRealization run_member(int member_index, const Eigen::Ref<const Eigen::MatrixXd>& features,
                              std::span<const Eigen::Index> train_rows, const Eigen::Ref<const Eigen::VectorXd>& train_y,
                              Eigen::Index minibatch_size, const HyperRanges& ranges, std::uint64_t master_seed,
                              const LassoOptions& lasso = {}, bool keep_predictions = true);

/// Indices of the `keep` smallest RMSEs, ascending by (rmse, index). Invalid members are
/// never selected; fewer than `keep` valid members is a NumericalError.
std::vector<int> select_good(std::span<const double> training_rmse, int keep);

/// Type-7 quantile (linear interpolation between order statistics) of sorted data.
double quantile_sorted(std::span<const double> sorted, double prob);

/// Column j of `member_predictions` (n_locations x R) holds one retained member.
EnsembleSummary aggregate(const Eigen::Ref<const Eigen::MatrixXd>& member_predictions);

/// Runs every member in parallel, rejects all but the best, aggregates.
/// The result does not depend on `options.workers`.
EnsembleResult run_ensemble(const Eigen::Ref<const Eigen::MatrixXd>& features,
                            std::span<const Eigen::Index> train_rows, const Eigen::Ref<const Eigen::VectorXd>& train_y,
                            const EnsembleOptions& options);

}  // namespace reds
