#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "reds/errors.hpp"

namespace reds {

/// Sampling ranges for the per-member hyperparameters. All bounds are inclusive.
struct HyperRanges {
    int depth_lo = 1;
    int depth_hi = 4;
    int width_lo = 1000;
    int width_hi = 1200;
    double lambda_lo = 0.001;
    double lambda_hi = 0.005;
    /// Hidden weights are iid Uniform(weight_lo, weight_hi).
    double weight_lo = -0.1;
    double weight_hi = 0.1;

    void validate() const;
};

/// Hyperparameters of one ensemble member.
struct NetworkConfig {
    int depth = 1;       ///< K, number of random ReLU projections after the Fourier layer
    int width = 1;       ///< d, shared by every hidden layer
    double lambda = 0.001;
    int member_index = 0;
    std::uint64_t member_seed = 0;
    double weight_lo = -0.1;
    double weight_hi = 0.1;
};

/// Random hidden weights: matrix 0 is width x input_dim, the rest width x width.
struct WeightStack {
    std::vector<Eigen::MatrixXd> matrices;

    int depth() const noexcept { return static_cast<int>(matrices.size()); }
    bool empty() const noexcept { return matrices.empty(); }
};

/// Draws (K, d, lambda) for member `member_index`; depends only on (master_seed, member_index).
NetworkConfig sample_network_config(const HyperRanges& ranges, int member_index, std::uint64_t master_seed);

WeightStack sample_weights(const NetworkConfig& config, Eigen::Index input_dim);

/// max(V h, 0) applied once per matrix. Works on a single column vector or on a batch of
/// row-major feature rows: for `rows` (n x p) the result is n x width.
Eigen::VectorXd elm_forward(const Eigen::Ref<const Eigen::VectorXd>& h0, const WeightStack& stack);
Eigen::MatrixXd elm_forward_rows(const Eigen::Ref<const Eigen::MatrixXd>& rows, const WeightStack& stack);

}  // namespace reds
