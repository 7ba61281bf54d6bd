#include "reds/elm.hpp"

#include <cmath>
#include <string>

#include "reds/random.hpp"

namespace reds {

void HyperRanges::validate() const {
    if (depth_lo < 0 || depth_hi < depth_lo)
        throw ConfigError("depth range [" + std::to_string(depth_lo) + ", " + std::to_string(depth_hi) + "] is invalid");
    if (width_lo < 1 || width_hi < width_lo)
        throw ConfigError("width range [" + std::to_string(width_lo) + ", " + std::to_string(width_hi) + "] is invalid");
    if (!(lambda_lo > 0.0) || !(lambda_hi >= lambda_lo) || !std::isfinite(lambda_hi))
        throw ConfigError("lambda range must satisfy 0 < lo <= hi");
    if (!(weight_hi >= weight_lo) || !std::isfinite(weight_lo) || !std::isfinite(weight_hi))
        throw ConfigError("hidden weight range must satisfy lo <= hi");
}

NetworkConfig sample_network_config(const HyperRanges& ranges, int member_index, std::uint64_t master_seed) {
    ranges.validate();
    NetworkConfig cfg;
    cfg.member_index = member_index;
    cfg.member_seed = derive_seed(master_seed, static_cast<std::uint64_t>(member_index));
    cfg.weight_lo = ranges.weight_lo;
    cfg.weight_hi = ranges.weight_hi;

    Rng rng(derive_seed(cfg.member_seed, stream::member));
    cfg.depth = std::uniform_int_distribution<int>(ranges.depth_lo, ranges.depth_hi)(rng);
    cfg.width = std::uniform_int_distribution<int>(ranges.width_lo, ranges.width_hi)(rng);
    cfg.lambda = ranges.lambda_lo == ranges.lambda_hi
                     ? ranges.lambda_lo
                     : std::uniform_real_distribution<double>(ranges.lambda_lo, ranges.lambda_hi)(rng);
    return cfg;
}

WeightStack sample_weights(const NetworkConfig& config, Eigen::Index input_dim) {
    if (input_dim < 1) throw ConfigError("input dimension must be >= 1");
    if (config.depth < 0 || config.width < 1) throw ConfigError("network config has invalid depth or width");

    Rng rng(derive_seed(config.member_seed, stream::weights));
    std::uniform_real_distribution<double> unif(config.weight_lo, config.weight_hi);
    WeightStack stack;
    stack.matrices.reserve(config.depth);
    Eigen::Index cols = input_dim;
    for (int layer = 0; layer < config.depth; ++layer) {
        Eigen::MatrixXd v(config.width, cols);
        // Fill row by row so the draw order is independent of Eigen's storage order.
        for (Eigen::Index r = 0; r < v.rows(); ++r)
            for (Eigen::Index c = 0; c < v.cols(); ++c) v(r, c) = unif(rng);
        stack.matrices.push_back(std::move(v));
        cols = config.width;
    }
    return stack;
}

namespace {

void check_input(Eigen::Index got, const WeightStack& stack) {
    if (!stack.empty() && got != stack.matrices.front().cols())
        throw std::logic_error("ELM input has " + std::to_string(got) + " features, first layer expects " +
                               std::to_string(stack.matrices.front().cols()));
}

}  // namespace

Eigen::VectorXd elm_forward(const Eigen::Ref<const Eigen::VectorXd>& h0, const WeightStack& stack) {
    check_input(h0.size(), stack);
    Eigen::VectorXd h = h0;
    for (const auto& v : stack.matrices) h = (v * h).cwiseMax(0.0);
    return h;
}

Eigen::MatrixXd elm_forward_rows(const Eigen::Ref<const Eigen::MatrixXd>& rows, const WeightStack& stack) {
    check_input(rows.cols(), stack);
    if (stack.empty()) return rows;
    Eigen::MatrixXd h(rows.rows(), stack.matrices.front().rows());
    h.noalias() = rows * stack.matrices.front().transpose();
    h = h.cwiseMax(0.0);
    for (std::size_t l = 1; l < stack.matrices.size(); ++l) {
        Eigen::MatrixXd next(h.rows(), stack.matrices[l].rows());
        next.noalias() = h * stack.matrices[l].transpose();
        h = next.cwiseMax(0.0);
    }
    return h;
}

}  // namespace reds
