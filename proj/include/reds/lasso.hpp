#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "reds/errors.hpp"

namespace reds {

struct LassoOptions {
    /// Stop when a full sweep changes no standardized coefficient by more than this.
    double tolerance = 1e-6;
    int max_sweeps = 1000;
    /// Record the penalized objective after every sweep (diagnostics and tests).
    bool record_objective = false;
};

/// Output-layer fit on the original feature scale.
struct LassoFit {
    Eigen::VectorXd coefficients;
    double intercept = 0.0;
    double lambda = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace;

    Eigen::Index nonzeros() const { return (coefficients.array() != 0.0).count(); }
};

/// ceil(n / 10).
Eigen::Index default_minibatch_size(Eigen::Index n);

/// Uniform size-M subset of `train_indices` without replacement, returned in ascending order.
std::vector<Eigen::Index> draw_minibatch(std::span<const Eigen::Index> train_indices, Eigen::Index m,
                                         std::uint64_t seed);

/// Minimizes (1/(2M))|y - b0 - X b|^2 + lambda |b|_1 with an unpenalized intercept.
///
/// Columns of X are centered and scaled to unit population variance before cyclic
/// coordinate descent with soft-thresholding; `lambda` applies on that scale and the
/// coefficients are mapped back to the original columns. Zero-variance columns get a
/// zero coefficient. Hitting `max_sweeps` returns the current iterate with `converged = false`.
LassoFit fit_lasso(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                   double lambda, const LassoOptions& options = {});

/// Smallest lambda giving the all-zero solution: max_j |z_j' (y - mean y)| / M on standardized columns.
double lambda_max(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y);

/// intercept + X b, row by row.
Eigen::VectorXd predict_linear(const LassoFit& fit, const Eigen::Ref<const Eigen::MatrixXd>& features);

inline double soft_threshold(double z, double t) noexcept {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

}  // namespace reds
