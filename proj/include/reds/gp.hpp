#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "reds/errors.hpp"

namespace reds {

/// Squared-exponential covariance with nugget:
/// cov(a, b) = signal_variance * exp(-rate * |a - b|^2) + nugget * [a is b].
struct KernelSpec {
    double signal_variance = 1.0;
    double rate = 16.0;
    double nugget = 0.1;

    /// rate = 1 / (2 lengthscale^2).
    static KernelSpec from_lengthscale(double lengthscale, double signal_variance, double nugget);
    void validate() const;

    double latent(double squared_distance) const { return signal_variance * std::exp(-rate * squared_distance); }
};

/// Latent (nugget-free) cross-covariance between the rows of `a` and the rows of `b`.
template <typename DerivedA, typename DerivedB>
Eigen::MatrixXd cross_covariance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                                 const KernelSpec& kernel) {
    Eigen::MatrixXd k(a.rows(), b.rows());
    for (Eigen::Index j = 0; j < b.rows(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i) k(i, j) = kernel.latent((a.row(i) - b.row(j)).squaredNorm());
    return k;
}

/// Covariance of the observed responses at `locations`: latent part plus nugget on the diagonal.
Eigen::MatrixXd covariance_matrix(const Eigen::Ref<const Eigen::MatrixXd>& locations, const KernelSpec& kernel);

struct SimulatedField {
    Eigen::MatrixXd locations;
    Eigen::VectorXd responses;
    KernelSpec kernel;
    std::uint64_t seed = 0;
    /// true marks a held-out (test) location.
    std::vector<bool> test_mask;
};

inline constexpr Eigen::Index default_cholesky_budget = 5000;

/// y = L z with L the Cholesky factor of covariance_matrix(locations) and z iid N(0, 1).
SimulatedField simulate_gp(const KernelSpec& kernel, const Eigen::Ref<const Eigen::MatrixXd>& locations,
                           std::uint64_t seed, Eigen::Index cholesky_budget = default_cholesky_budget);

/// Exact draw on the nx x ny grid {i/(nx-1)} x {j/(ny-1)} using the separable structure of
/// the squared-exponential kernel: latent = A Z B' with A A' = K_x, B B' = K_y, then iid nugget noise.
/// Row order is x-major within y: location index = j * nx + i.
SimulatedField simulate_gp_grid(const KernelSpec& kernel, int nx, int ny, std::uint64_t seed);

/// Test mask = union of `n_intervals` random intervals [a, a + width) with a ~ U(0, 1 - width).
std::vector<bool> make_holdout_intervals(const Eigen::Ref<const Eigen::VectorXd>& locations, double width,
                                         int n_intervals, std::uint64_t seed);

/// Test mask = one axis-aligned rectangle of the given side lengths placed uniformly inside [0,1]^2.
std::vector<bool> make_holdout_block(const Eigen::Ref<const Eigen::MatrixXd>& locations, double width_x,
                                     double width_y, std::uint64_t seed);

struct KrigingPrediction {
    Eigen::VectorXd mean;
    /// Predictive sd of a new observation (latent variance plus nugget).
    Eigen::VectorXd sd;
};

/// Zero-mean GP conditional with a known kernel.
KrigingPrediction krige(const Eigen::Ref<const Eigen::MatrixXd>& train_locations,
                        const Eigen::Ref<const Eigen::VectorXd>& train_y,
                        const Eigen::Ref<const Eigen::MatrixXd>& test_locations, const KernelSpec& kernel,
                        Eigen::Index cholesky_budget = default_cholesky_budget);

}  // namespace reds
