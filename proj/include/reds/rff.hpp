#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "reds/errors.hpp"

namespace reds {

/// One band of the multi-resolution frequency law: `count` frequencies drawn
/// per-coordinate from N(0, 1/radius^2), i.e. a Gaussian RBF kernel of bandwidth `radius`.
struct Resolution {
    double radius = 0.1;
    int count = 1;
};

/// The default three-band layout: 500/300/200 frequencies at radii 0.1/0.2/0.3.
std::vector<Resolution> default_resolutions();

/// Random frequencies defining the Fourier feature layer. Row j of `frequencies` is omega_j.
/// Immutable after construction; safe to share across worker threads.
class FrequencySet {
public:
    FrequencySet(Eigen::MatrixXd frequencies, std::vector<Resolution> resolutions, std::uint64_t seed);

    const Eigen::MatrixXd& frequencies() const noexcept { return omega_; }
    const std::vector<Resolution>& resolutions() const noexcept { return resolutions_; }
    std::uint64_t seed() const noexcept { return seed_; }

    /// J, the number of frequencies.
    Eigen::Index size() const noexcept { return omega_.rows(); }
    /// Spatial dimension (1 or 2).
    Eigen::Index dim() const noexcept { return omega_.cols(); }
    /// Length of a feature vector, 2J.
    Eigen::Index feature_dim() const noexcept { return 2 * omega_.rows(); }

private:
    Eigen::MatrixXd omega_;
    std::vector<Resolution> resolutions_;
    std::uint64_t seed_;
};

FrequencySet sample_frequencies(const std::vector<Resolution>& resolutions, int dim, std::uint64_t seed);

/// Feature vector (cos w1's, sin w1's, ..., cos wJ's, sin wJ's) for one location.
Eigen::VectorXd rff_transform(const Eigen::Ref<const Eigen::VectorXd>& s, const FrequencySet& fs);

/// Batched form: row i of the result is the feature vector of row i of `locations`.
Eigen::MatrixXd rff_transform_rows(const Eigen::Ref<const Eigen::MatrixXd>& locations, const FrequencySet& fs);

/// (1/J) <phi(x), phi(y)>, the Monte Carlo estimate of the shift-invariant kernel.
double kernel_approximation(const Eigen::Ref<const Eigen::VectorXd>& x,
                            const Eigen::Ref<const Eigen::VectorXd>& y,
                            const FrequencySet& fs);

/// Kernel that a single band of radius `radius` approximates: exp(-|x-y|^2 / (2 radius^2)).
template <typename DerivedX, typename DerivedY>
double gaussian_kernel(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y, double radius) {
    return std::exp(-(x - y).squaredNorm() / (2.0 * radius * radius));
}

}  // namespace reds
