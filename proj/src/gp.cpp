#include "reds/gp.hpp"

#include <cmath>
#include <string>

#include "reds/random.hpp"

namespace reds {

KernelSpec KernelSpec::from_lengthscale(double lengthscale, double signal_variance, double nugget) {
    if (!(lengthscale > 0.0)) throw ConfigError("lengthscale must be positive");
    return {signal_variance, 1.0 / (2.0 * lengthscale * lengthscale), nugget};
}

void KernelSpec::validate() const {
    if (!(signal_variance >= 0.0) || !(nugget >= 0.0) || !(rate >= 0.0) || !std::isfinite(signal_variance) ||
        !std::isfinite(nugget) || !std::isfinite(rate))
        throw ConfigError("kernel variances and rate must be finite and non-negative");
}

Eigen::MatrixXd covariance_matrix(const Eigen::Ref<const Eigen::MatrixXd>& locations, const KernelSpec& kernel) {
    Eigen::MatrixXd k = cross_covariance(locations, locations, kernel);
    k.diagonal().array() += kernel.nugget;
    return k;
}

namespace {

Eigen::VectorXd standard_normals(Eigen::Index n, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);
    return z;
}

// Symmetric square root A with A A' = K for a PSD K that may be numerically singular.
Eigen::MatrixXd psd_root(const Eigen::MatrixXd& k) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
    if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition of axis covariance failed");
    const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal();
}

}  // namespace

SimulatedField simulate_gp(const KernelSpec& kernel, const Eigen::Ref<const Eigen::MatrixXd>& locations,
                           std::uint64_t seed, Eigen::Index cholesky_budget) {
    kernel.validate();
    if (!(kernel.nugget > 0.0)) throw ConfigError("simulation needs a positive nugget");
    if (locations.rows() > cholesky_budget)
        throw ConfigError(std::to_string(locations.rows()) + " locations exceed the Cholesky budget of " +
                          std::to_string(cholesky_budget));
    Eigen::LLT<Eigen::MatrixXd> llt(covariance_matrix(locations, kernel));
    if (llt.info() != Eigen::Success) throw NumericalError("Cholesky factorization of the kernel matrix failed");

    Rng rng(seed);
    const Eigen::VectorXd z = standard_normals(locations.rows(), rng);
    SimulatedField field;
    field.locations = locations;
    field.responses = llt.matrixL() * z;
    field.kernel = kernel;
    field.seed = seed;
    field.test_mask.assign(static_cast<std::size_t>(locations.rows()), false);
    return field;
}

SimulatedField simulate_gp_grid(const KernelSpec& kernel, int nx, int ny, std::uint64_t seed) {
    kernel.validate();
    if (nx < 2 || ny < 2) throw ConfigError("grid needs at least 2 points per axis");
    const Eigen::VectorXd gx = Eigen::VectorXd::LinSpaced(nx, 0.0, 1.0);
    const Eigen::VectorXd gy = Eigen::VectorXd::LinSpaced(ny, 0.0, 1.0);

    // exp(-rate (dx^2 + dy^2)) = exp(-rate dx^2) exp(-rate dy^2); signal variance goes on one axis.
    KernelSpec axis{1.0, kernel.rate, 0.0};
    const Eigen::MatrixXd ax = psd_root(cross_covariance(gx, gx, axis)) * std::sqrt(kernel.signal_variance);
    const Eigen::MatrixXd ay = psd_root(cross_covariance(gy, gy, axis));

    Rng rng(seed);
    const Eigen::VectorXd z = standard_normals(static_cast<Eigen::Index>(nx) * ny, rng);
    const Eigen::VectorXd noise = standard_normals(static_cast<Eigen::Index>(nx) * ny, rng);
    const Eigen::Map<const Eigen::MatrixXd> zmat(z.data(), nx, ny);
    const Eigen::MatrixXd latent = ax * zmat * ay.transpose();

    SimulatedField field;
    field.locations.resize(static_cast<Eigen::Index>(nx) * ny, 2);
    field.responses.resize(static_cast<Eigen::Index>(nx) * ny);
    const double nugget_sd = std::sqrt(kernel.nugget);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const Eigen::Index idx = static_cast<Eigen::Index>(j) * nx + i;
            field.locations(idx, 0) = gx(i);
            field.locations(idx, 1) = gy(j);
            field.responses(idx) = latent(i, j) + nugget_sd * noise(idx);
        }
    field.kernel = kernel;
    field.seed = seed;
    field.test_mask.assign(static_cast<std::size_t>(nx) * ny, false);
    return field;
}

std::vector<bool> make_holdout_intervals(const Eigen::Ref<const Eigen::VectorXd>& locations, double width,
                                         int n_intervals, std::uint64_t seed) {
    if (!(width > 0.0 && width < 1.0)) throw ConfigError("holdout width must lie in (0, 1)");
    if (n_intervals < 0) throw ConfigError("number of holdout intervals must be >= 0");
    Rng rng(seed);
    std::uniform_real_distribution<double> start(0.0, 1.0 - width);
    std::vector<bool> mask(static_cast<std::size_t>(locations.size()), false);
    for (int k = 0; k < n_intervals; ++k) {
        const double a = start(rng);
        for (Eigen::Index i = 0; i < locations.size(); ++i)
            if (locations(i) >= a && locations(i) < a + width) mask[i] = true;
    }
    std::size_t n_test = 0;
    for (bool b : mask) n_test += b ? 1 : 0;
    if (n_test == mask.size()) throw ConfigError("holdout intervals leave no training points");
    if (n_intervals > 0 && n_test == 0) throw ConfigError("holdout intervals contain no points");
    return mask;
}

std::vector<bool> make_holdout_block(const Eigen::Ref<const Eigen::MatrixXd>& locations, double width_x,
                                     double width_y, std::uint64_t seed) {
    if (locations.cols() != 2) throw InputError("block holdout needs 2D locations");
    if (!(width_x > 0.0 && width_x < 1.0 && width_y > 0.0 && width_y < 1.0))
        throw ConfigError("block side lengths must lie in (0, 1)");
    Rng rng(seed);
    const double x0 = std::uniform_real_distribution<double>(0.0, 1.0 - width_x)(rng);
    const double y0 = std::uniform_real_distribution<double>(0.0, 1.0 - width_y)(rng);
    std::vector<bool> mask(static_cast<std::size_t>(locations.rows()), false);
    std::size_t n_test = 0;
    for (Eigen::Index i = 0; i < locations.rows(); ++i) {
        const double x = locations(i, 0);
        const double y = locations(i, 1);
        if (x >= x0 && x < x0 + width_x && y >= y0 && y < y0 + width_y) {
            mask[i] = true;
            ++n_test;
        }
    }
    if (n_test == 0 || n_test == mask.size()) throw ConfigError("holdout block leaves an empty train or test set");
    return mask;
}

KrigingPrediction krige(const Eigen::Ref<const Eigen::MatrixXd>& train_locations,
                        const Eigen::Ref<const Eigen::VectorXd>& train_y,
                        const Eigen::Ref<const Eigen::MatrixXd>& test_locations, const KernelSpec& kernel,
                        Eigen::Index cholesky_budget) {
    kernel.validate();
    if (train_locations.rows() < 1) throw InputError("kriging needs at least one training point");
    if (train_locations.rows() != train_y.size()) throw InputError("kriging locations and responses differ in length");
    if (train_locations.cols() != test_locations.cols()) throw InputError("kriging train/test dimensions differ");
    if (train_locations.rows() > cholesky_budget)
        throw ConfigError(std::to_string(train_locations.rows()) + " training points exceed the Cholesky budget of " +
                          std::to_string(cholesky_budget));

    Eigen::LLT<Eigen::MatrixXd> llt(covariance_matrix(train_locations, kernel));
    if (llt.info() != Eigen::Success) throw NumericalError("kriging system is not positive definite");

    const Eigen::MatrixXd kstar = cross_covariance(train_locations, test_locations, kernel);
    const Eigen::VectorXd weights = llt.solve(train_y);
    Eigen::MatrixXd v = llt.matrixL().solve(kstar);

    KrigingPrediction out;
    out.mean = kstar.transpose() * weights;
    const Eigen::VectorXd explained = v.colwise().squaredNorm().transpose();
    out.sd = ((kernel.signal_variance - explained.array()).max(0.0) + kernel.nugget).sqrt();
    return out;
}

}  // namespace reds
