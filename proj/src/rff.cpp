#include "reds/rff.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "reds/random.hpp"

namespace reds {

std::vector<Resolution> default_resolutions() {
    return {{0.1, 500}, {0.2, 300}, {0.3, 200}};
}

FrequencySet::FrequencySet(Eigen::MatrixXd frequencies, std::vector<Resolution> resolutions, std::uint64_t seed)
    : omega_(std::move(frequencies)), resolutions_(std::move(resolutions)), seed_(seed) {
    if (!omega_.allFinite()) throw InputError("frequency set contains non-finite values");
}

FrequencySet sample_frequencies(const std::vector<Resolution>& resolutions, int dim, std::uint64_t seed) {
    if (resolutions.empty()) throw ConfigError("at least one RFF resolution is required");
    if (dim != 1 && dim != 2) throw ConfigError("spatial dimension must be 1 or 2, got " + std::to_string(dim));
    Eigen::Index total = 0;
    for (const auto& r : resolutions) {
        if (!(r.radius > 0.0) || !std::isfinite(r.radius))
            throw ConfigError("RFF radius must be positive and finite");
        if (r.count < 1) throw ConfigError("RFF frequency count must be >= 1");
        total += r.count;
    }

    Eigen::MatrixXd omega(total, dim);
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::Index row = 0;
    for (const auto& r : resolutions) {
        const double sd = 1.0 / r.radius;
        for (int k = 0; k < r.count; ++k, ++row)
            for (int c = 0; c < dim; ++c) omega(row, c) = sd * normal(rng);
    }
    return FrequencySet(std::move(omega), resolutions, seed);
}

Eigen::VectorXd rff_transform(const Eigen::Ref<const Eigen::VectorXd>& s, const FrequencySet& fs) {
    if (s.size() != fs.dim())
        throw InputError("location has dimension " + std::to_string(s.size()) + ", frequency set expects " +
                         std::to_string(fs.dim()));
    const Eigen::VectorXd phase = fs.frequencies() * s;
    Eigen::VectorXd out(fs.feature_dim());
    for (Eigen::Index j = 0; j < phase.size(); ++j) {
        out(2 * j) = std::cos(phase(j));
        out(2 * j + 1) = std::sin(phase(j));
    }
    return out;
}

Eigen::MatrixXd rff_transform_rows(const Eigen::Ref<const Eigen::MatrixXd>& locations, const FrequencySet& fs) {
    if (locations.cols() != fs.dim())
        throw InputError("locations have dimension " + std::to_string(locations.cols()) +
                         ", frequency set expects " + std::to_string(fs.dim()));
    const Eigen::MatrixXd phase = locations * fs.frequencies().transpose();
    Eigen::MatrixXd out(locations.rows(), fs.feature_dim());
    for (Eigen::Index j = 0; j < phase.cols(); ++j) {
        out.col(2 * j) = phase.col(j).array().cos();
        out.col(2 * j + 1) = phase.col(j).array().sin();
    }
    return out;
}

double kernel_approximation(const Eigen::Ref<const Eigen::VectorXd>& x,
                            const Eigen::Ref<const Eigen::VectorXd>& y,
                            const FrequencySet& fs) {
    const Eigen::VectorXd px = rff_transform(x, fs);
    const Eigen::VectorXd py = rff_transform(y, fs);
    // Pairwise cos(a)cos(b) + sin(a)sin(b) summed in a fixed order, so the value is symmetric in (x, y).
    double acc = 0.0;
    for (Eigen::Index i = 0; i < px.size(); ++i) acc += px(i) * py(i);
    return acc / static_cast<double>(fs.size());
}

}  // namespace reds
