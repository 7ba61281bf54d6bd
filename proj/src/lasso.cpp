#include "reds/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "reds/random.hpp"

namespace reds {

Eigen::Index default_minibatch_size(Eigen::Index n) {
    return (n + 9) / 10;
}

std::vector<Eigen::Index> draw_minibatch(std::span<const Eigen::Index> train_indices, Eigen::Index m,
                                         std::uint64_t seed) {
    const auto n = static_cast<Eigen::Index>(train_indices.size());
    if (m < 1 || m > n)
        throw ConfigError("minibatch size " + std::to_string(m) + " must lie in [1, " + std::to_string(n) + "]");
    std::vector<Eigen::Index> pool(train_indices.begin(), train_indices.end());
    Rng rng(seed);
    // Partial Fisher-Yates: the first m slots end up a uniform subset.
    for (Eigen::Index i = 0; i < m; ++i) {
        std::uniform_int_distribution<Eigen::Index> pick(i, n - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(m);
    std::sort(pool.begin(), pool.end());
    return pool;
}

namespace {

struct Standardized {
    Eigen::MatrixXd z;
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;  // 0 marks a constant column
    Eigen::VectorXd yc;
    double ymean = 0.0;
};

void check_finite(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) {
    if (x.rows() < 1 || x.cols() < 1) throw InputError("lasso needs at least one row and one feature");
    if (x.rows() != y.size())
        throw InputError("lasso has " + std::to_string(x.rows()) + " feature rows but " + std::to_string(y.size()) +
                         " responses");
    if (!x.allFinite() || !y.allFinite()) throw InputError("lasso inputs contain non-finite values");
}

Standardized standardize(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) {
    const auto m = static_cast<double>(x.rows());
    Standardized s;
    s.mean = x.colwise().mean().transpose();
    s.z = x.rowwise() - s.mean.transpose();
    s.scale.resize(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double sd = std::sqrt(s.z.col(j).squaredNorm() / m);
        if (sd <= 1e-13 * (1.0 + std::abs(s.mean(j)))) {
            s.scale(j) = 0.0;
            s.z.col(j).setZero();
        } else {
            s.scale(j) = sd;
            s.z.col(j) /= sd;
        }
    }
    s.ymean = y.mean();
    s.yc = y.array() - s.ymean;
    return s;
}

}  // namespace

double lambda_max(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) {
    check_finite(x, y);
    const Standardized s = standardize(x, y);
    const auto m = static_cast<double>(x.rows());
    double best = 0.0;
    // Same arithmetic as the first coordinate update, so fit_lasso(x, y, lambda_max(x, y)) is exactly zero.
    for (Eigen::Index j = 0; j < x.cols(); ++j) best = std::max(best, std::abs(s.z.col(j).dot(s.yc) / m));
    return best;
}

LassoFit fit_lasso(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                   double lambda, const LassoOptions& options) {
    check_finite(x, y);
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InputError("lasso penalty must be positive and finite");

    const Standardized s = standardize(x, y);
    const Eigen::Index p = x.cols();
    const auto m = static_cast<double>(x.rows());

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd resid = s.yc;
    std::vector<Eigen::Index> active;
    std::vector<char> is_active(p, 0);

    auto objective = [&] { return 0.5 * resid.squaredNorm() / m + lambda * beta.lpNorm<1>(); };

    auto update = [&](Eigen::Index j) {
        if (s.scale(j) == 0.0) return 0.0;
        const double old = beta(j);
        const double rho = s.z.col(j).dot(resid) / m + old;
        const double next = soft_threshold(rho, lambda);
        if (next != old) {
            resid.noalias() -= (next - old) * s.z.col(j);
            beta(j) = next;
        }
        return std::abs(next - old);
    };

    LassoFit fit;
    fit.lambda = lambda;
    int sweeps = 0;
    bool converged = false;
    while (sweeps < options.max_sweeps) {
        // Full sweep over every feature.
        double delta = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            delta = std::max(delta, update(j));
            if (beta(j) != 0.0 && !is_active[j]) {
                is_active[j] = 1;
                active.push_back(j);
            }
        }
        ++sweeps;
        if (options.record_objective) fit.objective_trace.push_back(objective());
        if (delta < options.tolerance) {
            converged = true;
            break;
        }
        // Cycle the active set until it settles, then re-check with a full sweep.
        while (sweeps < options.max_sweeps) {
            double active_delta = 0.0;
            for (Eigen::Index j : active) active_delta = std::max(active_delta, update(j));
            ++sweeps;
            if (options.record_objective) fit.objective_trace.push_back(objective());
            if (active_delta < options.tolerance) break;
        }
    }

    fit.iterations = sweeps;
    fit.converged = converged;
    fit.coefficients = Eigen::VectorXd::Zero(p);
    double shift = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
        if (s.scale(j) == 0.0 || beta(j) == 0.0) continue;
        fit.coefficients(j) = beta(j) / s.scale(j);
        shift += fit.coefficients(j) * s.mean(j);
    }
    fit.intercept = s.ymean - shift;
    return fit;
}

Eigen::VectorXd predict_linear(const LassoFit& fit, const Eigen::Ref<const Eigen::MatrixXd>& features) {
    if (features.cols() != fit.coefficients.size())
        throw InputError("feature width " + std::to_string(features.cols()) + " does not match " +
                         std::to_string(fit.coefficients.size()) + " coefficients");
    Eigen::VectorXd out(features.rows());
    out.noalias() = features * fit.coefficients;
    out.array() += fit.intercept;
    return out;
}

}  // namespace reds
