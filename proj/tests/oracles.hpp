#pragma once

// Independent reference computations used by the unit and acceptance suites.
// Everything here is written with plain loops and shares no code path with the library
// beyond the random draws it is handed.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "reds/elm.hpp"
#include "reds/lasso.hpp"
#include "reds/rff.hpp"

namespace reds::oracle {

/// Largest violation of the lasso subgradient conditions on the standardized scale:
/// |g_j| <= lambda where b_j = 0, g_j = lambda sign(b_j) otherwise, g_j = (1/M) z_j' r.
inline double kkt_residual(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const LassoFit& fit) {
    const auto m = static_cast<std::size_t>(x.rows());
    const auto p = static_cast<std::size_t>(x.cols());
    std::vector<double> r(m);
    for (std::size_t i = 0; i < m; ++i) {
        double pred = fit.intercept;
        for (std::size_t j = 0; j < p; ++j) pred += x(i, j) * fit.coefficients(j);
        r[i] = y(i) - pred;
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < m; ++i) mean += x(i, j);
        mean /= static_cast<double>(m);
        double var = 0.0;
        for (std::size_t i = 0; i < m; ++i) var += (x(i, j) - mean) * (x(i, j) - mean);
        const double sd = std::sqrt(var / static_cast<double>(m));
        if (sd <= 1e-13 * (1.0 + std::abs(mean))) continue;
        double g = 0.0;
        for (std::size_t i = 0; i < m; ++i) g += (x(i, j) - mean) / sd * r[i];
        g /= static_cast<double>(m);
        const double b = fit.coefficients(j) * sd;
        const double v = b == 0.0 ? std::max(0.0, std::abs(g) - fit.lambda) : std::abs(g - fit.lambda * (b > 0 ? 1.0 : -1.0));
        worst = std::max(worst, v);
    }
    return worst;
}

/// Straight-line multiply-and-clamp.
inline std::vector<double> elm_naive(const std::vector<double>& h0, const WeightStack& stack) {
    std::vector<double> h = h0;
    for (const auto& v : stack.matrices) {
        std::vector<double> next(static_cast<std::size_t>(v.rows()), 0.0);
        for (Eigen::Index r = 0; r < v.rows(); ++r) {
            double acc = 0.0;
            for (Eigen::Index c = 0; c < v.cols(); ++c) acc += v(r, c) * h[static_cast<std::size_t>(c)];
            next[static_cast<std::size_t>(r)] = acc > 0.0 ? acc : 0.0;
        }
        h = std::move(next);
    }
    return h;
}

/// Type-7 quantile computed from a fresh sort with 1-based order statistics.
inline double quantile7(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    const double pos = 1.0 + (static_cast<double>(v.size()) - 1.0) * p;
    const double k = std::floor(pos);
    const auto lo = static_cast<std::size_t>(k) - 1;
    if (lo + 1 >= v.size()) return v.back();
    return v[lo] + (pos - k) * (v[lo + 1] - v[lo]);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                               double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12) {
    if (b <= a) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    return adaptive_simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50);
}

/// CRPS as the integral of (F(t) - 1{t >= y})^2 for F the N(mu, tau^2) cdf.
inline double crps_by_integration(double y, double mu, double tau) {
    const auto cdf = [&](double t) { return 0.5 * std::erfc(-(t - mu) / (tau * std::numbers::sqrt2)); };
    const double lo = mu - 12.0 * tau;
    const double hi = mu + 12.0 * tau;
    const double below = integrate([&](double t) { return cdf(t) * cdf(t); }, std::min(lo, y), y, 1e-13 * tau);
    const double above = integrate([&](double t) { return (1.0 - cdf(t)) * (1.0 - cdf(t)); }, y, std::max(hi, y), 1e-13 * tau);
    return below + above;
}

/// Training RMSE of one member, recomputed from the member's random draws with scalar loops
/// and a coordinate descent run to machine-level convergence.
inline double member_rmse_straight_line(const Eigen::MatrixXd& locations, const std::vector<Eigen::Index>& train_rows,
                                        const Eigen::VectorXd& train_y, const FrequencySet& fs,
                                        const WeightStack& stack, const std::vector<Eigen::Index>& batch_positions,
                                        double lambda) {
    const auto n = static_cast<std::size_t>(locations.rows());
    const auto jn = static_cast<std::size_t>(fs.size());
    std::vector<std::vector<double>> hidden(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> h0(2 * jn);
        for (std::size_t j = 0; j < jn; ++j) {
            double phase = 0.0;
            for (Eigen::Index c = 0; c < locations.cols(); ++c) phase += fs.frequencies()(j, c) * locations(i, c);
            h0[2 * j] = std::cos(phase);
            h0[2 * j + 1] = std::sin(phase);
        }
        hidden[i] = elm_naive(h0, stack);
    }
    const std::size_t p = hidden[0].size();
    const std::size_t m = batch_positions.size();

    std::vector<double> mean(p, 0.0), sd(p, 0.0);
    double ymean = 0.0;
    for (auto b : batch_positions) ymean += train_y(b);
    ymean /= static_cast<double>(m);
    for (std::size_t j = 0; j < p; ++j) {
        for (auto b : batch_positions) mean[j] += hidden[train_rows[b]][j];
        mean[j] /= static_cast<double>(m);
        for (auto b : batch_positions) sd[j] += std::pow(hidden[train_rows[b]][j] - mean[j], 2);
        sd[j] = std::sqrt(sd[j] / static_cast<double>(m));
    }
    std::vector<double> beta(p, 0.0);
    for (int sweep = 0; sweep < 200000; ++sweep) {
        double change = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            if (sd[j] <= 1e-13 * (1.0 + std::abs(mean[j]))) continue;
            double g = 0.0;
            for (auto b : batch_positions) {
                double fitted = 0.0;
                for (std::size_t k = 0; k < p; ++k)
                    if (sd[k] > 1e-13 * (1.0 + std::abs(mean[k])))
                        fitted += (hidden[train_rows[b]][k] - mean[k]) / sd[k] * beta[k];
                g += (hidden[train_rows[b]][j] - mean[j]) / sd[j] * (train_y(b) - ymean - fitted);
            }
            const double rho = g / static_cast<double>(m) + beta[j];
            const double next = rho > lambda ? rho - lambda : (rho < -lambda ? rho + lambda : 0.0);
            change = std::max(change, std::abs(next - beta[j]));
            beta[j] = next;
        }
        if (change < 1e-15) break;
    }
    double sse = 0.0;
    for (std::size_t t = 0; t < train_rows.size(); ++t) {
        double pred = ymean;
        for (std::size_t j = 0; j < p; ++j)
            if (sd[j] > 1e-13 * (1.0 + std::abs(mean[j])))
                pred += (hidden[train_rows[t]][j] - mean[j]) / sd[j] * beta[j];
        sse += std::pow(pred - train_y(static_cast<Eigen::Index>(t)), 2);
    }
    return std::sqrt(sse / static_cast<double>(train_rows.size()));
}

/// Dense solve by Gaussian elimination with partial pivoting.
inline std::vector<double> gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t r = k + 1; r < n; ++r)
            if (std::abs(a[r][k]) > std::abs(a[piv][k])) piv = r;
        std::swap(a[k], a[piv]);
        std::swap(b[k], b[piv]);
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = a[r][k] / a[k][k];
            for (std::size_t c = k; c < n; ++c) a[r][c] -= f * a[k][c];
            b[r] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double acc = b[k];
        for (std::size_t c = k + 1; c < n; ++c) acc -= a[k][c] * x[c];
        x[k] = acc / a[k][k];
    }
    return x;
}

}  // namespace reds::oracle
