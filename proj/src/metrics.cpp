#include "reds/metrics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "reds/csv.hpp"

namespace reds {

namespace {

void check_same(Eigen::Index a, Eigen::Index b, const char* what) {
    if (a != b) throw InputError(std::string(what) + ": inputs differ in length");
    if (a == 0) throw InputError(std::string(what) + ": no locations");
}

}  // namespace

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InputError("normal quantile needs p in (0, 1)");
    double lo = -40.0;
    double hi = 40.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (normal_cdf(mid) < p ? lo : hi) = mid;
    }
    double z = 0.5 * (lo + hi);
    // One Newton polish.
    const double pdf = normal_pdf(z);
    if (pdf > 0.0) z -= (normal_cdf(z) - p) / pdf;
    return z;
}

ErrorPair mae_rmse(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::VectorXd>& pred) {
    check_same(y.size(), pred.size(), "mae_rmse");
    const Eigen::ArrayXd r = y - pred;
    const auto n = static_cast<double>(y.size());
    return {r.abs().sum() / n, std::sqrt(r.square().sum() / n)};
}

double interval_score(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::VectorXd>& lower,
                      const Eigen::Ref<const Eigen::VectorXd>& upper, double alpha) {
    check_same(y.size(), lower.size(), "interval_score");
    check_same(y.size(), upper.size(), "interval_score");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("interval_score: alpha must lie in (0, 1)");
    double total = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (lower(i) > upper(i)) throw InputError("interval_score: lower bound exceeds upper bound");
        double s = upper(i) - lower(i);
        if (y(i) < lower(i)) s += 2.0 / alpha * (lower(i) - y(i));
        if (y(i) > upper(i)) s += 2.0 / alpha * (y(i) - upper(i));
        total += s;
    }
    return total / static_cast<double>(y.size());
}

double interval_coverage(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::VectorXd>& lower,
                         const Eigen::Ref<const Eigen::VectorXd>& upper) {
    check_same(y.size(), lower.size(), "coverage");
    check_same(y.size(), upper.size(), "coverage");
    Eigen::Index hits = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) hits += (lower(i) <= y(i) && y(i) <= upper(i)) ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(y.size());
}

double crps_gaussian(double y, double mu, double tau) {
    if (!(tau > 0.0)) throw InputError("crps_gaussian: scale must be positive");
    const double z = (y - mu) / tau;
    return tau * (z * (2.0 * normal_cdf(z) - 1.0) + 2.0 * normal_pdf(z) - 1.0 / std::sqrt(std::numbers::pi));
}

double crps_gaussian(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::VectorXd>& mu,
                     const Eigen::Ref<const Eigen::VectorXd>& tau) {
    check_same(y.size(), mu.size(), "crps_gaussian");
    check_same(y.size(), tau.size(), "crps_gaussian");
    double total = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) total += crps_gaussian(y(i), mu(i), tau(i));
    return total / static_cast<double>(y.size());
}

MetricReport report(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::VectorXd>& pred,
                    const Eigen::Ref<const Eigen::VectorXd>& lower, const Eigen::Ref<const Eigen::VectorXd>& upper,
                    double alpha, CrpsScale scale, const Eigen::Ref<const Eigen::VectorXd>& spread) {
    MetricReport r;
    r.n = y.size();
    r.alpha = alpha;
    const auto [mae, rmse] = mae_rmse(y, pred);
    r.mae = mae;
    r.rmse = rmse;
    r.is = interval_score(y, lower, upper, alpha);
    r.co = interval_coverage(y, lower, upper);

    Eigen::VectorXd tau;
    if (scale == CrpsScale::IntervalHalfWidth) {
        tau = 0.5 * (upper - lower) / normal_quantile(1.0 - alpha / 2.0);
    } else {
        check_same(y.size(), spread.size(), "report");
        tau = spread / 1.349;
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i)
        total += tau(i) > 0.0 ? crps_gaussian(y(i), pred(i), tau(i)) : std::abs(y(i) - pred(i));
    r.crps = total / static_cast<double>(y.size());
    return r;
}

std::string format_report(const MetricReport& r) {
    std::ostringstream os;
    os << "n = " << r.n << '\n'
       << "alpha = " << format_double(r.alpha) << '\n'
       << "mae = " << format_double(r.mae) << '\n'
       << "rmse = " << format_double(r.rmse) << '\n'
       << "co = " << format_double(r.co) << '\n'
       << "crps = " << format_double(r.crps) << '\n'
       << "is = " << format_double(r.is) << '\n';
    return os.str();
}

std::string report_csv_header() {
    return "n,alpha,mae,rmse,co,crps,is";
}

std::string report_csv_row(const MetricReport& r) {
    std::ostringstream os;
    os << r.n << ',' << format_double(r.alpha) << ',' << format_double(r.mae) << ',' << format_double(r.rmse) << ','
       << format_double(r.co) << ',' << format_double(r.crps) << ',' << format_double(r.is);
    return os.str();
}

}  // namespace reds
