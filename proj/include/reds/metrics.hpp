#pragma once

#include <string>

#include <Eigen/Dense>

#include "reds/errors.hpp"

namespace reds {

struct MetricReport {
    double mae = 0.0;
    double rmse = 0.0;
    double co = 0.0;
    double is = 0.0;
    double crps = 0.0;
    Eigen::Index n = 0;
    double alpha = 0.05;
};

/// How the Gaussian scale for CRPS is derived from a prediction interval.
enum class CrpsScale {
    /// half-width / z_{1 - alpha/2}
    IntervalHalfWidth,
    /// raw ensemble IQR / 1.349
    Iqr,
};

struct ErrorPair {
    double mae;
    double rmse;
};

ErrorPair mae_rmse(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::VectorXd>& pred);

/// Mean interval score: width plus (2/alpha) times the exceedance.
double interval_score(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::VectorXd>& lower,
                      const Eigen::Ref<const Eigen::VectorXd>& upper, double alpha);

/// Fraction of y inside the closed intervals [lower, upper].
double interval_coverage(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::VectorXd>& lower,
                         const Eigen::Ref<const Eigen::VectorXd>& upper);

/// CRPS of N(mu, tau^2) at observation y: tau [z(2 Phi(z) - 1) + 2 phi(z) - 1/sqrt(pi)].
double crps_gaussian(double y, double mu, double tau);

/// Mean CRPS; every tau must be positive.
double crps_gaussian(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::VectorXd>& mu,
                     const Eigen::Ref<const Eigen::VectorXd>& tau);

double normal_pdf(double z);
double normal_cdf(double z);
/// Inverse of normal_cdf on (0, 1).
double normal_quantile(double p);

/// All five scores on one set of locations. `spread` is only read for CrpsScale::Iqr.
/// Where the CRPS scale is zero the point-mass limit |y - pred| is used.
MetricReport report(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::VectorXd>& pred,
                    const Eigen::Ref<const Eigen::VectorXd>& lower, const Eigen::Ref<const Eigen::VectorXd>& upper,
                    double alpha, CrpsScale scale = CrpsScale::IntervalHalfWidth,
                    const Eigen::Ref<const Eigen::VectorXd>& spread = Eigen::VectorXd());

/// `key = value` lines.
std::string format_report(const MetricReport& r);
std::string report_csv_header();
std::string report_csv_row(const MetricReport& r);

}  // namespace reds
