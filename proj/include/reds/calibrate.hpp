#pragma once

#include <Eigen/Dense>

#include "reds/errors.hpp"

namespace reds {

struct CalibrationResult {
    double v_hat = 0.0;
    double achieved_coverage = 0.0;
    double target = 0.95;
    /// Locations whose ensemble spread is exactly zero.
    int degenerate_count = 0;
};

struct CalibratedIntervals {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
};

/// Fraction of locations with center - v*spread <= y <= center + v*spread.
/// Non-decreasing and right-continuous in v.
double coverage(const Eigen::Ref<const Eigen::VectorXd>& center, const Eigen::Ref<const Eigen::VectorXd>& spread,
                const Eigen::Ref<const Eigen::VectorXd>& y, double v);

/// Smallest cutoff v with coverage(v) >= 1 - alpha.
///
/// The bracket is grown by doubling from v = 1 and then bisected to a width of 1e-8.
/// Coverage only jumps at the residual ratios |y - center| / spread, so the final value
/// is the ratio inside the last bracket, which makes the result exact rather than
/// within 1e-8 of the crossing. Throws CalibrationError when zero-spread locations
/// with nonzero residual cap the achievable coverage below the target.
CalibrationResult calibrate_cutoff(const Eigen::Ref<const Eigen::VectorXd>& center,
                                   const Eigen::Ref<const Eigen::VectorXd>& spread,
                                   const Eigen::Ref<const Eigen::VectorXd>& y, double alpha);

/// center +/- v_hat * spread.
CalibratedIntervals emit_intervals(const Eigen::Ref<const Eigen::VectorXd>& center,
                                   const Eigen::Ref<const Eigen::VectorXd>& spread, const CalibrationResult& result);

}  // namespace reds
