#include "reds/calibrate.hpp"

#include <cmath>
#include <string>

namespace reds {

namespace {

void check_lengths(const Eigen::Ref<const Eigen::VectorXd>& center, const Eigen::Ref<const Eigen::VectorXd>& spread,
                   const Eigen::Ref<const Eigen::VectorXd>& y) {
    if (center.size() != spread.size() || center.size() != y.size())
        throw InputError("calibration inputs differ in length");
    if (center.size() == 0) throw InputError("calibration needs at least one training location");
    if ((spread.array() < 0.0).any()) throw InputError("ensemble spread must be non-negative");
}

bool covered(double center, double spread, double y, double v) {
    return center - v * spread <= y && y <= center + v * spread;
}

Eigen::Index count_covered(const Eigen::Ref<const Eigen::VectorXd>& center,
                           const Eigen::Ref<const Eigen::VectorXd>& spread, const Eigen::Ref<const Eigen::VectorXd>& y,
                           double v) {
    Eigen::Index hits = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) hits += covered(center(i), spread(i), y(i), v) ? 1 : 0;
    return hits;
}

}  // namespace

double coverage(const Eigen::Ref<const Eigen::VectorXd>& center, const Eigen::Ref<const Eigen::VectorXd>& spread,
                const Eigen::Ref<const Eigen::VectorXd>& y, double v) {
    check_lengths(center, spread, y);
    if (!(v >= 0.0)) throw InputError("coverage cutoff must be non-negative");
    return static_cast<double>(count_covered(center, spread, y, v)) / static_cast<double>(y.size());
}

CalibrationResult calibrate_cutoff(const Eigen::Ref<const Eigen::VectorXd>& center,
                                   const Eigen::Ref<const Eigen::VectorXd>& spread,
                                   const Eigen::Ref<const Eigen::VectorXd>& y, double alpha) {
    check_lengths(center, spread, y);
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");

    const Eigen::Index n = y.size();
    CalibrationResult result;
    result.target = 1.0 - alpha;
    // Integer form of the target avoids comparing rounded fractions.
    const auto needed = static_cast<Eigen::Index>(std::ceil(result.target * static_cast<double>(n) - 1e-9));

    Eigen::Index reachable = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (spread(i) == 0.0) {
            ++result.degenerate_count;
            if (y(i) == center(i)) ++reachable;
        } else {
            ++reachable;
        }
    }
    if (reachable < needed) {
        const double best = static_cast<double>(reachable) / static_cast<double>(n);
        throw CalibrationError("coverage target " + std::to_string(result.target) +
                                   " is unreachable; zero-spread locations cap coverage at " + std::to_string(best),
                               best);
    }

    auto hits = [&](double v) { return count_covered(center, spread, y, v); };

    double v_hat = 0.0;
    if (hits(0.0) < needed) {
        double lo = 0.0;
        double hi = 1.0;
        while (hits(hi) < needed) {
            lo = hi;
            hi *= 2.0;
            if (!std::isfinite(hi)) throw CalibrationError("calibration bracket diverged", 0.0);
        }
        while (hi - lo > 1e-8 * std::max(1.0, hi)) {
            const double mid = 0.5 * (lo + hi);
            if (hits(mid) >= needed)
                hi = mid;
            else
                lo = mid;
        }
        // The crossing is the largest residual ratio not exceeding hi.
        double snapped = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (spread(i) == 0.0) continue;
            const double ratio = std::abs(y(i) - center(i)) / spread(i);
            if (ratio <= hi && ratio > snapped) snapped = ratio;
        }
        // The ratio can round one ulp below the value at which the bound test succeeds.
        v_hat = hi;
        if (snapped > lo) {
            for (int step = 0; step < 16 && snapped < hi; ++step) {
                if (hits(snapped) >= needed) {
                    v_hat = snapped;
                    break;
                }
                snapped = std::nextafter(snapped, hi);
            }
        }
    }

    result.v_hat = v_hat;
    result.achieved_coverage = static_cast<double>(hits(v_hat)) / static_cast<double>(n);
    return result;
}

CalibratedIntervals emit_intervals(const Eigen::Ref<const Eigen::VectorXd>& center,
                                   const Eigen::Ref<const Eigen::VectorXd>& spread, const CalibrationResult& result) {
    if (center.size() != spread.size()) throw InputError("interval inputs differ in length");
    CalibratedIntervals out;
    const Eigen::VectorXd half = result.v_hat * spread;
    out.lower = center - half;
    out.upper = center + half;
    return out;
}

}  // namespace reds
