#include "reds/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include "reds/random.hpp"

namespace reds {

int EnsembleOptions::resolved_keep() const {
    if (n_keep > 0) return n_keep;
    return static_cast<int>(std::ceil(keep_fraction * n_members - 1e-9));
}

Eigen::Index EnsembleOptions::resolved_minibatch(Eigen::Index n_train) const {
    const auto m = static_cast<Eigen::Index>(std::ceil(minibatch_fraction * static_cast<double>(n_train) - 1e-9));
    return std::clamp<Eigen::Index>(m, 1, std::max<Eigen::Index>(n_train, 1));
}

void EnsembleOptions::validate() const {
    if (n_members < 1) throw ConfigError("n_ensembles must be >= 1");
    if (n_keep < 0) throw ConfigError("n_keep must be >= 0");
    if (n_keep == 0 && !(keep_fraction > 0.0 && keep_fraction <= 1.0))
        throw ConfigError("keep_fraction must lie in (0, 1]");
    if (resolved_keep() > n_members)
        throw ConfigError("cannot keep " + std::to_string(resolved_keep()) + " of " + std::to_string(n_members) +
                          " members");
    if (!(minibatch_fraction > 0.0 && minibatch_fraction <= 1.0))
        throw ConfigError("minibatch_fraction must lie in (0, 1]");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    ranges.validate();
}

NetworkRealization run_member(int member_index, const Eigen::Ref<const Eigen::MatrixXd>& features,
                              std::span<const Eigen::Index> train_rows, const Eigen::Ref<const Eigen::VectorXd>& train_y,
                              Eigen::Index minibatch_size, const HyperRanges& ranges, std::uint64_t master_seed,
                              const LassoOptions& lasso, bool keep_predictions) {
    const auto n_train = static_cast<Eigen::Index>(train_rows.size());
    if (n_train != train_y.size()) throw InputError("training rows and responses differ in length");

    NetworkRealization out;
    out.config = sample_network_config(ranges, member_index, master_seed);
    const WeightStack stack = sample_weights(out.config, features.cols());
    const Eigen::MatrixXd hidden = elm_forward_rows(features, stack);

    std::vector<Eigen::Index> positions(static_cast<std::size_t>(n_train));
    std::iota(positions.begin(), positions.end(), Eigen::Index{0});
    const auto batch = draw_minibatch(positions, minibatch_size, derive_seed(out.config.member_seed, stream::minibatch));

    Eigen::MatrixXd xb(static_cast<Eigen::Index>(batch.size()), hidden.cols());
    Eigen::VectorXd yb(static_cast<Eigen::Index>(batch.size()));
    for (std::size_t i = 0; i < batch.size(); ++i) {
        xb.row(static_cast<Eigen::Index>(i)) = hidden.row(train_rows[batch[i]]);
        yb(static_cast<Eigen::Index>(i)) = train_y(batch[i]);
    }

    out.fit = fit_lasso(xb, yb, out.config.lambda, lasso);
    Eigen::VectorXd pred = predict_linear(out.fit, hidden);

    double sse = 0.0;
    for (Eigen::Index i = 0; i < n_train; ++i) {
        const double r = pred(train_rows[i]) - train_y(i);
        sse += r * r;
    }
    out.training_rmse = std::sqrt(sse / static_cast<double>(n_train));
    if (!pred.allFinite() || !std::isfinite(out.training_rmse))
        out.training_rmse = std::numeric_limits<double>::infinity();
    if (keep_predictions) out.predictions = std::move(pred);
    return out;
}

std::vector<int> select_good(std::span<const double> training_rmse, int keep) {
    const int n = static_cast<int>(training_rmse.size());
    if (keep < 1 || keep > n)
        throw ConfigError("must keep between 1 and " + std::to_string(n) + " members, got " + std::to_string(keep));
    std::vector<int> valid;
    for (int j = 0; j < n; ++j)
        if (std::isfinite(training_rmse[j])) valid.push_back(j);
    if (static_cast<int>(valid.size()) < keep)
        throw NumericalError("only " + std::to_string(valid.size()) + " valid ensemble members, need " +
                             std::to_string(keep));
    std::stable_sort(valid.begin(), valid.end(),
                     [&](int a, int b) { return training_rmse[a] < training_rmse[b]; });
    valid.resize(keep);
    return valid;
}

double quantile_sorted(std::span<const double> sorted, double prob) {
    if (sorted.empty()) throw InputError("quantile of an empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

EnsembleSummary aggregate(const Eigen::Ref<const Eigen::MatrixXd>& member_predictions) {
    if (member_predictions.cols() < 1) throw InputError("aggregation needs at least one member");
    const Eigen::Index n = member_predictions.rows();
    EnsembleSummary s;
    s.retained = static_cast<int>(member_predictions.cols());
    s.median.resize(n);
    s.iqr.resize(n);
    std::vector<double> buf(static_cast<std::size_t>(member_predictions.cols()));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < member_predictions.cols(); ++j) buf[j] = member_predictions(i, j);
        std::sort(buf.begin(), buf.end());
        s.median(i) = quantile_sorted(buf, 0.5);
        s.iqr(i) = quantile_sorted(buf, 0.75) - quantile_sorted(buf, 0.25);
    }
    return s;
}

namespace {

template <typename Fn>
void parallel_for(int count, int workers, Fn&& fn) {
    workers = std::max(1, std::min(workers, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int i = next++; i < count && !failed; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        if (!failed.exchange(true)) failure = std::current_exception();
                    }
                }
            });
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

EnsembleResult run_ensemble(const Eigen::Ref<const Eigen::MatrixXd>& features,
                            std::span<const Eigen::Index> train_rows, const Eigen::Ref<const Eigen::VectorXd>& train_y,
                            const EnsembleOptions& options) {
    options.validate();
    if (train_rows.empty()) throw InputError("ensemble needs at least one training row");
    const int n_members = options.n_members;
    const int keep = options.resolved_keep();
    const Eigen::Index m = options.resolved_minibatch(static_cast<Eigen::Index>(train_rows.size()));
    const bool materialize =
        static_cast<double>(n_members) * static_cast<double>(features.rows()) <= static_cast<double>(options.prediction_budget);

    EnsembleResult result;
    result.training_rmse.assign(n_members, 0.0);
    result.configs.resize(n_members);
    std::vector<Eigen::VectorXd> stored(materialize ? n_members : 0);

    parallel_for(n_members, options.workers, [&](int j) {
        NetworkRealization r = run_member(j, features, train_rows, train_y, m, options.ranges, options.master_seed,
                                          options.lasso, materialize);
        result.training_rmse[j] = r.training_rmse;
        result.configs[j] = r.config;
        if (materialize) stored[j] = std::move(r.predictions);
    });

    result.selected = select_good(result.training_rmse, keep);

    Eigen::MatrixXd kept(features.rows(), keep);
    if (materialize) {
        for (int k = 0; k < keep; ++k) kept.col(k) = stored[result.selected[k]];
    } else {
        parallel_for(keep, options.workers, [&](int k) {
            kept.col(k) = run_member(result.selected[k], features, train_rows, train_y, m, options.ranges,
                                     options.master_seed, options.lasso, true)
                              .predictions;
        });
    }
    result.summary = aggregate(kept);
    return result;
}

}  // namespace reds
