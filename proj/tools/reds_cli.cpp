// reds: random-feature ensemble spatial prediction with calibrated intervals.
//
//   reds simulate --seed 1 --out data.csv
//   reds fit --seed 7 --data data.csv --out-predictions pred.csv --out-metrics metrics.txt
//   reds metrics --predictions pred.csv --truth data.csv
//   reds inspect --config run.toml --data data.csv

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "reds/csv.hpp"
#include "reds/dataset.hpp"
#include "reds/gp.hpp"
#include "reds/metrics.hpp"
#include "reds/pipeline.hpp"
#include "reds/random.hpp"

namespace {

constexpr int kConfigExit = 3;

struct RunFlags {
    reds::RunConfig config;
    std::string resolutions = reds::format_resolutions(reds::default_resolutions());
    std::string crps_scale = "interval";
    std::string data_path;
    std::string coords;
    std::string response = "response";
    std::string split_column = "split";
};

void add_run_options(CLI::App* cmd, RunFlags& f) {
    auto& c = f.config;
    auto& e = c.ensemble;
    auto& h = e.ranges;
    cmd->add_option("--n-ensembles", e.n_members, "Number of ensemble members N");
    cmd->add_option("--n-keep", e.n_keep, "Members retained R (0: use keep fraction)");
    cmd->add_option("--keep-fraction", e.keep_fraction, "Fraction of members retained");
    cmd->add_option("--minibatch-fraction", e.minibatch_fraction, "Minibatch size as a fraction of n_train");
    cmd->add_option("--resolutions", f.resolutions, "RFF bands as radius:count,...");
    cmd->add_option("--depth-min", h.depth_lo, "Smallest number of hidden layers");
    cmd->add_option("--depth-max", h.depth_hi, "Largest number of hidden layers");
    cmd->add_option("--width-min", h.width_lo, "Smallest hidden width");
    cmd->add_option("--width-max", h.width_hi, "Largest hidden width");
    cmd->add_option("--lambda-min", h.lambda_lo, "Smallest lasso penalty");
    cmd->add_option("--lambda-max", h.lambda_hi, "Largest lasso penalty");
    cmd->add_option("--weight-min", h.weight_lo, "Lower bound of hidden weights");
    cmd->add_option("--weight-max", h.weight_hi, "Upper bound of hidden weights");
    cmd->add_option("--lasso-tolerance", e.lasso.tolerance, "Coordinate descent tolerance");
    cmd->add_option("--lasso-max-sweeps", e.lasso.max_sweeps, "Coordinate descent sweep cap");
    cmd->add_option("--alpha", c.alpha, "Interval level is 1 - alpha");
    cmd->add_flag("--detrend,!--no-detrend", c.detrend, "Remove a linear trend in the coordinates first");
    cmd->add_option("--crps-scale", f.crps_scale, "interval | iqr")->check(CLI::IsMember({"interval", "iqr"}));
    cmd->add_option("--workers", e.workers, "Worker threads");
    cmd->add_option("--prediction-budget", e.prediction_budget, "Stored prediction values before recomputation");
    cmd->add_option("--data", f.data_path, "Dataset CSV");
    cmd->add_option("--coords", f.coords, "Coordinate columns, comma separated (default: all others)");
    cmd->add_option("--response", f.response, "Response column");
    cmd->add_option("--split-column", f.split_column, "Split column (train|test)");
}

void finish_run_flags(RunFlags& f) {
    f.config.resolutions = reds::parse_resolutions(f.resolutions);
    f.config.crps_scale = f.crps_scale == "iqr" ? reds::CrpsScale::Iqr : reds::CrpsScale::IntervalHalfWidth;
}

reds::DatasetSchema schema_from(const RunFlags& f) {
    reds::DatasetSchema s;
    s.response = f.response;
    s.split = f.split_column;
    std::stringstream ss(f.coords);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) s.coordinates.push_back(item);
    return s;
}

// CLI11 only reads config files for the root app, so `--config FILE` is expanded here into
// `--key=value` arguments placed before the user's own flags. Later values win.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::vector<std::string> out;
    std::vector<std::string> from_file;
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string path;
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            out.push_back(args[i]);
            continue;
        }
        for (const auto& item : CLI::ConfigTOML().from_file(path)) {
            if (item.name == "++" || item.name == "--") continue;
            std::string key = item.name;
            for (auto& ch : key)
                if (ch == '_') ch = '-';
            std::string value;
            for (std::size_t k = 0; k < item.inputs.size(); ++k) value += (k ? "," : "") + item.inputs[k];
            from_file.push_back("--" + key + "=" + value);
        }
    }
    if (!from_file.empty() && !out.empty()) out.insert(out.begin() + 1, from_file.begin(), from_file.end());
    std::reverse(out.begin(), out.end());
    return out;
}

int cmd_simulate(int dim, int n, int nx, int ny, const reds::KernelSpec& kernel, std::uint64_t seed,
                 double holdout_width, int holdout_intervals, double block_x, double block_y,
                 Eigen::Index cholesky_budget, const std::string& out) {
    reds::SimulatedField field;
    if (dim == 1) {
        reds::Rng rng(reds::derive_seed(seed, 11));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        Eigen::MatrixXd locs(n, 1);
        for (int i = 0; i < n; ++i) locs(i, 0) = unif(rng);
        field = reds::simulate_gp(kernel, locs, seed, cholesky_budget);
        field.test_mask = reds::make_holdout_intervals(field.locations.col(0), holdout_width, holdout_intervals,
                                                       reds::derive_seed(seed, 12));
    } else {
        field = reds::simulate_gp_grid(kernel, nx, ny, seed);
        field.test_mask = reds::make_holdout_block(field.locations, block_x, block_y, reds::derive_seed(seed, 12));
    }
    std::vector<reds::Split> split;
    for (bool t : field.test_mask) split.push_back(t ? reds::Split::Test : reds::Split::Train);
    const reds::Dataset data = reds::make_dataset(field.locations, field.responses, split);
    const std::string csv = reds::dataset_to_csv(data);
    if (out.empty() || out == "-")
        std::cout << csv;
    else
        reds::write_text_file(out, csv);
    return 0;
}

int cmd_metrics(const std::string& predictions, const std::string& truth, const std::string& response, double alpha,
                const std::string& out) {
    const reds::CsvTable pred = reds::read_csv(predictions);
    reds::DatasetSchema schema;
    schema.response = response;
    const reds::Dataset data = reds::load_dataset(truth, schema);
    if (static_cast<Eigen::Index>(pred.rows.size()) != data.size())
        throw reds::InputError("predictions have " + std::to_string(pred.rows.size()) + " rows, truth has " +
                               std::to_string(data.size()));
    auto col = [&](const char* name) {
        const auto c = pred.column(name);
        if (!c) throw reds::InputError(predictions + ": missing column '" + name + "'");
        return *c;
    };
    const std::size_t cp = col("prediction"), cl = col("lower"), cu = col("upper");
    const auto rows = data.scored_test_rows();
    if (rows.empty()) throw reds::InputError(truth + ": no test rows with responses");
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::VectorXd y(n), p(n), lo(n), hi(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto& row = pred.rows[rows[k]];
        const auto get = [&](std::size_t c) {
            const auto v = reds::parse_double(row[c]);
            if (!v) throw reds::InputError(predictions + ":" + std::to_string(pred.line_numbers[rows[k]]) +
                                           ": missing or malformed value");
            return *v;
        };
        y(k) = data.responses(rows[k]);
        p(k) = get(cp);
        lo(k) = get(cl);
        hi(k) = get(cu);
    }
    const reds::MetricReport r = reds::report(y, p, lo, hi, alpha);
    std::cout << reds::format_report(r);
    if (!out.empty()) reds::write_text_file(out, reds::report_csv_header() + '\n' + reds::report_csv_row(r) + '\n');
    return 0;
}

int cmd_inspect(const RunFlags& f) {
    std::cout << "# effective configuration\n" << f.config.to_text();
    if (f.data_path.empty()) return 0;
    const reds::Dataset d = reds::load_dataset(f.data_path, schema_from(f));
    std::cout << "\n# dataset " << f.data_path << '\n'
              << "rows = " << d.size() << '\n'
              << "dim = " << d.dim() << '\n'
              << "train = " << d.rows(reds::Split::Train).size() << '\n'
              << "test = " << d.rows(reds::Split::Test).size() << '\n'
              << "predict = " << d.rows(reds::Split::Predict).size() << '\n'
              << "duplicate_locations = " << d.duplicate_locations << '\n';
    for (int c = 0; c < d.dim(); ++c)
        std::cout << "axis_" << d.coordinate_names[c] << " = [" << reds::format_double(d.raw_locations.col(c).minCoeff())
                  << ", " << reds::format_double(d.raw_locations.col(c).maxCoeff()) << "] offset "
                  << reds::format_double(d.transform[c].offset) << " scale " << reds::format_double(d.transform[c].scale)
                  << '\n';
    const auto train = d.rows(reds::Split::Train);
    if (!train.empty()) {
        double mean = 0.0;
        for (auto i : train) mean += d.responses(i);
        mean /= static_cast<double>(train.size());
        double var = 0.0;
        for (auto i : train) var += (d.responses(i) - mean) * (d.responses(i) - mean);
        std::cout << "train_response_mean = " << reds::format_double(mean) << '\n'
                  << "train_response_sd = " << reds::format_double(std::sqrt(var / static_cast<double>(train.size())))
                  << '\n';
    }
    return 0;
}

int cmd_fit(RunFlags& f) {
    const reds::Dataset data = reds::load_dataset(f.data_path, schema_from(f));
    const reds::PipelineResult result = reds::run_pipeline(f.config, data);
    reds::write_outputs(f.config, data, result);
    if (result.calibration)
        std::cerr << "v_hat = " << reds::format_double(result.calibration->v_hat)
                  << ", train coverage = " << reds::format_double(result.calibration->achieved_coverage) << '\n';
    if (result.metrics) std::cout << reds::format_report(*result.metrics);
    if (result.calibration_failure) {
        std::cerr << "calibration failed: " << *result.calibration_failure << '\n';
        return reds::CalibrationError("", 0.0).exit_code();
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random-feature ensemble spatial prediction with calibrated intervals"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate a Gaussian-process dataset with a held-out region");
    int dim = 1, n = 2500, nx = 100, ny = 60, holdout_intervals = 1;
    reds::KernelSpec kernel;
    std::uint64_t sim_seed = 0;
    double holdout_width = 0.1, block_x = 0.25, block_y = 0.25;
    Eigen::Index cholesky_budget = reds::default_cholesky_budget;
    std::string sim_out;
    sim->add_option("--dim", dim, "1 (scattered points) or 2 (grid)")->check(CLI::IsMember({1, 2}));
    sim->add_option("--n", n, "Number of 1D locations");
    sim->add_option("--grid-nx", nx, "2D grid points along x");
    sim->add_option("--grid-ny", ny, "2D grid points along y");
    sim->add_option("--rate", kernel.rate, "Kernel rate: exp(-rate * d^2)");
    sim->add_option("--signal", kernel.signal_variance, "Signal variance");
    sim->add_option("--nugget", kernel.nugget, "Nugget variance");
    sim->add_option("--seed", sim_seed, "Random seed")->required();
    sim->add_option("--holdout-width", holdout_width, "1D held-out interval width");
    sim->add_option("--holdout-intervals", holdout_intervals, "Number of 1D held-out intervals");
    sim->add_option("--block-x", block_x, "2D held-out block side along x");
    sim->add_option("--block-y", block_y, "2D held-out block side along y");
    sim->add_option("--cholesky-budget", cholesky_budget, "Largest dense Cholesky allowed");
    sim->add_option("--out", sim_out, "Output CSV (default stdout)");

    // fit
    auto* fit = app.add_subcommand("fit", "Run the ensemble, calibrate intervals and score the test split");
    RunFlags fit_flags;
    add_run_options(fit, fit_flags);
    fit->get_option("--data")->required();
    fit->add_option("--seed", fit_flags.config.master_seed, "Master seed")->required();
    fit->add_option("--out-predictions", fit_flags.config.predictions_path, "Predictions CSV");
    fit->add_option("--out-metrics", fit_flags.config.metrics_path, "Metrics text block (CSV goes to <path>.csv)");
    fit->add_option("--out-grid", fit_flags.config.grid_prefix, "Prefix for 2D plot-grid CSVs");

    // metrics
    auto* met = app.add_subcommand("metrics", "Score a predictions file against a truth dataset");
    std::string met_pred, met_truth, met_response = "response", met_out;
    double met_alpha = 0.05;
    met->add_option("--predictions", met_pred, "Predictions CSV from fit")->required();
    met->add_option("--truth", met_truth, "Dataset CSV with test responses")->required();
    met->add_option("--response", met_response, "Response column in the truth file");
    met->add_option("--alpha", met_alpha, "Interval level is 1 - alpha");
    met->add_option("--out", met_out, "Metrics CSV");

    // inspect
    auto* ins = app.add_subcommand("inspect", "Print the effective configuration and a dataset summary");
    RunFlags ins_flags;
    add_run_options(ins, ins_flags);
    ins->add_option("--seed", ins_flags.config.master_seed, "Master seed");

    try {
        std::vector<std::string> args = expand_config(argc, argv);
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigExit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigExit;
    }

    try {
        if (*sim)
            return cmd_simulate(dim, n, nx, ny, kernel, sim_seed, holdout_width, holdout_intervals, block_x, block_y,
                                cholesky_budget, sim_out);
        if (*fit) {
            finish_run_flags(fit_flags);
            return cmd_fit(fit_flags);
        }
        if (*met) return cmd_metrics(met_pred, met_truth, met_response, met_alpha, met_out);
        if (*ins) {
            finish_run_flags(ins_flags);
            return cmd_inspect(ins_flags);
        }
    } catch (const reds::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
