#include "reds/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

namespace reds {

const char* to_string(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Test: return "test";
        case Split::Predict: return "predict";
    }
    return "?";
}

std::vector<Eigen::Index> Dataset::rows(Split which) const {
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 0; i < size(); ++i)
        if (split[i] == which) out.push_back(i);
    return out;
}

std::vector<Eigen::Index> Dataset::scored_test_rows() const {
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 0; i < size(); ++i)
        if (split[i] == Split::Test && std::isfinite(responses(i))) out.push_back(i);
    return out;
}

std::vector<AxisTransform> fit_unit_transform(const Eigen::Ref<const Eigen::MatrixXd>& raw) {
    std::vector<AxisTransform> t(static_cast<std::size_t>(raw.cols()));
    if (raw.rows() == 0) return t;
    for (Eigen::Index c = 0; c < raw.cols(); ++c) {
        const double lo = raw.col(c).minCoeff();
        const double hi = raw.col(c).maxCoeff();
        if (lo >= 0.0 && hi <= 1.0) continue;
        if (!(hi > lo)) throw InputError("coordinate axis " + std::to_string(c) + " has zero range");
        t[c] = {lo, hi - lo};
    }
    return t;
}

Dataset make_dataset(Eigen::MatrixXd raw_locations, Eigen::VectorXd responses, std::vector<Split> split,
                     std::vector<std::string> coordinate_names) {
    const Eigen::Index n = raw_locations.rows();
    if (raw_locations.cols() != 1 && raw_locations.cols() != 2)
        throw InputError("locations must have 1 or 2 coordinates");
    if (responses.size() != n || static_cast<Eigen::Index>(split.size()) != n)
        throw InputError("locations, responses and split flags differ in length");
    if (!raw_locations.allFinite()) throw InputError("locations contain non-finite values");
    for (Eigen::Index i = 0; i < n; ++i)
        if (split[i] == Split::Train && !std::isfinite(responses(i)))
            throw InputError("training row " + std::to_string(i) + " has no finite response");

    Dataset d;
    d.transform = fit_unit_transform(raw_locations);
    d.locations.resize(n, raw_locations.cols());
    for (Eigen::Index c = 0; c < raw_locations.cols(); ++c)
        for (Eigen::Index i = 0; i < n; ++i) d.locations(i, c) = d.transform[c].forward(raw_locations(i, c));
    d.raw_locations = std::move(raw_locations);
    d.responses = std::move(responses);
    d.split = std::move(split);
    if (coordinate_names.empty()) {
        coordinate_names = {"x"};
        if (d.raw_locations.cols() == 2) coordinate_names.push_back("y");
    }
    d.coordinate_names = std::move(coordinate_names);

    std::map<std::pair<double, double>, int> seen;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto key = std::make_pair(d.raw_locations(i, 0), d.raw_locations.cols() == 2 ? d.raw_locations(i, 1) : 0.0);
        if (seen[key]++ > 0) ++d.duplicate_locations;
    }
    return d;
}

Dataset parse_dataset(const CsvTable& table, const DatasetSchema& schema, const std::string& source) {
    const auto response_col = table.column(schema.response);
    if (!response_col) throw InputError(source + ": no response column '" + schema.response + "'");
    const auto split_col = table.column(schema.split);

    std::vector<std::size_t> coord_cols;
    std::vector<std::string> coord_names = schema.coordinates;
    if (coord_names.empty()) {
        for (std::size_t c = 0; c < table.header.size(); ++c)
            if (c != *response_col && (!split_col || c != *split_col)) coord_names.push_back(table.header[c]);
    }
    for (const auto& name : coord_names) {
        const auto c = table.column(name);
        if (!c) throw InputError(source + ": no coordinate column '" + name + "'");
        coord_cols.push_back(*c);
    }
    if (coord_cols.size() != 1 && coord_cols.size() != 2)
        throw InputError(source + ": expected 1 or 2 coordinate columns, found " + std::to_string(coord_cols.size()));

    const auto n = static_cast<Eigen::Index>(table.rows.size());
    Eigen::MatrixXd raw(n, static_cast<Eigen::Index>(coord_cols.size()));
    Eigen::VectorXd y(n);
    std::vector<Split> split(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = table.rows[i];
        const std::string where = source + ":" + std::to_string(table.line_numbers[i]);
        for (std::size_t c = 0; c < coord_cols.size(); ++c) {
            const auto v = parse_double(row[coord_cols[c]]);
            if (!v || !std::isfinite(*v))
                throw InputError(where + ": bad coordinate '" + row[coord_cols[c]] + "' in column " + coord_names[c]);
            raw(i, static_cast<Eigen::Index>(c)) = *v;
        }
        const std::string& rtext = row[*response_col];
        const std::string label = split_col ? row[*split_col] : std::string();
        if (rtext.empty()) {
            y(i) = std::numeric_limits<double>::quiet_NaN();
        } else {
            const auto v = parse_double(rtext);
            if (!v || !std::isfinite(*v)) throw InputError(where + ": bad response '" + rtext + "'");
            y(i) = *v;
        }
        if (label == "train") {
            if (rtext.empty()) throw InputError(where + ": training row without a response");
            split[i] = Split::Train;
        } else if (label == "test") {
            split[i] = rtext.empty() ? Split::Predict : Split::Test;
        } else if (label.empty() || label == "predict") {
            split[i] = rtext.empty() || label == "predict" ? Split::Predict : Split::Train;
        } else {
            throw InputError(where + ": unknown split label '" + label + "'");
        }
    }
    Dataset d = make_dataset(std::move(raw), std::move(y), std::move(split), coord_names);
    d.response_name = schema.response;
    return d;
}

Dataset load_dataset(const std::string& path, const DatasetSchema& schema) {
    return parse_dataset(read_csv(path), schema, path);
}

std::string dataset_to_csv(const Dataset& data) {
    std::ostringstream os;
    for (const auto& name : data.coordinate_names) os << name << ',';
    os << data.response_name << ",split\n";
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        for (Eigen::Index c = 0; c < data.raw_locations.cols(); ++c) os << format_double(data.raw_locations(i, c)) << ',';
        if (std::isfinite(data.responses(i))) os << format_double(data.responses(i));
        os << ',' << (data.split[i] == Split::Predict ? "" : to_string(data.split[i])) << '\n';
    }
    return os.str();
}

namespace {

Eigen::MatrixXd design(const Eigen::Ref<const Eigen::MatrixXd>& locations) {
    Eigen::MatrixXd x(locations.rows(), locations.cols() + 1);
    x.col(0).setOnes();
    x.rightCols(locations.cols()) = locations;
    return x;
}

}  // namespace

Eigen::VectorXd TrendFit::evaluate(const Eigen::Ref<const Eigen::MatrixXd>& locations) const {
    if (locations.cols() + 1 != coefficients.size()) throw InputError("trend dimension mismatch");
    return design(locations) * coefficients;
}

std::pair<Dataset, TrendFit> detrend_linear(const Dataset& data) {
    const auto train = data.rows(Split::Train);
    const Eigen::Index p = data.dim() + 1;
    if (static_cast<Eigen::Index>(train.size()) < p)
        throw NumericalError("linear trend needs at least " + std::to_string(p) + " training rows");
    Eigen::MatrixXd x(static_cast<Eigen::Index>(train.size()), p);
    Eigen::VectorXd y(static_cast<Eigen::Index>(train.size()));
    for (std::size_t k = 0; k < train.size(); ++k) {
        x(static_cast<Eigen::Index>(k), 0) = 1.0;
        x.row(static_cast<Eigen::Index>(k)).tail(data.dim()) = data.locations.row(train[k]);
        y(static_cast<Eigen::Index>(k)) = data.responses(train[k]);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < p) throw NumericalError("training locations are collinear; linear trend is not identifiable");

    TrendFit trend{qr.solve(y)};
    Dataset out = data;
    out.responses = data.responses - trend.evaluate(data.locations);
    return {std::move(out), std::move(trend)};
}

Eigen::VectorXd retrend(const TrendFit& trend, const Eigen::Ref<const Eigen::MatrixXd>& locations,
                        const Eigen::Ref<const Eigen::VectorXd>& values) {
    return values + trend.evaluate(locations);
}

}  // namespace reds
