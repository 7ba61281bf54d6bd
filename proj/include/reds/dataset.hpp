#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "reds/csv.hpp"
#include "reds/errors.hpp"

namespace reds {

enum class Split { Train, Test, Predict };

const char* to_string(Split s);

/// Per-axis affine map raw -> (raw - offset) / scale into [0, 1].
struct AxisTransform {
    double offset = 0.0;
    double scale = 1.0;

    double forward(double raw) const { return (raw - offset) / scale; }
    double inverse(double unit) const { return unit * scale + offset; }
};

/// Locations (1D or 2D) with responses and split flags. `locations` are already
/// mapped into the unit domain; `raw_locations` keep the input units.
struct Dataset {
    Eigen::MatrixXd raw_locations;
    Eigen::MatrixXd locations;
    /// NaN where the row has no response.
    Eigen::VectorXd responses;
    std::vector<Split> split;
    std::vector<AxisTransform> transform;
    std::vector<std::string> coordinate_names;
    std::string response_name = "response";
    /// Rows whose exact location already appeared earlier in the file.
    int duplicate_locations = 0;

    Eigen::Index size() const { return locations.rows(); }
    int dim() const { return static_cast<int>(locations.cols()); }
    std::vector<Eigen::Index> rows(Split which) const;
    /// Test rows that carry a response.
    std::vector<Eigen::Index> scored_test_rows() const;
};

struct DatasetSchema {
    /// Coordinate columns; empty selects every column other than the response and split columns.
    std::vector<std::string> coordinates;
    std::string response = "response";
    std::string split = "split";
};

/// Fits the unit-domain transform over all rows. An axis already inside [0, 1] keeps
/// the identity map; otherwise min maps to 0 and max to 1.
std::vector<AxisTransform> fit_unit_transform(const Eigen::Ref<const Eigen::MatrixXd>& raw);

Dataset make_dataset(Eigen::MatrixXd raw_locations, Eigen::VectorXd responses, std::vector<Split> split,
                     std::vector<std::string> coordinate_names = {});

Dataset parse_dataset(const CsvTable& table, const DatasetSchema& schema, const std::string& source = "<memory>");
Dataset load_dataset(const std::string& path, const DatasetSchema& schema = {});

/// Header plus one row per location: coordinates, response, split.
std::string dataset_to_csv(const Dataset& data);

/// Plane (2D) or line (1D) in unit-domain coordinates: c0 + c1 s1 [+ c2 s2].
struct TrendFit {
    Eigen::VectorXd coefficients;

    Eigen::VectorXd evaluate(const Eigen::Ref<const Eigen::MatrixXd>& locations) const;
};

/// Ordinary least squares trend on the training rows; responses of every row with a value
/// have the trend subtracted. Rank-deficient designs throw NumericalError.
std::pair<Dataset, TrendFit> detrend_linear(const Dataset& data);

/// values + trend at the given unit-domain locations.
Eigen::VectorXd retrend(const TrendFit& trend, const Eigen::Ref<const Eigen::MatrixXd>& locations,
                        const Eigen::Ref<const Eigen::VectorXd>& values);

}  // namespace reds
