#pragma once

/**
 * @file dataset_io.hpp
 * @brief On-disk data sets and result files.
 *
 * A data set is a directory with two files:
 *
 *   manifest.json  {"format": "covclust-dataset", "version": 1,
 *                   "kind": "matrix" | "tensor", "n": .., "p": .., "q": ..
 *                   (or "shape": [J, P, Q]), "layout": "row-major",
 *                   "data_file": "data.txt", "truth": {name: labels},
 *                   "provenance": {..}}
 *   data.txt       one line per sample, the sample flattened row-major,
 *                  values separated by single spaces, 17 significant digits
 *
 * Truth names are "rows" / "cols" (plus "rows_mean" / "cols_mean" for the
 * mean layer) for matrices and "mode1" / "mode2" / "mode3" for tensors.
 */

#include <filesystem>
#include <map>
#include <string>
#include <variant>

#include "json.hpp"

#include "covclust/core.hpp"
#include "covclust/tensor.hpp"

namespace covclust::cli {

using Json = nlohmann::json;

struct DatasetFile {
    std::variant<DataSet, TensorDataSet> data;
    std::map<std::string, Partition> truth;
    Json provenance = Json::object();

    bool is_tensor() const { return std::holds_alternative<TensorDataSet>(data); }
};

/// Thrown for unreadable or inconsistent files; the CLI maps it to exit code 2.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest decimal form that parses back to the same double, at most 17 digits.
std::string format_double(double v);
/// Exactly 17 significant digits; used for data files.
std::string format_double17(double v);

void write_dataset(const std::filesystem::path& dir, const DatasetFile& file);
DatasetFile read_dataset(const std::filesystem::path& dir);

Json partition_to_json(const Partition& part);
Partition partition_from_json(const Json& labels);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& value);

/**
 * Named partitions from any of: a data set directory, a manifest ("truth"), or
 * a result file ("partitions").
 */
std::map<std::string, Partition> read_partitions(const std::filesystem::path& path);

}  // namespace covclust::cli
