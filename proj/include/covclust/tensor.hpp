#pragma once

/**
 * @file tensor.hpp
 * @brief Three-way samples, mode-k unfolding, and identity-weight clustering
 * of every mode.
 *
 * A J x P x Q array is stored row-major: entry (j, p, q) sits at
 * j*P*Q + p*Q + q. Unfoldings put the mode-k fibers in columns, with the
 * remaining indices ordered earlier-mode-fastest:
 *
 *   mode 1: J x PQ, column p + P*q
 *   mode 2: P x JQ, column j + J*q
 *   mode 3: Q x JP, column j + J*p
 *
 * For the 2x2x2 array t(j,p,q) = 4j + 2p + q the mode-1 unfolding is
 *
 *   [0 2 1 3]
 *   [4 6 5 7]
 */

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "covclust/core.hpp"
#include "covclust/pipelines.hpp"

namespace covclust {

using TensorShape = std::array<std::size_t, 3>;

/// n samples of one fixed J x P x Q shape, sample-major.
class TensorDataSet {
public:
    TensorDataSet(std::size_t n, TensorShape shape, std::vector<double> values);

    std::size_t n() const { return n_; }
    const TensorShape& shape() const { return shape_; }
    std::size_t sample_size() const { return shape_[0] * shape_[1] * shape_[2]; }
    const std::vector<double>& values() const { return values_; }
    std::span<const double> sample(std::size_t i) const {
        return std::span<const double>(values_).subspan(i * sample_size(), sample_size());
    }

    bool operator==(const TensorDataSet&) const = default;

private:
    std::size_t n_;
    TensorShape shape_;
    std::vector<double> values_;
};

/// Mode-k unfolding (mode in {1, 2, 3}). Throws ArgumentError otherwise.
Eigen::MatrixXd matricize(std::span<const double> x, const TensorShape& shape, int mode);

/// Inverse of matricize.
std::vector<double> fold(const Eigen::MatrixXd& m, const TensorShape& shape, int mode);

/// Every sample unfolded along `mode`, as a matrix data set.
DataSet unfold_dataset(const TensorDataSet& data, int mode);

struct TensorOptions {
    bool standardize = true;
    std::array<StopRule, 3> stops{Tuned{}, Tuned{}, Tuned{}};
    std::uint64_t seed = 0;
};

struct TensorResult {
    std::array<Partition, 3> partitions;
    std::array<StepTrace, 3> trace;
};

/// For each mode k, Sigma_k = (1/n) sum X_(k) X_(k)^T / (number of columns),
/// then COD, tree and cut. Each mode dimension must be at least 3.
TensorResult cluster_tensor_identity(const TensorDataSet& data, const TensorOptions& opts);

}  // namespace covclust
