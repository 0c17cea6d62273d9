#pragma once

/**
 * @file core.hpp
 * @brief Shared domain types for matrix-valued variable clustering:
 * datasets, partitions, membership matrices, dendrograms and accuracy metrics.
 */

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace covclust {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Invalid argument or violated precondition.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A generative model that cannot be realised (e.g. a covariance that is not SPD).
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Standardization hit a feature whose sample variance is zero.
class DegenerateFeatureError : public std::runtime_error {
public:
    DegenerateFeatureError(std::size_t row, std::size_t col);
    std::size_t row;
    std::size_t col;
};

/**
 * @brief n stacked real p-by-q sample matrices.
 *
 * Values are stored sample-major, and within a sample in row-major order,
 * so `values()[i*p*q + a*q + b]` is entry (a, b) of sample i.
 * All entries are finite. The shape never changes after construction.
 */
class DataSet {
public:
    DataSet(std::size_t n, std::size_t p, std::size_t q, std::vector<double> values);

    /// Builds a dataset from a list of equally sized matrices.
    static DataSet from_matrices(const std::vector<Eigen::MatrixXd>& samples);

    std::size_t n() const { return n_; }
    std::size_t p() const { return p_; }
    std::size_t q() const { return q_; }
    const std::vector<double>& values() const { return values_; }

    Eigen::Map<const RowMatrix> sample(std::size_t i) const {
        return Eigen::Map<const RowMatrix>(values_.data() + i * p_ * q_,
                                           static_cast<Eigen::Index>(p_),
                                           static_cast<Eigen::Index>(q_));
    }

    /// Samples listed in `indices`, in the given order.
    DataSet subset(std::span<const std::size_t> indices) const;
    /// Every sample restricted to the given rows.
    DataSet select_rows(std::span<const std::size_t> rows) const;
    /// Every sample restricted to the given columns.
    DataSet select_cols(std::span<const std::size_t> cols) const;
    /// Entrywise sample mean (1/n) sum_i X^(i).
    Eigen::MatrixXd mean() const;

    bool operator==(const DataSet&) const = default;

private:
    std::size_t n_;
    std::size_t p_;
    std::size_t q_;
    std::vector<double> values_;
};

/**
 * @brief Hard, exhaustive, non-overlapping assignment of m indices to K clusters.
 *
 * Always canonical: clusters are numbered by first appearance, so labels[0] == 0
 * and every new id is one more than the largest seen so far.
 */
class Partition {
public:
    const std::vector<int>& labels() const { return labels_; }
    int k() const { return k_; }
    std::size_t size() const { return labels_.size(); }
    int operator[](std::size_t i) const { return labels_[i]; }

    /// Member indices of each cluster, in ascending order.
    std::vector<std::vector<std::size_t>> clusters() const;
    std::vector<std::size_t> cluster_sizes() const;

    /// True when `other` can be obtained by merging clusters of this partition.
    bool refines(const Partition& other) const;

    bool operator==(const Partition&) const = default;

private:
    friend Partition partition_from_labels(std::span<const std::int64_t>);
    friend Partition partition_from_labels(std::span<const int>);
    std::vector<int> labels_;
    int k_ = 0;
};

/// Canonical partition from arbitrary integer ids. Throws ArgumentError on empty input.
Partition partition_from_labels(std::span<const std::int64_t> labels);
Partition partition_from_labels(std::span<const int> labels);
inline Partition partition_from_labels(const std::vector<int>& labels) {
    return partition_from_labels(std::span<const int>(labels));
}

/// The m-by-K binary membership matrix of a partition, one 1 per row.
struct Membership {
    Eigen::MatrixXd matrix;

    Eigen::Index rows() const { return matrix.rows(); }
    Eigen::Index clusters() const { return matrix.cols(); }
};

Membership membership_matrix(const Partition& part);
/// Inverse of membership_matrix. Throws ArgumentError unless every row has one 1
/// and every column is non-empty.
Partition partition_from_membership(const Membership& m);

/// One agglomeration step; node ids below the leaf count are leaves,
/// merge i creates node `leaves + i`.
struct Merge {
    int left;
    int right;
    double height;
};

/// Merge tree with exactly m-1 merges and non-decreasing heights.
class Dendrogram {
public:
    Dendrogram(std::size_t leaves, std::vector<Merge> merges);

    std::size_t leaves() const { return leaves_; }
    const std::vector<Merge>& merges() const { return merges_; }
    std::vector<double> heights() const;

private:
    std::size_t leaves_;
    std::vector<Merge> merges_;
};

enum class VarianceDivisor { kUnbiased, kPopulation };

/**
 * Centers and scales every feature (a, b) across samples so its sample mean
 * is 0 and sample variance is 1 under the chosen divisor (n-1 or n).
 * Requires n >= 2; throws DegenerateFeatureError for a zero-variance feature.
 */
DataSet standardize(const DataSet& data, VarianceDivisor divisor = VarianceDivisor::kUnbiased);

struct AriResult {
    double value;
    /// Both partitions are all-singletons or both are one cluster; the
    /// chance-corrected formula has a zero denominator there.
    bool degenerate;
};

/// Adjusted Rand index from the contingency table of the two partitions.
/// A zero denominator yields 1 when the partitions are equal and 0 otherwise.
AriResult adjusted_rand_index(const Partition& truth, const Partition& est);
inline double ari(const Partition& truth, const Partition& est) {
    return adjusted_rand_index(truth, est).value;
}

struct PairCounts {
    std::uint64_t tp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
};

struct SensSpec {
    double sn;
    double sp;
    bool sn_undefined;
    bool sp_undefined;
    PairCounts counts;
};

/// Pairwise sensitivity and specificity over all j < k. A ratio with a zero
/// denominator is reported as 1.0 with its `undefined` flag set.
SensSpec sensitivity_specificity(const Partition& truth, const Partition& est);

}  // namespace covclust
