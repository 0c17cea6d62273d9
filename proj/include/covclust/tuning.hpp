#pragma once

/**
 * @file tuning.hpp
 * @brief Split-sample selection of the dendrogram cut threshold.
 */

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "covclust/cod_hclust.hpp"
#include "covclust/core.hpp"
#include "covclust/weights_cov.hpp"

namespace covclust {

struct Folds {
    std::vector<std::size_t> first;   ///< ceil(n/2) indices, ascending
    std::vector<std::size_t> second;  ///< floor(n/2) indices, ascending
};

/// Seeded random halving of {0..n-1}. Throws ArgumentError when n < 2.
Folds split_folds(std::size_t n, std::uint64_t seed);

/**
 * Block smoothing: every off-diagonal entry is replaced by the mean of the
 * off-diagonal entries of its (cluster, cluster) block and the diagonal is set
 * to 1. Singleton blocks have no off-diagonal entries.
 */
Eigen::MatrixXd smooth(const Eigen::MatrixXd& sigma, const Partition& part);

struct TuneReport {
    std::vector<double> grid;    ///< ascending
    std::vector<double> losses;  ///< ||smooth(S1, G_l) - S2||_F per grid value
    std::size_t chosen_index = 0;
    double chosen = 0.0;
    Folds folds;
};

/// Forty log-spaced values between the 1st and 99th percentiles of the
/// off-diagonal entries of `cod`. A non-positive lower end is replaced by the
/// smallest positive entry; an all-zero input yields {0}.
std::vector<double> default_alpha_grid(const CodMatrix& cod, std::size_t points = 40);

/// Covariance estimate over a subset of sample indices.
using SubsetCovariance = std::function<Eigen::MatrixXd(std::span<const std::size_t>)>;

/**
 * Core of the selection: halves {0..n-1}, builds the tree on the first half's
 * covariance and scores each grid value against the second half's covariance.
 * Ties go to the smallest alpha. Throws ArgumentError when n < 4 or the grid is
 * empty, unsorted or non-finite.
 */
TuneReport tune_alpha(std::size_t n, const SubsetCovariance& covariance,
                      const std::optional<std::vector<double>>& grid, std::uint64_t seed);

/// tune_alpha over `data` with a fixed weight. When `standardize_data` is set
/// the data are standardized once up front.
TuneReport select_alpha(const DataSet& data, Axis axis, const Weight& weight,
                        const std::optional<std::vector<double>>& grid, std::uint64_t seed,
                        bool standardize_data = false);

}  // namespace covclust
