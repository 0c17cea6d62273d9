#pragma once

/**
 * @file simulate.hpp
 * @brief Seeded generators for latent-block matrix and tensor data.
 *
 * Streams (see rng.hpp):
 *   sample i         derive_key(seed, "sample", i): E in row-major order,
 *                    then the noise in row-major order
 *   noise variances  derive_key(seed, "noise-variance"): one uniform per entry,
 *                    row-major
 */

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "covclust/core.hpp"
#include "covclust/tensor.hpp"
#include "covclust/weights_cov.hpp"

namespace covclust {

/// M_jk = rho^|j-k|. Throws ArgumentError unless |rho| < 1 and k >= 1.
Eigen::MatrixXd toeplitz(double rho, std::size_t k);

enum class NoiseKind { kHomogeneous, kProportional, kRandom };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::kHomogeneous;
    double mean = 15.0;  ///< the homogeneous value, or the exact mean of the other regimes
    double h = 0.87;     ///< exponent of the random regime
};

/// Block-constant mean M = A~ T B~^T whose blocks are unions of covariance clusters.
struct MeanLayout {
    std::vector<std::size_t> row_sizes;
    std::vector<std::size_t> col_sizes;
    Eigen::MatrixXd values;  ///< one value per (row block, column block)
};

struct SimConfig {
    std::vector<std::size_t> row_sizes;
    std::vector<std::size_t> col_sizes;
    double u_decay = 0.0;
    double v_decay = 0.0;
    NoiseSpec noise;
    std::optional<MeanLayout> mean_layout;  ///< zero mean when unset
    std::size_t n = 0;
    std::uint64_t seed = 0;

    /// Throws ArgumentError on empty or zero sizes, |decay| >= 1, mean <= 0,
    /// n == 0, or a mean layout whose blocks split a covariance cluster.
    void validate() const;
};

/// Contiguous blocks of the given sizes, in order.
Partition blocks_partition(const std::vector<std::size_t>& sizes);

/**
 * p x q noise variances:
 *   homogeneous   sigma2 = mean
 *   proportional  sigma2_ij = mean*p*q*v_ij / sum v, v_ij = m_i m_j / sqrt(pq / (K1 K2))
 *   random        sigma2_ij = mean*p*q*u_ij^h / sum u^h, u_ij ~ Unif(0, 1)
 * with m_i the size of row i's cluster and m_j that of column j's cluster.
 */
Eigen::MatrixXd noise_variances(const SimConfig& config);

/// The exact generative model behind a configuration.
PopulationModel population_model(const SimConfig& config);

struct MatrixSample {
    DataSet data;
    PopulationModel model;
    Partition rows;
    Partition cols;
    std::optional<Partition> rows_mean;  ///< mean-layer truth when a layout is set
    std::optional<Partition> cols_mean;
};

/// The p x q mean matrix of a configuration (zero without a layout).
Eigen::MatrixXd mean_matrix(const SimConfig& config);

/// X = M + A Z B^T + Gamma with Z = chol(U) E chol(V)^T. Throws ModelError when a
/// Cholesky factorization fails.
MatrixSample sample_matrix_normal_dataset(const SimConfig& config);

struct TensorSimConfig {
    std::array<std::vector<std::size_t>, 3> sizes;
    std::array<double, 3> decays{0.0, 0.0, 0.0};
    double noise_variance = 15.0;
    std::size_t n = 0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct TensorSample {
    TensorDataSet data;
    std::array<Partition, 3> truth;
};

/// X = Z x1 A x2 B x3 C + Gamma, Z separable normal with Toeplitz factors,
/// Gamma iid N(0, noise_variance).
TensorSample sample_tensor_dataset(const TensorSimConfig& config);

}  // namespace covclust
