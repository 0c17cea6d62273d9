#pragma once

/**
 * @file weights_cov.hpp
 * @brief Weight matrices, the sample weighted covariance, and exact
 * population quantities under a matrix-normal latent model.
 */

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "covclust/core.hpp"

namespace covclust {

enum class WeightKind { kIdentity, kOptimal, kCustom };

std::string to_string(WeightKind kind);

/**
 * @brief A positive semi-definite weight W carried as a factor L with LL^T = W.
 *
 * For identity and optimal weights L has one nonzero per row, which the
 * covariance kernels exploit: column t of XL is a scaled sum of the columns
 * of X assigned to group t.
 */
class Weight {
public:
    std::size_t dim() const { return static_cast<std::size_t>(factor_.rows()); }
    std::size_t rank() const { return static_cast<std::size_t>(factor_.cols()); }
    WeightKind kind() const { return kind_; }
    const Eigen::MatrixXd& factor() const { return factor_; }
    Eigen::MatrixXd matrix() const { return factor_ * factor_.transpose(); }

    /// Group of each index and per-group coefficient, when L has one nonzero per row.
    const std::vector<int>& groups() const { return groups_; }
    const std::vector<double>& group_coefficients() const { return coefficients_; }
    bool is_grouped() const { return !groups_.empty(); }

    /// New weight with W scaled by t > 0 (L scaled by sqrt(t)).
    Weight scaled(double t) const;

private:
    friend Weight identity_weight(std::size_t q);
    friend Weight optimal_weight(const Partition& estimate);
    friend Weight custom_weight(Eigen::MatrixXd factor);

    Eigen::MatrixXd factor_;
    WeightKind kind_ = WeightKind::kCustom;
    std::vector<int> groups_;
    std::vector<double> coefficients_;
};

/// W = I_q / q. Throws ArgumentError when q == 0.
Weight identity_weight(std::size_t q);

/// W = B(B^T B)^{-2} B^T / s for the estimated clustering, with factor
/// L = B(B^T B)^{-1} / sqrt(s).
Weight optimal_weight(const Partition& estimate);
/// Same, from a membership matrix. Throws ArgumentError on an empty column.
Weight optimal_weight(const Membership& estimate);

/// Arbitrary weight given by its factor.
Weight custom_weight(Eigen::MatrixXd factor);

/// Which side of X the weight acts on: rows mode estimates E(X W X^T)
/// (p-by-p), columns mode estimates E(X^T W X) (q-by-q).
enum class Axis { kRows, kColumns };

std::string to_string(Axis axis);

/**
 * (1/|S|) sum_{i in S} Y_i Y_i^T with Y_i = X_i L (rows) or X_i^T L (columns),
 * over all samples or the given subset. Accumulation is sequential in sample
 * order and the result is symmetrized, so output is bit-reproducible.
 */
Eigen::MatrixXd sample_weighted_covariance(const DataSet& data, const Weight& w, Axis axis,
                                           std::optional<std::span<const std::size_t>> subset = std::nullopt);

/**
 * @brief Exact matrix-normal generative parameters.
 *
 * X = A Z B^T + Gamma with Z ~ MN(0, U, V) and independent Gamma_ab ~ N(0, sigma2(a, b)).
 */
struct PopulationModel {
    Partition rows;           ///< row clusters (defines A)
    Partition cols;           ///< column clusters (defines B)
    Eigen::MatrixXd u;        ///< K1-by-K1 row covariance of Z
    Eigen::MatrixXd v;        ///< K2-by-K2 column covariance of Z
    Eigen::MatrixXd sigma2;   ///< p-by-q noise variances

    std::size_t p() const { return rows.size(); }
    std::size_t q() const { return cols.size(); }

    /// Throws ModelError unless U, V are symmetric positive definite, sigma2 is
    /// positive and all shapes agree.
    void validate() const;
};

/// Exact Sigma_{p,W} = A E(Z B^T W B Z^T) A^T + E(Gamma W Gamma^T) (rows mode),
/// or its column analogue with W acting on the rows of X.
Eigen::MatrixXd population_weighted_covariance(const PopulationModel& model, const Weight& w, Axis axis);

/// The noise part E(Gamma W Gamma^T) (rows) or E(Gamma^T W Gamma) (columns); diagonal.
Eigen::MatrixXd population_noise_covariance(const PopulationModel& model, const Weight& w, Axis axis);

struct XNorm {
    double value;
    std::size_t argmax_row;
};

/// ||X||_W = sqrt(K2) max_a || L^T Var(X_a.) L ||_F for the row weight w.
XNorm population_x_norm(const PopulationModel& model, const Weight& w);

/// MCOD of the exact rows-mode covariance with respect to `truth`.
/// Throws ArgumentError when truth has a single cluster.
double population_mcod(const PopulationModel& model, const Weight& w, const Partition& truth);

/**
 * gamma = max_{a,b} max_{c != a,b} |N_ac - N_bc| for a noise covariance
 * N = E(Gamma W Gamma^T). Throws ArgumentError for p < 3.
 */
double gamma_diagnostic(const Eigen::MatrixXd& noise_wcov);

/// gamma_s = 2 max_{a != b} |N_ab|, an upper bound on gamma_diagnostic.
double gamma_s_diagnostic(const Eigen::MatrixXd& noise_wcov);

/// Caller-supplied theory constants; none of them has a default.
struct TheoryConstants {
    double c0;
    double c1;
    double c_min;
    double c_max;
    std::size_t n;
};

struct StabilityReport {
    Eigen::MatrixXd g;         ///< K2-by-s overlap matrix B^T B^(B^ ^T B^)^{-1}
    double lambda_min_ggt;
    double lambda_max_ggt;
    double c_k;
    double c_s;
    /// min_{j != k} max_l |U_jl - U_kl| minus the separation bound; positive when (P1) holds.
    double p1_margin;
    bool p1_satisfied;
    bool p2_case_i;            ///< which branch's first inequality holds
    bool p2_i_satisfied;
    bool p2_ii_satisfied;
    bool p2_satisfied;
};

/// Evaluates the separation and stability conditions for an estimated column
/// clustering `bhat` against the model's true column clusters.
StabilityReport stability_diagnostics(const PopulationModel& model, const Partition& bhat,
                                      const TheoryConstants& constants);

}  // namespace covclust
