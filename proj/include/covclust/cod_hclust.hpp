#pragma once

/**
 * @file cod_hclust.hpp
 * @brief Covariance-difference dissimilarity and complete-linkage agglomeration.
 */

#include "covclust/core.hpp"

namespace covclust {

/**
 * @brief Pairwise covariance differences COD(a, b) = max_{c != a,b} |S_ac - S_bc|.
 *
 * Symmetric, non-negative, zero diagonal.
 */
class CodMatrix {
public:
    explicit CodMatrix(Eigen::MatrixXd values);

    std::size_t dim() const { return static_cast<std::size_t>(values_.rows()); }
    const Eigen::MatrixXd& values() const { return values_; }
    double operator()(std::size_t a, std::size_t b) const {
        return values_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }

private:
    Eigen::MatrixXd values_;
};

/// Throws ArgumentError for p < 3 or an input asymmetric beyond 1e-8.
CodMatrix cod_matrix(const Eigen::MatrixXd& sigma);

/// Minimum COD over pairs in different clusters. Throws ArgumentError when K == 1.
double mcod(const CodMatrix& cod, const Partition& part);

/**
 * Complete-linkage agglomeration with COD as the base dissimilarity: the
 * distance between two clusters is the largest COD between their members.
 * Ties go to the pair whose (smallest-leaf) representatives are
 * lexicographically smallest. O(p^3).
 */
Dendrogram agglomerate(const CodMatrix& cod);

/// Clusters formed by every merge with height <= alpha.
Partition cut_threshold(const Dendrogram& tree, double alpha);

/// Clusters after the first m - k merges. Throws ArgumentError unless 1 <= k <= m.
Partition cut_k(const Dendrogram& tree, std::size_t k);

}  // namespace covclust
