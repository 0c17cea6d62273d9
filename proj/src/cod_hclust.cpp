#include "covclust/cod_hclust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace covclust {

CodMatrix::CodMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
    if (values_.rows() != values_.cols()) {
        throw ArgumentError("CodMatrix: must be square");
    }
}

CodMatrix cod_matrix(const Eigen::MatrixXd& sigma) {
    const Eigen::Index p = sigma.rows();
    if (sigma.cols() != p) {
        throw ArgumentError("cod_matrix: covariance must be square");
    }
    if (p < 3) {
        throw ArgumentError("cod_matrix: needs at least 3 variables, got " + std::to_string(p));
    }
    const double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
    if (!(asym <= 1e-8)) {
        throw ArgumentError("cod_matrix: covariance is not symmetric");
    }
    Eigen::MatrixXd cod = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index a = 0; a < p; ++a) {
        const auto col_a = sigma.col(a);
        for (Eigen::Index b = a + 1; b < p; ++b) {
            const auto col_b = sigma.col(b);
            double m = 0.0;
            for (Eigen::Index c = 0; c < p; ++c) {
                if (c != a && c != b) {
                    m = std::max(m, std::abs(col_a(c) - col_b(c)));
                }
            }
            cod(a, b) = m;
            cod(b, a) = m;
        }
    }
    return CodMatrix(std::move(cod));
}

double mcod(const CodMatrix& cod, const Partition& part) {
    if (part.size() != cod.dim()) {
        throw ArgumentError("mcod: partition length does not match COD dimension");
    }
    if (part.k() < 2) {
        throw ArgumentError("mcod: MCOD is undefined for a single cluster");
    }
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < cod.dim(); ++a) {
        for (std::size_t b = a + 1; b < cod.dim(); ++b) {
            if (part[a] != part[b]) {
                m = std::min(m, cod(a, b));
            }
        }
    }
    return m;
}

Dendrogram agglomerate(const CodMatrix& cod) {
    const std::size_t p = cod.dim();
    if (p < 1) {
        throw ArgumentError("agglomerate: empty input");
    }
    // Slot i holds the cluster whose smallest leaf is i; merging j into i
    // (i < j) keeps that invariant.
    Eigen::MatrixXd d = cod.values();
    std::vector<char> active(p, 1);
    std::vector<int> node(p);
    std::iota(node.begin(), node.end(), 0);

    std::vector<Merge> merges;
    merges.reserve(p - 1);
    for (std::size_t step = 0; step + 1 < p; ++step) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0;
        std::size_t bj = 0;
        for (std::size_t i = 0; i < p; ++i) {
            if (!active[i]) {
                continue;
            }
            for (std::size_t j = i + 1; j < p; ++j) {
                if (active[j] && d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) < best) {
                    best = d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                    bi = i;
                    bj = j;
                }
            }
        }
        merges.push_back({node[bi], node[bj], best});
        node[bi] = static_cast<int>(p + step);
        active[bj] = 0;
        const auto ei = static_cast<Eigen::Index>(bi);
        const auto ej = static_cast<Eigen::Index>(bj);
        for (std::size_t k = 0; k < p; ++k) {
            if (active[k] && k != bi) {
                const auto ek = static_cast<Eigen::Index>(k);
                const double v = std::max(d(ei, ek), d(ej, ek));
                d(ei, ek) = v;
                d(ek, ei) = v;
            }
        }
    }
    return Dendrogram(p, std::move(merges));
}

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

Partition apply_merges(const Dendrogram& tree, std::size_t count) {
    const std::size_t m = tree.leaves();
    // Nodes 0..m-1 are leaves, node m+i is the result of merge i; every
    // internal node is represented by one of its leaves.
    std::vector<std::size_t> leaf_of(2 * m - 1);
    for (std::size_t i = 0; i < m; ++i) {
        leaf_of[i] = i;
    }
    DisjointSets sets(m);
    const auto& merges = tree.merges();
    for (std::size_t i = 0; i < merges.size(); ++i) {
        const auto l = leaf_of[static_cast<std::size_t>(merges[i].left)];
        const auto r = leaf_of[static_cast<std::size_t>(merges[i].right)];
        leaf_of[m + i] = l;
        if (i < count) {
            sets.unite(l, r);
        }
    }
    std::vector<std::int64_t> roots(m);
    for (std::size_t i = 0; i < m; ++i) {
        roots[i] = static_cast<std::int64_t>(sets.find(i));
    }
    return partition_from_labels(std::span<const std::int64_t>(roots));
}

}  // namespace

Partition cut_threshold(const Dendrogram& tree, double alpha) {
    if (std::isnan(alpha)) {
        throw ArgumentError("cut_threshold: alpha is NaN");
    }
    // Heights are monotone, so the merges at or below alpha form a prefix.
    const auto& merges = tree.merges();
    std::size_t count = 0;
    while (count < merges.size() && merges[count].height <= alpha) {
        ++count;
    }
    return apply_merges(tree, count);
}

Partition cut_k(const Dendrogram& tree, std::size_t k) {
    const std::size_t m = tree.leaves();
    if (k < 1 || k > m) {
        throw ArgumentError("cut_k: k must lie in [1, " + std::to_string(m) + "], got " + std::to_string(k));
    }
    return apply_merges(tree, m - k);
}

}  // namespace covclust
