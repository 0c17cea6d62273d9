#pragma once

// Shared fixtures and brute-force oracles for the unit tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "covclust/core.hpp"
#include "covclust/rng.hpp"
#include "covclust/weights_cov.hpp"

namespace testing {

using namespace covclust;

inline Partition random_partition(CounterRng& rng, std::size_t m, int max_k) {
    std::vector<int> labels(m);
    for (auto& l : labels) {
        l = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_k)));
    }
    return partition_from_labels(labels);
}

/// Partition with every cluster id in 0..k-1 used at least once.
inline Partition random_partition_exact_k(CounterRng& rng, std::size_t m, int k) {
    std::vector<int> labels(m);
    for (std::size_t i = 0; i < m; ++i) {
        labels[i] = i < static_cast<std::size_t>(k) ? static_cast<int>(i) : static_cast<int>(rng.below(k));
    }
    for (std::size_t i = m; i > 1; --i) {
        std::swap(labels[i - 1], labels[rng.below(i)]);
    }
    return partition_from_labels(labels);
}

inline Eigen::MatrixXd random_matrix(CounterRng& rng, Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) {
            m(i, j) = rng.normal();
        }
    }
    return m;
}

inline Eigen::MatrixXd random_symmetric(CounterRng& rng, Eigen::Index p) {
    Eigen::MatrixXd m = random_matrix(rng, p, p);
    return (m + m.transpose()) / 2.0;
}

inline Eigen::MatrixXd random_spd(CounterRng& rng, Eigen::Index k) {
    Eigen::MatrixXd g = random_matrix(rng, k, k);
    return g * g.transpose() / static_cast<double>(k) + Eigen::MatrixXd::Identity(k, k);
}

inline DataSet random_dataset(CounterRng& rng, std::size_t n, std::size_t p, std::size_t q) {
    std::vector<double> v(n * p * q);
    for (auto& x : v) {
        x = rng.normal();
    }
    return DataSet(n, p, q, std::move(v));
}

/// All set partitions of {0..m-1} as restricted growth strings.
inline std::vector<Partition> all_partitions(std::size_t m) {
    std::vector<Partition> out;
    std::vector<int> a(m, 0);
    for (;;) {
        out.push_back(partition_from_labels(a));
        // next restricted growth string
        std::size_t i = m;
        bool advanced = false;
        while (i > 1) {
            --i;
            int mx = *std::max_element(a.begin(), a.begin() + static_cast<long>(i));
            if (a[i] <= mx) {
                ++a[i];
                std::fill(a.begin() + static_cast<long>(i) + 1, a.end(), 0);
                advanced = true;
                break;
            }
        }
        if (!advanced) {
            return out;
        }
    }
}

/// ARI from raw pair enumeration: Rand-type counts plus the chance correction.
inline double brute_ari(const Partition& t, const Partition& e) {
    const std::size_t m = t.size();
    double both = 0, in_t = 0, in_e = 0, pairs = 0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const bool st = t[i] == t[j];
            const bool se = e[i] == e[j];
            both += st && se;
            in_t += st;
            in_e += se;
            pairs += 1;
        }
    }
    const double expected = in_t * in_e / pairs;
    const double max_index = (in_t + in_e) / 2.0;
    if (max_index - expected == 0.0) {
        return t == e ? 1.0 : 0.0;
    }
    return (both - expected) / (max_index - expected);
}

/// Complete linkage recomputed from scratch at every step.
inline std::vector<std::vector<std::size_t>> brute_cluster_sets(std::size_t p) {
    std::vector<std::vector<std::size_t>> s(p);
    for (std::size_t i = 0; i < p; ++i) {
        s[i] = {i};
    }
    return s;
}

/// Heights and merged member sets of a from-scratch max-linkage agglomeration.
struct BruteMerge {
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    double height;
};

inline std::vector<BruteMerge> brute_agglomerate(const Eigen::MatrixXd& d) {
    auto clusters = brute_cluster_sets(static_cast<std::size_t>(d.rows()));
    std::vector<BruteMerge> out;
    while (clusters.size() > 1) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                double link = 0.0;
                for (auto a : clusters[i]) {
                    for (auto b : clusters[j]) {
                        link = std::max(link, d(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
                    }
                }
                // clusters stay sorted by smallest member, so (i, j) order is the tie order
                if (link < best) {
                    best = link;
                    bi = i;
                    bj = j;
                }
            }
        }
        out.push_back({clusters[bi], clusters[bj], best});
        clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
        std::sort(clusters[bi].begin(), clusters[bi].end());
        clusters.erase(clusters.begin() + static_cast<long>(bj));
    }
    return out;
}

/// Direct (1/n) sum X W X^T (rows) or X^T W X (columns) with the dense W.
inline Eigen::MatrixXd brute_weighted_covariance(const DataSet& data, const Eigen::MatrixXd& w, Axis axis) {
    const std::size_t dim = axis == Axis::kRows ? data.p() : data.q();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < data.n(); ++i) {
        const Eigen::MatrixXd x = axis == Axis::kRows ? Eigen::MatrixXd(data.sample(i))
                                                      : Eigen::MatrixXd(data.sample(i).transpose());
        for (Eigen::Index a = 0; a < x.rows(); ++a) {
            for (Eigen::Index b = 0; b < x.rows(); ++b) {
                double s = 0.0;
                for (Eigen::Index k = 0; k < x.cols(); ++k) {
                    for (Eigen::Index l = 0; l < x.cols(); ++l) {
                        s += x(a, k) * w(k, l) * x(b, l);
                    }
                }
                out(a, b) += s;
            }
        }
    }
    return out / static_cast<double>(data.n());
}

inline double brute_cod(const Eigen::MatrixXd& s, Eigen::Index a, Eigen::Index b) {
    double m = 0.0;
    for (Eigen::Index c = 0; c < s.rows(); ++c) {
        if (c != a && c != b) {
            m = std::max(m, std::abs(s(a, c) - s(b, c)));
        }
    }
    return m;
}

/// Matrix-normal population model with random SPD U, V and noise variances in [lo, hi].
inline PopulationModel random_model(CounterRng& rng, const Partition& rows, const Partition& cols, double lo,
                                    double hi) {
    PopulationModel m;
    m.rows = rows;
    m.cols = cols;
    m.u = random_spd(rng, rows.k());
    m.v = random_spd(rng, cols.k());
    m.sigma2.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (Eigen::Index a = 0; a < m.sigma2.rows(); ++a) {
        for (Eigen::Index b = 0; b < m.sigma2.cols(); ++b) {
            m.sigma2(a, b) = lo + (hi - lo) * rng.uniform();
        }
    }
    return m;
}

/// Minimax construction: three equal row clusters with U = C(eps), V = I.
inline PopulationModel c_eps_model(double eps, std::size_t m_p, const std::vector<std::size_t>& col_sizes,
                                   double sigma2) {
    std::vector<int> r;
    for (int k = 0; k < 3; ++k) {
        r.insert(r.end(), m_p, k);
    }
    std::vector<int> c;
    for (std::size_t t = 0; t < col_sizes.size(); ++t) {
        c.insert(c.end(), col_sizes[t], static_cast<int>(t));
    }
    PopulationModel m;
    m.rows = partition_from_labels(r);
    m.cols = partition_from_labels(c);
    m.u.resize(3, 3);
    m.u << eps, eps - eps * eps, -eps,
           eps - eps * eps, eps, eps,
           -eps, eps, 2.0;
    m.v = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(col_sizes.size()),
                                    static_cast<Eigen::Index>(col_sizes.size()));
    m.sigma2 = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(c.size()),
                                         sigma2);
    return m;
}

}  // namespace testing
