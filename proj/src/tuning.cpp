#include "covclust/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "covclust/rng.hpp"

namespace covclust {

Folds split_folds(std::size_t n, std::uint64_t seed) {
    if (n < 2) {
        throw ArgumentError("split_folds: need at least 2 samples, got " + std::to_string(n));
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    CounterRng rng(seed, "split-folds");
    for (std::size_t i = n - 1; i > 0; --i) {
        std::swap(order[i], order[rng.below(i + 1)]);
    }
    const std::size_t half = (n + 1) / 2;
    Folds folds;
    folds.first.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(half));
    folds.second.assign(order.begin() + static_cast<std::ptrdiff_t>(half), order.end());
    std::sort(folds.first.begin(), folds.first.end());
    std::sort(folds.second.begin(), folds.second.end());
    return folds;
}

Eigen::MatrixXd smooth(const Eigen::MatrixXd& sigma, const Partition& part) {
    const Eigen::Index p = sigma.rows();
    if (sigma.cols() != p) {
        throw ArgumentError("smooth: matrix must be square");
    }
    if (static_cast<std::size_t>(p) != part.size()) {
        throw ArgumentError("smooth: partition length does not match matrix dimension");
    }
    const auto k = static_cast<Eigen::Index>(part.k());
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, k);
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index a = 0; a < p; ++a) {
        const int ga = part[static_cast<std::size_t>(a)];
        for (Eigen::Index b = 0; b < p; ++b) {
            if (a != b) {
                const int gb = part[static_cast<std::size_t>(b)];
                sums(ga, gb) += sigma(a, b);
                counts(ga, gb) += 1.0;
            }
        }
    }
    Eigen::MatrixXd out(p, p);
    for (Eigen::Index a = 0; a < p; ++a) {
        const int ga = part[static_cast<std::size_t>(a)];
        for (Eigen::Index b = 0; b < p; ++b) {
            const int gb = part[static_cast<std::size_t>(b)];
            out(a, b) = a == b ? 1.0 : sums(ga, gb) / counts(ga, gb);
        }
    }
    // The block sums are accumulated in different orders for (g, h) and (h, g).
    return (out + out.transpose()) / 2.0;
}

namespace {

// Type-7 sample quantile of sorted values.
double quantile(const std::vector<double>& sorted, double prob) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void check_grid(const std::vector<double>& grid) {
    if (grid.empty()) {
        throw ArgumentError("alpha grid is empty");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i])) {
            throw ArgumentError("alpha grid has a non-finite value");
        }
        if (i > 0 && grid[i] < grid[i - 1]) {
            throw ArgumentError("alpha grid must be ascending");
        }
    }
}

}  // namespace

std::vector<double> default_alpha_grid(const CodMatrix& cod, std::size_t points) {
    if (points < 1) {
        throw ArgumentError("default_alpha_grid: need at least one point");
    }
    std::vector<double> values;
    values.reserve(cod.dim() * (cod.dim() - 1) / 2);
    for (std::size_t a = 0; a < cod.dim(); ++a) {
        for (std::size_t b = a + 1; b < cod.dim(); ++b) {
            values.push_back(cod(a, b));
        }
    }
    if (values.empty()) {
        throw ArgumentError("default_alpha_grid: COD matrix has no off-diagonal entries");
    }
    std::sort(values.begin(), values.end());
    const double hi = quantile(values, 0.99);
    if (!(hi > 0.0)) {
        return {0.0};
    }
    double lo = quantile(values, 0.01);
    if (!(lo > 0.0)) {
        lo = *std::upper_bound(values.begin(), values.end(), 0.0);
    }
    if (points == 1 || lo >= hi) {
        return {hi};
    }
    std::vector<double> grid(points);
    const double llo = std::log(lo);
    const double step = (std::log(hi) - llo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = std::exp(llo + step * static_cast<double>(i));
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

TuneReport tune_alpha(std::size_t n, const SubsetCovariance& covariance,
                      const std::optional<std::vector<double>>& grid, std::uint64_t seed) {
    if (n < 4) {
        throw ArgumentError("select_alpha: need at least 4 samples, got " + std::to_string(n));
    }
    TuneReport report;
    report.folds = split_folds(n, seed);
    const Eigen::MatrixXd s1 = covariance(report.folds.first);
    const Eigen::MatrixXd s2 = covariance(report.folds.second);
    const CodMatrix cod = cod_matrix(s1);
    report.grid = grid ? *grid : default_alpha_grid(cod);
    check_grid(report.grid);

    const Dendrogram tree = agglomerate(cod);
    report.losses.resize(report.grid.size());
    for (std::size_t l = 0; l < report.grid.size(); ++l) {
        const Partition g = cut_threshold(tree, report.grid[l]);
        report.losses[l] = (smooth(s1, g) - s2).norm();
        if (!std::isfinite(report.losses[l])) {
            throw ModelError("select_alpha: non-finite loss at alpha = " + std::to_string(report.grid[l]));
        }
    }
    report.chosen_index = 0;
    for (std::size_t l = 1; l < report.losses.size(); ++l) {
        if (report.losses[l] < report.losses[report.chosen_index]) {
            report.chosen_index = l;
        }
    }
    report.chosen = report.grid[report.chosen_index];
    return report;
}

TuneReport select_alpha(const DataSet& data, Axis axis, const Weight& weight,
                        const std::optional<std::vector<double>>& grid, std::uint64_t seed,
                        bool standardize_data) {
    const DataSet prepared = standardize_data ? standardize(data) : data;
    return tune_alpha(
        prepared.n(),
        [&](std::span<const std::size_t> subset) {
            return sample_weighted_covariance(prepared, weight, axis, subset);
        },
        grid, seed);
}

}  // namespace covclust
