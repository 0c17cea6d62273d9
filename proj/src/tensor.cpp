#include "covclust/tensor.hpp"

#include <cmath>

#include "covclust/rng.hpp"

namespace covclust {

TensorDataSet::TensorDataSet(std::size_t n, TensorShape shape, std::vector<double> values)
    : n_(n), shape_(shape), values_(std::move(values)) {
    if (n_ == 0 || shape_[0] == 0 || shape_[1] == 0 || shape_[2] == 0) {
        throw ArgumentError("TensorDataSet: all dimensions must be positive");
    }
    if (values_.size() != n_ * sample_size()) {
        throw ArgumentError("TensorDataSet: expected " + std::to_string(n_ * sample_size()) + " values, got " +
                            std::to_string(values_.size()));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw ArgumentError("TensorDataSet: non-finite entry");
        }
    }
}

namespace {

void check_mode(int mode) {
    if (mode < 1 || mode > 3) {
        throw ArgumentError("tensor mode must be 1, 2 or 3, got " + std::to_string(mode));
    }
}

// Row and column of entry (j, p, q) in the mode-k unfolding.
std::pair<Eigen::Index, Eigen::Index> unfold_index(const TensorShape& s, int mode, std::size_t j, std::size_t p,
                                                   std::size_t q) {
    switch (mode) {
        case 1:
            return {static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(p + s[1] * q)};
        case 2:
            return {static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(j + s[0] * q)};
        default:
            return {static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(j + s[0] * p)};
    }
}

Eigen::Index unfold_rows(const TensorShape& s, int mode) {
    return static_cast<Eigen::Index>(s[static_cast<std::size_t>(mode - 1)]);
}

}  // namespace

Eigen::MatrixXd matricize(std::span<const double> x, const TensorShape& shape, int mode) {
    check_mode(mode);
    const std::size_t total = shape[0] * shape[1] * shape[2];
    if (x.size() != total) {
        throw ArgumentError("matricize: value count does not match shape");
    }
    const Eigen::Index rows = unfold_rows(shape, mode);
    Eigen::MatrixXd m(rows, static_cast<Eigen::Index>(total) / rows);
    std::size_t at = 0;
    for (std::size_t j = 0; j < shape[0]; ++j) {
        for (std::size_t p = 0; p < shape[1]; ++p) {
            for (std::size_t q = 0; q < shape[2]; ++q) {
                const auto [r, c] = unfold_index(shape, mode, j, p, q);
                m(r, c) = x[at++];
            }
        }
    }
    return m;
}

std::vector<double> fold(const Eigen::MatrixXd& m, const TensorShape& shape, int mode) {
    check_mode(mode);
    const std::size_t total = shape[0] * shape[1] * shape[2];
    const Eigen::Index rows = unfold_rows(shape, mode);
    if (m.rows() != rows || static_cast<std::size_t>(m.size()) != total) {
        throw ArgumentError("fold: matrix shape does not match tensor shape");
    }
    std::vector<double> x(total);
    std::size_t at = 0;
    for (std::size_t j = 0; j < shape[0]; ++j) {
        for (std::size_t p = 0; p < shape[1]; ++p) {
            for (std::size_t q = 0; q < shape[2]; ++q) {
                const auto [r, c] = unfold_index(shape, mode, j, p, q);
                x[at++] = m(r, c);
            }
        }
    }
    return x;
}

DataSet unfold_dataset(const TensorDataSet& data, int mode) {
    check_mode(mode);
    const auto rows = static_cast<std::size_t>(unfold_rows(data.shape(), mode));
    const std::size_t cols = data.sample_size() / rows;
    std::vector<double> values;
    values.reserve(data.values().size());
    for (std::size_t i = 0; i < data.n(); ++i) {
        const Eigen::MatrixXd m = matricize(data.sample(i), data.shape(), mode);
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                values.push_back(m(r, c));
            }
        }
    }
    return DataSet(data.n(), rows, cols, std::move(values));
}

TensorResult cluster_tensor_identity(const TensorDataSet& data, const TensorOptions& opts) {
    for (std::size_t k = 0; k < 3; ++k) {
        if (data.shape()[k] < 3) {
            throw ArgumentError("cluster_tensor_identity: mode " + std::to_string(k + 1) +
                                " dimension must be at least 3");
        }
    }
    // Standardization is per entry, so it commutes with unfolding.
    TensorDataSet prepared = data;
    if (opts.standardize) {
        const DataSet flat(data.n(), 1, data.sample_size(), data.values());
        prepared = TensorDataSet(data.n(), data.shape(), standardize(flat).values());
    }
    TensorResult result;
    for (int mode = 1; mode <= 3; ++mode) {
        const auto k = static_cast<std::size_t>(mode - 1);
        const DataSet unfolded = unfold_dataset(prepared, mode);
        auto [part, trace] = cluster_step(unfolded, Axis::kRows, identity_weight(unfolded.q()), opts.stops[k],
                                          std::nullopt, derive_key(opts.seed, "tune", k));
        result.partitions[k] = std::move(part);
        result.trace[k] = std::move(trace);
    }
    return result;
}

}  // namespace covclust
