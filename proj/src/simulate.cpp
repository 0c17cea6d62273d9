#include "covclust/simulate.hpp"

#include <cmath>

#include "covclust/rng.hpp"

namespace covclust {

Eigen::MatrixXd toeplitz(double rho, std::size_t k) {
    if (!(std::abs(rho) < 1.0)) {
        throw ArgumentError("toeplitz: |rho| must be below 1");
    }
    if (k < 1) {
        throw ArgumentError("toeplitz: dimension must be positive");
    }
    const auto kk = static_cast<Eigen::Index>(k);
    Eigen::MatrixXd m(kk, kk);
    for (Eigen::Index j = 0; j < kk; ++j) {
        for (Eigen::Index l = 0; l < kk; ++l) {
            m(j, l) = std::pow(rho, static_cast<double>(std::abs(j - l)));
        }
    }
    return m;
}

namespace {

void check_sizes(const std::vector<std::size_t>& sizes, const char* what) {
    if (sizes.empty()) {
        throw ArgumentError(std::string(what) + ": no clusters");
    }
    for (auto s : sizes) {
        if (s == 0) {
            throw ArgumentError(std::string(what) + ": cluster sizes must be positive");
        }
    }
}

void check_decay(double d, const char* what) {
    if (!(std::abs(d) < 1.0)) {
        throw ArgumentError(std::string(what) + ": |decay| must be below 1");
    }
}

Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& m, const char* what) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) {
        throw ModelError(std::string(what) + ": Cholesky factorization failed");
    }
    return llt.matrixL();
}

}  // namespace

void SimConfig::validate() const {
    check_sizes(row_sizes, "row_sizes");
    check_sizes(col_sizes, "col_sizes");
    check_decay(u_decay, "u_decay");
    check_decay(v_decay, "v_decay");
    if (!(noise.mean > 0.0) || !std::isfinite(noise.mean)) {
        throw ArgumentError("noise mean must be positive");
    }
    if (noise.kind == NoiseKind::kRandom && !(noise.h > 0.0 && std::isfinite(noise.h))) {
        throw ArgumentError("noise exponent h must be positive");
    }
    if (n == 0) {
        throw ArgumentError("sample count must be positive");
    }
    if (mean_layout) {
        check_sizes(mean_layout->row_sizes, "mean row_sizes");
        check_sizes(mean_layout->col_sizes, "mean col_sizes");
        if (mean_layout->values.rows() != static_cast<Eigen::Index>(mean_layout->row_sizes.size()) ||
            mean_layout->values.cols() != static_cast<Eigen::Index>(mean_layout->col_sizes.size())) {
            throw ArgumentError("mean values must have one entry per (row block, column block)");
        }
        if (!mean_layout->values.allFinite()) {
            throw ArgumentError("mean values must be finite");
        }
        if (!blocks_partition(row_sizes).refines(blocks_partition(mean_layout->row_sizes)) ||
            !blocks_partition(col_sizes).refines(blocks_partition(mean_layout->col_sizes))) {
            throw ArgumentError("mean blocks must be unions of covariance clusters");
        }
    }
}

Partition blocks_partition(const std::vector<std::size_t>& sizes) {
    check_sizes(sizes, "blocks_partition");
    std::vector<int> labels;
    for (std::size_t c = 0; c < sizes.size(); ++c) {
        labels.insert(labels.end(), sizes[c], static_cast<int>(c));
    }
    return partition_from_labels(labels);
}

Eigen::MatrixXd noise_variances(const SimConfig& config) {
    config.validate();
    const Partition rows = blocks_partition(config.row_sizes);
    const Partition cols = blocks_partition(config.col_sizes);
    const auto p = static_cast<Eigen::Index>(rows.size());
    const auto q = static_cast<Eigen::Index>(cols.size());
    const double pq = static_cast<double>(p) * static_cast<double>(q);

    Eigen::MatrixXd v(p, q);
    switch (config.noise.kind) {
        case NoiseKind::kHomogeneous:
            return Eigen::MatrixXd::Constant(p, q, config.noise.mean);
        case NoiseKind::kProportional: {
            const double scale =
                std::sqrt(pq / (static_cast<double>(config.row_sizes.size()) * static_cast<double>(config.col_sizes.size())));
            for (Eigen::Index i = 0; i < p; ++i) {
                const double mi = static_cast<double>(config.row_sizes[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])]);
                for (Eigen::Index j = 0; j < q; ++j) {
                    const double mj = static_cast<double>(config.col_sizes[static_cast<std::size_t>(cols[static_cast<std::size_t>(j)])]);
                    v(i, j) = mi * mj / scale;
                }
            }
            break;
        }
        case NoiseKind::kRandom: {
            CounterRng rng(config.seed, "noise-variance");
            for (Eigen::Index i = 0; i < p; ++i) {
                for (Eigen::Index j = 0; j < q; ++j) {
                    v(i, j) = std::pow(rng.uniform_open(), config.noise.h);
                }
            }
            break;
        }
    }
    return v * (config.noise.mean * pq / v.sum());
}

PopulationModel population_model(const SimConfig& config) {
    config.validate();
    PopulationModel model{blocks_partition(config.row_sizes), blocks_partition(config.col_sizes),
                          toeplitz(config.u_decay, config.row_sizes.size()),
                          toeplitz(config.v_decay, config.col_sizes.size()), noise_variances(config)};
    return model;
}

Eigen::MatrixXd mean_matrix(const SimConfig& config) {
    config.validate();
    const Partition rows = blocks_partition(config.row_sizes);
    const Partition cols = blocks_partition(config.col_sizes);
    const auto p = static_cast<Eigen::Index>(rows.size());
    const auto q = static_cast<Eigen::Index>(cols.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, q);
    if (!config.mean_layout) {
        return m;
    }
    const Partition mr = blocks_partition(config.mean_layout->row_sizes);
    const Partition mc = blocks_partition(config.mean_layout->col_sizes);
    for (Eigen::Index a = 0; a < p; ++a) {
        for (Eigen::Index b = 0; b < q; ++b) {
            m(a, b) = config.mean_layout->values(mr[static_cast<std::size_t>(a)], mc[static_cast<std::size_t>(b)]);
        }
    }
    return m;
}

MatrixSample sample_matrix_normal_dataset(const SimConfig& config) {
    PopulationModel model = population_model(config);
    const Eigen::MatrixXd mu = mean_matrix(config);
    const Eigen::MatrixXd lu = cholesky_factor(model.u, "U");
    const Eigen::MatrixXd lv = cholesky_factor(model.v, "V");
    const Eigen::MatrixXd sd = model.sigma2.cwiseSqrt();
    const std::size_t p = model.p();
    const std::size_t q = model.q();
    const Eigen::Index k1 = model.u.rows();
    const Eigen::Index k2 = model.v.rows();

    std::vector<double> values(config.n * p * q);
    Eigen::MatrixXd e(k1, k2);
    for (std::size_t i = 0; i < config.n; ++i) {
        CounterRng rng(config.seed, "sample", i);
        for (Eigen::Index r = 0; r < k1; ++r) {
            for (Eigen::Index c = 0; c < k2; ++c) {
                e(r, c) = rng.normal();
            }
        }
        const Eigen::MatrixXd z = lu * e * lv.transpose();
        double* x = values.data() + i * p * q;
        for (std::size_t a = 0; a < p; ++a) {
            for (std::size_t b = 0; b < q; ++b) {
                x[a * q + b] = mu(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +
                               z(model.rows[a], model.cols[b]) +
                               sd(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) * rng.normal();
            }
        }
    }
    Partition rows = model.rows;
    Partition cols = model.cols;
    MatrixSample out{DataSet(config.n, p, q, std::move(values)), std::move(model), std::move(rows), std::move(cols),
                     std::nullopt, std::nullopt};
    if (config.mean_layout) {
        out.rows_mean = blocks_partition(config.mean_layout->row_sizes);
        out.cols_mean = blocks_partition(config.mean_layout->col_sizes);
    }
    return out;
}

void TensorSimConfig::validate() const {
    for (std::size_t k = 0; k < 3; ++k) {
        check_sizes(sizes[k], "tensor sizes");
        check_decay(decays[k], "tensor decay");
    }
    if (!(noise_variance > 0.0) || !std::isfinite(noise_variance)) {
        throw ArgumentError("tensor noise variance must be positive");
    }
    if (n == 0) {
        throw ArgumentError("sample count must be positive");
    }
}

TensorSample sample_tensor_dataset(const TensorSimConfig& config) {
    config.validate();
    std::array<Partition, 3> truth;
    std::array<Eigen::MatrixXd, 3> chol;
    std::array<std::size_t, 3> k{};
    TensorShape shape{};
    for (std::size_t m = 0; m < 3; ++m) {
        truth[m] = blocks_partition(config.sizes[m]);
        k[m] = config.sizes[m].size();
        shape[m] = truth[m].size();
        chol[m] = cholesky_factor(toeplitz(config.decays[m], k[m]), "tensor factor");
    }
    const double sd = std::sqrt(config.noise_variance);
    const std::size_t latent = k[0] * k[1] * k[2];
    const std::size_t cells = shape[0] * shape[1] * shape[2];
    const TensorShape kshape{k[0], k[1], k[2]};

    std::vector<double> values(config.n * cells);
    std::vector<double> e(latent);
    for (std::size_t i = 0; i < config.n; ++i) {
        CounterRng rng(config.seed, "sample", i);
        for (auto& v : e) {
            v = rng.normal();
        }
        // Z = E x1 L1 x2 L2 x3 L3; mode-k product is L_k times the mode-k unfolding.
        std::vector<double> z = e;
        for (int mode = 1; mode <= 3; ++mode) {
            z = fold(chol[static_cast<std::size_t>(mode - 1)] * matricize(z, kshape, mode), kshape, mode);
        }
        double* x = values.data() + i * cells;
        for (std::size_t j = 0; j < shape[0]; ++j) {
            for (std::size_t p = 0; p < shape[1]; ++p) {
                for (std::size_t q = 0; q < shape[2]; ++q) {
                    const auto zi = static_cast<std::size_t>(truth[0][j]) * k[1] * k[2] +
                                    static_cast<std::size_t>(truth[1][p]) * k[2] + static_cast<std::size_t>(truth[2][q]);
                    x[(j * shape[1] + p) * shape[2] + q] = z[zi] + sd * rng.normal();
                }
            }
        }
    }
    return {TensorDataSet(config.n, shape, std::move(values)), std::move(truth)};
}

}  // namespace covclust
