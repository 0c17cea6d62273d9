#include "covclust/weights_cov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "covclust/cod_hclust.hpp"

namespace covclust {

std::string to_string(WeightKind kind) {
    switch (kind) {
        case WeightKind::kIdentity: return "identity";
        case WeightKind::kOptimal: return "optimal";
        case WeightKind::kCustom: return "custom";
    }
    return "unknown";
}

std::string to_string(Axis axis) {
    return axis == Axis::kRows ? "rows" : "cols";
}

Weight Weight::scaled(double t) const {
    if (!(t > 0.0)) {
        throw ArgumentError("Weight::scaled: factor must be positive");
    }
    Weight w = *this;
    const double r = std::sqrt(t);
    w.factor_ *= r;
    for (auto& c : w.coefficients_) {
        c *= r;
    }
    w.kind_ = WeightKind::kCustom;
    return w;
}

Weight identity_weight(std::size_t q) {
    if (q == 0) {
        throw ArgumentError("identity_weight: dimension must be positive");
    }
    Weight w;
    const auto qi = static_cast<Eigen::Index>(q);
    const double c = 1.0 / std::sqrt(static_cast<double>(q));
    w.factor_ = Eigen::MatrixXd::Identity(qi, qi) * c;
    w.kind_ = WeightKind::kIdentity;
    w.groups_.resize(q);
    for (std::size_t b = 0; b < q; ++b) {
        w.groups_[b] = static_cast<int>(b);
    }
    w.coefficients_.assign(q, c);
    return w;
}

Weight optimal_weight(const Partition& estimate) {
    const auto sizes = estimate.cluster_sizes();
    const auto s = static_cast<double>(estimate.k());
    Weight w;
    w.factor_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(estimate.size()), estimate.k());
    w.kind_ = WeightKind::kOptimal;
    w.groups_ = estimate.labels();
    w.coefficients_.resize(sizes.size());
    for (std::size_t t = 0; t < sizes.size(); ++t) {
        w.coefficients_[t] = 1.0 / (static_cast<double>(sizes[t]) * std::sqrt(s));
    }
    for (std::size_t b = 0; b < estimate.size(); ++b) {
        const int t = estimate[b];
        w.factor_(static_cast<Eigen::Index>(b), t) = w.coefficients_[static_cast<std::size_t>(t)];
    }
    return w;
}

Weight optimal_weight(const Membership& estimate) {
    return optimal_weight(partition_from_membership(estimate));
}

Weight custom_weight(Eigen::MatrixXd factor) {
    if (factor.rows() == 0 || factor.cols() == 0) {
        throw ArgumentError("custom_weight: empty factor");
    }
    if (!factor.allFinite()) {
        throw ArgumentError("custom_weight: non-finite factor");
    }
    Weight w;
    w.factor_ = std::move(factor);
    w.kind_ = WeightKind::kCustom;
    return w;
}

// ---------------------------------------------------------------------------

namespace {

// Y = M L where M is m-by-d (row-major view) and L is d-by-s.
void project(const Eigen::Ref<const Eigen::MatrixXd>& m, const Weight& w, Eigen::MatrixXd& y) {
    if (w.is_grouped()) {
        const auto& groups = w.groups();
        const auto& coef = w.group_coefficients();
        y.setZero(m.rows(), static_cast<Eigen::Index>(w.rank()));
        for (Eigen::Index b = 0; b < m.cols(); ++b) {
            y.col(groups[static_cast<std::size_t>(b)]) += m.col(b);
        }
        for (Eigen::Index t = 0; t < y.cols(); ++t) {
            y.col(t) *= coef[static_cast<std::size_t>(t)];
        }
    } else {
        y.noalias() = m * w.factor();
    }
}

}  // namespace

Eigen::MatrixXd sample_weighted_covariance(const DataSet& data, const Weight& w, Axis axis,
                                           std::optional<std::span<const std::size_t>> subset) {
    const std::size_t inner = axis == Axis::kRows ? data.q() : data.p();
    const std::size_t outer = axis == Axis::kRows ? data.p() : data.q();
    if (w.dim() != inner) {
        throw ArgumentError("sample_weighted_covariance: weight dimension " + std::to_string(w.dim()) +
                            " does not match " + std::to_string(inner));
    }
    std::vector<std::size_t> all;
    std::span<const std::size_t> idx;
    if (subset) {
        if (subset->empty()) {
            throw ArgumentError("sample_weighted_covariance: empty sample subset");
        }
        idx = *subset;
    } else {
        all.resize(data.n());
        for (std::size_t i = 0; i < all.size(); ++i) {
            all[i] = i;
        }
        idx = all;
    }

    const auto o = static_cast<Eigen::Index>(outer);
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(o, o);
    Eigen::MatrixXd x;
    Eigen::MatrixXd y;
    for (auto i : idx) {
        if (i >= data.n()) {
            throw ArgumentError("sample_weighted_covariance: sample index out of range");
        }
        if (axis == Axis::kRows) {
            x = data.sample(i);
        } else {
            x = data.sample(i).transpose();
        }
        project(x, w, y);
        sigma.selfadjointView<Eigen::Lower>().rankUpdate(y);
    }
    sigma.triangularView<Eigen::StrictlyUpper>() = sigma.transpose();
    sigma /= static_cast<double>(idx.size());
    return sigma;
}

// ---------------------------------------------------------------------------

void PopulationModel::validate() const {
    const auto k1 = static_cast<Eigen::Index>(rows.k());
    const auto k2 = static_cast<Eigen::Index>(cols.k());
    if (u.rows() != k1 || u.cols() != k1) {
        throw ModelError("PopulationModel: U must be K1-by-K1");
    }
    if (v.rows() != k2 || v.cols() != k2) {
        throw ModelError("PopulationModel: V must be K2-by-K2");
    }
    if (sigma2.rows() != static_cast<Eigen::Index>(p()) || sigma2.cols() != static_cast<Eigen::Index>(q())) {
        throw ModelError("PopulationModel: sigma2 must be p-by-q");
    }
    auto check_spd = [](const Eigen::MatrixXd& m, const char* name) {
        if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
            throw ModelError(std::string("PopulationModel: ") + name + " is not symmetric");
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
        if (!(es.eigenvalues().minCoeff() > 0.0)) {
            throw ModelError(std::string("PopulationModel: ") + name + " is not positive definite");
        }
    };
    check_spd(u, "U");
    check_spd(v, "V");
    if (!(sigma2.minCoeff() > 0.0)) {
        throw ModelError("PopulationModel: noise variances must be positive");
    }
}

Eigen::MatrixXd population_noise_covariance(const PopulationModel& model, const Weight& w, Axis axis) {
    const std::size_t p = model.p();
    const std::size_t q = model.q();
    const Eigen::MatrixXd wm = w.matrix();
    if (axis == Axis::kRows) {
        if (w.dim() != q) {
            throw ArgumentError("population_noise_covariance: weight must be q-by-q in rows mode");
        }
        // E(Gamma W Gamma^T)_aa = sum_b sigma2_ab W_bb; off-diagonals vanish.
        Eigen::VectorXd d = model.sigma2 * wm.diagonal();
        return d.asDiagonal();
    }
    if (w.dim() != p) {
        throw ArgumentError("population_noise_covariance: weight must be p-by-p in columns mode");
    }
    Eigen::VectorXd d = model.sigma2.transpose() * wm.diagonal();
    return d.asDiagonal();
}

Eigen::MatrixXd population_weighted_covariance(const PopulationModel& model, const Weight& w, Axis axis) {
    const Eigen::MatrixXd wm = w.matrix();
    Eigen::MatrixXd sigma;
    if (axis == Axis::kRows) {
        if (w.dim() != model.q()) {
            throw ArgumentError("population_weighted_covariance: weight must be q-by-q in rows mode");
        }
        const Eigen::MatrixXd b = membership_matrix(model.cols).matrix;
        const Eigen::MatrixXd a = membership_matrix(model.rows).matrix;
        // E(Z C Z^T)_{jj'} = U_{jj'} tr(C V) for symmetric C = B^T W B.
        const double scale = (b.transpose() * wm * b * model.v).trace();
        sigma = a * (model.u * scale) * a.transpose();
    } else {
        if (w.dim() != model.p()) {
            throw ArgumentError("population_weighted_covariance: weight must be p-by-p in columns mode");
        }
        const Eigen::MatrixXd a = membership_matrix(model.rows).matrix;
        const Eigen::MatrixXd b = membership_matrix(model.cols).matrix;
        const double scale = (a.transpose() * wm * a * model.u).trace();
        sigma = b * (model.v * scale) * b.transpose();
    }
    sigma += population_noise_covariance(model, w, axis);
    return sigma;
}

XNorm population_x_norm(const PopulationModel& model, const Weight& w) {
    if (w.dim() != model.q()) {
        throw ArgumentError("population_x_norm: weight must be q-by-q");
    }
    const Eigen::MatrixXd b = membership_matrix(model.cols).matrix;
    const Eigen::MatrixXd& l = w.factor();
    // Var(X_a.) = U_{r(a)r(a)} B V B^T + diag(sigma2_a.)
    const Eigen::MatrixXd lb = l.transpose() * b;
    const Eigen::MatrixXd signal = lb * model.v * lb.transpose();
    XNorm best{-1.0, 0};
    for (std::size_t a = 0; a < model.p(); ++a) {
        const double uaa = model.u(model.rows[a], model.rows[a]);
        const Eigen::VectorXd s2 = model.sigma2.row(static_cast<Eigen::Index>(a)).transpose();
        const Eigen::MatrixXd m = uaa * signal + l.transpose() * s2.asDiagonal() * l;
        const double f = m.norm();
        if (f > best.value) {
            best = {f, a};
        }
    }
    best.value *= std::sqrt(static_cast<double>(model.cols.k()));
    return best;
}

double population_mcod(const PopulationModel& model, const Weight& w, const Partition& truth) {
    if (truth.k() < 2) {
        throw ArgumentError("population_mcod: MCOD is undefined for a single cluster");
    }
    const Eigen::MatrixXd sigma = population_weighted_covariance(model, w, Axis::kRows);
    return mcod(cod_matrix(sigma), truth);
}

double gamma_diagnostic(const Eigen::MatrixXd& noise_wcov) {
    const Eigen::Index p = noise_wcov.rows();
    if (p < 3 || noise_wcov.cols() != p) {
        throw ArgumentError("gamma_diagnostic: needs a square matrix with at least 3 rows");
    }
    // For fixed c, the max over (a, b) with a, b != c of |N_ac - N_bc| is the
    // range of column c with entry c removed.
    double g = 0.0;
    for (Eigen::Index c = 0; c < p; ++c) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (Eigen::Index a = 0; a < p; ++a) {
            if (a == c) {
                continue;
            }
            lo = std::min(lo, noise_wcov(a, c));
            hi = std::max(hi, noise_wcov(a, c));
        }
        g = std::max(g, hi - lo);
    }
    return g;
}

double gamma_s_diagnostic(const Eigen::MatrixXd& noise_wcov) {
    double m = 0.0;
    for (Eigen::Index a = 0; a < noise_wcov.rows(); ++a) {
        for (Eigen::Index b = 0; b < noise_wcov.cols(); ++b) {
            if (a != b) {
                m = std::max(m, std::abs(noise_wcov(a, b)));
            }
        }
    }
    return 2.0 * m;
}

// ---------------------------------------------------------------------------

namespace {

// max_a (1/K) sum_t (sum_{j in t} sigma2_aj)^2 / |t|^4
double weighted_noise_constant(const Eigen::MatrixXd& sigma2, const Partition& cols) {
    const auto clusters = cols.clusters();
    double best = 0.0;
    for (Eigen::Index a = 0; a < sigma2.rows(); ++a) {
        double acc = 0.0;
        for (const auto& members : clusters) {
            double s = 0.0;
            for (auto j : members) {
                s += sigma2(a, static_cast<Eigen::Index>(j));
            }
            const double size = static_cast<double>(members.size());
            acc += s * s / (size * size * size * size);
        }
        best = std::max(best, acc / static_cast<double>(clusters.size()));
    }
    return best;
}

}  // namespace

StabilityReport stability_diagnostics(const PopulationModel& model, const Partition& bhat,
                                      const TheoryConstants& k) {
    if (bhat.size() != model.q()) {
        throw ArgumentError("stability_diagnostics: estimated clustering must cover q columns");
    }
    StabilityReport r{};
    const Eigen::MatrixXd b = membership_matrix(model.cols).matrix;
    const Eigen::MatrixXd bh = membership_matrix(bhat).matrix;
    const Eigen::VectorXd inv_sizes = (bh.transpose() * bh).diagonal().cwiseInverse();
    r.g = b.transpose() * bh * inv_sizes.asDiagonal();

    const Eigen::MatrixXd ggt = r.g * r.g.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ggt, Eigen::EigenvaluesOnly);
    r.lambda_min_ggt = std::max(0.0, es.eigenvalues().minCoeff());
    r.lambda_max_ggt = es.eigenvalues().maxCoeff();

    r.c_k = weighted_noise_constant(model.sigma2, model.cols);
    r.c_s = weighted_noise_constant(model.sigma2, bhat);

    const double k2 = static_cast<double>(model.cols.k());
    const double s = static_cast<double>(bhat.k());
    const double diag_max = model.u.diagonal().maxCoeff();
    const double diag_min = model.u.diagonal().minCoeff();

    // (P1)
    const double rate = std::sqrt(std::log(static_cast<double>(model.p())) / (static_cast<double>(k.n) * k2));
    const double bound = k.c0 * k.c1 * rate * k2 / model.v.trace() * (diag_max * k.c_max + std::sqrt(r.c_k));
    double sep = std::numeric_limits<double>::infinity();
    const Eigen::Index k1 = model.u.rows();
    for (Eigen::Index j = 0; j < k1; ++j) {
        for (Eigen::Index l = j + 1; l < k1; ++l) {
            sep = std::min(sep, (model.u.row(j) - model.u.row(l)).cwiseAbs().maxCoeff());
        }
    }
    r.p1_margin = sep - bound;
    r.p1_satisfied = r.p1_margin > 0.0;

    // (P2)
    const double min_sk = std::min(s, k2);
    const double lhs = std::sqrt(min_sk) * r.lambda_max_ggt * diag_max * k.c_max;
    const double rhs = std::sqrt(s) * std::sqrt(r.c_s);
    r.p2_case_i = lhs <= rhs;
    const double inv_lmin = r.lambda_min_ggt > 0.0 ? 1.0 / r.lambda_min_ggt : std::numeric_limits<double>::infinity();
    r.p2_i_satisfied = r.p2_case_i && inv_lmin <= k.c0 / 8.0 * std::sqrt(r.c_k / r.c_s) * std::sqrt(k2 / s);
    r.p2_ii_satisfied = !r.p2_case_i && r.lambda_max_ggt * inv_lmin <= k.c0 / 8.0 * (k.c_min / k.c_max) *
                                                                          (diag_min / diag_max) *
                                                                          std::sqrt(k2 / min_sk);
    r.p2_satisfied = r.p2_i_satisfied || r.p2_ii_satisfied;
    return r;
}

}  // namespace covclust
