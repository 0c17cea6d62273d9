#include "covclust/core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace covclust {

DegenerateFeatureError::DegenerateFeatureError(std::size_t r, std::size_t c)
    : std::runtime_error("feature (" + std::to_string(r + 1) + ", " + std::to_string(c + 1) +
                         ") has zero variance across samples"),
      row(r),
      col(c) {}

DataSet::DataSet(std::size_t n, std::size_t p, std::size_t q, std::vector<double> values)
    : n_(n), p_(p), q_(q), values_(std::move(values)) {
    if (n_ == 0 || p_ == 0 || q_ == 0) {
        throw ArgumentError("DataSet: n, p and q must all be positive");
    }
    if (values_.size() != n_ * p_ * q_) {
        throw ArgumentError("DataSet: expected " + std::to_string(n_ * p_ * q_) + " values, got " +
                            std::to_string(values_.size()));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw ArgumentError("DataSet: non-finite entry");
        }
    }
}

DataSet DataSet::from_matrices(const std::vector<Eigen::MatrixXd>& samples) {
    if (samples.empty()) {
        throw ArgumentError("DataSet: no samples");
    }
    const auto p = static_cast<std::size_t>(samples.front().rows());
    const auto q = static_cast<std::size_t>(samples.front().cols());
    std::vector<double> values;
    values.reserve(samples.size() * p * q);
    for (const auto& s : samples) {
        if (static_cast<std::size_t>(s.rows()) != p || static_cast<std::size_t>(s.cols()) != q) {
            throw ArgumentError("DataSet: samples differ in shape");
        }
        for (Eigen::Index a = 0; a < s.rows(); ++a) {
            for (Eigen::Index b = 0; b < s.cols(); ++b) {
                values.push_back(s(a, b));
            }
        }
    }
    return DataSet(samples.size(), p, q, std::move(values));
}

DataSet DataSet::subset(std::span<const std::size_t> indices) const {
    std::vector<double> out;
    out.reserve(indices.size() * p_ * q_);
    for (auto i : indices) {
        if (i >= n_) {
            throw ArgumentError("DataSet::subset: sample index out of range");
        }
        auto first = values_.begin() + static_cast<std::ptrdiff_t>(i * p_ * q_);
        out.insert(out.end(), first, first + static_cast<std::ptrdiff_t>(p_ * q_));
    }
    return DataSet(indices.size(), p_, q_, std::move(out));
}

DataSet DataSet::select_rows(std::span<const std::size_t> rows) const {
    std::vector<double> out;
    out.reserve(n_ * rows.size() * q_);
    for (std::size_t i = 0; i < n_; ++i) {
        for (auto a : rows) {
            if (a >= p_) {
                throw ArgumentError("DataSet::select_rows: row index out of range");
            }
            const double* src = values_.data() + i * p_ * q_ + a * q_;
            out.insert(out.end(), src, src + q_);
        }
    }
    return DataSet(n_, rows.size(), q_, std::move(out));
}

DataSet DataSet::select_cols(std::span<const std::size_t> cols) const {
    std::vector<double> out;
    out.reserve(n_ * p_ * cols.size());
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t a = 0; a < p_; ++a) {
            const double* src = values_.data() + i * p_ * q_ + a * q_;
            for (auto b : cols) {
                if (b >= q_) {
                    throw ArgumentError("DataSet::select_cols: column index out of range");
                }
                out.push_back(src[b]);
            }
        }
    }
    return DataSet(n_, p_, cols.size(), std::move(out));
}

Eigen::MatrixXd DataSet::mean() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p_), static_cast<Eigen::Index>(q_));
    for (std::size_t i = 0; i < n_; ++i) {
        m += sample(i);
    }
    return m / static_cast<double>(n_);
}

// ---------------------------------------------------------------------------

namespace {

template <typename Id>
void canonicalize(std::span<const Id> ids, std::vector<int>& labels, int& k) {
    if (ids.empty()) {
        throw ArgumentError("partition_from_labels: empty label vector");
    }
    std::unordered_map<Id, int> seen;
    labels.resize(ids.size());
    k = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        auto [it, inserted] = seen.try_emplace(ids[i], k);
        if (inserted) {
            ++k;
        }
        labels[i] = it->second;
    }
}

}  // namespace

Partition partition_from_labels(std::span<const std::int64_t> labels) {
    Partition p;
    canonicalize(labels, p.labels_, p.k_);
    return p;
}

Partition partition_from_labels(std::span<const int> labels) {
    Partition p;
    canonicalize(labels, p.labels_, p.k_);
    return p;
}

std::vector<std::vector<std::size_t>> Partition::clusters() const {
    std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(k_));
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        out[static_cast<std::size_t>(labels_[i])].push_back(i);
    }
    return out;
}

std::vector<std::size_t> Partition::cluster_sizes() const {
    std::vector<std::size_t> out(static_cast<std::size_t>(k_), 0);
    for (int l : labels_) {
        ++out[static_cast<std::size_t>(l)];
    }
    return out;
}

bool Partition::refines(const Partition& other) const {
    if (other.size() != size()) {
        return false;
    }
    std::vector<int> parent(static_cast<std::size_t>(k_), -1);
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        int& slot = parent[static_cast<std::size_t>(labels_[i])];
        if (slot < 0) {
            slot = other.labels_[i];
        } else if (slot != other.labels_[i]) {
            return false;
        }
    }
    return true;
}

Membership membership_matrix(const Partition& part) {
    Membership m{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(part.size()), part.k())};
    for (std::size_t a = 0; a < part.size(); ++a) {
        m.matrix(static_cast<Eigen::Index>(a), part[a]) = 1.0;
    }
    return m;
}

Partition partition_from_membership(const Membership& m) {
    const auto& mat = m.matrix;
    std::vector<int> labels(static_cast<std::size_t>(mat.rows()));
    for (Eigen::Index a = 0; a < mat.rows(); ++a) {
        int hit = -1;
        for (Eigen::Index k = 0; k < mat.cols(); ++k) {
            const double v = mat(a, k);
            if (v == 1.0) {
                if (hit >= 0) {
                    throw ArgumentError("membership row " + std::to_string(a) + " has more than one 1");
                }
                hit = static_cast<int>(k);
            } else if (v != 0.0) {
                throw ArgumentError("membership matrix must be binary");
            }
        }
        if (hit < 0) {
            throw ArgumentError("membership row " + std::to_string(a) + " has no 1");
        }
        labels[static_cast<std::size_t>(a)] = hit;
    }
    for (Eigen::Index k = 0; k < mat.cols(); ++k) {
        if (mat.col(k).sum() < 1.0) {
            throw ArgumentError("membership column " + std::to_string(k) + " is empty");
        }
    }
    return partition_from_labels(labels);
}

Dendrogram::Dendrogram(std::size_t leaves, std::vector<Merge> merges)
    : leaves_(leaves), merges_(std::move(merges)) {
    if (leaves_ == 0 || merges_.size() != leaves_ - 1) {
        throw ArgumentError("Dendrogram: a tree over m leaves needs exactly m-1 merges");
    }
    for (std::size_t i = 1; i < merges_.size(); ++i) {
        if (merges_[i].height < merges_[i - 1].height) {
            throw ArgumentError("Dendrogram: merge heights must be non-decreasing");
        }
    }
}

std::vector<double> Dendrogram::heights() const {
    std::vector<double> h;
    h.reserve(merges_.size());
    for (const auto& m : merges_) {
        h.push_back(m.height);
    }
    return h;
}

// ---------------------------------------------------------------------------

DataSet standardize(const DataSet& data, VarianceDivisor divisor) {
    const std::size_t n = data.n();
    if (n < 2) {
        throw ArgumentError("standardize: needs at least two samples");
    }
    const std::size_t f = data.p() * data.q();
    const auto& x = data.values();
    std::vector<double> mean(f, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < f; ++j) {
            mean[j] += x[i * f + j];
        }
    }
    for (auto& m : mean) {
        m /= static_cast<double>(n);
    }
    std::vector<double> ss(f, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < f; ++j) {
            const double d = x[i * f + j] - mean[j];
            ss[j] += d * d;
        }
    }
    const double denom = divisor == VarianceDivisor::kUnbiased ? static_cast<double>(n - 1)
                                                               : static_cast<double>(n);
    std::vector<double> scale(f);
    for (std::size_t j = 0; j < f; ++j) {
        const double sd = std::sqrt(ss[j] / denom);
        if (!(sd > 0.0)) {
            throw DegenerateFeatureError(j / data.q(), j % data.q());
        }
        scale[j] = 1.0 / sd;
    }
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < f; ++j) {
            out[i * f + j] = (x[i * f + j] - mean[j]) * scale[j];
        }
    }
    return DataSet(n, data.p(), data.q(), std::move(out));
}

// ---------------------------------------------------------------------------

namespace {

struct PairSums {
    double joint = 0;  // sum over cells of C(n_ij, 2)
    double truth = 0;  // sum over truth clusters of C(|G_i|, 2)
    double est = 0;    // sum over estimated clusters of C(|G^_j|, 2)
    double total = 0;  // C(m, 2)
};

double choose2(std::size_t x) {
    return 0.5 * static_cast<double>(x) * static_cast<double>(x == 0 ? 0 : x - 1);
}

PairSums pair_sums(const Partition& truth, const Partition& est) {
    if (truth.size() != est.size()) {
        throw ArgumentError("partitions have different lengths (" + std::to_string(truth.size()) + " vs " +
                            std::to_string(est.size()) + ")");
    }
    std::map<std::pair<int, int>, std::size_t> table;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ++table[{truth[i], est[i]}];
    }
    PairSums s;
    for (const auto& [cell, count] : table) {
        s.joint += choose2(count);
    }
    for (auto c : truth.cluster_sizes()) {
        s.truth += choose2(c);
    }
    for (auto c : est.cluster_sizes()) {
        s.est += choose2(c);
    }
    s.total = choose2(truth.size());
    return s;
}

}  // namespace

AriResult adjusted_rand_index(const Partition& truth, const Partition& est) {
    const PairSums s = pair_sums(truth, est);
    // The denominator vanishes exactly when both partitions are all-singletons
    // or both are a single cluster (or m == 1).
    const bool degenerate = s.total == 0.0 || (s.truth == s.est && (s.truth == 0.0 || s.truth == s.total));
    if (degenerate) {
        return {truth == est ? 1.0 : 0.0, true};
    }
    const double expected = s.truth * s.est / s.total;
    const double num = s.joint - expected;
    const double den = 0.5 * (s.truth + s.est) - expected;
    return {num / den, false};
}

SensSpec sensitivity_specificity(const Partition& truth, const Partition& est) {
    if (truth.size() < 2) {
        throw ArgumentError("sensitivity_specificity: needs at least two elements");
    }
    const PairSums s = pair_sums(truth, est);
    PairCounts c;
    c.tp = static_cast<std::uint64_t>(s.joint);
    c.fn = static_cast<std::uint64_t>(s.truth - s.joint);
    c.fp = static_cast<std::uint64_t>(s.est - s.joint);
    c.tn = static_cast<std::uint64_t>(s.total) - c.tp - c.fn - c.fp;
    SensSpec out{1.0, 1.0, false, false, c};
    if (c.tp + c.fn == 0) {
        out.sn_undefined = true;
    } else {
        out.sn = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    }
    if (c.tn + c.fp == 0) {
        out.sp_undefined = true;
    } else {
        out.sp = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
    }
    return out;
}

}  // namespace covclust
