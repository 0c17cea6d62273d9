#include "covclust/pipelines.hpp"

#include <cmath>
#include <sstream>

#include "covclust/rng.hpp"

namespace covclust {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::size_t axis_dim(const DataSet& data, Axis axis) {
    return axis == Axis::kRows ? data.p() : data.q();
}

void require_dim(const DataSet& data, Axis axis, const char* who) {
    if (axis_dim(data, axis) < 3) {
        throw ArgumentError(std::string(who) + ": " + to_string(axis) + " dimension must be at least 3");
    }
}

std::uint64_t tune_seed(std::uint64_t seed, std::uint64_t step) {
    return derive_key(seed, "tune", step);
}

}  // namespace

std::string describe(const StopRule& rule) {
    std::ostringstream out;
    out.precision(17);
    std::visit(Overloaded{
                   [&](const Threshold& t) { out << "threshold(" << t.alpha << ")"; },
                   [&](const TargetK& t) { out << "k(" << t.k << ")"; },
                   [&](const Tuned& t) {
                       out << "tuned(" << (t.grid ? std::to_string(t.grid->size()) + " points" : "default grid")
                           << ")";
                   },
               },
               rule);
    return out.str();
}

std::string to_string(FoldUse use) {
    switch (use) {
        case FoldUse::kAll:
            return "all";
        case FoldUse::kFirst:
            return "first";
        case FoldUse::kSecond:
            return "second";
    }
    return "unknown";
}

std::pair<Partition, StepTrace> cluster_step(const DataSet& data, Axis axis, const Weight& weight,
                                             const StopRule& stop,
                                             std::optional<std::span<const std::size_t>> subset,
                                             std::uint64_t seed) {
    StepTrace trace;
    trace.axis = axis;
    trace.weight = weight.kind();
    trace.stop = stop;

    const Eigen::MatrixXd sigma = sample_weighted_covariance(data, weight, axis, subset);
    const Dendrogram tree = agglomerate(cod_matrix(sigma));
    trace.heights = tree.heights();

    Partition part = std::visit(
        Overloaded{
            [&](const Threshold& t) {
                trace.alpha = t.alpha;
                return cut_threshold(tree, t.alpha);
            },
            [&](const TargetK& t) { return cut_k(tree, t.k); },
            [&](const Tuned& t) {
                const std::size_t n = subset ? subset->size() : data.n();
                std::vector<std::size_t> index;
                if (subset) {
                    index.assign(subset->begin(), subset->end());
                }
                TuneReport report = tune_alpha(
                    n,
                    [&](std::span<const std::size_t> local) {
                        if (!subset) {
                            return sample_weighted_covariance(data, weight, axis, local);
                        }
                        std::vector<std::size_t> global(local.size());
                        for (std::size_t i = 0; i < local.size(); ++i) {
                            global[i] = index[local[i]];
                        }
                        return sample_weighted_covariance(data, weight, axis,
                                                          std::span<const std::size_t>(global));
                    },
                    t.grid, seed);
                trace.alpha = report.chosen;
                trace.tune = std::move(report);
                return cut_threshold(tree, *trace.alpha);
            },
        },
        stop);
    trace.k = part.k();
    trace.degenerate = part.k() == 1 || part.size() == static_cast<std::size_t>(part.k());
    return {std::move(part), std::move(trace)};
}

ClusterResult cluster_naive(const DataSet& data, Axis axis, const PipelineOptions& opts) {
    require_dim(data, axis, "cluster_naive");
    const DataSet prepared = opts.standardize ? standardize(data) : data;
    const std::size_t other = axis == Axis::kRows ? data.q() : data.p();
    const StopRule& stop = axis == Axis::kRows ? opts.row_stop : opts.col_stop;
    auto [part, trace] = cluster_step(prepared, axis, identity_weight(other), stop, std::nullopt, tune_seed(opts.seed, 0));
    ClusterResult result;
    (axis == Axis::kRows ? result.rows : result.cols) = std::move(part);
    result.trace.push_back(std::move(trace));
    return result;
}

namespace {

// Steps 1-3 of the iterative drivers; `steps` is 2 for one-step, 3 for two-step.
ClusterResult run_iterative(const DataSet& data, const PipelineOptions& opts, int steps, const char* who) {
    require_dim(data, Axis::kRows, who);
    require_dim(data, Axis::kColumns, who);
    const DataSet prepared = opts.standardize ? standardize(data) : data;

    ClusterResult result;
    std::optional<std::span<const std::size_t>> row_subset;
    std::optional<std::span<const std::size_t>> col_subset;
    if (opts.split) {
        result.folds = split_folds(prepared.n(), derive_key(opts.seed, "split"));
        row_subset = std::span<const std::size_t>(result.folds->second);
        col_subset = std::span<const std::size_t>(result.folds->first);
    }
    const FoldUse row_fold = opts.split ? FoldUse::kSecond : FoldUse::kAll;
    const FoldUse col_fold = opts.split ? FoldUse::kFirst : FoldUse::kAll;

    auto [rows1, trace1] = cluster_step(prepared, Axis::kRows, identity_weight(prepared.q()), opts.row_stop,
                                        row_subset, tune_seed(opts.seed, 0));
    trace1.fold = row_fold;
    result.trace.push_back(std::move(trace1));

    auto [cols1, trace2] = cluster_step(prepared, Axis::kColumns, optimal_weight(rows1), opts.col_stop,
                                        col_subset, tune_seed(opts.seed, 1));
    trace2.fold = col_fold;
    result.trace.push_back(std::move(trace2));

    if (steps == 2) {
        result.rows = std::move(rows1);
        result.cols = std::move(cols1);
        return result;
    }

    auto [rows2, trace3] = cluster_step(prepared, Axis::kRows, optimal_weight(cols1), opts.row_stop, row_subset,
                                        tune_seed(opts.seed, 2));
    trace3.fold = row_fold;
    result.trace.push_back(std::move(trace3));
    result.rows = std::move(rows2);
    result.cols = std::move(cols1);
    return result;
}

}  // namespace

ClusterResult cluster_one_step(const DataSet& data, const PipelineOptions& opts) {
    return run_iterative(data, opts, 2, "cluster_one_step");
}

ClusterResult cluster_two_step(const DataSet& data, const PipelineOptions& opts) {
    return run_iterative(data, opts, 3, "cluster_two_step");
}

Dendrogram mean_layer_tree(const Eigen::MatrixXd& m) {
    const Eigen::Index r = m.rows();
    if (r < 1) {
        throw ArgumentError("mean_layer_tree: empty input");
    }
    Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(r, r);
    for (Eigen::Index a = 0; a < r; ++a) {
        for (Eigen::Index b = a + 1; b < r; ++b) {
            const double d = (m.row(a) - m.row(b)).cwiseAbs().maxCoeff();
            dist(a, b) = d;
            dist(b, a) = d;
        }
    }
    return agglomerate(CodMatrix(std::move(dist)));
}

namespace {

Partition cut_mean_layer(const Eigen::MatrixXd& m, const std::variant<Threshold, TargetK>& stop) {
    const Dendrogram tree = mean_layer_tree(m);
    return std::visit(Overloaded{
                          [&](const Threshold& t) { return cut_threshold(tree, t.alpha); },
                          [&](const TargetK& t) { return cut_k(tree, t.k); },
                      },
                      stop);
}

void reject_target_k(const StopRule& rule) {
    if (std::holds_alternative<TargetK>(rule)) {
        throw ArgumentError("cluster_nested: a target-K stop rule has no meaning inside first-layer blocks");
    }
}

}  // namespace

NestedResult cluster_nested(const DataSet& data, const MeanLayerSpec& mean_layer, const PipelineOptions& opts) {
    require_dim(data, Axis::kRows, "cluster_nested");
    require_dim(data, Axis::kColumns, "cluster_nested");
    // The mean layer must see the raw data: standardization removes the means.
    const Eigen::MatrixXd m = data.mean();
    const Partition rows_first = cut_mean_layer(m, mean_layer.row_stop);
    const Partition cols_first = cut_mean_layer(m.transpose(), mean_layer.col_stop);
    return cluster_nested(data, rows_first, cols_first, opts);
}

NestedResult cluster_nested(const DataSet& data, const Partition& rows_first, const Partition& cols_first,
                            const PipelineOptions& opts) {
    require_dim(data, Axis::kRows, "cluster_nested");
    require_dim(data, Axis::kColumns, "cluster_nested");
    reject_target_k(opts.row_stop);
    reject_target_k(opts.col_stop);
    if (rows_first.size() != data.p() || cols_first.size() != data.q()) {
        throw ArgumentError("cluster_nested: first-layer partition lengths do not match the data");
    }
    // Standardizing is per entry, so doing it once here equals doing it per block.
    const DataSet prepared = opts.standardize ? standardize(data) : data;
    PipelineOptions inner = opts;
    inner.standardize = false;

    NestedResult out{rows_first, cols_first, rows_first, cols_first, {}, {}};

    auto run_axis = [&](Axis axis, const Partition& first, std::vector<NestedBlock>& blocks) {
        std::vector<std::int64_t> labels(first.size());
        std::int64_t offset = 0;
        for (auto& members : first.clusters()) {
            NestedBlock block;
            block.members = members;
            if (members.size() < 3) {
                block.passed_through = true;
                for (auto i : members) {
                    labels[i] = offset;
                }
                offset += 1;
            } else {
                const DataSet sub = axis == Axis::kRows ? prepared.select_rows(members) : prepared.select_cols(members);
                ClusterResult r = cluster_two_step(sub, inner);
                const Partition& local = axis == Axis::kRows ? *r.rows : *r.cols;
                for (std::size_t i = 0; i < members.size(); ++i) {
                    labels[members[i]] = offset + local[i];
                }
                offset += local.k();
                block.result = std::move(r);
            }
            blocks.push_back(std::move(block));
        }
        return partition_from_labels(std::span<const std::int64_t>(labels));
    };

    out.rows = run_axis(Axis::kRows, rows_first, out.row_blocks);
    out.cols = run_axis(Axis::kColumns, cols_first, out.col_blocks);
    return out;
}

}  // namespace covclust
