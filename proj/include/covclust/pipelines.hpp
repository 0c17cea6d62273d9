#pragma once

/**
 * @file pipelines.hpp
 * @brief End-to-end row/column clustering drivers.
 *
 * Every driver runs the same step: weighted covariance, COD, complete-linkage
 * tree, cut. They differ in which weights feed each step and in the order of
 * the steps:
 *
 *  - naive:    one axis, identity weight.
 *  - one-step: rows with I_q/q, then columns with the optimal weight built
 *              from the row estimate.
 *  - two-step: one-step, then rows again with the optimal weight built from
 *              the column estimate. Returns (rows of step 3, cols of step 2).
 *  - nested:   mean-based first layer, then two-step inside every block.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "covclust/cod_hclust.hpp"
#include "covclust/core.hpp"
#include "covclust/tuning.hpp"
#include "covclust/weights_cov.hpp"

namespace covclust {

/// Cut the tree at a fixed height.
struct Threshold {
    double alpha;
};

/// Cut the tree into exactly k clusters.
struct TargetK {
    std::size_t k;
};

/// Pick the height by split-sample cross-validation; default grid when empty.
struct Tuned {
    std::optional<std::vector<double>> grid;
};

using StopRule = std::variant<Threshold, TargetK, Tuned>;

std::string describe(const StopRule& rule);

struct PipelineOptions {
    bool standardize = true;
    bool split = false;
    StopRule row_stop = Tuned{};
    StopRule col_stop = Tuned{};
    std::uint64_t seed = 0;
};

/// Which samples fed a step's covariance.
enum class FoldUse { kAll, kFirst, kSecond };

std::string to_string(FoldUse use);

struct StepTrace {
    Axis axis = Axis::kRows;
    WeightKind weight = WeightKind::kIdentity;
    StopRule stop = Tuned{};
    std::optional<double> alpha;  ///< unset for K-cuts
    int k = 0;
    std::vector<double> heights;
    bool degenerate = false;      ///< K == 1 or K == dimension
    FoldUse fold = FoldUse::kAll;
    std::optional<TuneReport> tune;
};

struct ClusterResult {
    std::optional<Partition> rows;
    std::optional<Partition> cols;
    std::vector<StepTrace> trace;  ///< in execution order
    std::optional<Folds> folds;
};

/**
 * One clustering step on already prepared data: covariance with `weight` over
 * `subset` (all samples when unset), COD, tree, cut. Tuning halves the subset
 * with `tune_seed`.
 */
std::pair<Partition, StepTrace> cluster_step(const DataSet& data, Axis axis, const Weight& weight,
                                             const StopRule& stop,
                                             std::optional<std::span<const std::size_t>> subset,
                                             std::uint64_t tune_seed);

/// Identity-weight clustering of one axis, using that axis's stop rule.
/// The split option is ignored: there is no weight to estimate.
ClusterResult cluster_naive(const DataSet& data, Axis axis, const PipelineOptions& opts);

ClusterResult cluster_one_step(const DataSet& data, const PipelineOptions& opts);

ClusterResult cluster_two_step(const DataSet& data, const PipelineOptions& opts);

/// First-layer partitioner for nested clustering: complete linkage on the
/// rows (columns) of the sample mean under max-absolute-difference distance.
struct MeanLayerSpec {
    std::variant<Threshold, TargetK> row_stop;
    std::variant<Threshold, TargetK> col_stop;
};

/// Complete-linkage tree over the rows of `m` with max-abs distance.
Dendrogram mean_layer_tree(const Eigen::MatrixXd& m);

struct NestedBlock {
    std::vector<std::size_t> members;  ///< global indices, ascending
    bool passed_through = false;       ///< fewer than 3 members: kept whole
    std::optional<ClusterResult> result;
};

struct NestedResult {
    Partition rows_first;
    Partition cols_first;
    Partition rows;  ///< second layer, refines rows_first
    Partition cols;  ///< second layer, refines cols_first
    std::vector<NestedBlock> row_blocks;
    std::vector<NestedBlock> col_blocks;
};

/// Nested clustering with the mean layer computed from the raw data.
/// Per-block stop rules must be thresholds or tuned; TargetK is rejected.
NestedResult cluster_nested(const DataSet& data, const MeanLayerSpec& mean_layer, const PipelineOptions& opts);

/// Nested clustering with caller-supplied first-layer partitions.
NestedResult cluster_nested(const DataSet& data, const Partition& rows_first, const Partition& cols_first,
                            const PipelineOptions& opts);

}  // namespace covclust
