#pragma once

/**
 * @file commands.hpp
 * @brief The covclust command line: simulate, cluster, evaluate, bench.
 *
 * Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure
 * (the message names the failing stage).
 */

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "covclust/cli/dataset_io.hpp"

namespace covclust::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

inline constexpr const char* kToolName = "covclust";
inline constexpr const char* kToolVersion = "1.0.0";

/// A numerical failure tagged with the pipeline stage that raised it.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& message)
        : std::runtime_error("numerical failure in stage '" + stage + "': " + message), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

struct ClusterRequest {
    std::string method = "two-step";  ///< naive | one-step | two-step | nested | tensor
    std::string axis = "both";        ///< rows | cols | both
    std::vector<double> alpha;        ///< one value, or one per axis / mode
    std::vector<std::size_t> k;       ///< one value, or one per axis / mode
    bool standardize = true;
    bool split = false;
    std::uint64_t seed = 0;
    std::vector<std::size_t> mean_k;  ///< nested: first-layer K (rows, cols)
    std::vector<double> mean_alpha;   ///< nested: first-layer threshold (rows, cols)
};

/// Runs a request and returns the result document without the timestamp.
/// Throws ArgumentError for bad requests and StageError for numerical failures.
Json cluster_dataset(const DatasetFile& file, const ClusterRequest& request);

/// ARI, sensitivity and specificity of every estimate whose name appears in `truth`.
Json score_partitions(const std::map<std::string, Partition>& truth, const std::map<std::string, Partition>& est);

struct BenchRequest {
    std::string preset;
    std::vector<std::size_t> n_list;
    std::size_t reps = 30;
    std::vector<std::string> methods{"naive", "one-step", "two-step"};
    std::uint64_t seed = 0;
    std::string stop = "tune";  ///< tune | true-k
    std::size_t threads = 1;
};

struct BenchRow {
    std::string method;
    std::size_t n;
    std::string axis;
    double mean_ari;
    double sd_ari;
    std::size_t reps;
};

/// Repetition r at sample size n uses data seed derive_key(derive_key(seed, "bench", n), "rep", r).
std::vector<BenchRow> run_bench(const BenchRequest& request);

std::string bench_csv(const std::vector<BenchRow>& rows);

/// Thread count from COVCLUST_THREADS, else the hardware concurrency.
std::size_t default_threads();

int run(int argc, char** argv);

}  // namespace covclust::cli
