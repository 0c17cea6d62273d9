#include "covclust/cli/commands.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "covclust/cli/presets.hpp"
#include "covclust/pipelines.hpp"
#include "covclust/rng.hpp"
#include "covclust/tensor.hpp"

namespace covclust::cli {

namespace fs = std::filesystem;

namespace {

Json trace_to_json(const StepTrace& t) {
    Json j;
    j["axis"] = to_string(t.axis);
    j["weight"] = to_string(t.weight);
    j["stop"] = describe(t.stop);
    j["alpha"] = t.alpha ? Json(*t.alpha) : Json(nullptr);
    j["k"] = t.k;
    j["degenerate"] = t.degenerate;
    j["fold"] = to_string(t.fold);
    j["heights"] = t.heights;
    if (t.tune) {
        j["tune"] = {{"grid", t.tune->grid},
                     {"losses", t.tune->losses},
                     {"chosen", t.tune->chosen},
                     {"chosen_index", t.tune->chosen_index}};
    }
    return j;
}

Json traces_to_json(const std::vector<StepTrace>& trace) {
    Json out = Json::array();
    for (const auto& t : trace) {
        out.push_back(trace_to_json(t));
    }
    return out;
}

Json folds_to_json(const Folds& f) {
    return {{"first", f.first}, {"second", f.second}};
}

// One stop rule per axis (or mode) from the request's alpha / k lists.
std::vector<StopRule> stop_rules(const ClusterRequest& r, std::size_t count) {
    if (!r.alpha.empty() && !r.k.empty()) {
        throw ArgumentError("give at most one of --alpha, --k, --tune");
    }
    auto expand = [&](const auto& values, auto make) {
        if (values.size() != 1 && values.size() != count) {
            throw ArgumentError("expected 1 or " + std::to_string(count) + " stop values, got " +
                                std::to_string(values.size()));
        }
        std::vector<StopRule> out;
        for (std::size_t i = 0; i < count; ++i) {
            out.push_back(make(values[values.size() == 1 ? 0 : i]));
        }
        return out;
    };
    if (!r.alpha.empty()) {
        return expand(r.alpha, [](double a) { return StopRule{Threshold{a}}; });
    }
    if (!r.k.empty()) {
        return expand(r.k, [](std::size_t k) { return StopRule{TargetK{k}}; });
    }
    return std::vector<StopRule>(count, StopRule{Tuned{}});
}

std::variant<Threshold, TargetK> mean_stop(const ClusterRequest& r, std::size_t i) {
    if (!r.mean_k.empty() && !r.mean_alpha.empty()) {
        throw ArgumentError("give at most one of --mean-k, --mean-alpha");
    }
    if (!r.mean_k.empty()) {
        if (r.mean_k.size() != 1 && r.mean_k.size() != 2) {
            throw ArgumentError("--mean-k takes 1 or 2 values");
        }
        return TargetK{r.mean_k[r.mean_k.size() == 1 ? 0 : i]};
    }
    if (!r.mean_alpha.empty()) {
        if (r.mean_alpha.size() != 1 && r.mean_alpha.size() != 2) {
            throw ArgumentError("--mean-alpha takes 1 or 2 values");
        }
        return Threshold{r.mean_alpha[r.mean_alpha.size() == 1 ? 0 : i]};
    }
    throw ArgumentError("nested clustering needs --mean-k or --mean-alpha for the first layer");
}

Json nested_blocks_to_json(const std::vector<NestedBlock>& blocks) {
    Json out = Json::array();
    for (const auto& b : blocks) {
        Json j;
        j["members"] = b.members;
        j["passed_through"] = b.passed_through;
        j["trace"] = b.result ? traces_to_json(b.result->trace) : Json::array();
        out.push_back(j);
    }
    return out;
}

template <class F>
auto numerical_stage(const std::string& stage, F&& f) {
    try {
        return f();
    } catch (const DegenerateFeatureError& e) {
        throw StageError("standardize", e.what());
    } catch (const ModelError& e) {
        throw StageError(stage, e.what());
    }
}

std::string timestamp_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

Json score_partitions(const std::map<std::string, Partition>& truth, const std::map<std::string, Partition>& est) {
    Json out = Json::object();
    for (const auto& [name, part] : est) {
        const auto it = truth.find(name);
        if (it == truth.end()) {
            continue;
        }
        if (it->second.size() != part.size()) {
            throw ArgumentError("partition '" + name + "' has " + std::to_string(part.size()) +
                                " entries, truth has " + std::to_string(it->second.size()));
        }
        const AriResult a = adjusted_rand_index(it->second, part);
        const SensSpec s = sensitivity_specificity(it->second, part);
        out[name] = {{"ari", a.value},
                     {"ari_degenerate", a.degenerate},
                     {"sn", s.sn},
                     {"sp", s.sp},
                     {"sn_undefined", s.sn_undefined},
                     {"sp_undefined", s.sp_undefined}};
    }
    return out;
}

Json cluster_dataset(const DatasetFile& file, const ClusterRequest& r) {
    Json out;
    out["tool"] = kToolName;
    out["version"] = kToolVersion;
    out["seed"] = r.seed;
    out["method"] = r.method;
    out["axis"] = r.axis;
    out["options"] = {{"standardize", r.standardize},
                      {"split", r.split ? "seeded" : "off"},
                      {"alpha", r.alpha},
                      {"k", r.k},
                      {"tune", r.alpha.empty() && r.k.empty()}};
    std::map<std::string, Partition> parts;

    if (r.method == "tensor") {
        if (!file.is_tensor()) {
            throw ArgumentError("method 'tensor' needs a tensor data set");
        }
        if (r.axis != "both") {
            throw ArgumentError("method 'tensor' clusters every mode; --axis does not apply");
        }
        if (r.split) {
            throw ArgumentError("method 'tensor' has no split variant");
        }
        const auto stops = stop_rules(r, 3);
        TensorOptions opts;
        opts.standardize = r.standardize;
        opts.seed = r.seed;
        std::copy(stops.begin(), stops.end(), opts.stops.begin());
        const TensorResult res =
            numerical_stage("tensor", [&] { return cluster_tensor_identity(std::get<TensorDataSet>(file.data), opts); });
        Json trace = Json::array();
        for (std::size_t k = 0; k < 3; ++k) {
            parts.emplace("mode" + std::to_string(k + 1), res.partitions[k]);
            Json t = trace_to_json(res.trace[k]);
            t["axis"] = "mode" + std::to_string(k + 1);
            trace.push_back(t);
        }
        out["trace"] = trace;
    } else {
        if (file.is_tensor()) {
            throw ArgumentError("method '" + r.method + "' needs a matrix data set; use --method tensor");
        }
        const DataSet& data = std::get<DataSet>(file.data);
        const auto stops = stop_rules(r, 2);
        PipelineOptions opts;
        opts.standardize = r.standardize;
        opts.split = r.split;
        opts.row_stop = stops[0];
        opts.col_stop = stops[1];
        opts.seed = r.seed;

        if (r.method == "naive") {
            if (r.axis != "rows" && r.axis != "cols" && r.axis != "both") {
                throw ArgumentError("unknown axis '" + r.axis + "'");
            }
            Json trace = Json::array();
            for (Axis a : {Axis::kRows, Axis::kColumns}) {
                if (r.axis != "both" && r.axis != to_string(a)) {
                    continue;
                }
                const ClusterResult res = numerical_stage("naive", [&] { return cluster_naive(data, a, opts); });
                parts.emplace(to_string(a), a == Axis::kRows ? *res.rows : *res.cols);
                for (const auto& t : res.trace) {
                    trace.push_back(trace_to_json(t));
                }
            }
            out["trace"] = trace;
        } else if (r.method == "one-step" || r.method == "two-step") {
            if (r.axis != "both") {
                throw ArgumentError("method '" + r.method + "' clusters rows and columns together; use --axis both");
            }
            const ClusterResult res = numerical_stage(r.method, [&] {
                return r.method == "one-step" ? cluster_one_step(data, opts) : cluster_two_step(data, opts);
            });
            parts.emplace("rows", *res.rows);
            parts.emplace("cols", *res.cols);
            out["trace"] = traces_to_json(res.trace);
            if (res.folds) {
                out["folds"] = folds_to_json(*res.folds);
            }
        } else if (r.method == "nested") {
            if (r.axis != "both") {
                throw ArgumentError("method 'nested' clusters rows and columns together; use --axis both");
            }
            if (!r.k.empty()) {
                throw ArgumentError("method 'nested' does not accept --k inside first-layer blocks");
            }
            const MeanLayerSpec layer{mean_stop(r, 0), mean_stop(r, 1)};
            const NestedResult res = numerical_stage("nested", [&] { return cluster_nested(data, layer, opts); });
            parts.emplace("rows", res.rows);
            parts.emplace("cols", res.cols);
            parts.emplace("rows_mean", res.rows_first);
            parts.emplace("cols_mean", res.cols_first);
            out["trace"] = {{"rows", nested_blocks_to_json(res.row_blocks)},
                            {"cols", nested_blocks_to_json(res.col_blocks)}};
        } else {
            throw ArgumentError("unknown method '" + r.method + "'");
        }
    }

    Json pj = Json::object();
    for (const auto& [name, part] : parts) {
        pj[name] = partition_to_json(part);
    }
    out["partitions"] = pj;
    if (!file.truth.empty()) {
        out["metrics"] = score_partitions(file.truth, parts);
    }
    return out;
}

std::size_t default_threads() {
    if (const char* env = std::getenv("COVCLUST_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            return v;
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

std::vector<BenchRow> run_bench(const BenchRequest& req) {
    const Preset preset = find_preset(req.preset);
    if (req.n_list.empty()) {
        throw ArgumentError("bench: empty --n-list");
    }
    if (req.reps == 0) {
        throw ArgumentError("bench: --reps must be positive");
    }
    if (req.stop != "tune" && req.stop != "true-k") {
        throw ArgumentError("bench: --stop must be 'tune' or 'true-k'");
    }
    for (const auto& m : req.methods) {
        const bool ok = preset.tensor ? m == "tensor"
                                      : (m == "naive" || m == "one-step" || m == "two-step" ||
                                         (m == "nested" && preset.matrix.mean_layout));
        if (!ok) {
            throw ArgumentError("bench: method '" + m + "' does not apply to preset '" + req.preset + "'");
        }
    }

    // (method, axis) columns in output order.
    std::vector<std::pair<std::string, std::string>> columns;
    for (const auto& m : req.methods) {
        if (m == "tensor") {
            for (const char* a : {"mode1", "mode2", "mode3"}) {
                columns.emplace_back(m, a);
            }
        } else {
            columns.emplace_back(m, "rows");
            columns.emplace_back(m, "cols");
        }
    }

    const std::size_t items = req.n_list.size() * req.reps;
    std::vector<std::vector<double>> scores(items, std::vector<double>(columns.size(), 0.0));
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;

    auto work = [&] {
        for (;;) {
            const std::size_t item = next.fetch_add(1);
            if (item >= items) {
                return;
            }
            const std::size_t n = req.n_list[item / req.reps];
            const std::size_t rep = item % req.reps;
            const std::uint64_t data_seed = derive_key(derive_key(req.seed, "bench", n), "rep", rep);
            const std::uint64_t run_seed = derive_key(data_seed, "pipeline");
            try {
                std::size_t col = 0;
                if (preset.tensor) {
                    TensorSimConfig cfg = preset.tensor_config;
                    cfg.n = n;
                    cfg.seed = data_seed;
                    const TensorSample s = sample_tensor_dataset(cfg);
                    TensorOptions opts;
                    opts.seed = run_seed;
                    for (std::size_t k = 0; k < 3; ++k) {
                        if (req.stop == "true-k") {
                            opts.stops[k] = TargetK{static_cast<std::size_t>(s.truth[k].k())};
                        }
                    }
                    const TensorResult res = cluster_tensor_identity(s.data, opts);
                    for (std::size_t k = 0; k < 3; ++k) {
                        scores[item][col++] = ari(s.truth[k], res.partitions[k]);
                    }
                } else {
                    SimConfig cfg = preset.matrix;
                    cfg.n = n;
                    cfg.seed = data_seed;
                    const MatrixSample s = sample_matrix_normal_dataset(cfg);
                    PipelineOptions opts;
                    opts.seed = run_seed;
                    if (req.stop == "true-k") {
                        opts.row_stop = TargetK{static_cast<std::size_t>(s.rows.k())};
                        opts.col_stop = TargetK{static_cast<std::size_t>(s.cols.k())};
                    }
                    for (const auto& m : req.methods) {
                        Partition rows;
                        Partition cols;
                        if (m == "naive") {
                            rows = *cluster_naive(s.data, Axis::kRows, opts).rows;
                            cols = *cluster_naive(s.data, Axis::kColumns, opts).cols;
                        } else if (m == "one-step" || m == "two-step") {
                            const ClusterResult res =
                                m == "one-step" ? cluster_one_step(s.data, opts) : cluster_two_step(s.data, opts);
                            rows = *res.rows;
                            cols = *res.cols;
                        } else {
                            PipelineOptions nested = opts;
                            if (req.stop == "true-k") {
                                nested.row_stop = Tuned{};
                                nested.col_stop = Tuned{};
                            }
                            const MeanLayerSpec layer{TargetK{static_cast<std::size_t>(s.rows_mean->k())},
                                                     TargetK{static_cast<std::size_t>(s.cols_mean->k())}};
                            const NestedResult res = cluster_nested(s.data, layer, nested);
                            rows = res.rows;
                            cols = res.cols;
                        }
                        scores[item][col++] = ari(s.rows, rows);
                        scores[item][col++] = ari(s.cols, cols);
                    }
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next.store(items);
                return;
            }
        }
    };

    const std::size_t threads = std::max<std::size_t>(1, std::min(req.threads, items));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) {
        pool.emplace_back(work);
    }
    work();
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }

    std::vector<BenchRow> rows;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        for (std::size_t ni = 0; ni < req.n_list.size(); ++ni) {
            double sum = 0.0;
            for (std::size_t rep = 0; rep < req.reps; ++rep) {
                sum += scores[ni * req.reps + rep][c];
            }
            const double mean = sum / static_cast<double>(req.reps);
            double ss = 0.0;
            for (std::size_t rep = 0; rep < req.reps; ++rep) {
                const double d = scores[ni * req.reps + rep][c] - mean;
                ss += d * d;
            }
            const double sd = req.reps > 1 ? std::sqrt(ss / static_cast<double>(req.reps - 1)) : 0.0;
            rows.push_back({columns[c].first, req.n_list[ni], columns[c].second, mean, sd, req.reps});
        }
    }
    return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream out;
    out << "method,n,axis,mean_ari,sd_ari,reps\n";
    for (const auto& r : rows) {
        out << r.method << ',' << r.n << ',' << r.axis << ',' << format_double(r.mean_ari) << ','
            << format_double(r.sd_ari) << ',' << r.reps << '\n';
    }
    return out.str();
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw FormatError("cannot write " + path.string());
    }
    out << text;
}

int cmd_simulate(const std::string& preset_name, std::size_t n, std::uint64_t seed, const std::string& out_dir,
                 const std::string& config_path) {
    Preset preset = find_preset(preset_name);
    Json overrides = Json::object();
    if (!config_path.empty()) {
        overrides = read_json(config_path);
    }
    if (preset.tensor) {
        preset.tensor_config = apply_overrides(preset.tensor_config, overrides);
        if (!overrides.contains("n")) preset.tensor_config.n = n;
        if (!overrides.contains("seed")) preset.tensor_config.seed = seed;
    } else {
        preset.matrix = apply_overrides(preset.matrix, overrides);
        if (!overrides.contains("n")) preset.matrix.n = n;
        if (!overrides.contains("seed")) preset.matrix.seed = seed;
    }
    const DatasetFile file = numerical_stage("simulate", [&] { return simulate_preset(preset); });
    write_dataset(out_dir, file);
    std::cout << "wrote " << out_dir << '\n';
    return kExitOk;
}

int cmd_cluster(const std::string& dir, const ClusterRequest& req, const std::string& out_path) {
    const DatasetFile file = read_dataset(dir);
    Json result = cluster_dataset(file, req);
    result["timestamp"] = timestamp_now();
    result["dataset"] = dir;
    if (out_path.empty()) {
        std::cout << result.dump(2) << '\n';
    } else {
        write_text(out_path, result.dump(2) + "\n");
    }
    return kExitOk;
}

int cmd_evaluate(const std::string& truth_path, const std::string& est_path) {
    const auto truth = read_partitions(truth_path);
    const auto est = read_partitions(est_path);
    const Json scores = score_partitions(truth, est);
    if (scores.empty()) {
        throw ArgumentError("no partition name is shared by the truth and estimate files");
    }
    for (const auto& [name, s] : scores.items()) {
        std::cout << "{\"axis\":\"" << name << "\",\"ari\":" << format_double(s["ari"].get<double>())
                  << ",\"sn\":" << format_double(s["sn"].get<double>())
                  << ",\"sp\":" << format_double(s["sp"].get<double>()) << "}\n";
    }
    return kExitOk;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Covariance-based row and column clustering of matrix and tensor samples."};
    app.name(kToolName);
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    // simulate
    std::string sim_preset;
    std::size_t sim_n = 0;
    std::uint64_t sim_seed = 0;
    std::string sim_out;
    std::string sim_config;
    auto* sim = app.add_subcommand("simulate", "Generate a data set from a named design");
    sim->add_option("--preset", sim_preset, "Design name")->required()->check(CLI::IsMember(preset_names()));
    sim->add_option("--n", sim_n, "Number of samples")->required()->check(CLI::PositiveNumber);
    sim->add_option("--seed", sim_seed, "Random seed");
    sim->add_option("-o,--output", sim_out, "Output directory")->required();
    sim->add_option("--config", sim_config, "JSON file overriding design fields")->check(CLI::ExistingFile);

    // cluster
    std::string cl_dir;
    std::string cl_out;
    std::string cl_standardize = "on";
    std::string cl_split = "off";
    bool cl_tune = false;
    ClusterRequest req;
    auto* cl = app.add_subcommand("cluster", "Cluster a data set");
    cl->add_option("dataset", cl_dir, "Data set directory")->required()->check(CLI::ExistingDirectory);
    cl->add_option("--method", req.method, "Algorithm")
        ->check(CLI::IsMember({"naive", "one-step", "two-step", "nested", "tensor"}));
    cl->add_option("--axis", req.axis, "Axis to cluster")->check(CLI::IsMember({"rows", "cols", "both"}));
    auto* alpha_opt = cl->add_option("--alpha", req.alpha, "Cut threshold(s), comma separated")->delimiter(',');
    auto* k_opt = cl->add_option("--k", req.k, "Cluster count(s), comma separated")->delimiter(',');
    auto* tune_opt = cl->add_flag("--tune", cl_tune, "Select the threshold by split-sample validation (default)");
    alpha_opt->excludes(k_opt)->excludes(tune_opt);
    k_opt->excludes(tune_opt);
    cl->add_option("--standardize", cl_standardize, "Standardize entries")->check(CLI::IsMember({"on", "off"}));
    cl->add_option("--split", cl_split, "Two-fold sample splitting")->check(CLI::IsMember({"off", "seeded"}));
    cl->add_option("--seed", req.seed, "Seed for splitting and tuning");
    auto* mk = cl->add_option("--mean-k", req.mean_k, "Nested: first-layer cluster counts (rows,cols)")->delimiter(',');
    auto* ma =
        cl->add_option("--mean-alpha", req.mean_alpha, "Nested: first-layer thresholds (rows,cols)")->delimiter(',');
    mk->excludes(ma);
    cl->add_option("-o,--output", cl_out, "Result file (stdout when omitted)");

    // evaluate
    std::string ev_truth;
    std::string ev_est;
    auto* ev = app.add_subcommand("evaluate", "Score estimated partitions against the truth");
    ev->add_option("--truth", ev_truth, "Data set directory, manifest or result file")->required()->check(CLI::ExistingPath);
    ev->add_option("--est", ev_est, "Result file")->required()->check(CLI::ExistingPath);

    // bench
    BenchRequest bench;
    std::string bench_out;
    auto* be = app.add_subcommand("bench", "Mean ARI over repeated simulations");
    be->add_option("--preset", bench.preset, "Design name")->required()->check(CLI::IsMember(preset_names()));
    be->add_option("--n-list", bench.n_list, "Sample sizes, comma separated")->required()->delimiter(',');
    be->add_option("--reps", bench.reps, "Repetitions per sample size")->check(CLI::PositiveNumber);
    be->add_option("--methods", bench.methods, "Methods, comma separated")->delimiter(',');
    be->add_option("--seed", bench.seed, "Base seed");
    be->add_option("--stop", bench.stop, "Stop rule")->check(CLI::IsMember({"tune", "true-k"}));
    be->add_option("-o,--output", bench_out, "CSV file (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*sim) {
            return cmd_simulate(sim_preset, sim_n, sim_seed, sim_out, sim_config);
        }
        if (*cl) {
            req.standardize = cl_standardize == "on";
            req.split = cl_split == "seeded";
            return cmd_cluster(cl_dir, req, cl_out);
        }
        if (*ev) {
            return cmd_evaluate(ev_truth, ev_est);
        }
        if (*be) {
            if (bench.preset == "tensor-g32" && be->count("--methods") == 0) {
                bench.methods = {"tensor"};
            }
            bench.threads = default_threads();
            const std::string csv = bench_csv(run_bench(bench));
            if (bench_out.empty()) {
                std::cout << csv;
            } else {
                write_text(bench_out, csv);
            }
            return kExitOk;
        }
    } catch (const StageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const DegenerateFeatureError& e) {
        std::cerr << "error: numerical failure in stage 'standardize': " << e.what() << '\n';
        return kExitNumerical;
    } catch (const ModelError& e) {
        std::cerr << "error: numerical failure in stage '" << app.get_subcommands().front()->get_name()
                  << "': " << e.what() << '\n';
        return kExitNumerical;
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace covclust::cli
