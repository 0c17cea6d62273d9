#include "covclust/cli/presets.hpp"

#include <set>

namespace covclust::cli {

namespace {

const std::vector<std::size_t> kMainSizes{3, 6, 6, 8, 10, 10, 12, 12, 14, 19};

SimConfig main_design(NoiseKind kind) {
    SimConfig c;
    c.row_sizes = kMainSizes;
    c.col_sizes = kMainSizes;
    c.u_decay = -0.4;
    c.v_decay = 0.3;
    c.noise.kind = kind;
    c.noise.mean = 15.0;
    c.noise.h = 0.87;
    return c;
}

std::string to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::kHomogeneous:
            return "homogeneous";
        case NoiseKind::kProportional:
            return "proportional";
        case NoiseKind::kRandom:
            return "random";
    }
    return "unknown";
}

NoiseKind noise_kind(const std::string& s) {
    if (s == "homogeneous") {
        return NoiseKind::kHomogeneous;
    }
    if (s == "proportional") {
        return NoiseKind::kProportional;
    }
    if (s == "random") {
        return NoiseKind::kRandom;
    }
    throw ArgumentError("unknown noise kind \"" + s + "\"");
}

void check_keys(const Json& j, const std::set<std::string>& allowed, const char* what) {
    if (!j.is_object()) {
        throw ArgumentError(std::string(what) + " must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) {
            throw ArgumentError(std::string(what) + ": unknown key \"" + key + "\"");
        }
    }
}

template <class T>
T get_as(const Json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw ArgumentError(std::string("config key \"") + key + "\": " + e.what());
    }
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(m(r, c));
        }
        rows.push_back(row);
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
    const auto rows = j.get<std::vector<std::vector<double>>>();
    if (rows.empty() || rows[0].empty()) {
        throw ArgumentError("mean values must be a non-empty matrix");
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows[0].size()) {
            throw ArgumentError("mean values rows have different lengths");
        }
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return m;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"main-homogeneous", "main-proportional", "main-random", "supp-table1", "tensor-g32", "nested-g23"};
}

Preset find_preset(const std::string& name) {
    Preset p;
    p.name = name;
    if (name == "main-homogeneous") {
        p.matrix = main_design(NoiseKind::kHomogeneous);
    } else if (name == "main-proportional") {
        p.matrix = main_design(NoiseKind::kProportional);
    } else if (name == "main-random") {
        p.matrix = main_design(NoiseKind::kRandom);
    } else if (name == "supp-table1") {
        p.matrix.row_sizes = {4, 6, 9, 11};
        p.matrix.col_sizes = {4, 6, 9, 11};
        p.matrix.u_decay = -0.2;
        p.matrix.v_decay = 0.2;
        p.matrix.noise.kind = NoiseKind::kProportional;
        p.matrix.noise.mean = 15.0;
    } else if (name == "tensor-g32") {
        p.tensor = true;
        p.tensor_config.sizes = {std::vector<std::size_t>{3, 3, 4, 5}, std::vector<std::size_t>{2, 3, 5},
                                 std::vector<std::size_t>{3, 3, 4}};
        p.tensor_config.decays = {-0.4, 0.3, -0.2};
        p.tensor_config.noise_variance = 15.0;
    } else if (name == "nested-g23") {
        const std::vector<std::size_t> half_cols{3, 4, 5, 5, 5, 5, 5, 6, 6, 6};
        p.matrix.row_sizes = {3, 4, 5, 8, 3, 4, 5, 8};
        p.matrix.col_sizes = half_cols;
        p.matrix.col_sizes.insert(p.matrix.col_sizes.end(), half_cols.begin(), half_cols.end());
        p.matrix.u_decay = -0.4;
        p.matrix.v_decay = 0.3;
        p.matrix.noise.kind = NoiseKind::kHomogeneous;
        p.matrix.noise.mean = 15.0;
        MeanLayout layout;
        layout.row_sizes = {20, 20};
        layout.col_sizes = {50, 50};
        layout.values.resize(2, 2);
        layout.values << 2.0, -2.0, -2.0, 2.0;
        p.matrix.mean_layout = layout;
    } else {
        std::string known;
        for (const auto& n : preset_names()) {
            known += (known.empty() ? "" : ", ") + n;
        }
        throw ArgumentError("unknown preset \"" + name + "\" (known: " + known + ")");
    }
    return p;
}

Json to_json(const SimConfig& c) {
    Json j;
    j["row_sizes"] = c.row_sizes;
    j["col_sizes"] = c.col_sizes;
    j["u_decay"] = c.u_decay;
    j["v_decay"] = c.v_decay;
    j["noise"] = {{"kind", to_string(c.noise.kind)}, {"mean", c.noise.mean}, {"h", c.noise.h}};
    if (c.mean_layout) {
        j["mean_layout"] = {{"row_sizes", c.mean_layout->row_sizes},
                            {"col_sizes", c.mean_layout->col_sizes},
                            {"values", matrix_to_json(c.mean_layout->values)}};
    }
    j["n"] = c.n;
    j["seed"] = c.seed;
    return j;
}

Json to_json(const TensorSimConfig& c) {
    Json j;
    j["sizes"] = c.sizes;
    j["decays"] = c.decays;
    j["noise_variance"] = c.noise_variance;
    j["n"] = c.n;
    j["seed"] = c.seed;
    return j;
}

SimConfig apply_overrides(SimConfig c, const Json& o) {
    check_keys(o, {"row_sizes", "col_sizes", "u_decay", "v_decay", "noise", "mean_layout", "n", "seed"}, "config");
    if (o.contains("row_sizes")) c.row_sizes = get_as<std::vector<std::size_t>>(o, "row_sizes");
    if (o.contains("col_sizes")) c.col_sizes = get_as<std::vector<std::size_t>>(o, "col_sizes");
    if (o.contains("u_decay")) c.u_decay = get_as<double>(o, "u_decay");
    if (o.contains("v_decay")) c.v_decay = get_as<double>(o, "v_decay");
    if (o.contains("n")) c.n = get_as<std::size_t>(o, "n");
    if (o.contains("seed")) c.seed = get_as<std::uint64_t>(o, "seed");
    if (o.contains("noise")) {
        const Json& nz = o["noise"];
        check_keys(nz, {"kind", "mean", "h"}, "config noise");
        if (nz.contains("kind")) c.noise.kind = noise_kind(get_as<std::string>(nz, "kind"));
        if (nz.contains("mean")) c.noise.mean = get_as<double>(nz, "mean");
        if (nz.contains("h")) c.noise.h = get_as<double>(nz, "h");
    }
    if (o.contains("mean_layout")) {
        const Json& ml = o["mean_layout"];
        if (ml.is_null()) {
            c.mean_layout.reset();
        } else {
            check_keys(ml, {"row_sizes", "col_sizes", "values"}, "config mean_layout");
            MeanLayout layout;
            layout.row_sizes = get_as<std::vector<std::size_t>>(ml, "row_sizes");
            layout.col_sizes = get_as<std::vector<std::size_t>>(ml, "col_sizes");
            try {
                layout.values = matrix_from_json(ml.at("values"));
            } catch (const Json::exception& e) {
                throw ArgumentError(std::string("config mean_layout values: ") + e.what());
            }
            c.mean_layout = layout;
        }
    }
    return c;
}

TensorSimConfig apply_overrides(TensorSimConfig c, const Json& o) {
    check_keys(o, {"sizes", "decays", "noise_variance", "n", "seed"}, "config");
    if (o.contains("sizes")) c.sizes = get_as<std::array<std::vector<std::size_t>, 3>>(o, "sizes");
    if (o.contains("decays")) c.decays = get_as<std::array<double, 3>>(o, "decays");
    if (o.contains("noise_variance")) c.noise_variance = get_as<double>(o, "noise_variance");
    if (o.contains("n")) c.n = get_as<std::size_t>(o, "n");
    if (o.contains("seed")) c.seed = get_as<std::uint64_t>(o, "seed");
    return c;
}

DatasetFile simulate_preset(const Preset& preset) {
    if (preset.tensor) {
        TensorSample s = sample_tensor_dataset(preset.tensor_config);
        DatasetFile f{std::move(s.data), {}, Json::object()};
        for (std::size_t k = 0; k < 3; ++k) {
            f.truth.emplace("mode" + std::to_string(k + 1), s.truth[k]);
        }
        f.provenance = {{"preset", preset.name}, {"config", to_json(preset.tensor_config)}};
        return f;
    }
    MatrixSample s = sample_matrix_normal_dataset(preset.matrix);
    DatasetFile f{std::move(s.data), {}, Json::object()};
    f.truth.emplace("rows", s.rows);
    f.truth.emplace("cols", s.cols);
    if (s.rows_mean) {
        f.truth.emplace("rows_mean", *s.rows_mean);
        f.truth.emplace("cols_mean", *s.cols_mean);
    }
    f.provenance = {{"preset", preset.name}, {"config", to_json(preset.matrix)}};
    return f;
}

}  // namespace covclust::cli
