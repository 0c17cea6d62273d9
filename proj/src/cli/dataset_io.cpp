#include "covclust/cli/dataset_io.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

namespace covclust::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kFormat = "covclust-dataset";
constexpr int kVersion = 1;
constexpr const char* kDataFile = "data.txt";

std::size_t get_size(const Json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_unsigned()) {
        throw FormatError(std::string("manifest: missing or invalid \"") + key + "\"");
    }
    return j[key].get<std::size_t>();
}

std::vector<double> read_values(const fs::path& path, std::size_t n, std::size_t per_line) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    std::vector<double> values;
    values.reserve(n * per_line);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        ++lines;
        std::size_t count = 0;
        const char* p = line.data();
        const char* end = p + line.size();
        while (p < end) {
            while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) {
                ++p;
            }
            if (p == end) {
                break;
            }
            double v = 0.0;
            auto [next, ec] = std::from_chars(p, end, v);
            if (ec != std::errc()) {
                throw FormatError(path.string() + ": bad number on line " + std::to_string(lines));
            }
            values.push_back(v);
            ++count;
            p = next;
        }
        if (count != per_line) {
            throw FormatError(path.string() + ": line " + std::to_string(lines) + " has " + std::to_string(count) +
                              " values, expected " + std::to_string(per_line));
        }
    }
    if (lines != n) {
        throw FormatError(path.string() + ": " + std::to_string(lines) + " lines, manifest says n = " +
                          std::to_string(n));
    }
    return values;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    for (int precision = 15; precision <= 17; ++precision) {
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, precision);
        double back = 0.0;
        std::from_chars(buf, end, back);
        if (back == v || precision == 17) {
            return std::string(buf, end);
        }
    }
    return {};
}

std::string format_double17(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, end);
}

Json partition_to_json(const Partition& part) {
    return Json(part.labels());
}

Partition partition_from_json(const Json& labels) {
    if (!labels.is_array() || labels.empty()) {
        throw FormatError("partition must be a non-empty array of integer labels");
    }
    std::vector<std::int64_t> ids;
    ids.reserve(labels.size());
    for (const auto& v : labels) {
        if (!v.is_number_integer()) {
            throw FormatError("partition labels must be integers");
        }
        ids.push_back(v.get<std::int64_t>());
    }
    return partition_from_labels(std::span<const std::int64_t>(ids));
}

Json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const Json& value) {
    std::ofstream out(path);
    if (!out) {
        throw FormatError("cannot write " + path.string());
    }
    out << value.dump(2) << '\n';
}

void write_dataset(const fs::path& dir, const DatasetFile& file) {
    fs::create_directories(dir);
    Json m;
    m["format"] = kFormat;
    m["version"] = kVersion;
    m["layout"] = "row-major";
    m["data_file"] = kDataFile;
    std::size_t per_line = 0;
    const std::vector<double>* values = nullptr;
    std::size_t n = 0;
    if (const auto* d = std::get_if<DataSet>(&file.data)) {
        m["kind"] = "matrix";
        m["n"] = d->n();
        m["p"] = d->p();
        m["q"] = d->q();
        per_line = d->p() * d->q();
        values = &d->values();
        n = d->n();
    } else {
        const auto& t = std::get<TensorDataSet>(file.data);
        m["kind"] = "tensor";
        m["n"] = t.n();
        m["shape"] = t.shape();
        per_line = t.sample_size();
        values = &t.values();
        n = t.n();
    }
    Json truth = Json::object();
    for (const auto& [name, part] : file.truth) {
        truth[name] = partition_to_json(part);
    }
    m["truth"] = truth;
    m["provenance"] = file.provenance;
    write_json(dir / "manifest.json", m);

    std::ofstream out(dir / kDataFile);
    if (!out) {
        throw FormatError("cannot write " + (dir / kDataFile).string());
    }
    std::string line;
    for (std::size_t i = 0; i < n; ++i) {
        line.clear();
        for (std::size_t j = 0; j < per_line; ++j) {
            if (j > 0) {
                line += ' ';
            }
            line += format_double17((*values)[i * per_line + j]);
        }
        line += '\n';
        out << line;
    }
    if (!out) {
        throw FormatError("error writing " + (dir / kDataFile).string());
    }
}

namespace {

// Number of labels a truth partition of this name must carry; unknown names are not checked.
std::optional<std::size_t> truth_length(const DatasetFile& file, const std::string& name) {
    if (const auto* d = std::get_if<DataSet>(&file.data)) {
        if (name == "rows" || name == "rows_mean") return d->p();
        if (name == "cols" || name == "cols_mean") return d->q();
        return std::nullopt;
    }
    const auto& shape = std::get<TensorDataSet>(file.data).shape();
    for (std::size_t k = 0; k < 3; ++k) {
        if (name == "mode" + std::to_string(k + 1)) return shape[k];
    }
    return std::nullopt;
}

}  // namespace

DatasetFile read_dataset(const fs::path& dir) {
    const Json m = read_json(dir / "manifest.json");
    if (m.value("format", "") != kFormat) {
        throw FormatError("manifest: not a covclust data set");
    }
    if (m.value("version", 0) != kVersion) {
        throw FormatError("manifest: unsupported version");
    }
    if (m.value("layout", "") != "row-major") {
        throw FormatError("manifest: layout must be \"row-major\"");
    }
    const std::string data_file = m.value("data_file", kDataFile);
    const std::string kind = m.value("kind", "");
    const std::size_t n = get_size(m, "n");

    DatasetFile file{DataSet(1, 1, 1, {0.0}), {}, m.value("provenance", Json::object())};
    try {
        if (kind == "matrix") {
            const std::size_t p = get_size(m, "p");
            const std::size_t q = get_size(m, "q");
            file.data = DataSet(n, p, q, read_values(dir / data_file, n, p * q));
        } else if (kind == "tensor") {
            if (!m.contains("shape") || !m["shape"].is_array() || m["shape"].size() != 3) {
                throw FormatError("manifest: tensor shape must have three entries");
            }
            const auto shape = m["shape"].get<TensorShape>();
            file.data = TensorDataSet(n, shape, read_values(dir / data_file, n, shape[0] * shape[1] * shape[2]));
        } else {
            throw FormatError("manifest: kind must be \"matrix\" or \"tensor\"");
        }
    } catch (const ArgumentError& e) {
        throw FormatError(std::string("data set: ") + e.what());
    }
    if (m.contains("truth")) {
        for (const auto& [name, labels] : m["truth"].items()) {
            Partition part = partition_from_json(labels);
            const std::optional<std::size_t> expected = truth_length(file, name);
            if (expected && part.size() != *expected) {
                throw FormatError("manifest: truth '" + name + "' has " + std::to_string(part.size()) +
                                  " labels, expected " + std::to_string(*expected));
            }
            file.truth.emplace(name, std::move(part));
        }
    }
    return file;
}

std::map<std::string, Partition> read_partitions(const fs::path& path) {
    const Json j = read_json(fs::is_directory(path) ? path / "manifest.json" : path);
    const char* key = j.contains("partitions") ? "partitions" : "truth";
    if (!j.contains(key) || !j[key].is_object()) {
        throw FormatError(path.string() + ": no partitions or truth found");
    }
    std::map<std::string, Partition> out;
    for (const auto& [name, labels] : j[key].items()) {
        out.emplace(name, partition_from_json(labels));
    }
    return out;
}

}  // namespace covclust::cli
