#include "cfo/dataset_io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cfo/errors.hpp"

namespace cfo {

using nlohmann::json;

namespace {

constexpr std::string_view kMagic = "CFODATA1";

static_assert(std::endian::native == std::endian::little,
              "dataset encoding assumes a little-endian host");

json header_of(const TrajectorySet& set) {
    json h;
    h["format"] = "cfo-dataset";
    h["format_version"] = kDatasetFormatVersion;
    h["system"] = set.system;
    h["state_dim"] = set.state_dim;
    h["raw_horizon"] = set.raw_horizon;
    h["metadata"] = set.metadata;
    json trajs = json::array();
    for (const auto& tr : set.trajectories) {
        trajs.push_back({{"times", std::vector<double>(tr.grid.times().begin(),
                                                       tr.grid.times().end())}});
    }
    h["trajectories"] = std::move(trajs);
    return h;
}

TrajectorySet skeleton_from(const json& h) {
    if (h.value("format", "") != "cfo-dataset") {
        throw InvalidArgument("not a cfo dataset");
    }
    if (h.at("format_version").get<int>() != kDatasetFormatVersion) {
        throw InvalidArgument("unsupported dataset format version");
    }
    TrajectorySet set;
    set.system = h.at("system").get<std::string>();
    set.state_dim = h.at("state_dim").get<std::size_t>();
    set.raw_horizon = h.at("raw_horizon").get<double>();
    set.metadata = h.at("metadata").get<std::map<std::string, double>>();
    for (const auto& t : h.at("trajectories")) {
        TimeGrid grid(t.at("times").get<std::vector<double>>(), set.raw_horizon);
        Eigen::MatrixXd states(static_cast<Eigen::Index>(set.state_dim),
                               static_cast<Eigen::Index>(grid.size()));
        set.trajectories.push_back({std::move(grid), std::move(states)});
    }
    return set;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void dump(const std::filesystem::path& path, std::string_view bytes) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

} // namespace

std::string encode_dataset(const TrajectorySet& set, DatasetFormat format) {
    set.validate();
    json h = header_of(set);
    if (format == DatasetFormat::Json) {
        for (std::size_t i = 0; i < set.size(); ++i) {
            const auto& s = set.trajectories[i].states;
            h["trajectories"][i]["states"] =
                std::vector<double>(s.data(), s.data() + s.size());
        }
        return h.dump() + "\n";
    }
    const std::string text = h.dump();
    std::string out;
    out.append(kMagic);
    const std::uint64_t len = text.size();
    out.append(reinterpret_cast<const char*>(&len), sizeof len);
    out.append(text);
    for (const auto& tr : set.trajectories) {
        // Eigen is column-major: column = time, so data() is already time-major/component-minor.
        out.append(reinterpret_cast<const char*>(tr.states.data()),
                   static_cast<std::size_t>(tr.states.size()) * sizeof(double));
    }
    return out;
}

TrajectorySet decode_dataset(std::string_view bytes) {
    try {
        if (bytes.substr(0, kMagic.size()) == kMagic) {
            std::uint64_t len = 0;
            if (bytes.size() < kMagic.size() + sizeof len) {
                throw InvalidArgument("truncated dataset header");
            }
            std::memcpy(&len, bytes.data() + kMagic.size(), sizeof len);
            std::size_t pos = kMagic.size() + sizeof len;
            if (bytes.size() < pos + len) {
                throw InvalidArgument("truncated dataset header");
            }
            TrajectorySet set = skeleton_from(json::parse(bytes.substr(pos, len)));
            pos += len;
            for (auto& tr : set.trajectories) {
                const std::size_t n = static_cast<std::size_t>(tr.states.size()) * sizeof(double);
                if (bytes.size() < pos + n) {
                    throw InvalidArgument("truncated dataset payload");
                }
                std::memcpy(tr.states.data(), bytes.data() + pos, n);
                pos += n;
            }
            if (pos != bytes.size()) {
                throw InvalidArgument("trailing bytes after dataset payload");
            }
            set.validate();
            return set;
        }
        const json h = json::parse(bytes);
        TrajectorySet set = skeleton_from(h);
        for (std::size_t i = 0; i < set.size(); ++i) {
            const auto v = h.at("trajectories")[i].at("states").get<std::vector<double>>();
            auto& s = set.trajectories[i].states;
            if (v.size() != static_cast<std::size_t>(s.size())) {
                throw InvalidArgument("dataset states have the wrong length");
            }
            std::memcpy(s.data(), v.data(), v.size() * sizeof(double));
        }
        set.validate();
        return set;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed dataset: ") + e.what());
    }
}

void write_dataset(const std::filesystem::path& path, const TrajectorySet& set,
                   DatasetFormat format) {
    dump(path, encode_dataset(set, format));
}

TrajectorySet read_dataset(const std::filesystem::path& path) {
    return decode_dataset(slurp(path));
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    const auto& m = ckpt.model;
    const auto& c = m.config();
    const auto& n = m.normalization();
    auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    json j;
    j["format"] = "cfo-checkpoint";
    j["format_version"] = kCheckpointFormatVersion;
    j["kind"] = ckpt.kind == ModelKind::Cfo ? "cfo" : "ar";
    j["mlp"] = {{"state_dim", c.state_dim},
                {"hidden_dims", c.hidden_dims},
                {"embed_bands", c.embed_bands},
                {"use_time_embedding", c.use_time_embedding}};
    j["normalization"] = {{"in_mean", vec(n.in_mean)},
                          {"in_scale", vec(n.in_scale)},
                          {"out_mean", vec(n.out_mean)},
                          {"out_scale", vec(n.out_scale)}};
    j["info"] = ckpt.info;
    j["params"] = vec(m.params());
    dump(path, j.dump() + "\n");
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    try {
        const json j = json::parse(slurp(path));
        if (j.value("format", "") != "cfo-checkpoint" ||
            j.at("format_version").get<int>() != kCheckpointFormatVersion) {
            throw InvalidArgument(path.string() + " is not a supported cfo checkpoint");
        }
        auto vec = [](const json& a) {
            const auto v = a.get<std::vector<double>>();
            return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
        };
        MlpConfig c;
        c.state_dim = j.at("mlp").at("state_dim").get<std::size_t>();
        c.hidden_dims = j.at("mlp").at("hidden_dims").get<std::vector<std::size_t>>();
        c.embed_bands = j.at("mlp").at("embed_bands").get<int>();
        c.use_time_embedding = j.at("mlp").at("use_time_embedding").get<bool>();
        const auto& jn = j.at("normalization");
        Normalization n{vec(jn.at("in_mean")), vec(jn.at("in_scale")), vec(jn.at("out_mean")),
                        vec(jn.at("out_scale"))};
        Checkpoint ck;
        ck.kind = j.at("kind").get<std::string>() == "ar" ? ModelKind::Autoregressive : ModelKind::Cfo;
        ck.model = VectorField(c, vec(j.at("params")), std::move(n));
        ck.info = j.at("info").get<std::map<std::string, std::string>>();
        return ck;
    } catch (const json::exception& e) {
        throw InvalidArgument("malformed checkpoint " + path.string() + ": " + e.what());
    }
}

std::string fingerprint(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

CsvTable::CsvTable(std::vector<std::string> columns, std::string fp)
    : columns_(std::move(columns)), fingerprint_(std::move(fp)) {}

void CsvTable::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size()) {
        throw InvalidArgument("CsvTable: row has " + std::to_string(cells.size()) +
                              " cells, expected " + std::to_string(columns_.size()));
    }
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) {
            line += ',';
        }
        line += cells[i];
    }
    rows_.push_back(std::move(line));
}

std::string CsvTable::str() const {
    std::string out = "# fingerprint=" + fingerprint_ + "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        out += (i ? "," : "") + columns_[i];
    }
    out += '\n';
    for (const auto& r : rows_) {
        out += r + '\n';
    }
    return out;
}

void CsvTable::save(const std::filesystem::path& path) const { dump(path, str()); }

} // namespace cfo
