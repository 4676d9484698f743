#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cfo/systems.hpp"
#include "cfo/vector_field.hpp"

namespace cfo {

/// Dataset container layouts.
///
/// Binary: the 8 bytes "CFODATA1", a little-endian uint64 header length, a
/// JSON header (system, state_dim, raw_horizon, metadata, per-trajectory
/// times), then every state as a little-endian float64 in trajectory-major,
/// time-major, component-minor order.
/// Json: a single JSON document carrying the header plus the states.
enum class DatasetFormat { Binary, Json };

inline constexpr int kDatasetFormatVersion = 1;
inline constexpr int kCheckpointFormatVersion = 1;

void write_dataset(const std::filesystem::path& path, const TrajectorySet& set,
                   DatasetFormat format = DatasetFormat::Binary);
/// Detects the layout from the leading bytes.
[[nodiscard]] TrajectorySet read_dataset(const std::filesystem::path& path);

/// In-memory encoding (used for byte-level comparisons).
[[nodiscard]] std::string encode_dataset(const TrajectorySet& set, DatasetFormat format);
[[nodiscard]] TrajectorySet decode_dataset(std::string_view bytes);

/// Model kinds stored in checkpoints.
enum class ModelKind { Cfo, Autoregressive };

struct Checkpoint {
    ModelKind kind = ModelKind::Cfo;
    VectorField model;
    /// Free-form provenance (spline kind, keep rate, seed, fingerprint, ...).
    std::map<std::string, std::string> info;
};

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
[[nodiscard]] Checkpoint read_checkpoint(const std::filesystem::path& path);

/// 64-bit FNV-1a of `text`, as 16 hex digits.
[[nodiscard]] std::string fingerprint(std::string_view text);

/// Buffered CSV table; the first line is a "# fingerprint=<hex>" comment.
class CsvTable {
public:
    CsvTable(std::vector<std::string> columns, std::string fingerprint);
    void row(const std::vector<std::string>& cells);
    [[nodiscard]] std::string str() const;
    void save(const std::filesystem::path& path) const;
    [[nodiscard]] std::size_t rows() const noexcept { return rows_.size(); }

private:
    std::vector<std::string> columns_;
    std::string fingerprint_;
    std::vector<std::string> rows_;
};

/// Shortest round-trip decimal for a double.
[[nodiscard]] std::string format_double(double v);

} // namespace cfo
