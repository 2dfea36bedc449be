#pragma once

// On-disk formats. All numbers are little-endian regardless of host order.
//
// Snapshot file:
//   "PDMD1"            5 bytes magic
//   'L'                1 byte endianness tag
//   u64 n, u64 columns (T+1), f64 dt, u64 p, p x f64 theta
//   u64 label length, label bytes (UTF-8, no terminator)
//   n * columns x f64 states, column-major
//
// Model file:
//   "PDMDM"            5 bytes magic
//   'L'                1 byte endianness tag
//   u32 format version
//   u64 header length, header bytes: JSON with sorted keys holding the method
//       id, metadata and the ordered list of matrices {name, rows, cols}
//   each matrix's rows * cols x f64, column-major, in header order

#include "pidmd/baselines.hpp"
#include "pidmd/dmd.hpp"
#include "pidmd/pidmd.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace pidmd {

inline constexpr std::string_view kSnapshotMagic = "PDMD1";
inline constexpr std::string_view kModelMagic = "PDMDM";
inline constexpr std::uint32_t kModelFormatVersion = 1;

std::string encode_snapshot(const SnapshotSet& s);
SnapshotSet decode_snapshot(std::string_view bytes);

void write_snapshot_file(const std::filesystem::path& path, const SnapshotSet& s);
SnapshotSet read_snapshot_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

/// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

enum class Method { ExactDMD, PiDMD, Stacked, RKOI };

std::string_view method_id(Method method);
Method method_from_id(std::string_view id);

using AnyModel = std::variant<DMDModel, PiDMDModel, StackedDMDModel, RKOIModel>;

struct ModelFile {
  AnyModel model;
  std::string config_hash;

  Method method() const;
};

std::string encode_model(const ModelFile& file);
ModelFile decode_model(std::string_view bytes);

void write_model_file(const std::filesystem::path& path, const ModelFile& file);
ModelFile read_model_file(const std::filesystem::path& path);

}  // namespace pidmd
