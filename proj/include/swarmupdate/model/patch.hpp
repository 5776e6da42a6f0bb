#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "swarmupdate/model/digest.hpp"
#include "swarmupdate/model/model_io.hpp"
#include "swarmupdate/model/tensor_model.hpp"

namespace swarmupdate::model {

enum class PatchKind : std::uint8_t { Delta = 0, Full = 1 };

struct PatchEntry {
  std::string name;
  PatchKind kind = PatchKind::Full;
  Shape shape;
  std::vector<float> data;
};

struct PatchFile {
  Digest base_model_hash{};
  Digest target_model_hash{};
  std::vector<PatchEntry> entries;
  /// Exact size of the serialized patch in bytes.
  std::uint64_t payload_bytes = 0;
};

class WrongBaseError : public ModelError {
 public:
  using ModelError::ModelError;
};

class CorruptPatchError : public ModelError {
 public:
  using ModelError::ModelError;
};

inline constexpr char kPatchMagic[4] = {'N', 'T', 'P', '1'};
inline constexpr std::uint64_t kPatchHeaderBytes = 4 + 32 + 32 + 4;

// Patch file layout (little-endian):
//   "NTP1" | 32-byte base hash | 32-byte target hash | u32 entry count | entries...
//   entry: u16 name length | name | u8 kind | u8 rank | rank x u32 dims | u8 dtype | f32 payload

/// Diff two model versions.
///
/// Every tensor of `updated` that is new, reshaped or changed in any bit gets
/// an entry; bit-identical tensors are omitted. Changed tensors are encoded
/// as deltas when base + delta reproduces them exactly in float32, and as
/// full replacements otherwise.
PatchFile generate_patch(const NamedTensorModel& base, const NamedTensorModel& updated);

/// Apply a patch: deltas are added to matching tensors, full entries replace
/// or insert. Throws WrongBaseError when the base hash does not match and
/// CorruptPatchError for a delta that does not fit the base or a result
/// whose hash differs from the target hash.
NamedTensorModel apply_patch(const NamedTensorModel& base, const PatchFile& patch);

std::uint64_t patch_serialized_size(const PatchFile& patch);
std::vector<std::uint8_t> serialize_patch(const PatchFile& patch);
PatchFile deserialize_patch(const std::vector<std::uint8_t>& bytes);

std::uint64_t save_patch(const PatchFile& patch, std::ostream& sink);
PatchFile load_patch(std::istream& source);
std::uint64_t save_patch_file(const PatchFile& patch, const std::filesystem::path& path);
PatchFile load_patch_file(const std::filesystem::path& path);

/// ceil(payload_bytes / packet_size_bytes); throws std::invalid_argument on a zero packet size.
std::uint64_t packet_count(std::uint64_t payload_bytes, std::uint64_t packet_size_bytes);

}  // namespace swarmupdate::model
