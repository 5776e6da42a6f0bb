#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "swarmupdate/model/tensor_model.hpp"

namespace swarmupdate::model {

/// Malformed model or patch bytes. `field()` names what was being decoded and
/// `offset()` is the byte position where decoding failed.
class FormatError : public ModelError {
 public:
  FormatError(std::string field, std::uint64_t offset, const std::string& what);

  const std::string& field() const { return field_; }
  std::uint64_t offset() const { return offset_; }

 private:
  std::string field_;
  std::uint64_t offset_;
};

class IoError : public ModelError {
 public:
  using ModelError::ModelError;
};

inline constexpr char kModelMagic[4] = {'N', 'T', 'M', '1'};
inline constexpr std::uint8_t kDtypeF32 = 0;

// Model file layout (little-endian):
//   "NTM1" | u32 entry count | entries...
//   entry: u16 name length | UTF-8 name | u8 rank | rank x u32 dims | u8 dtype | f32 payload

/// Writes the canonical encoding and returns the number of bytes written.
std::uint64_t save_model(const NamedTensorModel& model, std::ostream& sink);
NamedTensorModel load_model(std::istream& source);

std::vector<std::uint8_t> serialize_model(const NamedTensorModel& model);
NamedTensorModel deserialize_model(const std::vector<std::uint8_t>& bytes);

/// Size of the canonical encoding without materializing it.
std::uint64_t serialized_size(const NamedTensorModel& model);

std::uint64_t save_model_file(const NamedTensorModel& model, const std::filesystem::path& path);
NamedTensorModel load_model_file(const std::filesystem::path& path);

}  // namespace swarmupdate::model
