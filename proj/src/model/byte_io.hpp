#pragma once

// Little-endian encode/decode helpers shared by the model and patch codecs.

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include "swarmupdate/model/model_io.hpp"

namespace swarmupdate::model::detail {

class ByteWriter {
 public:
  explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  void bytes(const void* p, std::size_t n) {
    auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { put_le(v); }
  void u32(std::uint32_t v) { put_le(v); }
  void str(std::string_view s) { bytes(s.data(), s.size()); }

  void floats(const std::vector<float>& v) {
    if constexpr (std::endian::native == std::endian::little) {
      if (!v.empty()) bytes(v.data(), v.size() * sizeof(float));
    } else {
      for (float f : v) u32(std::bit_cast<std::uint32_t>(f));
    }
  }

 private:
  template <typename T>
  void put_le(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  std::vector<std::uint8_t>& out_;
};

class ByteReader {
 public:
  ByteReader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return size_ - pos_; }

  void need(std::size_t n, const std::string& field) const {
    if (remaining() < n) {
      throw FormatError(field, pos_,
                        "truncated " + field + ": need " + std::to_string(n) + " bytes at offset " +
                            std::to_string(pos_) + ", " + std::to_string(remaining()) + " left");
    }
  }

  std::uint8_t u8(const std::string& field) {
    need(1, field);
    return data_[pos_++];
  }
  std::uint16_t u16(const std::string& field) { return get_le<std::uint16_t>(field); }
  std::uint32_t u32(const std::string& field) { return get_le<std::uint32_t>(field); }

  std::string str(std::size_t n, const std::string& field) {
    need(n, field);
    std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
    pos_ += n;
    return s;
  }

  void raw(void* dst, std::size_t n, const std::string& field) {
    need(n, field);
    std::memcpy(dst, data_ + pos_, n);
    pos_ += n;
  }

  std::vector<float> floats(std::uint64_t count, const std::string& field) {
    if (count > remaining() / sizeof(float)) need(count * sizeof(float), field);
    std::vector<float> v(count);
    if constexpr (std::endian::native == std::endian::little) {
      if (count) raw(v.data(), count * sizeof(float), field);
    } else {
      for (auto& f : v) f = std::bit_cast<float>(u32(field));
    }
    return v;
  }

 private:
  template <typename T>
  T get_le(const std::string& field) {
    need(sizeof(T), field);
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(T(data_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return v;
  }

  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_all(std::istream& in);
void write_all(std::ostream& out, const std::vector<std::uint8_t>& bytes);

}  // namespace swarmupdate::model::detail
