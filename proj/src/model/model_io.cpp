#include "swarmupdate/model/model_io.hpp"

#include <fstream>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>

#include "byte_io.hpp"

namespace swarmupdate::model {

FormatError::FormatError(std::string field, std::uint64_t offset, const std::string& what)
    : ModelError(what), field_(std::move(field)), offset_(offset) {}

namespace detail {

std::vector<std::uint8_t> read_all(std::istream& in) {
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed to read input stream");
  return bytes;
}

void write_all(std::ostream& out, const std::vector<std::uint8_t>& bytes) {
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed to write output stream");
}

}  // namespace detail

namespace {

void check_encodable(const Tensor& t) {
  if (t.name.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw ModelError("tensor name '" + t.name.substr(0, 32) + "...' exceeds 65535 bytes");
  }
  if (t.shape.size() > std::numeric_limits<std::uint8_t>::max()) {
    throw ModelError("tensor '" + t.name + "' has rank above 255");
  }
}

}  // namespace

std::uint64_t serialized_size(const NamedTensorModel& model) {
  std::uint64_t n = 8;
  for (const auto& t : model.entries()) {
    n += 2 + t.name.size() + 1 + 4 * t.shape.size() + 1 + 4 * t.data.size();
  }
  return n;
}

std::vector<std::uint8_t> serialize_model(const NamedTensorModel& model) {
  std::vector<std::uint8_t> out;
  out.reserve(serialized_size(model));
  detail::ByteWriter w(out);
  w.bytes(kModelMagic, 4);
  w.u32(static_cast<std::uint32_t>(model.size()));
  for (const auto& t : model.entries()) {
    check_encodable(t);
    w.u16(static_cast<std::uint16_t>(t.name.size()));
    w.str(t.name);
    w.u8(static_cast<std::uint8_t>(t.shape.size()));
    for (auto d : t.shape) w.u32(d);
    w.u8(kDtypeF32);
    w.floats(t.data);
  }
  return out;
}

NamedTensorModel deserialize_model(const std::vector<std::uint8_t>& bytes) {
  detail::ByteReader r(bytes.data(), bytes.size());
  char magic[4];
  r.raw(magic, 4, "magic");
  if (std::memcmp(magic, kModelMagic, 4) != 0) {
    throw FormatError("magic", 0, "bad magic: not a named-tensor model file");
  }
  const auto count = r.u32("entry count");
  NamedTensorModel model;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string where = "entry " + std::to_string(i);
    const auto entry_offset = r.offset();
    Tensor t;
    t.name = r.str(r.u16(where + " name length"), where + " name");
    const std::string field = "entry '" + t.name + "'";
    const auto rank = r.u8(field + " rank");
    t.shape.resize(rank);
    for (auto& d : t.shape) {
      d = r.u32(field + " dims");
      if (d == 0) throw FormatError(field + " dims", r.offset() - 4, field + " has a zero dimension");
    }
    const auto dtype_offset = r.offset();
    if (r.u8(field + " dtype") != kDtypeF32) {
      throw FormatError(field + " dtype", dtype_offset, field + " has an unsupported dtype tag");
    }
    t.data = r.floats(element_count(t.shape), field + " payload");
    if (model.find(t.name)) {
      throw FormatError(field + " name", entry_offset, "duplicate entry name '" + t.name + "'");
    }
    model.add(std::move(t));
  }
  if (r.remaining() != 0) {
    throw FormatError("trailer", r.offset(), std::to_string(r.remaining()) + " trailing bytes after last entry");
  }
  return model;
}

std::uint64_t save_model(const NamedTensorModel& model, std::ostream& sink) {
  auto bytes = serialize_model(model);
  detail::write_all(sink, bytes);
  return bytes.size();
}

NamedTensorModel load_model(std::istream& source) { return deserialize_model(detail::read_all(source)); }

std::uint64_t save_model_file(const NamedTensorModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return save_model(model, out);
}

NamedTensorModel load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return load_model(in);
}

}  // namespace swarmupdate::model
