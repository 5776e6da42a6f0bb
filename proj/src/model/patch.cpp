#include "swarmupdate/model/patch.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

#include "byte_io.hpp"
#include "swarmupdate/model/kernels.hpp"

namespace swarmupdate::model {

PatchFile generate_patch(const NamedTensorModel& base, const NamedTensorModel& updated) {
  PatchFile patch;
  patch.base_model_hash = model_digest(base);
  patch.target_model_hash = model_digest(updated);

  for (const auto& t : updated.entries()) {
    const Tensor* old = base.find(t.name);
    if (old == nullptr || old->shape != t.shape) {
      patch.entries.push_back({t.name, PatchKind::Full, t.shape, t.data});
      continue;
    }
    if (kernels::bit_identical(old->data, t.data)) continue;  // frozen

    PatchEntry entry{t.name, PatchKind::Delta, t.shape, std::vector<float>(t.data.size())};
    if (!kernels::compute_delta(old->data, t.data, entry.data)) {
      entry.kind = PatchKind::Full;
      entry.data = t.data;
    }
    patch.entries.push_back(std::move(entry));
  }
  patch.payload_bytes = patch_serialized_size(patch);
  return patch;
}

NamedTensorModel apply_patch(const NamedTensorModel& base, const PatchFile& patch) {
  if (model_digest(base) != patch.base_model_hash) {
    throw WrongBaseError("base model hash " + to_hex(model_digest(base)) + " does not match patch base " +
                         to_hex(patch.base_model_hash));
  }
  NamedTensorModel result = base;
  for (const auto& e : patch.entries) {
    if (element_count(e.shape) != e.data.size()) {
      throw CorruptPatchError("patch entry '" + e.name + "' payload does not match its shape");
    }
    if (e.kind == PatchKind::Delta) {
      Tensor* target = result.find(e.name);
      if (target == nullptr) throw CorruptPatchError("delta entry '" + e.name + "' has no matching base tensor");
      if (target->shape != e.shape) throw CorruptPatchError("delta entry '" + e.name + "' shape differs from base");
      kernels::add_inplace(target->data, e.data);
    } else {
      result.upsert({e.name, e.shape, e.data});
    }
  }
  if (model_digest(result) != patch.target_model_hash) {
    throw CorruptPatchError("patched model hash does not match the patch target hash");
  }
  return result;
}

std::uint64_t patch_serialized_size(const PatchFile& patch) {
  std::uint64_t n = kPatchHeaderBytes;
  for (const auto& e : patch.entries) {
    n += 2 + e.name.size() + 1 + 1 + 4 * e.shape.size() + 1 + 4 * e.data.size();
  }
  return n;
}

std::vector<std::uint8_t> serialize_patch(const PatchFile& patch) {
  std::vector<std::uint8_t> out;
  out.reserve(patch_serialized_size(patch));
  detail::ByteWriter w(out);
  w.bytes(kPatchMagic, 4);
  w.bytes(patch.base_model_hash.data(), 32);
  w.bytes(patch.target_model_hash.data(), 32);
  w.u32(static_cast<std::uint32_t>(patch.entries.size()));
  for (const auto& e : patch.entries) {
    if (e.name.size() > 0xffff || e.shape.size() > 0xff) {
      throw ModelError("patch entry '" + e.name.substr(0, 32) + "' cannot be encoded");
    }
    w.u16(static_cast<std::uint16_t>(e.name.size()));
    w.str(e.name);
    w.u8(static_cast<std::uint8_t>(e.kind));
    w.u8(static_cast<std::uint8_t>(e.shape.size()));
    for (auto d : e.shape) w.u32(d);
    w.u8(kDtypeF32);
    w.floats(e.data);
  }
  return out;
}

PatchFile deserialize_patch(const std::vector<std::uint8_t>& bytes) {
  detail::ByteReader r(bytes.data(), bytes.size());
  char magic[4];
  r.raw(magic, 4, "magic");
  if (std::memcmp(magic, kPatchMagic, 4) != 0) throw FormatError("magic", 0, "bad magic: not a model patch file");
  PatchFile patch;
  r.raw(patch.base_model_hash.data(), 32, "base hash");
  r.raw(patch.target_model_hash.data(), 32, "target hash");
  const auto count = r.u32("entry count");
  std::unordered_set<std::string> names;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string where = "entry " + std::to_string(i);
    const auto entry_offset = r.offset();
    PatchEntry e;
    e.name = r.str(r.u16(where + " name length"), where + " name");
    if (e.name.empty()) throw FormatError(where + " name", entry_offset, where + " has an empty name");
    const std::string field = "entry '" + e.name + "'";
    const auto kind_offset = r.offset();
    const auto kind = r.u8(field + " kind");
    if (kind > 1) throw FormatError(field + " kind", kind_offset, field + " has unknown kind " + std::to_string(kind));
    e.kind = static_cast<PatchKind>(kind);
    e.shape.resize(r.u8(field + " rank"));
    for (auto& d : e.shape) {
      d = r.u32(field + " dims");
      if (d == 0) throw FormatError(field + " dims", r.offset() - 4, field + " has a zero dimension");
    }
    const auto dtype_offset = r.offset();
    if (r.u8(field + " dtype") != kDtypeF32) {
      throw FormatError(field + " dtype", dtype_offset, field + " has an unsupported dtype tag");
    }
    e.data = r.floats(element_count(e.shape), field + " payload");
    if (!names.insert(e.name).second) {
      throw FormatError(field + " name", entry_offset, "duplicate patch entry '" + e.name + "'");
    }
    patch.entries.push_back(std::move(e));
  }
  if (r.remaining() != 0) {
    throw FormatError("trailer", r.offset(), std::to_string(r.remaining()) + " trailing bytes after last entry");
  }
  patch.payload_bytes = bytes.size();
  return patch;
}

std::uint64_t save_patch(const PatchFile& patch, std::ostream& sink) {
  auto bytes = serialize_patch(patch);
  detail::write_all(sink, bytes);
  return bytes.size();
}

PatchFile load_patch(std::istream& source) { return deserialize_patch(detail::read_all(source)); }

std::uint64_t save_patch_file(const PatchFile& patch, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return save_patch(patch, out);
}

PatchFile load_patch_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return load_patch(in);
}

std::uint64_t packet_count(std::uint64_t payload_bytes, std::uint64_t packet_size_bytes) {
  if (packet_size_bytes == 0) throw std::invalid_argument("packet size must be positive");
  return payload_bytes / packet_size_bytes + (payload_bytes % packet_size_bytes != 0 ? 1 : 0);
}

}  // namespace swarmupdate::model
