#include "swarmupdate/model/digest.hpp"

#include <openssl/evp.h>

#include "swarmupdate/model/model_io.hpp"

namespace swarmupdate::model {

Digest sha256(std::span<const std::uint8_t> bytes) {
  Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 || len != out.size()) {
    throw ModelError("SHA-256 computation failed");
  }
  return out;
}

Digest model_digest(const NamedTensorModel& model) {
  const auto bytes = serialize_model(model);
  return sha256(bytes);
}

std::string to_hex(const Digest& digest) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s;
  s.reserve(64);
  for (auto b : digest) {
    s.push_back(kHex[b >> 4]);
    s.push_back(kHex[b & 0xf]);
  }
  return s;
}

}  // namespace swarmupdate::model
