#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "swarmupdate/model/tensor_model.hpp"

namespace swarmupdate::model {

using Digest = std::array<std::uint8_t, 32>;

/// SHA-256 of a byte range.
Digest sha256(std::span<const std::uint8_t> bytes);

/// SHA-256 of the canonical model serialization.
Digest model_digest(const NamedTensorModel& model);

std::string to_hex(const Digest& digest);

}  // namespace swarmupdate::model
