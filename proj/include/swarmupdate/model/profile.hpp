#pragma once

#include <cstdint>

#include "swarmupdate/model/tensor_model.hpp"
#include "swarmupdate/model/update.hpp"

namespace swarmupdate::model {

struct ModelProfile {
  NamedTensorModel model;
  FreezeSpec freeze;  // frozen_prefix_count left at 0
};

/// SqueezeNet-shaped fixture: a stem convolution, eight fire modules and a
/// five-class classifier. Channel widths are fixed constants chosen so that
/// patches with 0, 4, 6 and 7 frozen fire modules need exactly 240, 192, 128
/// and 64 packets of 12500 bytes (see docs/synthetic_profile.md).
/// Weights are drawn from a fixed-seed generator unless `seed` is given.
ModelProfile synthetic_squeezenet_profile(std::uint64_t seed = 0x5eed5);

}  // namespace swarmupdate::model
