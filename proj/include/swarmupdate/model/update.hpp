#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swarmupdate/model/tensor_model.hpp"

namespace swarmupdate::model {

/// Which convolutional modules stay frozen during a retraining round.
///
/// A tensor belongs to module `m` when its name starts with `m + "."`, and to
/// the classifier when it starts with `classifier_name + "."`. Tensors that
/// match neither (the stem in front of the first module) sit below every
/// module and freeze together with the first one.
struct FreezeSpec {
  std::size_t frozen_prefix_count = 0;
  std::vector<std::string> module_names;
  std::string classifier_name;
};

/// Deterministic stand-in for fine-tuning.
///
/// Frozen tensors are copied untouched, trainable tensors receive Gaussian
/// noise with sigma = 1% of the tensor RMS, and the classifier is redrawn
/// uniformly in [-0.05, 0.05]. Throws ConfigurationError when the spec names
/// a module or classifier that no tensor belongs to, or when
/// frozen_prefix_count exceeds the module count.
NamedTensorModel simulate_update(const NamedTensorModel& model, const FreezeSpec& spec, std::uint64_t seed);

}  // namespace swarmupdate::model
