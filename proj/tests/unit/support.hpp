#pragma once

#include <random>
#include <string>

#include "swarmupdate/model/tensor_model.hpp"

namespace test_support {

/// Small random model: 1-6 tensors of rank 0-3 with normal weights.
inline swarmupdate::model::NamedTensorModel random_model(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count(1, 6), rank(0, 3), dim(1, 7);
  std::normal_distribution<float> value(0.0f, 1.0f);
  swarmupdate::model::NamedTensorModel m;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    swarmupdate::model::Tensor t;
    t.name = "layer" + std::to_string(i) + ".weight";
    t.shape.resize(static_cast<std::size_t>(rank(rng)));
    for (auto& d : t.shape) d = static_cast<std::uint32_t>(dim(rng));
    t.data.resize(swarmupdate::model::element_count(t.shape));
    for (auto& v : t.data) v = value(rng);
    m.add(std::move(t));
  }
  return m;
}

}  // namespace test_support
