#include "swarmupdate/model/update.hpp"

#include <cmath>
#include <random>

namespace swarmupdate::model {

namespace {

bool has_prefix(const std::string& name, const std::string& prefix) {
  return name.size() > prefix.size() && name.compare(0, prefix.size(), prefix) == 0 && name[prefix.size()] == '.';
}

constexpr float kClassifierBound = 0.05F;
constexpr double kNoiseScale = 0.01;
// Used when a trainable tensor is all zeros, so it still changes.
constexpr double kNoiseFloor = 1e-3;

}  // namespace

NamedTensorModel simulate_update(const NamedTensorModel& model, const FreezeSpec& spec, std::uint64_t seed) {
  if (spec.frozen_prefix_count > spec.module_names.size()) {
    throw ConfigurationError("frozen_prefix_count " + std::to_string(spec.frozen_prefix_count) + " exceeds the " +
                             std::to_string(spec.module_names.size()) + " listed modules");
  }
  if (spec.classifier_name.empty()) throw ConfigurationError("freeze spec has no classifier name");

  std::vector<bool> module_seen(spec.module_names.size(), false);
  bool classifier_seen = false;

  std::mt19937_64 rng(seed);
  NamedTensorModel out;
  for (const auto& t : model.entries()) {
    Tensor next = t;
    if (has_prefix(t.name, spec.classifier_name)) {
      classifier_seen = true;
      std::uniform_real_distribution<float> init(-kClassifierBound, kClassifierBound);
      for (auto& v : next.data) v = init(rng);
      out.add(std::move(next));
      continue;
    }

    bool frozen = spec.frozen_prefix_count > 0;  // stem unless a module claims it
    for (std::size_t m = 0; m < spec.module_names.size(); ++m) {
      if (has_prefix(t.name, spec.module_names[m])) {
        module_seen[m] = true;
        frozen = m < spec.frozen_prefix_count;
        break;
      }
    }
    if (!frozen) {
      double sum_sq = 0.0;
      for (float v : t.data) sum_sq += static_cast<double>(v) * v;
      const double rms = t.data.empty() ? 0.0 : std::sqrt(sum_sq / static_cast<double>(t.data.size()));
      const double sigma = rms > 0.0 ? kNoiseScale * rms : kNoiseFloor;
      std::normal_distribution<double> noise(0.0, sigma);
      for (auto& v : next.data) v = static_cast<float>(v + noise(rng));
    }
    out.add(std::move(next));
  }

  for (std::size_t m = 0; m < module_seen.size(); ++m) {
    if (!module_seen[m]) throw ConfigurationError("unknown module '" + spec.module_names[m] + "' in freeze spec");
  }
  if (!classifier_seen) throw ConfigurationError("unknown classifier '" + spec.classifier_name + "' in freeze spec");
  return out;
}

}  // namespace swarmupdate::model
