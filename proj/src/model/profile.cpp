#include "swarmupdate/model/profile.hpp"

#include <array>
#include <cmath>
#include <random>
#include <string>

namespace swarmupdate::model {

namespace {

struct FireWidths {
  std::uint32_t squeeze;
  std::uint32_t expand;  // per branch; the module outputs 2 * expand channels
};

constexpr std::uint32_t kStemChannels = 64;
constexpr std::uint32_t kClasses = 5;
constexpr std::array<FireWidths, 8> kFire{{
    {48, 56}, {56, 56}, {56, 56}, {56, 64}, {64, 64}, {120, 112}, {120, 144}, {48, 376},
}};

void add_conv(NamedTensorModel& model, std::mt19937_64& rng, const std::string& prefix, std::uint32_t out,
              std::uint32_t in, std::uint32_t k) {
  const double fan_in = static_cast<double>(in) * k * k;
  std::uniform_real_distribution<float> w(static_cast<float>(-1.0 / std::sqrt(fan_in)),
                                          static_cast<float>(1.0 / std::sqrt(fan_in)));
  Tensor weight{prefix + ".weight", {out, in, k, k}, {}};
  weight.data.resize(element_count(weight.shape));
  for (auto& v : weight.data) v = w(rng);
  Tensor bias{prefix + ".bias", {out}, std::vector<float>(out)};
  for (auto& v : bias.data) v = w(rng);
  model.add(std::move(weight));
  model.add(std::move(bias));
}

}  // namespace

ModelProfile synthetic_squeezenet_profile(std::uint64_t seed) {
  ModelProfile profile;
  std::mt19937_64 rng(seed);
  add_conv(profile.model, rng, "stem.conv", kStemChannels, 3, 3);
  std::uint32_t in = kStemChannels;
  for (std::size_t i = 0; i < kFire.size(); ++i) {
    const std::string name = "fire" + std::to_string(i + 1);
    add_conv(profile.model, rng, name + ".squeeze", kFire[i].squeeze, in, 1);
    add_conv(profile.model, rng, name + ".expand1x1", kFire[i].expand, kFire[i].squeeze, 1);
    add_conv(profile.model, rng, name + ".expand3x3", kFire[i].expand, kFire[i].squeeze, 3);
    profile.freeze.module_names.push_back(name);
    in = 2 * kFire[i].expand;
  }
  add_conv(profile.model, rng, "classifier", kClasses, in, 1);
  profile.freeze.classifier_name = "classifier";
  return profile;
}

}  // namespace swarmupdate::model
