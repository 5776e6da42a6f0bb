#include "swarmupdate/model/kernels.hpp"

#include <bit>
#include <cstdint>
#include <stdexcept>

namespace swarmupdate::model::kernels {

namespace {

inline bool same_bits(float a, float b) { return std::bit_cast<std::uint32_t>(a) == std::bit_cast<std::uint32_t>(b); }

void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("kernel operands differ in length");
}

}  // namespace

bool compute_delta_serial(std::span<const float> base, std::span<const float> updated, std::span<float> delta) {
  require_same_size(base.size(), updated.size());
  require_same_size(base.size(), delta.size());
  bool exact = true;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const float d = updated[i] - base[i];
    delta[i] = d;
    exact = exact && same_bits(base[i] + d, updated[i]);
  }
  return exact;
}

bool compute_delta(std::span<const float> base, std::span<const float> updated, std::span<float> delta) {
  require_same_size(base.size(), updated.size());
  require_same_size(base.size(), delta.size());
  const auto n = static_cast<std::ptrdiff_t>(base.size());
  int exact = 1;
#pragma omp parallel for reduction(&& : exact) schedule(static) if (base.size() >= kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const float d = updated[i] - base[i];
    delta[i] = d;
    exact = exact && same_bits(base[i] + d, updated[i]);
  }
  return exact != 0;
}

void add_inplace_serial(std::span<float> values, std::span<const float> delta) {
  require_same_size(values.size(), delta.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += delta[i];
}

void add_inplace(std::span<float> values, std::span<const float> delta) {
  require_same_size(values.size(), delta.size());
  const auto n = static_cast<std::ptrdiff_t>(values.size());
#pragma omp parallel for schedule(static) if (values.size() >= kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) values[i] += delta[i];
}

bool bit_identical_serial(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_bits(a[i], b[i])) return false;
  }
  return true;
}

bool bit_identical(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) return false;
  const auto n = static_cast<std::ptrdiff_t>(a.size());
  int same = 1;
#pragma omp parallel for reduction(&& : same) schedule(static) if (a.size() >= kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) same = same && same_bits(a[i], b[i]);
  return same != 0;
}

}  // namespace swarmupdate::model::kernels
