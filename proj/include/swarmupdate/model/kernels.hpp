#pragma once

#include <cstddef>
#include <span>

// Elementwise tensor kernels used by patch generation and application.
//
// Each kernel has an OpenMP-parallel implementation and a serial reference
// with identical results; the reference stays in the build for tests and
// benchmarks. All kernels are elementwise, so results never depend on the
// thread count.

namespace swarmupdate::model::kernels {

/// Below this many elements the parallel kernels run serially.
inline constexpr std::size_t kParallelThreshold = 1 << 15;

/// delta[i] = updated[i] - base[i]. Returns true when base[i] + delta[i]
/// reproduces updated[i] bit-for-bit for every i.
bool compute_delta(std::span<const float> base, std::span<const float> updated, std::span<float> delta);
bool compute_delta_serial(std::span<const float> base, std::span<const float> updated, std::span<float> delta);

/// values[i] += delta[i]
void add_inplace(std::span<float> values, std::span<const float> delta);
void add_inplace_serial(std::span<float> values, std::span<const float> delta);

/// Bitwise equality of two equally sized ranges.
bool bit_identical(std::span<const float> a, std::span<const float> b);
bool bit_identical_serial(std::span<const float> a, std::span<const float> b);

}  // namespace swarmupdate::model::kernels
