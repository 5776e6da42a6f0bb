#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace swarmupdate::model {

using Shape = std::vector<std::uint32_t>;

/// Number of elements described by a shape. The empty shape is a scalar.
std::uint64_t element_count(const Shape& shape);

struct Tensor {
  std::string name;
  Shape shape;
  std::vector<float> data;
};

/// Raised when a model, patch or freeze specification violates its invariants.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigurationError : public ModelError {
 public:
  using ModelError::ModelError;
};

/// Ordered collection of uniquely named float32 tensors.
///
/// Insertion order is the serialization order, so two models holding the
/// same tensors in a different order are different models (and hash
/// differently).
class NamedTensorModel {
 public:
  NamedTensorModel() = default;

  /// Appends a tensor. Throws ModelError on an empty or duplicate name, a
  /// zero dimension, or a data length that disagrees with the shape.
  void add(Tensor tensor);

  /// Replaces the tensor with the same name in place, or appends it.
  void upsert(Tensor tensor);

  const Tensor* find(const std::string& name) const;
  Tensor* find(const std::string& name);

  const std::vector<Tensor>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Bitwise identity: same names, order, shapes and float bit patterns.
  friend bool operator==(const NamedTensorModel& a, const NamedTensorModel& b);

 private:
  static void validate(const Tensor& tensor);

  std::vector<Tensor> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Bitwise comparison of two float ranges (distinguishes -0.0 and NaN payloads).
bool bit_equal(const std::vector<float>& a, const std::vector<float>& b);

}  // namespace swarmupdate::model
