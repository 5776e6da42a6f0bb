#include "swarmupdate/model/tensor_model.hpp"

#include <cstring>

namespace swarmupdate::model {

std::uint64_t element_count(const Shape& shape) {
  std::uint64_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

void NamedTensorModel::validate(const Tensor& tensor) {
  if (tensor.name.empty()) throw ModelError("tensor name must be non-empty");
  for (auto d : tensor.shape) {
    if (d == 0) throw ModelError("tensor '" + tensor.name + "' has a zero dimension");
  }
  if (element_count(tensor.shape) != tensor.data.size()) {
    throw ModelError("tensor '" + tensor.name + "' holds " + std::to_string(tensor.data.size()) +
                     " values but its shape describes " +
                     std::to_string(element_count(tensor.shape)));
  }
}

void NamedTensorModel::add(Tensor tensor) {
  validate(tensor);
  if (index_.contains(tensor.name)) {
    throw ModelError("duplicate tensor name '" + tensor.name + "'");
  }
  index_.emplace(tensor.name, entries_.size());
  entries_.push_back(std::move(tensor));
}

void NamedTensorModel::upsert(Tensor tensor) {
  validate(tensor);
  if (auto it = index_.find(tensor.name); it != index_.end()) {
    entries_[it->second] = std::move(tensor);
    return;
  }
  index_.emplace(tensor.name, entries_.size());
  entries_.push_back(std::move(tensor));
}

const Tensor* NamedTensorModel::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

Tensor* NamedTensorModel::find(const std::string& name) {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

bool bit_equal(const std::vector<float>& a, const std::vector<float>& b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0);
}

bool operator==(const NamedTensorModel& a, const NamedTensorModel& b) {
  if (a.entries_.size() != b.entries_.size()) return false;
  for (std::size_t i = 0; i < a.entries_.size(); ++i) {
    const auto& x = a.entries_[i];
    const auto& y = b.entries_[i];
    if (x.name != y.name || x.shape != y.shape || !bit_equal(x.data, y.data)) return false;
  }
  return true;
}

}  // namespace swarmupdate::model
