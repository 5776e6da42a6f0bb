#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "swarmupdate/sim/geometry.hpp"

namespace swarmupdate::sim {

/// Uniform bucket grid with cell side equal to the query radius, so every
/// neighbour of a point lies in the 3x3 block of cells around it.
class SpatialGrid {
 public:
  explicit SpatialGrid(double cell) : cell_(cell) {}

  void rebuild(const std::vector<Vec2>& points) {
    if (points.empty()) {
      cols_ = rows_ = 0;
      return;
    }
    min_ = max_ = points[0];
    for (const auto& p : points) {
      min_.x = std::min(min_.x, p.x);
      min_.y = std::min(min_.y, p.y);
      max_.x = std::max(max_.x, p.x);
      max_.y = std::max(max_.y, p.y);
    }
    cols_ = static_cast<int>((max_.x - min_.x) / cell_) + 1;
    rows_ = static_cast<int>((max_.y - min_.y) / cell_) + 1;
    start_.assign(static_cast<std::size_t>(cols_) * rows_ + 1, 0);
    cell_of_.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      cell_of_[i] = cell_index(points[i]);
      ++start_[cell_of_[i] + 1];
    }
    for (std::size_t c = 1; c < start_.size(); ++c) start_[c] += start_[c - 1];
    items_.resize(points.size());
    std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < points.size(); ++i) items_[fill[cell_of_[i]]++] = static_cast<std::uint32_t>(i);
  }

  /// Calls fn(index) for every point in the 3x3 cell block around p, in
  /// ascending index order within each cell.
  template <typename Fn>
  void for_each_near(Vec2 p, Fn&& fn) const {
    if (cols_ == 0) return;
    const int cx = static_cast<int>(std::floor((p.x - min_.x) / cell_));
    const int cy = static_cast<int>(std::floor((p.y - min_.y) / cell_));
    for (int y = std::max(cy - 1, 0); y <= std::min(cy + 1, rows_ - 1); ++y) {
      for (int x = std::max(cx - 1, 0); x <= std::min(cx + 1, cols_ - 1); ++x) {
        const auto c = static_cast<std::size_t>(y) * cols_ + x;
        for (auto k = start_[c]; k < start_[c + 1]; ++k) fn(static_cast<std::size_t>(items_[k]));
      }
    }
  }

 private:
  std::size_t cell_index(Vec2 p) const {
    const int cx = std::min(static_cast<int>((p.x - min_.x) / cell_), cols_ - 1);
    const int cy = std::min(static_cast<int>((p.y - min_.y) / cell_), rows_ - 1);
    return static_cast<std::size_t>(cy) * cols_ + cx;
  }

  double cell_;
  Vec2 min_, max_;
  int cols_ = 0;
  int rows_ = 0;
  std::vector<std::uint32_t> start_;
  std::vector<std::size_t> cell_of_;
  std::vector<std::uint32_t> items_;
};

}  // namespace swarmupdate::sim
