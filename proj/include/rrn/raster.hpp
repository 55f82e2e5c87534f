#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "rrn/point_set.hpp"

namespace rrn {

template <class Scalar>
using Grid = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using GrayGrid = Grid<std::int32_t>;
using RealGrid = Grid<double>;

/// A multi-band grid of quantized gray levels anchored at a global offset.
///
/// All bands share one validity mask; samples outside the mask are storage
/// filler and must never be read (at() enforces this).
class Raster {
 public:
  Raster() = default;
  Raster(GlobalCoord offset, std::vector<GrayGrid> bands, PointSet valid);

  GlobalCoord offset() const { return offset_; }
  int band_count() const { return static_cast<int>(bands_.size()); }
  std::int32_t rows() const { return bands_.empty() ? 0 : static_cast<std::int32_t>(bands_[0].rows()); }
  std::int32_t cols() const { return bands_.empty() ? 0 : static_cast<std::int32_t>(bands_[0].cols()); }
  Box rect() const { return Box{offset_.row, offset_.col, rows(), cols()}; }
  const PointSet& valid() const { return valid_; }

  const GrayGrid& band(int b) const;
  GrayGrid& band(int b);

  /// Checked read: p must be a valid pixel of band b.
  std::int32_t at(int b, GlobalCoord p) const;

  /// Unchecked read of a pixel inside the raster rectangle.
  std::int32_t sample(int b, GlobalCoord p) const {
    return bands_[static_cast<std::size_t>(b)](p.row - offset_.row, p.col - offset_.col);
  }
  void put(int b, GlobalCoord p, std::int32_t value) {
    bands_[static_cast<std::size_t>(b)](p.row - offset_.row, p.col - offset_.col) = value;
  }

  friend bool operator==(const Raster& a, const Raster& b);

 private:
  GlobalCoord offset_;
  std::vector<GrayGrid> bands_;
  PointSet valid_;
};

}  // namespace rrn
