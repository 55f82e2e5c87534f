#include "rrn/raster.hpp"

#include <stdexcept>
#include <string>

namespace rrn {

Raster::Raster(GlobalCoord offset, std::vector<GrayGrid> bands, PointSet valid)
    : offset_(offset), bands_(std::move(bands)), valid_(std::move(valid)) {
  if (bands_.empty()) throw std::invalid_argument("raster needs at least one band");
  for (const auto& b : bands_)
    if (b.rows() != bands_[0].rows() || b.cols() != bands_[0].cols())
      throw std::invalid_argument("raster bands disagree on shape");
  if (!valid_.empty()) {
    const Box r = rect();
    const Box vb = valid_.bounds();
    if (vb.row0 < r.row0 || vb.col0 < r.col0 || vb.row_end() > r.row_end() ||
        vb.col_end() > r.col_end())
      throw std::invalid_argument("valid mask escapes the raster rectangle");
  }
}

const GrayGrid& Raster::band(int b) const {
  if (b < 0 || b >= band_count()) throw std::out_of_range("band index " + std::to_string(b));
  return bands_[static_cast<std::size_t>(b)];
}

GrayGrid& Raster::band(int b) {
  if (b < 0 || b >= band_count()) throw std::out_of_range("band index " + std::to_string(b));
  return bands_[static_cast<std::size_t>(b)];
}

std::int32_t Raster::at(int b, GlobalCoord p) const {
  if (b < 0 || b >= band_count()) throw std::out_of_range("band index " + std::to_string(b));
  if (!valid_.contains(p))
    throw std::domain_error("read outside valid region at (" + std::to_string(p.row) + "," +
                            std::to_string(p.col) + ")");
  return sample(b, p);
}

bool operator==(const Raster& a, const Raster& b) {
  if (!(a.offset_ == b.offset_) || a.band_count() != b.band_count() || !(a.valid_ == b.valid_))
    return false;
  for (int i = 0; i < a.band_count(); ++i) {
    // Compare samples only where they carry data.
    bool same = true;
    a.valid_.for_each([&](GlobalCoord p) {
      if (a.sample(i, p) != b.sample(i, p)) same = false;
    });
    if (!same) return false;
  }
  return true;
}

}  // namespace rrn
