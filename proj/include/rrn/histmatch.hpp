#pragma once

#include <cstdint>
#include <vector>

#include "rrn/raster.hpp"

namespace rrn {

/// Inclusive integer gray-level range [i_min, i_max].
struct GrayRange {
  std::int32_t i_min = 0;
  std::int32_t i_max = 255;
  std::int32_t levels() const { return i_max - i_min + 1; }
  friend bool operator==(const GrayRange&, const GrayRange&) = default;
};

/// Affine map from a real source range [j_min, j_max] onto a gray range.
struct QuantizationSpec {
  double j_min = 0.0;
  double j_max = 255.0;
  GrayRange out;
};

/// Clamp to [j_min, j_max], map affinely, round half up.
std::int32_t quantize_value(double v, const QuantizationSpec& spec);
GrayGrid quantize(const RealGrid& values, const QuantizationSpec& spec);

class Histogram {
 public:
  explicit Histogram(GrayRange range);

  void add(std::int32_t level, std::uint64_t n = 1);
  std::uint64_t count(std::int32_t level) const;
  std::uint64_t total() const { return total_; }
  GrayRange range() const { return range_; }
  std::int32_t distinct_levels() const;

 private:
  GrayRange range_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

/// Per-level cumulative probability; non-decreasing, ends at 1.
class CdfTable {
 public:
  CdfTable(GrayRange range, std::vector<double> cp);
  double at(std::int32_t level) const { return cp_[static_cast<std::size_t>(level - range_.i_min)]; }
  GrayRange range() const { return range_; }
  const std::vector<double>& values() const { return cp_; }

 private:
  GrayRange range_;
  std::vector<double> cp_;
};

/// Monotone per-level gray transfer.
class LutMapping {
 public:
  LutMapping(GrayRange range, std::vector<std::int32_t> lut);
  std::int32_t at(std::int32_t level) const { return lut_[static_cast<std::size_t>(level - range_.i_min)]; }
  GrayRange range() const { return range_; }
  static LutMapping identity(GrayRange range);

  friend bool operator==(const LutMapping&, const LutMapping&) = default;

 private:
  GrayRange range_;
  std::vector<std::int32_t> lut_;
};

/// Tallies one band over `region`, which must lie inside r.valid().
Histogram histogram(const Raster& r, int band, const PointSet& region, GrayRange range);

CdfTable cdf(const Histogram& h);

/// Gray transfer that aligns cp_o with cp_r: per level the closest reference
/// cumulative probability wins, ties resolved to the smallest gray level,
/// then a non-decreasing sweep enforces monotonicity.
LutMapping match_lut(const CdfTable& cp_o, const CdfTable& cp_r);

/// Remaps every valid sample of one band; geometry and mask are untouched.
Raster apply_lut(const Raster& r, int band, const LutMapping& lut);

struct SufficiencyConfig {
  std::uint64_t min_overlap_pixels = 1000;
  std::int32_t min_distinct_levels = 16;
};

enum class Sufficiency { proceed, skip_small_overlap, skip_low_diversity };

const char* to_string(Sufficiency s);

/// Decides whether the overlap supports histogram matching at all.
Sufficiency overlap_sufficiency(const PointSet& overlap, const Histogram& h_o,
                                const Histogram& h_r, const SufficiencyConfig& cfg);

}  // namespace rrn
