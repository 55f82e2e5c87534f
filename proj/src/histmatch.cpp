#include "rrn/histmatch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rrn {

namespace {

void check_spec(const QuantizationSpec& spec) {
  if (!(spec.j_min < spec.j_max)) throw std::invalid_argument("quantization needs j_min < j_max");
  if (!(spec.out.i_min < spec.out.i_max))
    throw std::invalid_argument("quantization needs i_min < i_max");
  if (!std::isfinite(spec.j_min) || !std::isfinite(spec.j_max))
    throw std::invalid_argument("quantization range must be finite");
}

std::int32_t round_half_up(double v) { return static_cast<std::int32_t>(std::floor(v + 0.5)); }

}  // namespace

std::int32_t quantize_value(double v, const QuantizationSpec& spec) {
  if (!std::isfinite(v)) throw std::domain_error("non-finite sample");
  const double clamped = std::clamp(v, spec.j_min, spec.j_max);
  const double scale = double(spec.out.i_max - spec.out.i_min) / (spec.j_max - spec.j_min);
  const double mapped = spec.out.i_min + (clamped - spec.j_min) * scale;
  return std::clamp(round_half_up(mapped), spec.out.i_min, spec.out.i_max);
}

GrayGrid quantize(const RealGrid& values, const QuantizationSpec& spec) {
  check_spec(spec);
  GrayGrid out(values.rows(), values.cols());
  for (Eigen::Index r = 0; r < values.rows(); ++r)
    for (Eigen::Index c = 0; c < values.cols(); ++c) out(r, c) = quantize_value(values(r, c), spec);
  return out;
}

Histogram::Histogram(GrayRange range) : range_(range) {
  if (range.i_min >= range.i_max) throw std::invalid_argument("histogram needs i_min < i_max");
  counts_.assign(static_cast<std::size_t>(range.levels()), 0);
}

void Histogram::add(std::int32_t level, std::uint64_t n) {
  if (level < range_.i_min || level > range_.i_max)
    throw std::out_of_range("gray level " + std::to_string(level) + " outside histogram range");
  counts_[static_cast<std::size_t>(level - range_.i_min)] += n;
  total_ += n;
}

std::uint64_t Histogram::count(std::int32_t level) const {
  if (level < range_.i_min || level > range_.i_max) return 0;
  return counts_[static_cast<std::size_t>(level - range_.i_min)];
}

std::int32_t Histogram::distinct_levels() const {
  std::int32_t n = 0;
  for (std::uint64_t c : counts_)
    if (c) ++n;
  return n;
}

CdfTable::CdfTable(GrayRange range, std::vector<double> cp) : range_(range), cp_(std::move(cp)) {
  if (cp_.size() != static_cast<std::size_t>(range.levels()))
    throw std::invalid_argument("cdf table size mismatch");
}

LutMapping::LutMapping(GrayRange range, std::vector<std::int32_t> lut)
    : range_(range), lut_(std::move(lut)) {
  if (lut_.size() != static_cast<std::size_t>(range.levels()))
    throw std::invalid_argument("lut size mismatch");
  for (std::int32_t v : lut_)
    if (v < range.i_min || v > range.i_max) throw std::invalid_argument("lut value out of range");
}

LutMapping LutMapping::identity(GrayRange range) {
  std::vector<std::int32_t> lut(static_cast<std::size_t>(range.levels()));
  for (std::int32_t i = 0; i < range.levels(); ++i) lut[static_cast<std::size_t>(i)] = range.i_min + i;
  return LutMapping(range, std::move(lut));
}

Histogram histogram(const Raster& r, int band, const PointSet& region, GrayRange range) {
  if (!contains_all(r.valid(), region))
    throw std::domain_error("histogram region escapes the valid mask");
  Histogram h(range);
  region.for_each([&](GlobalCoord p) { h.add(r.sample(band, p)); });
  return h;
}

CdfTable cdf(const Histogram& h) {
  if (h.total() == 0) throw std::runtime_error("empty histogram");
  const GrayRange range = h.range();
  std::vector<double> cp(static_cast<std::size_t>(range.levels()));
  std::uint64_t running = 0;
  const double total = static_cast<double>(h.total());
  for (std::int32_t i = 0; i < range.levels(); ++i) {
    running += h.count(range.i_min + i);
    cp[static_cast<std::size_t>(i)] = static_cast<double>(running) / total;
  }
  return CdfTable(range, std::move(cp));
}

LutMapping match_lut(const CdfTable& cp_o, const CdfTable& cp_r) {
  if (!(cp_o.range() == cp_r.range()))
    throw std::invalid_argument("cdf tables disagree on gray range");
  const GrayRange range = cp_o.range();
  const std::vector<double>& cr = cp_r.values();
  const auto plateau_start = [&](std::size_t idx) {
    return static_cast<std::size_t>(
        std::lower_bound(cr.begin(), cr.end(), cr[idx]) - cr.begin());
  };

  std::vector<std::int32_t> lut(static_cast<std::size_t>(range.levels()));
  for (std::int32_t i = 0; i < range.levels(); ++i) {
    const double t = cp_o.at(range.i_min + i);
    const auto it = std::lower_bound(cr.begin(), cr.end(), t);
    std::size_t best;
    if (it == cr.begin()) {
      best = 0;
    } else if (it == cr.end()) {
      best = plateau_start(cr.size() - 1);
    } else {
      // Candidates: the first index >= t and the start of the plateau just
      // below it; equal distances resolve to the smaller gray level.
      const std::size_t hi = static_cast<std::size_t>(it - cr.begin());
      const std::size_t lo = plateau_start(hi - 1);
      best = (t - cr[lo] <= cr[hi] - t) ? lo : hi;
    }
    lut[static_cast<std::size_t>(i)] = range.i_min + static_cast<std::int32_t>(best);
  }
  for (std::size_t i = 1; i < lut.size(); ++i) lut[i] = std::max(lut[i], lut[i - 1]);
  return LutMapping(range, std::move(lut));
}

Raster apply_lut(const Raster& r, int band, const LutMapping& lut) {
  Raster out = r;
  r.valid().for_each([&](GlobalCoord p) { out.put(band, p, lut.at(r.sample(band, p))); });
  return out;
}

const char* to_string(Sufficiency s) {
  switch (s) {
    case Sufficiency::proceed: return "proceed";
    case Sufficiency::skip_small_overlap: return "small_overlap";
    case Sufficiency::skip_low_diversity: return "low_diversity";
  }
  return "unknown";
}

Sufficiency overlap_sufficiency(const PointSet& overlap, const Histogram& h_o,
                                const Histogram& h_r, const SufficiencyConfig& cfg) {
  if (overlap.cardinality() < cfg.min_overlap_pixels) return Sufficiency::skip_small_overlap;
  if (h_o.distinct_levels() < cfg.min_distinct_levels ||
      h_r.distinct_levels() < cfg.min_distinct_levels)
    return Sufficiency::skip_low_diversity;
  return Sufficiency::proceed;
}

}  // namespace rrn
