#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "rrn/histmatch.hpp"
#include "rrn/mosaic.hpp"
#include "rrn/raster.hpp"

namespace rrn {

/// One synthetic tile: a rectangle cut from the shared ground truth with its
/// own radiometric distortion (gain, bias, gamma).
struct TileSpec {
  std::int64_t row0 = 0;
  std::int64_t col0 = 0;
  std::int32_t rows = 0;
  std::int32_t cols = 0;
  double gain = 1.0;
  double bias = 0.0;
  double gamma = 1.0;
  bool allow_disjoint = false;
};

/// Procedural ground-truth recipe: a base level, a linear gradient, seeded
/// Gaussian blobs, and an optional checkerboard, clamped to [clamp_lo, clamp_hi].
struct TruthSpec {
  double base = 120.0;
  double gradient_row = 0.0;
  double gradient_col = 0.0;
  int blob_count = 10;
  double blob_sigma_min = 40.0;
  double blob_sigma_max = 90.0;
  double blob_amplitude = 45.0;
  double checker_amplitude = 0.0;
  std::int32_t checker_period = 32;
  double clamp_lo = 20.0;
  double clamp_hi = 200.0;
};

struct SceneSpec {
  int bands = 1;
  QuantizationSpec quantization;
  TruthSpec truth;
  std::vector<TileSpec> tiles;
};

/// The shared scene content all tiles sample before distortion. Deterministic
/// per (spec, seed).
class TruthField {
 public:
  TruthField(const SceneSpec& spec, std::uint64_t seed);
  double at(int band, std::int64_t row, std::int64_t col) const;

 private:
  struct Blob {
    double row, col, inv_two_sigma_sq;
    std::vector<double> amplitude;  // per band
  };
  TruthSpec truth_;
  double center_row_ = 0.0, center_col_ = 0.0;
  std::vector<Blob> blobs_;
};

/// Renders every tile: clamp(quantize(gain * truth^gamma + bias)) on its
/// rectangle. Bit-identical across runs for one (spec, seed).
std::vector<Raster> generate(const SceneSpec& spec, std::uint64_t seed);

struct SeamStats {
  std::uint64_t pairs = 0;
  double mean_abs = 0.0;
  double rms = 0.0;
  std::int64_t max_abs = 0;
};

/// Cross-boundary statistics over 4-neighbor pairs straddling provenance.
struct SeamReport {
  std::vector<SeamStats> per_band;
  SeamStats aggregate;
  // Aggregated over bands per unordered provenance-id pair.
  std::map<std::pair<std::int32_t, std::int32_t>, SeamStats> per_boundary;
};

SeamReport seam_energy(const Raster& mosaic, const ProvenanceMap& provenance);

}  // namespace rrn
