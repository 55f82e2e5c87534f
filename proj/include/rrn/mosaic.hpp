#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rrn/poisson.hpp"

namespace rrn {

struct PipelineConfig {
  GrayRange gray;
  std::int32_t band_radius = 150;
  SufficiencyConfig sufficiency;
  SolverConfig solver;
  bool histmatch_enabled = true;
  bool poisson_enabled = true;
};

/// What happened to one candidate image.
struct MergeRecord {
  enum class Outcome { merged, contained, failed, unreachable };

  std::string image;
  int id = -1;
  Outcome outcome = Outcome::merged;
  std::string detail;
  std::uint64_t overlap_pixels = 0;
  std::string histmatch;              // applied | skipped:<reason> | disabled
  std::int64_t band_radius_used = -1;  // -1: saturating radius (whole target solved)
  std::uint64_t omega_size = 0;
  std::uint64_t unknowns = 0;
  int iterations = 0;
  double residual = 0.0;
  double seconds_histmatch = 0.0;
  double seconds_regions = 0.0;
  double seconds_solve = 0.0;
  double seconds_merge = 0.0;
};

const char* to_string(MergeRecord::Outcome o);

/// Image id per mosaic pixel (-1 where nothing landed yet). Id 0 is the
/// starting reference, candidate k gets id k+1.
struct ProvenanceMap {
  GlobalCoord offset;
  Grid<std::int32_t> ids;

  static ProvenanceMap blank(const Box& hull);
  std::int32_t at(GlobalCoord p) const;
  void paint(const PointSet& region, std::int32_t id);
};

/// Index of the candidate overlapping the reference region the most, ties to
/// the earlier index; `none` when no candidate intersects.
inline constexpr std::size_t kNoCandidate = static_cast<std::size_t>(-1);
std::size_t select_next(const PointSet& reference_region, const std::vector<PointSet>& candidates);

struct StitchResult {
  Raster merged;
  MergeRecord record;
};

/// One pipeline pass: sufficiency test, per-band histogram matching (or skip
/// with the saturating band radius), region construction, per-band Poisson
/// editing, then the merge. Solver trouble propagates as SolverFailure.
StitchResult normalize_and_stitch(const Raster& reference, const Raster& original,
                                  const PipelineConfig& cfg);

/// Union of the two rasters; the reference keeps every pixel it already has.
Raster merge(const Raster& reference, const Raster& seamless_target);

struct MosaicJob {
  Raster reference;
  std::string reference_name;
  std::vector<Raster> candidates;
  std::vector<std::string> candidate_names;
  PipelineConfig config;
};

struct JobResult {
  Raster mosaic;
  ProvenanceMap provenance;
  std::vector<MergeRecord> records;
  bool all_merged() const;
};

/// Repeats select/stitch/merge until no candidate intersects the grown
/// reference; failures are recorded per image, never fatal to the job.
JobResult run(const MosaicJob& job);

}  // namespace rrn
