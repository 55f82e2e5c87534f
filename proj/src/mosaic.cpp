#include "rrn/mosaic.hpp"

#include <chrono>
#include <stdexcept>

namespace rrn {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

const char* to_string(MergeRecord::Outcome o) {
  switch (o) {
    case MergeRecord::Outcome::merged: return "merged";
    case MergeRecord::Outcome::contained: return "contained";
    case MergeRecord::Outcome::failed: return "failed";
    case MergeRecord::Outcome::unreachable: return "unreachable";
  }
  return "unknown";
}

ProvenanceMap ProvenanceMap::blank(const Box& hull) {
  ProvenanceMap map;
  map.offset = {hull.row0, hull.col0};
  map.ids = Grid<std::int32_t>::Constant(hull.rows, hull.cols, -1);
  return map;
}

std::int32_t ProvenanceMap::at(GlobalCoord p) const {
  const std::int64_t r = p.row - offset.row;
  const std::int64_t c = p.col - offset.col;
  if (r < 0 || c < 0 || r >= ids.rows() || c >= ids.cols()) return -1;
  return ids(r, c);
}

void ProvenanceMap::paint(const PointSet& region, std::int32_t id) {
  region.for_each([&](GlobalCoord p) { ids(p.row - offset.row, p.col - offset.col) = id; });
}

std::size_t select_next(const PointSet& reference_region, const std::vector<PointSet>& candidates) {
  std::size_t best = kNoCandidate;
  std::uint64_t best_overlap = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (box_intersection(reference_region.bounds(), candidates[i].bounds()).empty()) continue;
    const std::uint64_t overlap = intersect(reference_region, candidates[i]).cardinality();
    if (overlap > best_overlap) {
      best_overlap = overlap;
      best = i;
    }
  }
  return best;
}

StitchResult normalize_and_stitch(const Raster& reference, const Raster& original,
                                  const PipelineConfig& cfg) {
  if (reference.band_count() != original.band_count())
    throw std::invalid_argument("band count mismatch between reference and original");

  MergeRecord rec;
  const PointSet overlap = intersect(original.valid(), reference.valid());
  rec.overlap_pixels = overlap.cardinality();

  if (contains_all(interior(reference.valid()), original.valid())) {
    rec.outcome = MergeRecord::Outcome::contained;
    rec.detail = "original fully contained in reference interior";
    return {reference, std::move(rec)};
  }

  // Histogram matching over the overlap, whole image remapped per band.
  auto t0 = Clock::now();
  Raster processed = original;
  bool matched = false;
  if (!cfg.histmatch_enabled) {
    rec.histmatch = "disabled";
  } else {
    Sufficiency decision = Sufficiency::proceed;
    std::vector<Histogram> h_o, h_r;
    for (int b = 0; b < original.band_count() && decision == Sufficiency::proceed; ++b) {
      if (overlap.empty()) {
        decision = Sufficiency::skip_small_overlap;
        break;
      }
      h_o.push_back(histogram(original, b, overlap, cfg.gray));
      h_r.push_back(histogram(reference, b, overlap, cfg.gray));
      decision = overlap_sufficiency(overlap, h_o.back(), h_r.back(), cfg.sufficiency);
    }
    if (decision == Sufficiency::proceed) {
      for (int b = 0; b < original.band_count(); ++b)
        processed = apply_lut(processed, b, match_lut(cdf(h_o[b]), cdf(h_r[b])));
      matched = true;
      rec.histmatch = "applied";
    } else {
      rec.histmatch = std::string("skipped:") + to_string(decision);
    }
  }
  rec.seconds_histmatch = seconds_since(t0);

  t0 = Clock::now();
  RegionPlan plan = build_regions(processed.valid(), reference.valid());
  // Skipping the matching step widens the solve to the whole target so the
  // editing also absorbs the global radiometric offset.
  const std::int32_t d = matched ? cfg.band_radius : saturating_band_radius(plan);
  rec.band_radius_used = matched ? cfg.band_radius : -1;
  plan = restrict_regions(plan, d);
  rec.omega_size = plan.domain.cardinality();
  rec.seconds_regions = seconds_since(t0);

  t0 = Clock::now();
  std::vector<GrayGrid> out_bands;
  out_bands.reserve(static_cast<std::size_t>(original.band_count()));
  SystemPattern pattern;
  const bool solving = cfg.poisson_enabled && !plan.domain.empty();
  if (solving) pattern = build_pattern(plan);
  rec.unknowns = solving ? static_cast<std::uint64_t>(pattern.unknowns()) : 0;
  for (int b = 0; b < original.band_count(); ++b) {
    TargetImage target = assemble_target(processed, reference, plan, b);
    if (solving && pattern.unknowns() > 0) {
      const Eigen::VectorXd rhs = assemble_rhs(target, plan, pattern);
      SolveResult sol = solve(pattern.matrix, rhs, initial_guess(target, pattern), cfg.solver);
      rec.iterations = std::max(rec.iterations, sol.iterations);
      rec.residual = std::max(rec.residual, sol.residual_ratio);
      out_bands.push_back(blend(target, pattern, sol.x, plan, cfg.gray).band(0));
    } else {
      out_bands.push_back(std::move(target.values));
    }
  }
  rec.seconds_solve = seconds_since(t0);

  t0 = Clock::now();
  const Box tb = plan.target.bounds();
  const Raster seamless(GlobalCoord{tb.row0, tb.col0}, std::move(out_bands), plan.target);
  StitchResult result{merge(reference, seamless), std::move(rec)};
  result.record.seconds_merge = seconds_since(t0);
  return result;
}

Raster merge(const Raster& reference, const Raster& seamless_target) {
  if (reference.band_count() != seamless_target.band_count())
    throw std::invalid_argument("band count mismatch in merge");
  const Box rect = box_hull(reference.rect(), seamless_target.rect());
  std::vector<GrayGrid> bands;
  bands.reserve(static_cast<std::size_t>(reference.band_count()));
  for (int b = 0; b < reference.band_count(); ++b)
    bands.emplace_back(GrayGrid::Zero(rect.rows, rect.cols));
  for (int b = 0; b < reference.band_count(); ++b) {
    GrayGrid& grid = bands[static_cast<std::size_t>(b)];
    seamless_target.valid().for_each([&](GlobalCoord p) {
      grid(p.row - rect.row0, p.col - rect.col0) = seamless_target.sample(b, p);
    });
    // Reference wins wherever both carry data.
    reference.valid().for_each([&](GlobalCoord p) {
      grid(p.row - rect.row0, p.col - rect.col0) = reference.sample(b, p);
    });
  }
  return Raster(GlobalCoord{rect.row0, rect.col0}, std::move(bands),
                unite(reference.valid(), seamless_target.valid()));
}

bool JobResult::all_merged() const {
  for (const MergeRecord& r : records)
    if (r.outcome == MergeRecord::Outcome::failed ||
        r.outcome == MergeRecord::Outcome::unreachable)
      return false;
  return true;
}

JobResult run(const MosaicJob& job) {
  if (job.reference.valid().empty()) throw std::invalid_argument("reference carries no data");
  if (job.candidate_names.size() != job.candidates.size())
    throw std::invalid_argument("candidate name list mismatch");

  Box hull = job.reference.rect();
  for (const Raster& c : job.candidates) hull = box_hull(hull, c.rect());

  JobResult result;
  result.mosaic = job.reference;
  result.provenance = ProvenanceMap::blank(hull);
  result.provenance.paint(job.reference.valid(), 0);

  std::vector<bool> consumed(job.candidates.size(), false);
  std::vector<PointSet> regions;
  regions.reserve(job.candidates.size());
  for (const Raster& c : job.candidates) regions.push_back(c.valid());

  while (true) {
    std::vector<PointSet> open;
    std::vector<std::size_t> open_index;
    for (std::size_t i = 0; i < job.candidates.size(); ++i) {
      if (consumed[i]) continue;
      open.push_back(regions[i]);
      open_index.push_back(i);
    }
    if (open.empty()) break;
    const std::size_t pick = select_next(result.mosaic.valid(), open);
    if (pick == kNoCandidate) break;
    const std::size_t i = open_index[pick];
    consumed[i] = true;

    MergeRecord rec;
    rec.image = job.candidate_names[i];
    rec.id = static_cast<int>(i) + 1;
    try {
      const PointSet before = result.mosaic.valid();
      StitchResult stitch = normalize_and_stitch(result.mosaic, job.candidates[i], job.config);
      rec = std::move(stitch.record);
      rec.image = job.candidate_names[i];
      rec.id = static_cast<int>(i) + 1;
      if (rec.outcome == MergeRecord::Outcome::merged) {
        result.provenance.paint(difference(stitch.merged.valid(), before), rec.id);
        result.mosaic = std::move(stitch.merged);
      }
    } catch (const std::exception& err) {
      rec.outcome = MergeRecord::Outcome::failed;
      rec.detail = err.what();
    }
    result.records.push_back(std::move(rec));
  }

  for (std::size_t i = 0; i < job.candidates.size(); ++i) {
    if (consumed[i]) continue;
    MergeRecord rec;
    rec.image = job.candidate_names[i];
    rec.id = static_cast<int>(i) + 1;
    rec.outcome = MergeRecord::Outcome::unreachable;
    rec.detail = "never intersected the growing reference";
    result.records.push_back(std::move(rec));
  }
  return result;
}

}  // namespace rrn
