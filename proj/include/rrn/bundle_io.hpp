#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rrn/harness.hpp"
#include "rrn/mosaic.hpp"
#include "rrn/raster.hpp"

namespace rrn {

/// Image bundle: a JSON sidecar naming a raw band-sequential big-endian
/// pixel file (8- or 16-bit) plus either a byte mask file or a nodata
/// sentinel. The sidecar pins offset, shape and the stored value range.
///
/// load() quantizes the stored range onto `target`; when the two ranges are
/// identical the round trip is bit-exact.
Raster load_bundle(const std::filesystem::path& sidecar, GrayRange target);

/// Loads with the stored range taken verbatim (must be integral).
Raster load_bundle_raw(const std::filesystem::path& sidecar);

void save_bundle(const Raster& raster, const std::filesystem::path& sidecar, GrayRange range);

void save_provenance(const ProvenanceMap& map, const std::filesystem::path& sidecar);
ProvenanceMap load_provenance(const std::filesystem::path& sidecar);

SceneSpec load_scene(const std::filesystem::path& path);
void save_scene(const SceneSpec& spec, const std::filesystem::path& path);

/// One JSON record per line, one line per candidate, then a summary line.
/// Wall-clock timings are deliberately absent so identical jobs produce
/// identical logs.
std::string merge_log_text(const std::vector<MergeRecord>& records);
void write_merge_log(const std::vector<MergeRecord>& records, const std::filesystem::path& path);

std::string seam_csv_text(const SeamReport& report);
void write_seam_csv(const SeamReport& report, const std::filesystem::path& path);

/// Write-temp-then-rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& data);

}  // namespace rrn
