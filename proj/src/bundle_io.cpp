#include "rrn/bundle_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

namespace rrn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void fail(const fs::path& path, const std::string& msg) {
  throw std::runtime_error(path.string() + ": " + msg);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (!in.good() && !in.eof()) fail(path, "read error");
  return data;
}

json parse_json_file(const fs::path& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) fail(path, "malformed JSON");
  return j;
}

struct SidecarInfo {
  fs::path pixels;
  fs::path mask;  // empty when absent
  bool has_nodata = false;
  std::int64_t nodata = 0;
  std::int64_t offset_row = 0, offset_col = 0;
  std::int32_t bands = 0, width = 0, height = 0;
  int depth = 8;
  double j_min = 0.0, j_max = 0.0;
};

SidecarInfo parse_sidecar(const fs::path& path) {
  const json j = parse_json_file(path);
  SidecarInfo info;
  try {
    info.pixels = path.parent_path() / j.at("pixels").get<std::string>();
    if (j.contains("mask")) info.mask = path.parent_path() / j.at("mask").get<std::string>();
    if (j.contains("nodata")) {
      info.has_nodata = true;
      info.nodata = j.at("nodata").get<std::int64_t>();
    }
    info.offset_row = j.at("offset_row").get<std::int64_t>();
    info.offset_col = j.at("offset_col").get<std::int64_t>();
    info.bands = j.at("bands").get<std::int32_t>();
    info.width = j.at("width").get<std::int32_t>();
    info.height = j.at("height").get<std::int32_t>();
    info.depth = j.at("depth").get<int>();
    const auto& range = j.at("value_range");
    info.j_min = range.at(0).get<double>();
    info.j_max = range.at(1).get<double>();
  } catch (const json::exception& err) {
    fail(path, std::string("bad sidecar: ") + err.what());
  }
  if (info.bands < 1 || info.bands > 4) fail(path, "bands must be 1..4");
  if (info.width <= 0 || info.height <= 0) fail(path, "non-positive dimensions");
  if (info.depth != 8 && info.depth != 16) fail(path, "depth must be 8 or 16");
  if (!std::isfinite(info.j_min) || !std::isfinite(info.j_max) || !(info.j_min < info.j_max))
    fail(path, "value_range must be finite with min < max");
  if (!info.mask.empty() && info.has_nodata) fail(path, "mask and nodata are exclusive");
  return info;
}

Raster load_with_target(const fs::path& sidecar, const SidecarInfo& info, GrayRange target) {
  const std::size_t plane = std::size_t(info.width) * info.height;
  const std::size_t sample_bytes = static_cast<std::size_t>(info.depth / 8);
  const std::string pixels = read_file(info.pixels);
  if (pixels.size() != plane * info.bands * sample_bytes)
    fail(info.pixels, "pixel file size disagrees with sidecar dimensions");

  std::string mask_bytes;
  if (!info.mask.empty()) {
    mask_bytes = read_file(info.mask);
    if (mask_bytes.size() != plane) fail(info.mask, "mask size disagrees with sidecar dimensions");
  }

  const auto stored = [&](int band, std::int32_t r, std::int32_t c) -> std::int64_t {
    const std::size_t i = (static_cast<std::size_t>(band) * plane +
                           static_cast<std::size_t>(r) * info.width + c) *
                          sample_bytes;
    const auto* bytes = reinterpret_cast<const unsigned char*>(pixels.data());
    if (sample_bytes == 1) return bytes[i];
    return (std::int64_t{bytes[i]} << 8) | bytes[i + 1];
  };

  const GlobalCoord offset{info.offset_row, info.offset_col};
  const PointSet valid = PointSet::from_predicate(
      Box{info.offset_row, info.offset_col, info.height, info.width},
      [&](std::int64_t row, std::int64_t col) {
        const std::int32_t r = static_cast<std::int32_t>(row - info.offset_row);
        const std::int32_t c = static_cast<std::int32_t>(col - info.offset_col);
        if (!mask_bytes.empty())
          return mask_bytes[static_cast<std::size_t>(r) * info.width + c] != 0;
        if (info.has_nodata) {
          for (int b = 0; b < info.bands; ++b)
            if (stored(b, r, c) != info.nodata) return true;
          return false;
        }
        return true;
      });
  if (valid.empty()) fail(sidecar, "bundle carries no valid pixels");

  const QuantizationSpec spec{info.j_min, info.j_max, target};
  std::vector<GrayGrid> bands;
  bands.reserve(static_cast<std::size_t>(info.bands));
  for (int b = 0; b < info.bands; ++b) {
    GrayGrid grid = GrayGrid::Zero(info.height, info.width);
    for (std::int32_t r = 0; r < info.height; ++r)
      for (std::int32_t c = 0; c < info.width; ++c)
        grid(r, c) = quantize_value(static_cast<double>(stored(b, r, c)), spec);
    bands.push_back(std::move(grid));
  }
  return Raster(offset, std::move(bands), valid);
}

}  // namespace

Raster load_bundle(const fs::path& sidecar, GrayRange target) {
  return load_with_target(sidecar, parse_sidecar(sidecar), target);
}

Raster load_bundle_raw(const fs::path& sidecar) {
  const SidecarInfo info = parse_sidecar(sidecar);
  const double lo = std::floor(info.j_min);
  const double hi = std::floor(info.j_max);
  if (lo != info.j_min || hi != info.j_max)
    fail(sidecar, "raw load needs an integral value_range");
  return load_with_target(sidecar, info,
                          GrayRange{static_cast<std::int32_t>(lo), static_cast<std::int32_t>(hi)});
}

void write_file_atomic(const fs::path& path, const std::string& data) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(tmp, "cannot open for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out.good()) fail(tmp, "write error");
  }
  fs::rename(tmp, path);
}

void save_bundle(const Raster& raster, const fs::path& sidecar, GrayRange range) {
  if (range.i_min < 0 || range.i_max > 65535)
    throw std::invalid_argument("bundle gray range must fit 16 bits unsigned");
  const int depth = range.i_max > 255 ? 16 : 8;
  const std::size_t sample_bytes = static_cast<std::size_t>(depth / 8);
  const std::size_t plane = std::size_t(raster.rows()) * raster.cols();

  std::string pixels(plane * raster.band_count() * sample_bytes, '\0');
  auto* bytes = reinterpret_cast<unsigned char*>(pixels.data());
  for (int b = 0; b < raster.band_count(); ++b) {
    raster.valid().for_each([&](GlobalCoord p) {
      const std::int32_t v = raster.sample(b, p);
      if (v < range.i_min || v > range.i_max)
        fail(sidecar, "sample " + std::to_string(v) + " escapes the declared range");
      const std::size_t i =
          (static_cast<std::size_t>(b) * plane +
           static_cast<std::size_t>(p.row - raster.offset().row) * raster.cols() +
           static_cast<std::size_t>(p.col - raster.offset().col)) *
          sample_bytes;
      if (sample_bytes == 1) {
        bytes[i] = static_cast<unsigned char>(v);
      } else {
        bytes[i] = static_cast<unsigned char>(v >> 8);
        bytes[i + 1] = static_cast<unsigned char>(v & 0xff);
      }
    });
  }

  const bool full = raster.valid().cardinality() == plane;
  fs::path base = sidecar;
  base.replace_extension();
  const fs::path pix_path = fs::path(base.string() + ".pix");
  const fs::path msk_path = fs::path(base.string() + ".msk");

  json j;
  j["pixels"] = pix_path.filename().string();
  j["offset_row"] = raster.offset().row;
  j["offset_col"] = raster.offset().col;
  j["bands"] = raster.band_count();
  j["width"] = raster.cols();
  j["height"] = raster.rows();
  j["depth"] = depth;
  j["value_range"] = {static_cast<double>(range.i_min), static_cast<double>(range.i_max)};

  write_file_atomic(pix_path, pixels);
  if (!full) {
    std::string mask(plane, '\0');
    raster.valid().for_each([&](GlobalCoord p) {
      mask[static_cast<std::size_t>(p.row - raster.offset().row) * raster.cols() +
           static_cast<std::size_t>(p.col - raster.offset().col)] = 1;
    });
    j["mask"] = msk_path.filename().string();
    write_file_atomic(msk_path, mask);
  }
  write_file_atomic(sidecar, j.dump(2) + "\n");
}

void save_provenance(const ProvenanceMap& map, const fs::path& sidecar) {
  const std::int32_t rows = static_cast<std::int32_t>(map.ids.rows());
  const std::int32_t cols = static_cast<std::int32_t>(map.ids.cols());
  GrayGrid grid = GrayGrid::Zero(rows, cols);
  const PointSet valid = PointSet::from_predicate(
      Box{map.offset.row, map.offset.col, rows, cols}, [&](std::int64_t r, std::int64_t c) {
        return map.ids(r - map.offset.row, c - map.offset.col) >= 0;
      });
  for (std::int32_t r = 0; r < rows; ++r)
    for (std::int32_t c = 0; c < cols; ++c) grid(r, c) = std::max(map.ids(r, c), 0);
  save_bundle(Raster(map.offset, {std::move(grid)}, valid), sidecar, GrayRange{0, 65535});
}

ProvenanceMap load_provenance(const fs::path& sidecar) {
  const Raster r = load_bundle_raw(sidecar);
  if (r.band_count() != 1) fail(sidecar, "provenance must be single-band");
  ProvenanceMap map;
  map.offset = r.offset();
  map.ids = Grid<std::int32_t>::Constant(r.rows(), r.cols(), -1);
  r.valid().for_each([&](GlobalCoord p) {
    map.ids(p.row - map.offset.row, p.col - map.offset.col) = r.sample(0, p);
  });
  return map;
}

SceneSpec load_scene(const fs::path& path) {
  const json j = parse_json_file(path);
  SceneSpec spec;
  try {
    spec.bands = j.value("bands", 1);
    if (j.contains("range")) {
      const auto& r = j.at("range");
      spec.quantization.j_min = r.value("j_min", 0.0);
      spec.quantization.j_max = r.value("j_max", 255.0);
      spec.quantization.out.i_min = r.value("i_min", 0);
      spec.quantization.out.i_max = r.value("i_max", 255);
    }
    if (j.contains("truth")) {
      const auto& t = j.at("truth");
      TruthSpec& ts = spec.truth;
      ts.base = t.value("base", ts.base);
      ts.gradient_row = t.value("gradient_row", ts.gradient_row);
      ts.gradient_col = t.value("gradient_col", ts.gradient_col);
      ts.blob_count = t.value("blob_count", ts.blob_count);
      ts.blob_sigma_min = t.value("blob_sigma_min", ts.blob_sigma_min);
      ts.blob_sigma_max = t.value("blob_sigma_max", ts.blob_sigma_max);
      ts.blob_amplitude = t.value("blob_amplitude", ts.blob_amplitude);
      ts.checker_amplitude = t.value("checker_amplitude", ts.checker_amplitude);
      ts.checker_period = t.value("checker_period", ts.checker_period);
      ts.clamp_lo = t.value("clamp_lo", ts.clamp_lo);
      ts.clamp_hi = t.value("clamp_hi", ts.clamp_hi);
    }
    for (const auto& tj : j.at("tiles")) {
      TileSpec tile;
      tile.row0 = tj.at("row0").get<std::int64_t>();
      tile.col0 = tj.at("col0").get<std::int64_t>();
      tile.rows = tj.at("rows").get<std::int32_t>();
      tile.cols = tj.at("cols").get<std::int32_t>();
      tile.gain = tj.value("gain", 1.0);
      tile.bias = tj.value("bias", 0.0);
      tile.gamma = tj.value("gamma", 1.0);
      tile.allow_disjoint = tj.value("disjoint", false);
      spec.tiles.push_back(tile);
    }
  } catch (const json::exception& err) {
    fail(path, std::string("bad scene spec: ") + err.what());
  }
  return spec;
}

void save_scene(const SceneSpec& spec, const fs::path& path) {
  json j;
  j["bands"] = spec.bands;
  j["range"] = {{"j_min", spec.quantization.j_min},
                {"j_max", spec.quantization.j_max},
                {"i_min", spec.quantization.out.i_min},
                {"i_max", spec.quantization.out.i_max}};
  j["truth"] = {{"base", spec.truth.base},
                {"gradient_row", spec.truth.gradient_row},
                {"gradient_col", spec.truth.gradient_col},
                {"blob_count", spec.truth.blob_count},
                {"blob_sigma_min", spec.truth.blob_sigma_min},
                {"blob_sigma_max", spec.truth.blob_sigma_max},
                {"blob_amplitude", spec.truth.blob_amplitude},
                {"checker_amplitude", spec.truth.checker_amplitude},
                {"checker_period", spec.truth.checker_period},
                {"clamp_lo", spec.truth.clamp_lo},
                {"clamp_hi", spec.truth.clamp_hi}};
  j["tiles"] = json::array();
  for (const TileSpec& t : spec.tiles) {
    json tj{{"row0", t.row0}, {"col0", t.col0}, {"rows", t.rows}, {"cols", t.cols},
            {"gain", t.gain}, {"bias", t.bias}, {"gamma", t.gamma}};
    if (t.allow_disjoint) tj["disjoint"] = true;
    j["tiles"].push_back(tj);
  }
  write_file_atomic(path, j.dump(2) + "\n");
}

std::string merge_log_text(const std::vector<MergeRecord>& records) {
  std::string out;
  int merged = 0, contained = 0, failed = 0, unreachable = 0;
  for (const MergeRecord& rec : records) {
    json j;
    j["id"] = rec.id;
    j["image"] = rec.image;
    j["outcome"] = to_string(rec.outcome);
    switch (rec.outcome) {
      case MergeRecord::Outcome::merged: {
        ++merged;
        j["overlap_pixels"] = rec.overlap_pixels;
        j["histmatch"] = rec.histmatch;
        if (rec.band_radius_used >= 0)
          j["band_radius"] = rec.band_radius_used;
        else
          j["band_radius"] = "max";
        j["omega_size"] = rec.omega_size;
        j["unknowns"] = rec.unknowns;
        j["iterations"] = rec.iterations;
        j["residual"] = rec.residual;
        break;
      }
      case MergeRecord::Outcome::contained: ++contained; j["detail"] = rec.detail; break;
      case MergeRecord::Outcome::failed: ++failed; j["detail"] = rec.detail; break;
      case MergeRecord::Outcome::unreachable: ++unreachable; j["detail"] = rec.detail; break;
    }
    out += j.dump();
    out += '\n';
  }
  json summary;
  summary["summary"] = {{"merged", merged},
                        {"contained", contained},
                        {"failed", failed},
                        {"unreachable", unreachable}};
  out += summary.dump();
  out += '\n';
  return out;
}

void write_merge_log(const std::vector<MergeRecord>& records, const fs::path& path) {
  write_file_atomic(path, merge_log_text(records));
}

std::string seam_csv_text(const SeamReport& report) {
  std::string out = "band,pairs,mean_abs,rms,max_abs\n";
  char line[160];
  for (std::size_t b = 0; b < report.per_band.size(); ++b) {
    const SeamStats& s = report.per_band[b];
    std::snprintf(line, sizeof line, "%zu,%llu,%.6f,%.6f,%lld\n", b,
                  static_cast<unsigned long long>(s.pairs), s.mean_abs, s.rms,
                  static_cast<long long>(s.max_abs));
    out += line;
  }
  const SeamStats& s = report.aggregate;
  std::snprintf(line, sizeof line, "all,%llu,%.6f,%.6f,%lld\n",
                static_cast<unsigned long long>(s.pairs), s.mean_abs, s.rms,
                static_cast<long long>(s.max_abs));
  out += line;
  return out;
}

void write_seam_csv(const SeamReport& report, const fs::path& path) {
  write_file_atomic(path, seam_csv_text(report));
}

}  // namespace rrn
