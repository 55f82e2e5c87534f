#include "rrn/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace rrn {

namespace {

double next_unit(std::mt19937_64& rng) {
  // 53 uniform mantissa bits in [0, 1); avoids distribution objects so the
  // stream is identical on every platform.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Box tile_rect(const TileSpec& t) { return Box{t.row0, t.col0, t.rows, t.cols}; }

void validate(const SceneSpec& spec) {
  if (spec.bands < 1) throw std::invalid_argument("scene needs at least one band");
  if (spec.tiles.empty()) throw std::invalid_argument("scene has no tiles");
  for (const TileSpec& t : spec.tiles)
    if (t.rows <= 0 || t.cols <= 0) throw std::invalid_argument("degenerate tile in scene spec");
  if (spec.truth.clamp_lo < 0.0 || spec.truth.clamp_lo >= spec.truth.clamp_hi)
    throw std::invalid_argument("truth clamp range invalid");

  // Non-disjoint tiles must form one connected overlap graph.
  const std::size_t n = spec.tiles.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!box_intersection(tile_rect(spec.tiles[i]), tile_rect(spec.tiles[j])).empty())
        parent[find(i)] = find(j);
  std::size_t root = static_cast<std::size_t>(-1);
  for (std::size_t i = 0; i < n; ++i) {
    if (spec.tiles[i].allow_disjoint) continue;
    if (root == static_cast<std::size_t>(-1)) root = find(i);
    if (find(i) != root)
      throw std::invalid_argument("tile does not intersect the union of the others");
  }
}

}  // namespace

TruthField::TruthField(const SceneSpec& spec, std::uint64_t seed) : truth_(spec.truth) {
  Box hull;
  for (const TileSpec& t : spec.tiles) hull = box_hull(hull, tile_rect(t));
  center_row_ = hull.row0 + hull.rows / 2.0;
  center_col_ = hull.col0 + hull.cols / 2.0;

  std::mt19937_64 rng(seed);
  blobs_.reserve(static_cast<std::size_t>(std::max(truth_.blob_count, 0)));
  for (int k = 0; k < truth_.blob_count; ++k) {
    Blob blob;
    blob.row = hull.row0 + next_unit(rng) * hull.rows;
    blob.col = hull.col0 + next_unit(rng) * hull.cols;
    const double sigma =
        truth_.blob_sigma_min + next_unit(rng) * (truth_.blob_sigma_max - truth_.blob_sigma_min);
    blob.inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
    const double shared = truth_.blob_amplitude * (2.0 * next_unit(rng) - 1.0);
    blob.amplitude.resize(static_cast<std::size_t>(spec.bands));
    for (int b = 0; b < spec.bands; ++b)
      blob.amplitude[static_cast<std::size_t>(b)] = shared * (0.75 + 0.5 * next_unit(rng));
    blobs_.push_back(std::move(blob));
  }
}

double TruthField::at(int band, std::int64_t row, std::int64_t col) const {
  double v = truth_.base + truth_.gradient_row * (row - center_row_) +
             truth_.gradient_col * (col - center_col_);
  for (const Blob& blob : blobs_) {
    const double dr = row - blob.row;
    const double dc = col - blob.col;
    v += blob.amplitude[static_cast<std::size_t>(band)] *
         std::exp(-(dr * dr + dc * dc) * blob.inv_two_sigma_sq);
  }
  if (truth_.checker_amplitude != 0.0 && truth_.checker_period > 0) {
    const auto cell = [&](std::int64_t x) {
      std::int64_t q = x / truth_.checker_period;
      if (x < 0 && x % truth_.checker_period != 0) --q;
      return q;
    };
    v += ((cell(row) + cell(col)) % 2 == 0) ? truth_.checker_amplitude : -truth_.checker_amplitude;
  }
  return std::clamp(v, truth_.clamp_lo, truth_.clamp_hi);
}

std::vector<Raster> generate(const SceneSpec& spec, std::uint64_t seed) {
  validate(spec);
  const TruthField field(spec, seed);

  std::vector<Raster> tiles;
  tiles.reserve(spec.tiles.size());
  for (const TileSpec& t : spec.tiles) {
    std::vector<GrayGrid> bands;
    bands.reserve(static_cast<std::size_t>(spec.bands));
    for (int b = 0; b < spec.bands; ++b) {
      RealGrid values(t.rows, t.cols);
      for (std::int32_t r = 0; r < t.rows; ++r) {
        for (std::int32_t c = 0; c < t.cols; ++c) {
          const double gt = field.at(b, t.row0 + r, t.col0 + c);
          const double shaped = (t.gamma == 1.0) ? gt : std::pow(gt, t.gamma);
          values(r, c) = t.gain * shaped + t.bias;
        }
      }
      bands.push_back(quantize(values, spec.quantization));
    }
    tiles.emplace_back(GlobalCoord{t.row0, t.col0}, std::move(bands),
                       PointSet::rectangle({t.row0, t.col0}, t.rows, t.cols));
  }
  return tiles;
}

namespace {

struct Accumulator {
  std::uint64_t pairs = 0;
  double sum_abs = 0.0;
  double sum_sq = 0.0;
  std::int64_t max_abs = 0;

  void add(std::int64_t diff) {
    const std::int64_t a = std::abs(diff);
    ++pairs;
    sum_abs += static_cast<double>(a);
    sum_sq += static_cast<double>(a) * static_cast<double>(a);
    max_abs = std::max(max_abs, a);
  }
  SeamStats stats() const {
    SeamStats s;
    s.pairs = pairs;
    s.max_abs = max_abs;
    if (pairs) {
      s.mean_abs = sum_abs / static_cast<double>(pairs);
      s.rms = std::sqrt(sum_sq / static_cast<double>(pairs));
    }
    return s;
  }
};

}  // namespace

SeamReport seam_energy(const Raster& mosaic, const ProvenanceMap& provenance) {
  const int nb = mosaic.band_count();
  std::vector<Accumulator> band_acc(static_cast<std::size_t>(nb));
  Accumulator all;
  std::map<std::pair<std::int32_t, std::int32_t>, Accumulator> boundary_acc;

  // Each unordered straddling pair is visited once via the right and down
  // neighbors of every valid pixel.
  mosaic.valid().for_each([&](GlobalCoord p) {
    const std::int32_t id_p = provenance.at(p);
    if (id_p < 0) return;
    const GlobalCoord neighbors[2] = {{p.row, p.col + 1}, {p.row + 1, p.col}};
    for (const GlobalCoord& q : neighbors) {
      if (!mosaic.valid().contains(q)) continue;
      const std::int32_t id_q = provenance.at(q);
      if (id_q < 0 || id_q == id_p) continue;
      auto& pair_acc = boundary_acc[{std::min(id_p, id_q), std::max(id_p, id_q)}];
      for (int b = 0; b < nb; ++b) {
        const std::int64_t diff =
            std::int64_t{mosaic.sample(b, p)} - std::int64_t{mosaic.sample(b, q)};
        band_acc[static_cast<std::size_t>(b)].add(diff);
        all.add(diff);
        pair_acc.add(diff);
      }
    }
  });

  SeamReport report;
  report.per_band.reserve(static_cast<std::size_t>(nb));
  for (const Accumulator& acc : band_acc) report.per_band.push_back(acc.stats());
  report.aggregate = all.stats();
  for (const auto& [key, acc] : boundary_acc) report.per_boundary[key] = acc.stats();
  return report;
}

}  // namespace rrn
