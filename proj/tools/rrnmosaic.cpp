#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "rrn/bundle_io.hpp"
#include "rrn/harness.hpp"
#include "rrn/mosaic.hpp"

namespace fs = std::filesystem;

namespace {

constexpr rrn::GrayRange kGray{0, 255};

int run_mosaic(const std::string& reference, const std::vector<std::string>& inputs,
               const rrn::PipelineConfig& cfg, const std::string& out, const std::string& log,
               const std::string& provenance) {
  rrn::MosaicJob job;
  job.config = cfg;
  job.reference = rrn::load_bundle(reference, cfg.gray);
  job.reference_name = fs::path(reference).filename().string();
  for (const std::string& path : inputs) {
    job.candidates.push_back(rrn::load_bundle(path, cfg.gray));
    job.candidate_names.push_back(fs::path(path).filename().string());
  }

  rrn::JobResult result = rrn::run(job);
  rrn::save_bundle(result.mosaic, out, cfg.gray);
  rrn::write_merge_log(result.records, log);
  if (!provenance.empty()) rrn::save_provenance(result.provenance, provenance);

  int failed = 0;
  for (const rrn::MergeRecord& rec : result.records) {
    std::fprintf(stderr, "%-24s %s", rec.image.c_str(), rrn::to_string(rec.outcome));
    if (rec.outcome == rrn::MergeRecord::Outcome::merged) {
      std::fprintf(stderr,
                   "  overlap=%llu unknowns=%llu iters=%d"
                   "  [histmatch %.2fs, regions %.2fs, solve %.2fs, merge %.2fs]",
                   static_cast<unsigned long long>(rec.overlap_pixels),
                   static_cast<unsigned long long>(rec.unknowns), rec.iterations,
                   rec.seconds_histmatch, rec.seconds_regions, rec.seconds_solve,
                   rec.seconds_merge);
    } else {
      std::fprintf(stderr, "  (%s)", rec.detail.c_str());
      if (rec.outcome == rrn::MergeRecord::Outcome::failed) ++failed;
    }
    std::fprintf(stderr, "\n");
  }
  if (failed) {
    std::fprintf(stderr, "%d image(s) failed\n", failed);
    return 1;
  }
  return 0;
}

int run_synth(const std::string& spec_path, std::uint64_t seed, const std::string& out_dir) {
  const rrn::SceneSpec spec = rrn::load_scene(spec_path);
  const std::vector<rrn::Raster> tiles = rrn::generate(spec, seed);
  fs::create_directories(out_dir);
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "tile_%02zu.json", i);
    const fs::path sidecar = fs::path(out_dir) / name;
    rrn::save_bundle(tiles[i], sidecar, spec.quantization.out);
    std::printf("%s\n", sidecar.string().c_str());
  }
  return 0;
}

int run_report(const std::string& mosaic_path, const std::string& provenance_path,
               const std::string& out) {
  const rrn::Raster mosaic = rrn::load_bundle_raw(mosaic_path);
  const rrn::ProvenanceMap provenance = rrn::load_provenance(provenance_path);
  rrn::write_seam_csv(rrn::seam_energy(mosaic, provenance), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seamless raster mosaicking: overlap histogram matching + Poisson seam editing"};
  app.require_subcommand(1);

  std::string reference, out, log, provenance;
  std::vector<std::string> inputs;
  rrn::PipelineConfig cfg;
  cfg.gray = kGray;
  bool no_histmatch = false, no_poisson = false;

  CLI::App* mosaic = app.add_subcommand("mosaic", "Mosaic inputs onto a reference image");
  mosaic->add_option("--reference", reference, "reference bundle sidecar")->required();
  mosaic->add_option("--inputs", inputs, "input bundle sidecars")->required()->expected(-1);
  mosaic->add_option("-d", cfg.band_radius, "Manhattan radius of the solve band around the seam")
      ->capture_default_str();
  mosaic->add_option("--skip-min-overlap", cfg.sufficiency.min_overlap_pixels,
                     "smallest overlap that still supports histogram matching")
      ->capture_default_str();
  mosaic->add_option("--skip-min-levels", cfg.sufficiency.min_distinct_levels,
                     "smallest per-band gray diversity that still supports matching")
      ->capture_default_str();
  mosaic->add_option("--tol", cfg.solver.rel_tolerance, "relative residual tolerance")
      ->capture_default_str();
  mosaic->add_option("--max-iters", cfg.solver.max_iterations, "solver iteration cap")
      ->capture_default_str();
  mosaic->add_flag("--no-histmatch", no_histmatch, "skip histogram matching");
  mosaic->add_flag("--no-poisson", no_poisson, "skip Poisson editing");
  mosaic->add_option("--out", out, "output mosaic sidecar path")->required();
  mosaic->add_option("--log", log, "merge log path (JSON lines)")->required();
  mosaic->add_option("--provenance", provenance, "optional provenance bundle output");

  std::string scene_path, out_dir;
  std::uint64_t seed = 0;
  CLI::App* synth = app.add_subcommand("synth", "Render a synthetic tile set from a scene spec");
  synth->add_option("--spec", scene_path, "scene spec JSON")->required();
  synth->add_option("--seed", seed, "scene seed")->required();
  synth->add_option("--out-dir", out_dir, "directory for the tile bundles")->required();

  std::string mosaic_path, provenance_path, csv_out;
  CLI::App* report = app.add_subcommand("report", "Seam statistics of a finished mosaic");
  report->add_option("--mosaic", mosaic_path, "mosaic bundle sidecar")->required();
  report->add_option("--provenance", provenance_path, "provenance bundle sidecar")->required();
  report->add_option("--out", csv_out, "CSV output path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (mosaic->parsed()) {
      cfg.histmatch_enabled = !no_histmatch;
      cfg.poisson_enabled = !no_poisson;
      return run_mosaic(reference, inputs, cfg, out, log, provenance);
    }
    if (synth->parsed()) return run_synth(scene_path, seed, out_dir);
    if (report->parsed()) return run_report(mosaic_path, provenance_path, csv_out);
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  }
  return 0;
}
