#pragma once

#include <Eigen/SparseCore>
#include <stdexcept>
#include <string>
#include <vector>

#include "rrn/histmatch.hpp"
#include "rrn/raster.hpp"

namespace rrn {

/// Region system of one stitch: what the original adds (target), where the
/// gradients come from (source), the replaced band along the reference edge
/// (seam), and the solve domain with its Dirichlet rim.
struct RegionPlan {
  PointSet target;
  PointSet source;
  PointSet seam;
  PointSet domain;
  PointSet domain_boundary;
};

/// Derives the stitch regions from the two footprints. Throws when the
/// original is swallowed by the reference interior (nothing to add).
RegionPlan build_regions(const PointSet& s_o, const PointSet& s_r);

/// Shrinks the solve to a Manhattan band of radius d around the seam:
/// source ∩ B_d(seam) donates gradients, target ∩ B_{d+1}(seam) is solved.
/// Pixels outside the band keep their composite values untouched.
RegionPlan restrict_regions(const RegionPlan& plan, std::int32_t d);

/// A radius large enough that restrict_regions() keeps the full target.
std::int32_t saturating_band_radius(const RegionPlan& plan);

/// One band of the stitch composite: original samples with reference samples
/// on the seam, plus the untouched original band as the gradient donor.
struct TargetImage {
  GlobalCoord offset;
  GrayGrid values;
  GrayGrid source;
  PointSet from_reference;
  int band = 0;

  std::int32_t value(GlobalCoord p) const { return values(p.row - offset.row, p.col - offset.col); }
  std::int32_t source_value(GlobalCoord p) const {
    return source(p.row - offset.row, p.col - offset.col);
  }
};

TargetImage assemble_target(const Raster& original, const Raster& reference,
                            const RegionPlan& plan, int band);

/// Geometry of the discrete Laplacian over the solve domain; shared by every
/// band of one stitch (only the right-hand side differs per band).
struct SystemPattern {
  std::vector<GlobalCoord> pixels;  // unknown index -> pixel, row-major
  Box index_box;
  std::vector<std::int32_t> index;  // dense over index_box, -1 where not an unknown
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;

  Eigen::Index unknowns() const { return matrix.rows(); }
  std::int32_t index_of(GlobalCoord p) const {
    if (!index_box.contains(p)) return -1;
    return index[static_cast<std::size_t>(p.row - index_box.row0) * index_box.cols +
                 (p.col - index_box.col0)];
  }
};

SystemPattern build_pattern(const RegionPlan& plan);

Eigen::VectorXd assemble_rhs(const TargetImage& target, const RegionPlan& plan,
                             const SystemPattern& pattern);

/// Warm start: the composite's own values at the unknowns.
Eigen::VectorXd initial_guess(const TargetImage& target, const SystemPattern& pattern);

struct SparseSystem {
  SystemPattern pattern;
  Eigen::VectorXd rhs;
  Eigen::VectorXd guess;
};

SparseSystem assemble_system(const TargetImage& target, const RegionPlan& plan);

enum class SolverMethod { conjugate_gradient, gauss_seidel };

struct SolverConfig {
  double rel_tolerance = 1e-8;
  int max_iterations = 10000;
  SolverMethod method = SolverMethod::conjugate_gradient;
};

struct SolveResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double residual_ratio = 0.0;  // final residual norm / initial residual norm
};

class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& msg, double ratio, int iters)
      : std::runtime_error(msg), residual_ratio(ratio), iterations(iters) {}
  double residual_ratio;
  int iterations;
};

SolveResult solve(const Eigen::SparseMatrix<double, Eigen::RowMajor>& matrix,
                  const Eigen::VectorXd& rhs, const Eigen::VectorXd& x0, const SolverConfig& cfg);
SolveResult solve(const SparseSystem& system, const SolverConfig& cfg);

/// Writes the solved values back over the composite: solved pixels get the
/// clamped, half-up-rounded solution, everything else stays bit-identical.
Raster blend(const TargetImage& target, const SystemPattern& pattern,
             const Eigen::VectorXd& solution, const RegionPlan& plan, GrayRange range);

}  // namespace rrn
