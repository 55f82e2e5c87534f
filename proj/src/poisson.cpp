#include "rrn/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rrn {

namespace {

constexpr int kNeighbors = 4;
constexpr std::int64_t kDr[kNeighbors] = {-1, 1, 0, 0};
constexpr std::int64_t kDc[kNeighbors] = {0, 0, -1, 1};

std::int32_t round_half_up(double v) { return static_cast<std::int32_t>(std::floor(v + 0.5)); }

}  // namespace

RegionPlan build_regions(const PointSet& s_o, const PointSet& s_r) {
  RegionPlan plan;
  plan.target = difference(s_o, interior(s_r));
  if (plan.target.empty())
    throw std::runtime_error("original fully contained in reference interior");
  plan.seam = intersect(plan.target, boundary(s_r));
  plan.source = interior(plan.target);
  plan.domain = plan.target;
  plan.domain_boundary = boundary(plan.target);
  return plan;
}

std::int32_t saturating_band_radius(const RegionPlan& plan) {
  const Box b = plan.target.bounds();
  const std::int64_t r = std::int64_t{b.rows} + b.cols;
  return static_cast<std::int32_t>(std::min<std::int64_t>(r, std::numeric_limits<std::int32_t>::max()));
}

RegionPlan restrict_regions(const RegionPlan& plan, std::int32_t d) {
  if (d < 0) throw std::invalid_argument("band radius must be non-negative");
  RegionPlan out;
  out.target = plan.target;
  out.seam = plan.seam;
  if (plan.seam.empty()) {
    // No replaced band: nothing to smooth, the solve degenerates to a no-op.
    return out;
  }
  if (d >= saturating_band_radius(plan)) {
    out.source = plan.source;
    out.domain = plan.target;
    out.domain_boundary = boundary(plan.target);
    return out;
  }
  const PointSet band_d = dilate(plan.seam, d);
  const PointSet band_d1 = dilate(band_d, 1);  // L1 balls compose: B_{d+1} = B_1(B_d)
  out.source = intersect(plan.source, band_d);
  out.domain = intersect(plan.target, band_d1);
  out.domain_boundary = boundary(out.domain);
  return out;
}

TargetImage assemble_target(const Raster& original, const Raster& reference,
                            const RegionPlan& plan, int band) {
  if (!contains_all(original.valid(), plan.target))
    throw std::domain_error("target region escapes the original image");
  if (!contains_all(reference.valid(), plan.seam))
    throw std::domain_error("seam pixels missing from the reference image");

  const Box b = plan.target.bounds();
  TargetImage t;
  t.offset = {b.row0, b.col0};
  t.band = band;
  t.values = GrayGrid::Zero(b.rows, b.cols);
  t.source = GrayGrid::Zero(b.rows, b.cols);
  t.from_reference = plan.seam;
  plan.target.for_each([&](GlobalCoord p) {
    const std::int32_t orig = original.sample(band, p);
    t.source(p.row - b.row0, p.col - b.col0) = orig;
    t.values(p.row - b.row0, p.col - b.col0) =
        plan.seam.contains(p) ? reference.sample(band, p) : orig;
  });
  return t;
}

SystemPattern build_pattern(const RegionPlan& plan) {
  SystemPattern pat;
  const PointSet unknowns = difference(plan.domain, plan.domain_boundary);
  pat.index_box = plan.domain.bounds();
  pat.index.assign(static_cast<std::size_t>(pat.index_box.rows) *
                       std::max<std::int32_t>(pat.index_box.cols, 0),
                   -1);
  pat.pixels.reserve(unknowns.cardinality());
  unknowns.for_each([&](GlobalCoord p) {
    pat.index[static_cast<std::size_t>(p.row - pat.index_box.row0) * pat.index_box.cols +
              (p.col - pat.index_box.col0)] = static_cast<std::int32_t>(pat.pixels.size());
    pat.pixels.push_back(p);
  });

  const Eigen::Index n = static_cast<Eigen::Index>(pat.pixels.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n) * 5);
  for (Eigen::Index i = 0; i < n; ++i) {
    const GlobalCoord p = pat.pixels[static_cast<std::size_t>(i)];
    int degree = 0;
    for (int k = 0; k < kNeighbors; ++k) {
      const GlobalCoord q{p.row + kDr[k], p.col + kDc[k]};
      if (!plan.domain.contains(q)) continue;
      ++degree;
      const std::int32_t j = pat.index_of(q);
      if (j >= 0) triplets.emplace_back(i, j, -1.0);
    }
    triplets.emplace_back(i, i, static_cast<double>(degree));
  }
  pat.matrix.resize(n, n);
  pat.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return pat;
}

Eigen::VectorXd assemble_rhs(const TargetImage& target, const RegionPlan& plan,
                             const SystemPattern& pattern) {
  const Eigen::Index n = pattern.unknowns();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const GlobalCoord p = pattern.pixels[static_cast<std::size_t>(i)];
    const bool p_in_source = plan.source.contains(p);
    double acc = 0.0;
    for (int k = 0; k < kNeighbors; ++k) {
      const GlobalCoord q{p.row + kDr[k], p.col + kDc[k]};
      if (!plan.domain.contains(q)) continue;
      if (pattern.index_of(q) < 0) acc += target.value(q);  // Dirichlet rim
      if (p_in_source && plan.source.contains(q))
        acc += static_cast<double>(target.source_value(p) - target.source_value(q));
    }
    rhs[i] = acc;
  }
  return rhs;
}

Eigen::VectorXd initial_guess(const TargetImage& target, const SystemPattern& pattern) {
  Eigen::VectorXd x0(pattern.unknowns());
  for (Eigen::Index i = 0; i < pattern.unknowns(); ++i)
    x0[i] = target.value(pattern.pixels[static_cast<std::size_t>(i)]);
  return x0;
}

SparseSystem assemble_system(const TargetImage& target, const RegionPlan& plan) {
  SparseSystem sys;
  sys.pattern = build_pattern(plan);
  sys.rhs = assemble_rhs(target, plan, sys.pattern);
  sys.guess = initial_guess(target, sys.pattern);
  return sys;
}

namespace {

SolveResult solve_cg(const Eigen::SparseMatrix<double, Eigen::RowMajor>& A,
                     const Eigen::VectorXd& b, const Eigen::VectorXd& x0,
                     const SolverConfig& cfg) {
  Eigen::VectorXd x = x0;
  Eigen::VectorXd r = b - A * x;
  const double norm0 = r.norm();
  if (norm0 == 0.0) return {std::move(x), 0, 0.0};
  const double threshold = cfg.rel_tolerance * norm0;

  const Eigen::VectorXd inv_diag = A.diagonal().cwiseInverse();
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  Eigen::VectorXd Ap(b.size());
  double rho = r.dot(z);
  double norm = norm0;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    Ap.noalias() = A * p;
    const double pAp = p.dot(Ap);
    if (!(pAp > 0.0))
      throw SolverFailure("conjugate gradient breakdown: matrix not positive definite",
                          norm / norm0, it);
    const double alpha = rho / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    norm = r.norm();
    if (norm <= threshold) return {std::move(x), it, norm / norm0};
    z = inv_diag.cwiseProduct(r);
    const double rho_next = r.dot(z);
    p = z + (rho_next / rho) * p;
    rho = rho_next;
  }
  throw SolverFailure("conjugate gradient hit the iteration cap", norm / norm0,
                      cfg.max_iterations);
}

SolveResult solve_gauss_seidel(const Eigen::SparseMatrix<double, Eigen::RowMajor>& A,
                               const Eigen::VectorXd& b, const Eigen::VectorXd& x0,
                               const SolverConfig& cfg) {
  Eigen::VectorXd x = x0;
  const double norm0 = (b - A * x).norm();
  if (norm0 == 0.0) return {std::move(x), 0, 0.0};
  const double threshold = cfg.rel_tolerance * norm0;

  double norm = norm0;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      double sum = b[i];
      double diag = 0.0;
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator entry(A, i); entry;
           ++entry) {
        if (entry.col() == i)
          diag = entry.value();
        else
          sum -= entry.value() * x[entry.col()];
      }
      x[i] = sum / diag;
    }
    norm = (b - A * x).norm();
    if (norm <= threshold) return {std::move(x), it, norm / norm0};
  }
  throw SolverFailure("gauss-seidel hit the iteration cap", norm / norm0, cfg.max_iterations);
}

}  // namespace

SolveResult solve(const Eigen::SparseMatrix<double, Eigen::RowMajor>& matrix,
                  const Eigen::VectorXd& rhs, const Eigen::VectorXd& x0,
                  const SolverConfig& cfg) {
  if (rhs.size() == 0) return {};
  if (matrix.rows() != rhs.size() || x0.size() != rhs.size())
    throw std::invalid_argument("system shape mismatch");
  for (Eigen::Index i = 0; i < matrix.rows(); ++i)
    if (!(matrix.coeff(i, i) > 0.0))
      throw std::invalid_argument("system diagonal must be positive");
  switch (cfg.method) {
    case SolverMethod::gauss_seidel: return solve_gauss_seidel(matrix, rhs, x0, cfg);
    case SolverMethod::conjugate_gradient: break;
  }
  return solve_cg(matrix, rhs, x0, cfg);
}

SolveResult solve(const SparseSystem& system, const SolverConfig& cfg) {
  return solve(system.pattern.matrix, system.rhs, system.guess, cfg);
}

Raster blend(const TargetImage& target, const SystemPattern& pattern,
             const Eigen::VectorXd& solution, const RegionPlan& plan, GrayRange range) {
  if (solution.size() != pattern.unknowns())
    throw std::invalid_argument("solution does not cover the unknowns");
  GrayGrid out = target.values;
  const GlobalCoord off = target.offset;
  for (Eigen::Index i = 0; i < solution.size(); ++i) {
    const GlobalCoord p = pattern.pixels[static_cast<std::size_t>(i)];
    const double clamped =
        std::clamp(solution[i], static_cast<double>(range.i_min), static_cast<double>(range.i_max));
    out(p.row - off.row, p.col - off.col) = round_half_up(clamped);
  }
  return Raster(off, {std::move(out)}, plan.target);
}

}  // namespace rrn
