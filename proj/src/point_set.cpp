#include "rrn/point_set.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <stdexcept>

namespace rrn {

namespace {

constexpr std::int64_t kMaxGridCells = std::int64_t{1} << 31;

std::int32_t checked_extent(std::int64_t lo, std::int64_t hi) {
  const std::int64_t n = hi - lo;
  if (n < 0 || n > std::numeric_limits<std::int32_t>::max())
    throw std::invalid_argument("point set extent out of range");
  return static_cast<std::int32_t>(n);
}

}  // namespace

Box box_intersection(const Box& a, const Box& b) {
  if (a.empty() || b.empty()) return {};
  const std::int64_t r0 = std::max(a.row0, b.row0);
  const std::int64_t c0 = std::max(a.col0, b.col0);
  const std::int64_t r1 = std::min(a.row_end(), b.row_end());
  const std::int64_t c1 = std::min(a.col_end(), b.col_end());
  if (r1 <= r0 || c1 <= c0) return {};
  return Box{r0, c0, checked_extent(r0, r1), checked_extent(c0, c1)};
}

Box box_hull(const Box& a, const Box& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  const std::int64_t r0 = std::min(a.row0, b.row0);
  const std::int64_t c0 = std::min(a.col0, b.col0);
  const std::int64_t r1 = std::max(a.row_end(), b.row_end());
  const std::int64_t c1 = std::max(a.col_end(), b.col_end());
  return Box{r0, c0, checked_extent(r0, r1), checked_extent(c0, c1)};
}

int PointSet::lowest_bit(std::uint64_t bits) { return std::countr_zero(bits); }

void PointSet::reset_box(const Box& box) {
  if (static_cast<std::int64_t>(box.rows) * box.cols > kMaxGridCells)
    throw std::invalid_argument("point set grid too large");
  box_ = box;
  wpr_ = box.empty() ? 0 : (box.cols + 63) / 64;
  words_.assign(static_cast<std::size_t>(box.rows) * wpr_, 0);
  count_ = 0;
}

void PointSet::set_bit(std::int32_t rel_row, std::int32_t rel_col) {
  words_[static_cast<std::size_t>(rel_row) * wpr_ + (rel_col >> 6)] |=
      std::uint64_t{1} << (rel_col & 63);
}

bool PointSet::contains(std::int64_t row, std::int64_t col) const {
  if (!box_.contains({row, col})) return false;
  const std::int64_t rel = col - box_.col0;
  const std::uint64_t word =
      words_[static_cast<std::size_t>(row - box_.row0) * wpr_ + (rel >> 6)];
  return (word >> (rel & 63)) & 1;
}

bool PointSet::contains(GlobalCoord p) const { return contains(p.row, p.col); }

std::uint64_t PointSet::fetch_word(std::int64_t row, std::int64_t word_index) const {
  if (word_index < 0 || word_index >= wpr_) return 0;
  return words_[static_cast<std::size_t>(row - box_.row0) * wpr_ + word_index];
}

std::uint64_t PointSet::window(std::int64_t row, std::int64_t col) const {
  if (box_.empty() || row < box_.row0 || row >= box_.row_end()) return 0;
  const std::int64_t rel = col - box_.col0;
  const std::int64_t w = rel >> 6;  // floor division
  const int s = static_cast<int>(rel & 63);
  const std::uint64_t lo = fetch_word(row, w);
  if (s == 0) return lo;
  const std::uint64_t hi = fetch_word(row, w + 1);
  return (lo >> s) | (hi << (64 - s));
}

void PointSet::mask_row_tails() {
  if (box_.empty() || wpr_ == 0) return;
  const int tail = box_.cols & 63;
  if (tail == 0) return;
  const std::uint64_t mask = (std::uint64_t{1} << tail) - 1;
  for (std::int32_t r = 0; r < box_.rows; ++r)
    words_[static_cast<std::size_t>(r) * wpr_ + wpr_ - 1] &= mask;
}

void PointSet::recount() {
  std::size_t n = 0;
  for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
  count_ = n;
}

void PointSet::tighten() {
  if (count_ == 0) {
    box_ = {};
    wpr_ = 0;
    words_.clear();
    return;
  }
  std::int32_t rmin = box_.rows, rmax = -1;
  std::int64_t cmin = box_.cols, cmax = -1;
  for (std::int32_t r = 0; r < box_.rows; ++r) {
    const std::uint64_t* row_words = words_.data() + static_cast<std::size_t>(r) * wpr_;
    bool any = false;
    for (std::int32_t w = 0; w < wpr_; ++w) {
      const std::uint64_t bits = row_words[w];
      if (!bits) continue;
      any = true;
      cmin = std::min<std::int64_t>(cmin, 64 * std::int64_t{w} + std::countr_zero(bits));
      cmax = std::max<std::int64_t>(cmax, 64 * std::int64_t{w} + 63 - std::countl_zero(bits));
    }
    if (any) {
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
    }
  }
  const Box tight{box_.row0 + rmin, box_.col0 + cmin,
                  rmax - rmin + 1, static_cast<std::int32_t>(cmax - cmin + 1)};
  if (tight == box_) return;

  PointSet packed;
  packed.reset_box(tight);
  for (std::int32_t r = 0; r < tight.rows; ++r)
    for (std::int32_t w = 0; w < packed.wpr_; ++w)
      packed.words_[static_cast<std::size_t>(r) * packed.wpr_ + w] =
          window(tight.row0 + r, tight.col0 + 64 * std::int64_t{w});
  packed.mask_row_tails();
  packed.count_ = count_;
  *this = std::move(packed);
}

PointSet PointSet::rectangle(GlobalCoord top_left, std::int32_t rows, std::int32_t cols) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("negative rectangle extent");
  PointSet s;
  if (rows == 0 || cols == 0) return s;
  s.reset_box(Box{top_left.row, top_left.col, rows, cols});
  for (std::int32_t r = 0; r < rows; ++r)
    for (std::int32_t w = 0; w < s.wpr_; ++w)
      s.words_[static_cast<std::size_t>(r) * s.wpr_ + w] = ~std::uint64_t{0};
  s.mask_row_tails();
  s.count_ = static_cast<std::size_t>(rows) * cols;
  return s;
}

PointSet PointSet::from_points(const std::vector<GlobalCoord>& points) {
  PointSet s;
  if (points.empty()) return s;
  std::int64_t r0 = points[0].row, r1 = points[0].row;
  std::int64_t c0 = points[0].col, c1 = points[0].col;
  for (const auto& p : points) {
    r0 = std::min(r0, p.row);
    r1 = std::max(r1, p.row);
    c0 = std::min(c0, p.col);
    c1 = std::max(c1, p.col);
  }
  s.reset_box(Box{r0, c0, checked_extent(r0, r1 + 1), checked_extent(c0, c1 + 1)});
  for (const auto& p : points)
    s.set_bit(static_cast<std::int32_t>(p.row - r0), static_cast<std::int32_t>(p.col - c0));
  s.recount();
  return s;
}

std::vector<GlobalCoord> PointSet::to_points() const {
  std::vector<GlobalCoord> out;
  out.reserve(count_);
  for_each([&](GlobalCoord p) { out.push_back(p); });
  return out;
}

bool operator==(const PointSet& a, const PointSet& b) {
  return a.count_ == b.count_ && a.box_ == b.box_ && a.words_ == b.words_;
}

template <class WordFn>
PointSet PointSet::combine(const Box& out, WordFn fn) {
  PointSet s;
  if (out.empty()) return s;
  s.reset_box(out);
  for (std::int32_t r = 0; r < out.rows; ++r) {
    const std::int64_t row = out.row0 + r;
    for (std::int32_t w = 0; w < s.wpr_; ++w) {
      const std::int64_t col = out.col0 + 64 * std::int64_t{w};
      s.words_[static_cast<std::size_t>(r) * s.wpr_ + w] = fn(row, col);
    }
  }
  s.finalize();
  return s;
}

PointSet intersect(const PointSet& a, const PointSet& b) {
  const Box out = box_intersection(a.bounds(), b.bounds());
  return PointSet::combine(out, [&](std::int64_t row, std::int64_t col) {
    return a.window(row, col) & b.window(row, col);
  });
}

PointSet difference(const PointSet& a, const PointSet& b) {
  return PointSet::combine(a.bounds(), [&](std::int64_t row, std::int64_t col) {
    return a.window(row, col) & ~b.window(row, col);
  });
}

PointSet unite(const PointSet& a, const PointSet& b) {
  const Box out = box_hull(a.bounds(), b.bounds());
  return PointSet::combine(out, [&](std::int64_t row, std::int64_t col) {
    return a.window(row, col) | b.window(row, col);
  });
}

PointSet interior(const PointSet& s) {
  return PointSet::combine(s.bounds(), [&](std::int64_t row, std::int64_t col) {
    return s.window(row, col) & s.window(row - 1, col) & s.window(row + 1, col) &
           s.window(row, col - 1) & s.window(row, col + 1);
  });
}

PointSet boundary(const PointSet& s) { return difference(s, interior(s)); }

PointSet dilate(const PointSet& s, std::int32_t d) {
  if (d < 0) throw std::invalid_argument("negative dilation radius");
  if (d == 0 || s.empty()) return s;

  const Box in = s.bounds();
  const Box out{in.row0 - d, in.col0 - d,
                checked_extent(0, std::int64_t{in.rows} + 2 * std::int64_t{d}),
                checked_extent(0, std::int64_t{in.cols} + 2 * std::int64_t{d})};
  const std::int64_t cells = std::int64_t{out.rows} * out.cols;
  if (cells > kMaxGridCells) throw std::invalid_argument("dilation grid too large");

  // Exact L1 distance transform: two chamfer sweeps over the padded box.
  const std::int32_t inf = std::numeric_limits<std::int32_t>::max() / 2;
  std::vector<std::int32_t> dist(static_cast<std::size_t>(cells), inf);
  s.for_each([&](GlobalCoord p) {
    dist[static_cast<std::size_t>(p.row - out.row0) * out.cols + (p.col - out.col0)] = 0;
  });
  for (std::int32_t r = 0; r < out.rows; ++r) {
    std::int32_t* row = dist.data() + static_cast<std::size_t>(r) * out.cols;
    const std::int32_t* up = r > 0 ? row - out.cols : nullptr;
    for (std::int32_t c = 0; c < out.cols; ++c) {
      std::int32_t v = row[c];
      if (up && up[c] + 1 < v) v = up[c] + 1;
      if (c > 0 && row[c - 1] + 1 < v) v = row[c - 1] + 1;
      row[c] = v;
    }
  }
  for (std::int32_t r = out.rows - 1; r >= 0; --r) {
    std::int32_t* row = dist.data() + static_cast<std::size_t>(r) * out.cols;
    const std::int32_t* down = r + 1 < out.rows ? row + out.cols : nullptr;
    for (std::int32_t c = out.cols - 1; c >= 0; --c) {
      std::int32_t v = row[c];
      if (down && down[c] + 1 < v) v = down[c] + 1;
      if (c + 1 < out.cols && row[c + 1] + 1 < v) v = row[c + 1] + 1;
      row[c] = v;
    }
  }

  PointSet result;
  result.reset_box(out);
  for (std::int32_t r = 0; r < out.rows; ++r) {
    const std::int32_t* row = dist.data() + static_cast<std::size_t>(r) * out.cols;
    for (std::int32_t c = 0; c < out.cols; ++c)
      if (row[c] <= d) result.set_bit(r, c);
  }
  result.finalize();
  return result;
}

bool contains_all(const PointSet& outer, const PointSet& inner) {
  const Box b = inner.bounds();
  for (std::int64_t row = b.row0; row < b.row_end(); ++row)
    for (std::int64_t col = b.col0; col < b.col_end(); col += 64)
      if (inner.window(row, col) & ~outer.window(row, col)) return false;
  return true;
}

}  // namespace rrn
