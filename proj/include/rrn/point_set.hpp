#pragma once

#include <cstdint>
#include <vector>

namespace rrn {

/// A pixel position on the shared global integer grid.
struct GlobalCoord {
  std::int64_t row = 0;
  std::int64_t col = 0;
  friend bool operator==(const GlobalCoord&, const GlobalCoord&) = default;
};

/// Axis-aligned box of grid cells: rows x cols anchored at (row0, col0).
struct Box {
  std::int64_t row0 = 0;
  std::int64_t col0 = 0;
  std::int32_t rows = 0;
  std::int32_t cols = 0;

  bool empty() const { return rows <= 0 || cols <= 0; }
  std::int64_t row_end() const { return row0 + rows; }
  std::int64_t col_end() const { return col0 + cols; }
  bool contains(GlobalCoord p) const {
    return p.row >= row0 && p.row < row_end() && p.col >= col0 && p.col < col_end();
  }
  friend bool operator==(const Box&, const Box&) = default;
};

Box box_intersection(const Box& a, const Box& b);
Box box_hull(const Box& a, const Box& b);

/// A set of pixels stored as a packed bit grid over its tight bounding box.
///
/// The representation is canonical: bounds always shrink to the tight box of
/// the members, so two sets are equal iff their boxes and bit grids match.
/// Bit k of word w in a row covers column col0 + 64*w + k.
class PointSet {
 public:
  PointSet() = default;

  static PointSet rectangle(GlobalCoord top_left, std::int32_t rows, std::int32_t cols);
  static PointSet from_points(const std::vector<GlobalCoord>& points);

  /// Membership decided by pred(row, col) over every cell of `box`.
  template <class Pred>
  static PointSet from_predicate(const Box& box, Pred pred) {
    PointSet s;
    if (box.empty()) return s;
    s.reset_box(box);
    for (std::int32_t r = 0; r < box.rows; ++r)
      for (std::int32_t c = 0; c < box.cols; ++c)
        if (pred(box.row0 + r, box.col0 + c)) s.set_bit(r, c);
    s.finalize();
    return s;
  }

  bool empty() const { return count_ == 0; }
  std::size_t cardinality() const { return count_; }
  const Box& bounds() const { return box_; }

  bool contains(GlobalCoord p) const;
  bool contains(std::int64_t row, std::int64_t col) const;

  /// 64 membership bits for (row, col) .. (row, col+63); zero off the box.
  std::uint64_t window(std::int64_t row, std::int64_t col) const;

  /// Visits members in row-major order.
  template <class Fn>
  void for_each(Fn fn) const {
    for (std::int32_t r = 0; r < box_.rows; ++r) {
      const std::uint64_t* row_words = words_.data() + static_cast<std::size_t>(r) * wpr_;
      for (std::int32_t w = 0; w < wpr_; ++w) {
        std::uint64_t bits = row_words[w];
        while (bits) {
          const int k = lowest_bit(bits);
          bits &= bits - 1;
          fn(GlobalCoord{box_.row0 + r, box_.col0 + 64 * static_cast<std::int64_t>(w) + k});
        }
      }
    }
  }

  std::vector<GlobalCoord> to_points() const;

  friend bool operator==(const PointSet& a, const PointSet& b);

  friend PointSet intersect(const PointSet& a, const PointSet& b);
  friend PointSet difference(const PointSet& a, const PointSet& b);
  friend PointSet unite(const PointSet& a, const PointSet& b);
  friend PointSet interior(const PointSet& s);
  friend PointSet dilate(const PointSet& s, std::int32_t d);

 private:
  static int lowest_bit(std::uint64_t bits);

  void reset_box(const Box& box);
  void set_bit(std::int32_t rel_row, std::int32_t rel_col);
  std::uint64_t fetch_word(std::int64_t row, std::int64_t word_index) const;
  void mask_row_tails();
  void recount();
  void tighten();
  void finalize() {
    mask_row_tails();
    recount();
    tighten();
  }

  template <class WordFn>
  static PointSet combine(const Box& out, WordFn fn);

  Box box_;
  std::int32_t wpr_ = 0;  // words per row
  std::vector<std::uint64_t> words_;
  std::size_t count_ = 0;
};

PointSet intersect(const PointSet& a, const PointSet& b);
PointSet difference(const PointSet& a, const PointSet& b);
PointSet unite(const PointSet& a, const PointSet& b);

/// Pixels whose four 4-connected neighbors all belong to the set.
PointSet interior(const PointSet& s);

/// s minus its interior.
PointSet boundary(const PointSet& s);

/// Union of Manhattan balls of radius d around every member; not clipped.
PointSet dilate(const PointSet& s, std::int32_t d);

/// True when every member of inner lies in outer.
bool contains_all(const PointSet& outer, const PointSet& inner);

}  // namespace rrn
