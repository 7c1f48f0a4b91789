#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ewl {

inline constexpr std::size_t kDefaultLeafCap = std::size_t{1} << 20;

/// Dimension, root cube and truncation depth of a finite dyadic model.
struct GridSpec {
  int dimension = 1;
  int depth = 0;
  std::vector<double> origin;  // empty means the zero vector
  double side = 1.0;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// A node of the global binary tree formed by the Wilson rectangles.
///
/// Node 1 is the root cube Q0. Node `id` has halves `2*id` (E1, lower half
/// along the split axis) and `2*id + 1` (E2, upper half). Nodes at level
/// `n*d` are the leaf cubes; every other node is a Wilson rectangle. A node at
/// level `t` splits along axis `t % n`, so level `k*n` nodes are the dyadic
/// cubes of scale `k` and the `2^n - 1` nodes between two cube levels are the
/// rectangles E_{F,i} of their common base cube F, heap indexed.
struct Node {
  std::uint32_t id = 1;

  friend constexpr auto operator<=>(Node, Node) = default;
};

/// Dyadic cube of scale `scale` (side 2^-scale of the root side); `index` is
/// its integer position along each axis, in [0, 2^scale).
struct DyadicCube {
  int scale = 0;
  std::vector<std::int64_t> index;

  friend bool operator==(const DyadicCube&, const DyadicCube&) = default;
};

/// Wilson rectangle E_{F,i}, i in [1, 2^n - 1].
struct WilsonRectangle {
  DyadicCube base;
  int wilson_index = 1;

  friend bool operator==(const WilsonRectangle&, const WilsonRectangle&) = default;
};

/// Axis-aligned box in leaf units: [lo[a], hi[a]) along each axis a.
struct LeafBox {
  std::vector<std::int64_t> lo;
  std::vector<std::int64_t> hi;

  bool contains(const LeafBox& other) const;
  bool intersects(const LeafBox& other) const;
  std::int64_t cell_count() const;

  friend bool operator==(const LeafBox&, const LeafBox&) = default;
};

class Grid {
 public:
  explicit Grid(GridSpec spec, std::size_t leaf_cap = kDefaultLeafCap);

  const GridSpec& spec() const { return spec_; }
  int dimension() const { return spec_.dimension; }
  int depth() const { return spec_.depth; }
  /// Number of tree levels below the root, n*d.
  int levels() const { return levels_; }

  std::size_t leaf_count() const { return leaf_count_; }
  std::size_t rectangle_count() const { return leaf_count_ - 1; }
  /// Nodes are ids in [1, node_end()).
  std::uint32_t node_end() const { return static_cast<std::uint32_t>(2 * leaf_count_); }

  Node root() const { return Node{1}; }
  int level(Node e) const;
  bool is_leaf(Node e) const { return e.id >= leaf_count_; }
  bool is_rectangle(Node e) const { return e.id >= 1 && e.id < leaf_count_; }
  bool is_cube(Node e) const { return level(e) % spec_.dimension == 0; }
  int split_axis(Node e) const { return level(e) % spec_.dimension; }

  Node first_half(Node e) const { return Node{2 * e.id}; }
  Node second_half(Node e) const { return Node{2 * e.id + 1}; }
  Node parent(Node e) const { return Node{e.id > 1 ? e.id / 2 : 1}; }

  /// Volume-2^r ancestor of `e`, clipped at level `root_level`.
  Node ancestor(Node e, int r, int root_level = 0) const;
  bool contains(Node outer, Node inner) const;

  /// Leaves covered by `e`, as a half-open range of tree-order positions.
  std::pair<std::size_t, std::size_t> leaf_range(Node e) const;
  Node leaf_at(std::size_t tree_pos) const {
    return Node{static_cast<std::uint32_t>(leaf_count_ + tree_pos)};
  }
  std::size_t tree_position(Node leaf) const { return leaf.id - leaf_count_; }

  double root_volume() const;
  double volume(Node e) const;
  double leaf_volume() const { return volume(leaf_at(0)); }

  LeafBox box(Node e) const;
  /// Real coordinates of the center of a leaf (tree order).
  std::vector<double> leaf_center(std::size_t tree_pos) const;

  /// Tree order visits leaves in bit-interleaved (Morton) order; lexicographic
  /// order enumerates the index tuple with axis 0 most significant.
  std::size_t tree_to_lex(std::size_t tree_pos) const;
  std::size_t lex_to_tree(std::size_t lex_pos) const;

  Node node_of(const DyadicCube& q) const;
  DyadicCube cube_of(Node e) const;
  Node node_of(const WilsonRectangle& e) const;
  WilsonRectangle wilson_of(Node e) const;

  /// E_{F,1}, ..., E_{F,2^n-1} in heap order.
  std::vector<Node> wilson_rectangles(const DyadicCube& base) const;

  /// "n=2 d=3 Q0=[0,1)^2"-style label used in reports and errors.
  std::string describe(Node e) const;

  friend bool operator==(const Grid& a, const Grid& b) { return a.spec_ == b.spec_; }

 private:
  GridSpec spec_;
  int levels_ = 0;
  std::size_t leaf_count_ = 1;
};

}  // namespace ewl
