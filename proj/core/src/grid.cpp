#include "ewl/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "ewl/errors.hpp"

namespace ewl {

bool LeafBox::contains(const LeafBox& other) const {
  for (std::size_t a = 0; a < lo.size(); ++a) {
    if (other.lo[a] < lo[a] || other.hi[a] > hi[a]) return false;
  }
  return true;
}

bool LeafBox::intersects(const LeafBox& other) const {
  for (std::size_t a = 0; a < lo.size(); ++a) {
    if (other.hi[a] <= lo[a] || other.lo[a] >= hi[a]) return false;
  }
  return true;
}

std::int64_t LeafBox::cell_count() const {
  std::int64_t count = 1;
  for (std::size_t a = 0; a < lo.size(); ++a) count *= hi[a] - lo[a];
  return count;
}

Grid::Grid(GridSpec spec, std::size_t leaf_cap) : spec_(std::move(spec)) {
  if (spec_.dimension < 1) throw DomainError("grid dimension must be >= 1");
  if (spec_.depth < 0) throw DomainError("grid depth must be >= 0");
  if (!(spec_.side > 0.0)) throw DomainError("root side length must be positive");
  if (spec_.origin.empty()) spec_.origin.assign(static_cast<std::size_t>(spec_.dimension), 0.0);
  if (spec_.origin.size() != static_cast<std::size_t>(spec_.dimension)) {
    throw DomainError("root origin has " + std::to_string(spec_.origin.size()) +
                      " coordinates, expected " + std::to_string(spec_.dimension));
  }
  const long long levels = static_cast<long long>(spec_.dimension) * spec_.depth;
  if (levels > 30 || (std::size_t{1} << levels) > leaf_cap) {
    throw SizeError("grid with n=" + std::to_string(spec_.dimension) +
                    " d=" + std::to_string(spec_.depth) + " has 2^" + std::to_string(levels) +
                    " leaves, above the cap of " + std::to_string(leaf_cap));
  }
  levels_ = static_cast<int>(levels);
  leaf_count_ = std::size_t{1} << levels_;
}

int Grid::level(Node e) const { return std::bit_width(e.id) - 1; }

Node Grid::ancestor(Node e, int r, int root_level) const {
  const int t = level(e);
  const int target = std::max(t - r, std::min(root_level, t));
  return Node{e.id >> (t - target)};
}

bool Grid::contains(Node outer, Node inner) const {
  const int lo = level(outer);
  const int li = level(inner);
  return lo <= li && (inner.id >> (li - lo)) == outer.id;
}

std::pair<std::size_t, std::size_t> Grid::leaf_range(Node e) const {
  const int t = level(e);
  const std::size_t q = e.id - (std::size_t{1} << t);
  const std::size_t span = leaf_count_ >> t;
  return {q * span, (q + 1) * span};
}

double Grid::root_volume() const { return std::pow(spec_.side, spec_.dimension); }

double Grid::volume(Node e) const { return std::ldexp(root_volume(), -level(e)); }

LeafBox Grid::box(Node e) const {
  const int n = spec_.dimension;
  const int t = level(e);
  const std::uint64_t q = e.id - (std::uint64_t{1} << t);
  std::vector<std::int64_t> coord(static_cast<std::size_t>(n), 0);
  std::vector<int> splits(static_cast<std::size_t>(n), 0);
  for (int j = 0; j < t; ++j) {
    const auto a = static_cast<std::size_t>(j % n);
    const std::int64_t bit = static_cast<std::int64_t>((q >> (t - 1 - j)) & 1u);
    coord[a] = (coord[a] << 1) | bit;
    ++splits[a];
  }
  LeafBox b;
  b.lo.resize(static_cast<std::size_t>(n));
  b.hi.resize(static_cast<std::size_t>(n));
  for (std::size_t a = 0; a < static_cast<std::size_t>(n); ++a) {
    const std::int64_t width = std::int64_t{1} << (spec_.depth - splits[a]);
    b.lo[a] = coord[a] * width;
    b.hi[a] = b.lo[a] + width;
  }
  return b;
}

std::vector<double> Grid::leaf_center(std::size_t tree_pos) const {
  const LeafBox b = box(leaf_at(tree_pos));
  const double cell = std::ldexp(spec_.side, -spec_.depth);
  std::vector<double> c(b.lo.size());
  for (std::size_t a = 0; a < c.size(); ++a) {
    c[a] = spec_.origin[a] + (static_cast<double>(b.lo[a]) + 0.5) * cell;
  }
  return c;
}

std::size_t Grid::tree_to_lex(std::size_t tree_pos) const {
  const int n = spec_.dimension;
  const int d = spec_.depth;
  std::vector<std::size_t> coord(static_cast<std::size_t>(n), 0);
  for (int j = 0; j < levels_; ++j) {
    const std::size_t bit = (tree_pos >> (levels_ - 1 - j)) & 1u;
    auto& c = coord[static_cast<std::size_t>(j % n)];
    c = (c << 1) | bit;
  }
  std::size_t lex = 0;
  for (int a = 0; a < n; ++a) lex = (lex << d) | coord[static_cast<std::size_t>(a)];
  return lex;
}

std::size_t Grid::lex_to_tree(std::size_t lex_pos) const {
  const int n = spec_.dimension;
  const int d = spec_.depth;
  const std::size_t mask = (std::size_t{1} << d) - 1;
  std::size_t tree = 0;
  for (int j = 0; j < levels_; ++j) {
    const int a = j % n;
    const int bit_in_coord = d - 1 - j / n;
    const std::size_t c = (lex_pos >> (d * (n - 1 - a))) & mask;
    tree = (tree << 1) | ((c >> bit_in_coord) & 1u);
  }
  return tree;
}

Node Grid::node_of(const DyadicCube& q) const {
  const int n = spec_.dimension;
  if (q.scale < 0 || q.scale > spec_.depth) {
    throw ScaleError("cube scale " + std::to_string(q.scale) + " outside [0, " +
                     std::to_string(spec_.depth) + "]");
  }
  if (q.index.size() != static_cast<std::size_t>(n)) {
    throw DomainError("cube index has wrong dimension");
  }
  const std::int64_t extent = std::int64_t{1} << q.scale;
  for (auto c : q.index) {
    if (c < 0 || c >= extent) throw DomainError("cube index outside the root cube");
  }
  const int t = q.scale * n;
  std::uint64_t pos = 0;
  for (int j = 0; j < t; ++j) {
    const auto a = static_cast<std::size_t>(j % n);
    const int bit_in_coord = q.scale - 1 - j / n;
    pos = (pos << 1) | ((static_cast<std::uint64_t>(q.index[a]) >> bit_in_coord) & 1u);
  }
  return Node{static_cast<std::uint32_t>((std::uint64_t{1} << t) + pos)};
}

DyadicCube Grid::cube_of(Node e) const {
  if (!is_cube(e)) throw ScaleError("node " + std::to_string(e.id) + " is not a dyadic cube");
  const int n = spec_.dimension;
  const int t = level(e);
  DyadicCube q;
  q.scale = t / n;
  const LeafBox b = box(e);
  q.index.resize(static_cast<std::size_t>(n));
  for (std::size_t a = 0; a < q.index.size(); ++a) q.index[a] = b.lo[a] >> (spec_.depth - q.scale);
  return q;
}

Node Grid::node_of(const WilsonRectangle& e) const {
  const int n = spec_.dimension;
  if (e.base.scale > spec_.depth - 1) {
    throw ScaleError("base cube at leaf scale has no Wilson rectangles");
  }
  if (e.wilson_index < 1 || e.wilson_index >= (1 << n)) {
    throw DomainError("Wilson index " + std::to_string(e.wilson_index) + " outside [1, 2^n - 1]");
  }
  const Node f = node_of(e.base);
  const int ell = std::bit_width(static_cast<unsigned>(e.wilson_index));
  const std::uint64_t low = static_cast<std::uint64_t>(e.wilson_index) - (1u << (ell - 1));
  const std::uint64_t id = (static_cast<std::uint64_t>(f.id) << (ell - 1)) | low;
  return Node{static_cast<std::uint32_t>(id)};
}

WilsonRectangle Grid::wilson_of(Node e) const {
  if (!is_rectangle(e)) {
    throw ScaleError("node " + std::to_string(e.id) + " is a leaf, not a Wilson rectangle");
  }
  const int n = spec_.dimension;
  const int t = level(e);
  const int ell = t % n + 1;
  WilsonRectangle w;
  w.base = cube_of(Node{e.id >> (ell - 1)});
  const std::uint32_t low = e.id & ((1u << (ell - 1)) - 1u);
  w.wilson_index = static_cast<int>((1u << (ell - 1)) | low);
  return w;
}

std::vector<Node> Grid::wilson_rectangles(const DyadicCube& base) const {
  if (base.scale > spec_.depth - 1) {
    throw ScaleError("cube at scale " + std::to_string(base.scale) +
                     " has leaf-scale halves; Wilson rectangles need scale <= d-1");
  }
  std::vector<Node> out;
  const int count = (1 << spec_.dimension) - 1;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 1; i <= count; ++i) out.push_back(node_of(WilsonRectangle{base, i}));
  return out;
}

std::string Grid::describe(Node e) const {
  std::ostringstream os;
  auto cube_str = [&os](const DyadicCube& q) {
    os << "Q(k=" << q.scale << ",[";
    for (std::size_t a = 0; a < q.index.size(); ++a) os << (a ? "," : "") << q.index[a];
    os << "])";
  };
  if (is_cube(e)) {
    cube_str(cube_of(e));
  } else {
    const WilsonRectangle w = wilson_of(e);
    os << "E(";
    cube_str(w.base);
    os << ",i=" << w.wilson_index << ")";
  }
  return os.str();
}

}  // namespace ewl
