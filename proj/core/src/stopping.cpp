#include "ewl/stopping.hpp"

#include <cmath>
#include <deque>

#include "ewl/errors.hpp"

namespace ewl {

namespace {

/// Integral of a leaf quantity over every node, by id.
std::vector<double> tree_sums(const Grid& g, const std::vector<double>& leaf) {
  const std::size_t n = g.leaf_count();
  std::vector<double> s(2 * n, 0.0);
  for (std::size_t p = 0; p < n; ++p) s[n + p] = leaf[p];
  for (std::size_t id = n - 1; id >= 1; --id) s[id] = s[2 * id] + s[2 * id + 1];
  return s;
}

std::vector<double> signed_averages(const LeafFunction& g, const LeafMeasure& omega) {
  const Grid& grid = omega.grid();
  std::vector<double> leaf(grid.leaf_count());
  for (std::size_t p = 0; p < leaf.size(); ++p) leaf[p] = g[p] * omega.leaf_mass(p);
  std::vector<double> s = tree_sums(grid, leaf);
  for (std::uint32_t id = 1; id < s.size(); ++id) {
    const double m = omega(Node{id});
    s[id] = m > 0.0 ? s[id] / m : 0.0;
  }
  return s;
}

}  // namespace

StoppingFamily::StoppingFamily(Grid grid, std::vector<Node> members,
                               std::vector<std::uint32_t> parent_of, std::vector<double> average)
    : grid_(std::move(grid)),
      members_(std::move(members)),
      parent_of_(std::move(parent_of)),
      average_(std::move(average)),
      children_(grid_.node_end()) {
  for (Node s : members_) {
    if (s.id != 1) children_[stopping_parent(s).id].push_back(s);
  }
}

Node StoppingFamily::stopping_parent(Node s) const {
  if (s.id == 1) throw DomainError("the root has no stopping parent");
  return Node{parent_of_[s.id / 2]};
}

StoppingFamily build_stopping_family(const LeafFunction& g, const LeafMeasure& omega) {
  const Grid& grid = omega.grid();
  if (!(g.grid() == grid)) throw DomainError("function and measure live on different grids");
  const std::size_t n = grid.leaf_count();
  std::vector<double> leaf(n);
  for (std::size_t p = 0; p < n; ++p) leaf[p] = std::abs(g[p]) * omega.leaf_mass(p);
  std::vector<double> avg = tree_sums(grid, leaf);
  for (std::uint32_t id = 1; id < avg.size(); ++id) {
    const double m = omega(Node{id});
    avg[id] = m > 0.0 ? avg[id] / m : 0.0;
  }

  std::vector<std::uint32_t> parent_of(2 * n, 0);
  std::vector<Node> members{Node{1}};
  parent_of[1] = 1;
  std::deque<Node> pending{Node{1}};
  std::vector<std::uint32_t> stack;
  while (!pending.empty()) {
    const Node s = pending.front();
    pending.pop_front();
    const double limit = 2.0 * avg[s.id];
    stack.clear();
    if (!grid.is_leaf(s)) stack = {2 * s.id + 1, 2 * s.id};
    while (!stack.empty()) {
      const std::uint32_t e = stack.back();
      stack.pop_back();
      if (omega(Node{e}) > 0.0 && avg[e] > limit) {
        parent_of[e] = e;
        members.push_back(Node{e});
        pending.push_back(Node{e});
        continue;
      }
      parent_of[e] = s.id;
      if (!grid.is_leaf(Node{e})) {
        stack.push_back(2 * e + 1);
        stack.push_back(2 * e);
      }
    }
  }
  return StoppingFamily(grid, std::move(members), std::move(parent_of), std::move(avg));
}

PackingCheck check_packing(const StoppingFamily& family, const LeafMeasure& omega) {
  const Grid& grid = family.grid();
  PackingCheck out;
  constexpr double tol = 1e-12;
  for (Node s : family.members()) {
    double kids = 0.0;
    for (Node c : family.children(s)) {
      kids += omega(c);
      if (!(family.average(c) > 2.0 * family.average(s))) out.stopping_ok = false;
    }
    if (omega(s) > 0.0 && kids / omega(s) > out.child_ratio) {
      out.child_ratio = kids / omega(s);
      out.child_witness = s;
    }
  }
  const std::size_t n = grid.leaf_count();
  std::vector<double> acc(2 * n, 0.0);
  for (std::size_t id = 2 * n - 1; id >= 1; --id) {
    const Node q{static_cast<std::uint32_t>(id)};
    if (id < n) acc[id] = acc[2 * id] + acc[2 * id + 1];
    if (family.is_member(q)) acc[id] += omega(q);
    if (omega(q) > 0.0 && acc[id] / omega(q) > out.carleson_ratio) {
      out.carleson_ratio = acc[id] / omega(q);
      out.carleson_witness = q;
    }
  }
  out.ok = out.stopping_ok && out.child_ratio <= 0.5 + tol && out.carleson_ratio <= 2.0 + tol;
  return out;
}

EmbeddingCheck carleson_embedding_check(const StoppingFamily& family, const LeafFunction& g,
                                        const LeafMeasure& omega) {
  EmbeddingCheck out;
  const double norm2 = inner(g, g, omega);
  if (!(norm2 > 0.0)) return out;
  const std::vector<double> avg = signed_averages(g, omega);
  double sum_signed = 0.0;
  double sum_abs = 0.0;
  for (Node s : family.members()) {
    sum_signed += omega(s) * avg[s.id] * avg[s.id];
    sum_abs += omega(s) * family.average(s) * family.average(s);
  }
  out.ratio_signed = sum_signed / norm2;
  out.ratio_abs = sum_abs / norm2;
  out.ok = out.ratio_signed <= out.threshold && out.ratio_abs <= out.threshold;
  return out;
}

}  // namespace ewl
