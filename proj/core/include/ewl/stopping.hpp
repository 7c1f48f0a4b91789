#pragma once

#include <vector>

#include "ewl/grid.hpp"
#include "ewl/measure.hpp"

namespace ewl {

/// Stopping rectangles for |g| with respect to omega.
///
/// Starting from the root, the stopping children of S are the maximal nodes
/// strictly inside S whose omega-average of |g| exceeds twice that of S.
/// Every node, leaves included, gets a stopping parent: the minimal member
/// containing it.
class StoppingFamily {
 public:
  StoppingFamily(Grid grid, std::vector<Node> members, std::vector<std::uint32_t> parent_of,
                 std::vector<double> average);

  const Grid& grid() const { return grid_; }
  /// Members in construction order; the root comes first.
  const std::vector<Node>& members() const { return members_; }
  bool is_member(Node e) const { return parent_of_[e.id] == e.id; }
  /// Minimal member containing `e`.
  Node parent_of(Node e) const { return Node{parent_of_[e.id]}; }
  /// Stopping parent of a member other than the root.
  Node stopping_parent(Node s) const;
  const std::vector<Node>& children(Node s) const { return children_[s.id]; }
  /// omega-average of |g| over any node (0 on massless nodes).
  double average(Node e) const { return average_[e.id]; }

 private:
  Grid grid_;
  std::vector<Node> members_;
  std::vector<std::uint32_t> parent_of_;
  std::vector<double> average_;
  std::vector<std::vector<Node>> children_;
};

StoppingFamily build_stopping_family(const LeafFunction& g, const LeafMeasure& omega);

struct PackingCheck {
  /// max over members S of sum_{children} omega(S') / omega(S); at most 1/2.
  double child_ratio = 0.0;
  Node child_witness{1};
  /// max over all nodes Q of sum_{S in family, S inside Q} omega(S) / omega(Q); at most 2.
  double carleson_ratio = 0.0;
  Node carleson_witness{1};
  /// Children strictly beat twice their parent's average.
  bool stopping_ok = true;
  bool ok = true;
};

PackingCheck check_packing(const StoppingFamily& family, const LeafMeasure& omega);

struct EmbeddingCheck {
  /// sum_S omega(S) <g>_S^2 / ||g||^2, with signed and with absolute averages.
  double ratio_signed = 0.0;
  double ratio_abs = 0.0;
  double threshold = 8.0;
  bool ok = true;
};

EmbeddingCheck carleson_embedding_check(const StoppingFamily& family, const LeafFunction& g,
                                        const LeafMeasure& omega);

}  // namespace ewl
