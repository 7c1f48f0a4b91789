#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ewl/grid.hpp"

namespace ewl {

/// Real value per leaf cube, stored in tree order.
class LeafFunction {
 public:
  explicit LeafFunction(Grid grid);
  LeafFunction(Grid grid, std::vector<double> tree_values);

  static LeafFunction from_lexicographic(Grid grid, std::span<const double> lex_values);
  static LeafFunction indicator(const Grid& grid, Node e);
  static LeafFunction constant(const Grid& grid, double c);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t tree_pos) const { return values_[tree_pos]; }
  double& operator[](std::size_t tree_pos) { return values_[tree_pos]; }
  double at(Node leaf) const { return values_[grid_.tree_position(leaf)]; }

  std::vector<double> lexicographic() const;

  LeafFunction& operator+=(const LeafFunction& o);
  LeafFunction& operator-=(const LeafFunction& o);
  LeafFunction& operator*=(double s);

 private:
  Grid grid_;
  std::vector<double> values_;
};

LeafFunction operator+(LeafFunction a, const LeafFunction& b);
LeafFunction operator-(LeafFunction a, const LeafFunction& b);
LeafFunction operator*(double s, LeafFunction a);

/// Nonnegative leaf masses; node masses are exact tree sums, so a node has
/// zero mass iff every leaf under it does.
class LeafMeasure {
 public:
  LeafMeasure(Grid grid, std::vector<double> tree_masses);

  static LeafMeasure from_lexicographic(Grid grid, std::span<const double> lex_masses);
  static LeafMeasure lebesgue(const Grid& grid);

  const Grid& grid() const { return grid_; }
  std::span<const double> masses() const {
    return std::span<const double>(node_mass_).subspan(grid_.leaf_count());
  }
  double leaf_mass(std::size_t tree_pos) const { return node_mass_[grid_.leaf_count() + tree_pos]; }
  double operator()(Node e) const { return node_mass_[e.id]; }
  double total() const { return node_mass_[1]; }
  bool charged(Node e) const { return node_mass_[e.id] > 0.0; }
  /// Both halves of rectangle `e` carry mass, so its adapted Haar function is nonzero.
  bool haar_charged(Node e) const {
    return node_mass_[2 * e.id] > 0.0 && node_mass_[2 * e.id + 1] > 0.0;
  }
  std::size_t charged_leaf_count() const;

  double average(const LeafFunction& f, Node e) const;
  double integral(const LeafFunction& f, Node e) const;

  std::vector<double> lexicographic() const;

 private:
  Grid grid_;
  std::vector<double> node_mass_;  // indexed by node id, slot 0 unused
};

/// Sum over leaves of f * g * mu.
double inner(const LeafFunction& f, const LeafFunction& g, const LeafMeasure& mu);
double norm(const LeafFunction& f, const LeafMeasure& mu);

/// sigma = |leaf| / u and omega = |leaf| * v, leafwise.
std::pair<LeafMeasure, LeafMeasure> from_pointwise_weights(const LeafFunction& u,
                                                           const LeafFunction& v);

}  // namespace ewl
