#include "ewl/measure.hpp"

#include <cmath>
#include <string>

#include "ewl/errors.hpp"

namespace ewl {

namespace {

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw DomainError("leaf objects live on different grids");
}

}  // namespace

LeafFunction::LeafFunction(Grid grid) : grid_(std::move(grid)), values_(grid_.leaf_count(), 0.0) {}

LeafFunction::LeafFunction(Grid grid, std::vector<double> tree_values)
    : grid_(std::move(grid)), values_(std::move(tree_values)) {
  if (values_.size() != grid_.leaf_count()) {
    throw DomainError("leaf function has " + std::to_string(values_.size()) + " values, grid has " +
                      std::to_string(grid_.leaf_count()) + " leaves");
  }
}

LeafFunction LeafFunction::from_lexicographic(Grid grid, std::span<const double> lex_values) {
  if (lex_values.size() != grid.leaf_count()) throw DomainError("wrong number of leaf values");
  std::vector<double> tree(grid.leaf_count());
  for (std::size_t p = 0; p < tree.size(); ++p) tree[p] = lex_values[grid.tree_to_lex(p)];
  return LeafFunction(std::move(grid), std::move(tree));
}

LeafFunction LeafFunction::indicator(const Grid& grid, Node e) {
  LeafFunction f(grid);
  const auto [lo, hi] = grid.leaf_range(e);
  for (std::size_t p = lo; p < hi; ++p) f.values_[p] = 1.0;
  return f;
}

LeafFunction LeafFunction::constant(const Grid& grid, double c) {
  return LeafFunction(grid, std::vector<double>(grid.leaf_count(), c));
}

std::vector<double> LeafFunction::lexicographic() const {
  std::vector<double> lex(values_.size());
  for (std::size_t p = 0; p < values_.size(); ++p) lex[grid_.tree_to_lex(p)] = values_[p];
  return lex;
}

LeafFunction& LeafFunction::operator+=(const LeafFunction& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t p = 0; p < values_.size(); ++p) values_[p] += o.values_[p];
  return *this;
}

LeafFunction& LeafFunction::operator-=(const LeafFunction& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t p = 0; p < values_.size(); ++p) values_[p] -= o.values_[p];
  return *this;
}

LeafFunction& LeafFunction::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

LeafFunction operator+(LeafFunction a, const LeafFunction& b) { return a += b; }
LeafFunction operator-(LeafFunction a, const LeafFunction& b) { return a -= b; }
LeafFunction operator*(double s, LeafFunction a) { return a *= s; }

LeafMeasure::LeafMeasure(Grid grid, std::vector<double> tree_masses) : grid_(std::move(grid)) {
  const std::size_t n = grid_.leaf_count();
  if (tree_masses.size() != n) {
    throw DomainError("measure has " + std::to_string(tree_masses.size()) + " masses, grid has " +
                      std::to_string(n) + " leaves");
  }
  node_mass_.assign(2 * n, 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    const double m = tree_masses[p];
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw DomainError("leaf mass at tree position " + std::to_string(p) +
                        " is negative or not finite");
    }
    node_mass_[n + p] = m;
  }
  for (std::size_t id = n - 1; id >= 1; --id) node_mass_[id] = node_mass_[2 * id] + node_mass_[2 * id + 1];
}

LeafMeasure LeafMeasure::from_lexicographic(Grid grid, std::span<const double> lex_masses) {
  if (lex_masses.size() != grid.leaf_count()) throw DomainError("wrong number of leaf masses");
  std::vector<double> tree(grid.leaf_count());
  for (std::size_t p = 0; p < tree.size(); ++p) tree[p] = lex_masses[grid.tree_to_lex(p)];
  return LeafMeasure(std::move(grid), std::move(tree));
}

LeafMeasure LeafMeasure::lebesgue(const Grid& grid) {
  return LeafMeasure(grid, std::vector<double>(grid.leaf_count(), grid.leaf_volume()));
}

std::size_t LeafMeasure::charged_leaf_count() const {
  std::size_t count = 0;
  for (double m : masses()) count += m > 0.0 ? 1 : 0;
  return count;
}

double LeafMeasure::integral(const LeafFunction& f, Node e) const {
  require_same_grid(grid_, f.grid());
  const auto [lo, hi] = grid_.leaf_range(e);
  double s = 0.0;
  for (std::size_t p = lo; p < hi; ++p) s += f[p] * leaf_mass(p);
  return s;
}

double LeafMeasure::average(const LeafFunction& f, Node e) const {
  const double m = (*this)(e);
  return m > 0.0 ? integral(f, e) / m : 0.0;
}

std::vector<double> LeafMeasure::lexicographic() const {
  std::vector<double> lex(grid_.leaf_count());
  for (std::size_t p = 0; p < lex.size(); ++p) lex[grid_.tree_to_lex(p)] = leaf_mass(p);
  return lex;
}

double inner(const LeafFunction& f, const LeafFunction& g, const LeafMeasure& mu) {
  require_same_grid(f.grid(), g.grid());
  require_same_grid(f.grid(), mu.grid());
  double s = 0.0;
  for (std::size_t p = 0; p < f.size(); ++p) s += f[p] * g[p] * mu.leaf_mass(p);
  return s;
}

double norm(const LeafFunction& f, const LeafMeasure& mu) { return std::sqrt(inner(f, f, mu)); }

std::pair<LeafMeasure, LeafMeasure> from_pointwise_weights(const LeafFunction& u,
                                                           const LeafFunction& v) {
  require_same_grid(u.grid(), v.grid());
  const Grid& grid = u.grid();
  const double cell = grid.leaf_volume();
  std::vector<double> sigma(grid.leaf_count());
  std::vector<double> omega(grid.leaf_count());
  for (std::size_t p = 0; p < sigma.size(); ++p) {
    if (!(u[p] > 0.0)) {
      throw DomainError("weight u must be positive; leaf " + grid.describe(grid.leaf_at(p)) +
                        " has u = " + std::to_string(u[p]));
    }
    if (!(v[p] >= 0.0)) throw DomainError("weight v must be nonnegative");
    sigma[p] = cell / u[p];
    omega[p] = cell * v[p];
  }
  return {LeafMeasure(grid, std::move(sigma)), LeafMeasure(grid, std::move(omega))};
}

}  // namespace ewl
