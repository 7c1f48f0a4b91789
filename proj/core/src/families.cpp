#include "ewl/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "ewl/errors.hpp"
#include "ewl/haar.hpp"
#include "ewl/rng.hpp"

namespace ewl {

namespace {

void require_shared_grid(const Grid& a, const LeafMeasure& sigma, const LeafMeasure& omega) {
  if (!(a == sigma.grid()) || !(a == omega.grid())) {
    throw DomainError("coefficients and measures live on different grids");
  }
}

bool intersects(const Grid& g, Node a, Node b) { return g.contains(a, b) || g.contains(b, a); }

bool separated(const Grid& g, Node i, Node j, int r) {
  return !intersects(g, g.ancestor(i, r), j) && !intersects(g, i, g.ancestor(j, r));
}

/// Separated pairs whose parent pairs are not separated. Separation passes to
/// sub-intervals, so these blocks cover every separated block.
template <class Fn>
void for_each_maximal_block(const Grid& g, int r, Fn&& fn) {
  const std::uint32_t end = g.node_end();
  for (std::uint32_t i = 1; i < end; ++i) {
    for (std::uint32_t j = 1; j < end; ++j) {
      const Node a{i};
      const Node b{j};
      if (!separated(g, a, b, r)) continue;
      if (i > 1 && separated(g, g.parent(a), b, r)) continue;
      if (j > 1 && separated(g, a, g.parent(b), r)) continue;
      fn(a, b);
    }
  }
}

double center_distance(const Grid& g, std::size_t x, std::size_t y) {
  return std::abs(g.leaf_center(x)[0] - g.leaf_center(y)[0]);
}

void require_one_dimensional(const Grid& g, const char* what) {
  if (g.dimension() != 1) {
    throw UnsupportedDimensionError(std::string(what) + " is defined for n = 1 only, got n = " +
                                    std::to_string(g.dimension()));
  }
}

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

DyadicOperator martingale_transform(const CoefficientSequence& b, const LeafMeasure& sigma,
                                    const LeafMeasure& omega, int root_level) {
  require_shared_grid(b.grid(), sigma, omega);
  const Grid& g = b.grid();
  const auto n = static_cast<Eigen::Index>(g.leaf_count());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::uint32_t id = 1; id < g.leaf_count(); ++id) {
    if (g.level(Node{id}) >= root_level) m(id, id) = b[Node{id}];
  }
  DyadicOperator t(sigma, omega, kernel_from_haar(m, sigma, omega), Family::martingale_transform);
  t.with_root_level(root_level).with_coefficients(b);
  return t;
}

DyadicOperator paraproduct(const CoefficientSequence& b, const LeafMeasure& sigma,
                           const LeafMeasure& omega, int root_level) {
  require_shared_grid(b.grid(), sigma, omega);
  const Grid& g = b.grid();
  const auto n = static_cast<Eigen::Index>(g.leaf_count());
  // row E holds b_E 1_E / sigma(E) as a function of y
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(n, n);
  for (std::uint32_t id = 1; id < g.leaf_count(); ++id) {
    const Node e{id};
    if (g.level(e) < root_level || !sigma.charged(e)) continue;
    const double v = b[e] / sigma(e);
    const auto [lo, hi] = g.leaf_range(e);
    for (std::size_t p = lo; p < hi; ++p) rows(id, static_cast<Eigen::Index>(p)) = v;
  }
  HaarBasis(omega).synthesize_columns(rows);
  DyadicOperator t(sigma, omega, std::move(rows), Family::paraproduct);
  t.with_root_level(root_level).with_coefficients(b);
  return t;
}

DyadicOperator haar_shift(const CoefficientSequence& b, const LeafMeasure& sigma,
                          const LeafMeasure& omega) {
  require_shared_grid(b.grid(), sigma, omega);
  const Grid& g = b.grid();
  require_one_dimensional(g, "the Haar shift");
  const auto n = static_cast<Eigen::Index>(g.leaf_count());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::uint32_t id = 1; 2 * id < g.leaf_count(); ++id) {
    m(2 * id + 1, id) = b[Node{id}];
    m(2 * id, id) = -b[Node{id}];
  }
  DyadicOperator t(sigma, omega, kernel_from_haar(m, sigma, omega), Family::haar_shift);
  t.with_coefficients(b);
  return t;
}

void validate_kernel(const PerfectDyadicKernel& k) {
  const Grid& g = k.grid;
  require_one_dimensional(g, "the perfect dyadic kernel");
  const auto n = static_cast<Eigen::Index>(g.leaf_count());
  if (k.values.rows() != n || k.values.cols() != n) throw DomainError("kernel table has wrong shape");
  if (k.radius < 0) throw DomainError("kernel radius must be nonnegative");

  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = 0; y < n; ++y) {
      if (x == y) continue;
      const double bound = 1.0 / center_distance(g, static_cast<std::size_t>(x), static_cast<std::size_t>(y));
      if (!(std::abs(k.values(x, y)) <= bound * (1.0 + 1e-12))) {
        std::ostringstream os;
        os << "size condition fails on leaf pair " << g.describe(g.leaf_at(x)) << ", "
           << g.describe(g.leaf_at(y)) << ": |K| = " << std::abs(k.values(x, y))
           << " > 1/dist = " << bound;
        throw ValidationError(os.str());
      }
    }
  }

  for_each_maximal_block(g, k.radius, [&](Node i, Node j) {
    const auto [xlo, xhi] = g.leaf_range(i);
    const auto [ylo, yhi] = g.leaf_range(j);
    const double ref = k.values(static_cast<Eigen::Index>(xlo), static_cast<Eigen::Index>(ylo));
    for (std::size_t x = xlo; x < xhi; ++x) {
      for (std::size_t y = ylo; y < yhi; ++y) {
        const double v = k.values(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
        if (v != ref) {
          std::ostringstream os;
          os << "kernel is not constant on the separated pair I = " << g.describe(i)
             << ", J = " << g.describe(j) << " (values " << ref << " and " << v << ")";
          throw ValidationError(os.str());
        }
      }
    }
  });
}

PerfectDyadicKernel random_perfect_kernel(const Grid& grid, int radius, std::uint64_t seed) {
  require_one_dimensional(grid, "the perfect dyadic kernel");
  const std::size_t n = grid.leaf_count();
  DisjointSets sets(n * n);
  for_each_maximal_block(grid, radius, [&](Node i, Node j) {
    const auto [xlo, xhi] = grid.leaf_range(i);
    const auto [ylo, yhi] = grid.leaf_range(j);
    for (std::size_t x = xlo; x < xhi; ++x) {
      for (std::size_t y = ylo; y < yhi; ++y) sets.unite(xlo * n + ylo, x * n + y);
    }
  });

  std::vector<double> bound(n * n, std::numeric_limits<double>::infinity());
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y) continue;
      double& b = bound[sets.find(x * n + y)];
      b = std::min(b, 1.0 / center_distance(grid, x, y));
    }
  }

  Rng rng(seed);
  std::vector<double> value(n * n, 0.0);
  for (std::size_t c = 0; c < n * n; ++c) {
    if (sets.find(c) == c && c / n != c % n) value[c] = rng.uniform(-1.0, 1.0) * bound[c];
  }

  PerfectDyadicKernel k{grid, radius, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))};
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (x != y) k.values(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = value[sets.find(x * n + y)];
    }
  }
  return k;
}

DyadicOperator perfect_dyadic_operator(const PerfectDyadicKernel& k, const LeafMeasure& sigma,
                                       const LeafMeasure& omega) {
  validate_kernel(k);
  if (!(k.grid == sigma.grid()) || !(k.grid == omega.grid())) {
    throw DomainError("kernel and measures live on different grids");
  }
  return DyadicOperator(sigma, omega, k.values, Family::perfect_dyadic, k.radius);
}

DyadicOperator random_ewl(const LeafMeasure& sigma, const LeafMeasure& omega,
                          const RandomEwlOptions& opts) {
  const Grid& g = sigma.grid();
  if (!(g == omega.grid())) throw DomainError("sigma and omega live on different grids");
  if (opts.radius < 0) throw DomainError("radius must be nonnegative");
  if (opts.root_level < 0 || opts.root_level > g.levels()) throw DomainError("root level outside the tree");
  const int r = opts.radius;
  const int rho = opts.root_level;
  const std::uint32_t n = static_cast<std::uint32_t>(g.leaf_count());
  const HaarBasis hs(sigma);
  const HaarBasis hw(omega);
  Rng rng(opts.seed);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);

  for (std::uint32_t e = 1; e < n; ++e) {
    const Node en{e};
    const int t = g.level(en);
    if (t < rho || !hs.charged(en)) continue;
    const Node top = g.ancestor(en, r, rho);
    const int lt = g.level(top);
    const int deepest = std::min(t + r, g.levels() - 1);
    for (int lev = lt; lev <= deepest; ++lev) {
      const std::uint32_t first = top.id << (lev - lt);
      const std::uint32_t last = (top.id + 1) << (lev - lt);
      for (std::uint32_t gid = first; gid < last; ++gid) {
        const Node gn{gid};
        if (!hw.charged(gn) || !g.contains(g.ancestor(gn, r, rho), en)) continue;
        m(gid, e) = rng.uniform(-1.0, 1.0);
      }
    }
  }
  for (std::uint32_t e = 1; e < n; ++e) {
    const Node en{e};
    if (g.level(en) < rho || !hs.charged(en)) continue;
    m.col(e) += rng.uniform(-1.0, 1.0) * hw.normalized_indicator(g.ancestor(en, r, rho));
  }
  for (std::uint32_t gid = 1; gid < n; ++gid) {
    const Node gn{gid};
    if (g.level(gn) < rho || !hw.charged(gn)) continue;
    m.row(gid) += rng.uniform(-1.0, 1.0) * hs.normalized_indicator(g.ancestor(gn, r, rho)).transpose();
  }
  for (std::uint32_t q = 1u << rho; q < (2u << rho); ++q) {
    m += rng.uniform(-1.0, 1.0) * hw.normalized_indicator(Node{q}) *
         hs.normalized_indicator(Node{q}).transpose();
  }

  DyadicOperator t(sigma, omega, kernel_from_haar(m, sigma, omega), Family::random_ewl, r);
  t.with_seed(opts.seed).with_root_level(rho);
  return t;
}

DyadicOperator random_dense(const LeafMeasure& sigma, const LeafMeasure& omega, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(sigma.grid().leaf_count());
  Rng rng(seed);
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = 0; y < n; ++y) k(x, y) = rng.uniform(-1.0, 1.0);
  }
  DyadicOperator t(sigma, omega, std::move(k), Family::custom);
  t.with_seed(seed);
  return t;
}

}  // namespace ewl
