#include "ewl/testing.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/SVD>

#include "ewl/classify.hpp"
#include "ewl/errors.hpp"

namespace ewl {

namespace {

using Eigen::Index;

Eigen::VectorXd masses_of(const LeafMeasure& mu) {
  const auto m = mu.masses();
  return Eigen::Map<const Eigen::VectorXd>(m.data(), static_cast<Index>(m.size()));
}

std::vector<Index> charged_leaves(const LeafMeasure& mu) {
  std::vector<Index> out;
  for (std::size_t p = 0; p < mu.grid().leaf_count(); ++p) {
    if (mu.leaf_mass(p) > 0.0) out.push_back(static_cast<Index>(p));
  }
  return out;
}

double power_norm(const Eigen::MatrixXd& w, Eigen::VectorXd x, int& iterations) {
  x.normalize();
  double prev = 0.0;
  double value = 0.0;
  for (int it = 1; it <= 10000; ++it) {
    iterations = it;
    const Eigen::VectorXd wx = w * x;
    value = wx.squaredNorm();
    if (value == 0.0) return 0.0;
    Eigen::VectorXd next = w.transpose() * wx;
    const double len = next.norm();
    if (len == 0.0) return std::sqrt(value);
    x = next / len;
    if (std::abs(value - prev) <= 1e-10 * value) break;
    prev = value;
  }
  return std::sqrt((w * x).squaredNorm());
}

/// Cumulative sums over y of K(:, y) sigma(y): column p holds sum over y < p.
Eigen::MatrixXd column_prefix(const Eigen::MatrixXd& k, const LeafMeasure& sigma) {
  const Index n = k.rows();
  Eigen::MatrixXd pref(n, n + 1);
  pref.col(0).setZero();
  for (Index y = 0; y < n; ++y) {
    pref.col(y + 1) = pref.col(y) + k.col(y) * sigma.leaf_mass(static_cast<std::size_t>(y));
  }
  return pref;
}

Witnessed testing_side(const Grid& g, const Eigen::MatrixXd& k, const LeafMeasure& sigma,
                       const LeafMeasure& omega, bool local, bool cubes_only) {
  const Eigen::MatrixXd pref = column_prefix(k, sigma);
  const Eigen::VectorXd w = masses_of(omega);
  Witnessed best;
  for (std::uint32_t id = 1; id < g.node_end(); ++id) {
    const Node e{id};
    if (!sigma.charged(e) || (cubes_only && !g.is_cube(e))) continue;
    const auto [lo, hi] = g.leaf_range(e);
    const auto l = static_cast<Index>(lo);
    const auto h = static_cast<Index>(hi);
    double sq = 0.0;
    if (local) {
      const Index len = h - l;
      sq = (pref.col(h).segment(l, len) - pref.col(l).segment(l, len)).cwiseAbs2().dot(w.segment(l, len));
    } else {
      sq = (pref.col(h) - pref.col(l)).cwiseAbs2().dot(w);
    }
    const double v = std::sqrt(sq / sigma(e));
    if (v > best.value) best = Witnessed{v, e, e};
  }
  return best;
}

Witnessed incremental_side(const Grid& g, const Eigen::MatrixXd& k, const LeafMeasure& sigma,
                           const LeafMeasure& omega) {
  const Eigen::VectorXd w = masses_of(omega);
  const Index n = k.rows();
  Witnessed best;
  // columns of u are T(sigma 1_E) for the nodes of the current level, left to right
  Eigen::MatrixXd u(n, n);
  for (Index y = 0; y < n; ++y) u.col(y) = k.col(y) * sigma.leaf_mass(static_cast<std::size_t>(y));
  for (int level = g.levels(); level >= 0; --level) {
    const Index width = Index{1} << level;
    for (Index j = 0; j < width; ++j) {
      const Node e{static_cast<std::uint32_t>(width + j)};
      if (!sigma.charged(e)) continue;
      const double v = std::sqrt(u.col(j).cwiseAbs2().dot(w) / sigma(e));
      if (v > best.value) best = Witnessed{v, e, e};
    }
    if (level == 0) break;
    for (Index j = 0; j < width / 2; ++j) u.col(j) = u.col(2 * j) + u.col(2 * j + 1);
  }
  return best;
}

/// Block sums of D_omega K D_sigma: s(i, j) = sum over x < i, y < j.
Eigen::MatrixXd block_prefix(const DyadicOperator& t) {
  const Index n = t.kernel().rows();
  const Eigen::MatrixXd p = masses_of(t.omega()).asDiagonal() * t.kernel() * masses_of(t.sigma()).asDiagonal();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (Index y = 0; y < n; ++y) {
    for (Index x = 0; x < n; ++x) s(x + 1, y + 1) = s(x, y + 1) + s(x + 1, y) - s(x, y) + p(x, y);
  }
  return s;
}

Witnessed weak_side(const DyadicOperator& t, int r, bool cubes_only) {
  const Grid& g = t.grid();
  const Eigen::MatrixXd s = block_prefix(t);
  const LeafMeasure& sigma = t.sigma();
  const LeafMeasure& omega = t.omega();
  Witnessed best;
  auto visit = [&](Node e, Node f) {
    if (!omega.charged(f) || (cubes_only && !g.is_cube(f))) return;
    const auto [ylo, yhi] = g.leaf_range(e);
    const auto [xlo, xhi] = g.leaf_range(f);
    const auto X0 = static_cast<Index>(xlo), X1 = static_cast<Index>(xhi);
    const auto Y0 = static_cast<Index>(ylo), Y1 = static_cast<Index>(yhi);
    const double pair = s(X1, Y1) - s(X0, Y1) - s(X1, Y0) + s(X0, Y0);
    const double v = std::abs(pair) / std::sqrt(sigma(e) * omega(f));
    if (v > best.value) best = Witnessed{v, e, f};
  };
  for (std::uint32_t id = 1; id < g.node_end(); ++id) {
    const Node e{id};
    if (!sigma.charged(e) || (cubes_only && !g.is_cube(e))) continue;
    const int le = g.level(e);
    const Node a = g.ancestor(e, r, t.root_level());
    const int la = g.level(a);
    const int top = std::max(le - r, 0);
    // containers of the clipped ancestor that are still within r levels
    for (int lev = top; lev < la; ++lev) visit(e, Node{a.id >> (la - lev)});
    const int bottom = std::min(le + r, g.levels());
    for (int lev = std::max(la, top); lev <= bottom; ++lev) {
      const std::uint32_t first = a.id << (lev - la);
      const std::uint32_t last = (a.id + 1) << (lev - la);
      for (std::uint32_t f = first; f < last; ++f) visit(e, Node{f});
    }
  }
  return best;
}

}  // namespace

NormResult operator_norm_detail(const DyadicOperator& t, NormMethod method) {
  if (!(t.sigma().total() > 0.0)) throw UndefinedNormError("sigma has no charged leaf; the norm is undefined");
  if (!(t.omega().total() > 0.0)) throw UndefinedNormError("omega has no charged leaf; the norm is undefined");
  const std::vector<Index> cs = charged_leaves(t.sigma());
  const std::vector<Index> cw = charged_leaves(t.omega());
  Eigen::MatrixXd w(static_cast<Index>(cw.size()), static_cast<Index>(cs.size()));
  for (Index j = 0; j < w.cols(); ++j) {
    const double sj = std::sqrt(t.sigma().leaf_mass(static_cast<std::size_t>(cs[j])));
    for (Index i = 0; i < w.rows(); ++i) {
      w(i, j) = std::sqrt(t.omega().leaf_mass(static_cast<std::size_t>(cw[i]))) * t.kernel()(cw[i], cs[j]) * sj;
    }
  }
  NormResult out;
  if (method == NormMethod::automatic) {
    method = std::max(cs.size(), cw.size()) <= kDenseNormLimit ? NormMethod::dense : NormMethod::power;
  }
  out.method = method;
  if (method == NormMethod::dense) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(w);
    out.value = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
    return out;
  }
  const Index m = w.cols();
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
  int it1 = 0;
  int it2 = 0;
  const double first = power_norm(w, ones, it1);
  double second = 0.0;
  if (m > 1) {
    // fallback start orthogonal to the constant vector
    Eigen::VectorXd alt(m);
    for (Index i = 0; i < m; ++i) alt(i) = std::sin(static_cast<double>(i) + 1.0);
    alt.array() -= alt.mean();
    if (alt.norm() > 0.0) second = power_norm(w, alt, it2);
  }
  out.value = std::max(first, second);
  out.iterations = it1 + it2;
  return out;
}

double operator_norm(const DyadicOperator& t, NormMethod method) {
  return operator_norm_detail(t, method).value;
}

LocalTesting local_testing(const DyadicOperator& t) {
  const Eigen::MatrixXd kt = t.kernel().transpose();
  return {testing_side(t.grid(), t.kernel(), t.sigma(), t.omega(), true, false),
          testing_side(t.grid(), kt, t.omega(), t.sigma(), true, false)};
}

LocalTesting global_testing(const DyadicOperator& t) {
  const Eigen::MatrixXd kt = t.kernel().transpose();
  return {testing_side(t.grid(), t.kernel(), t.sigma(), t.omega(), false, false),
          testing_side(t.grid(), kt, t.omega(), t.sigma(), false, false)};
}

LocalTesting global_testing_incremental(const DyadicOperator& t) {
  const Eigen::MatrixXd kt = t.kernel().transpose();
  return {incremental_side(t.grid(), t.kernel(), t.sigma(), t.omega()),
          incremental_side(t.grid(), kt, t.omega(), t.sigma())};
}

Witnessed weak_boundedness(const DyadicOperator& t, int r) {
  if (r < 0) throw DomainError("radius must be nonnegative");
  return weak_side(t, r, false);
}

CubeTesting cube_testing(const DyadicOperator& t, int r) {
  if (r < 0) throw DomainError("radius must be nonnegative");
  const Eigen::MatrixXd kt = t.kernel().transpose();
  return {testing_side(t.grid(), t.kernel(), t.sigma(), t.omega(), true, true),
          testing_side(t.grid(), kt, t.omega(), t.sigma(), true, true), weak_side(t, r, true)};
}

int default_radius(const DyadicOperator& t) {
  if (t.claimed_radius()) return *t.claimed_radius();
  return std::min(ewl_radius_raw(t), t.grid().levels());
}

TestingReport testing_report(const DyadicOperator& t, std::optional<int> r) {
  TestingReport rep;
  rep.radius = r ? *r : default_radius(t);
  rep.norm = operator_norm(t);
  const LocalTesting loc = local_testing(t);
  const LocalTesting glob = global_testing(t);
  rep.w1 = loc.c1;
  rep.w2 = loc.c2;
  rep.w3 = weak_boundedness(t, rep.radius);
  rep.w1_global = glob.c1;
  rep.w2_global = glob.c2;
  rep.c1 = loc.c1.value;
  rep.c2 = loc.c2.value;
  rep.c3 = rep.w3.value;
  rep.c3_wide = weak_boundedness(t, rep.radius + 1).value;
  rep.c1_global = glob.c1.value;
  rep.c2_global = glob.c2.value;
  const CubeTesting cube = cube_testing(t, rep.radius);
  rep.c1_cube = cube.c1.value;
  rep.c2_cube = cube.c2.value;
  rep.c3_cube = cube.c3.value;
  const double sum = rep.c1 + rep.c2 + rep.c3;
  rep.ratio_sum = sum > 0.0 ? rep.norm / sum : 0.0;
  rep.ratio_max = rep.norm > 0.0 ? std::max({rep.c1, rep.c2, rep.c3}) / rep.norm : 0.0;
  return rep;
}

}  // namespace ewl
