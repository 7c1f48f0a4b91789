#include "ewl/classify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "ewl/haar.hpp"

namespace ewl {

namespace {

struct SideScan {
  int radius = 0;
  Node witness{1};
  bool crosses = false;
};

/// Column E of `images` is the image of the E-th Haar function, sampled on
/// leaves; `target` is the measure of the image space.
SideScan scan_side(const Grid& g, const Eigen::MatrixXd& images, const HaarBasis& source,
                   const LeafMeasure& target, int root_level) {
  SideScan out;
  const double scale = std::max(1.0, images.cwiseAbs().maxCoeff());
  const double thr = kSupportTolerance * scale;
  const std::size_t n = g.leaf_count();
  const int levels = g.levels();
  for (std::uint32_t e = 1; e < n; ++e) {
    const Node en{e};
    const int t = g.level(en);
    if (t < root_level || !source.charged(en)) continue;
    auto col = images.col(e);
    std::size_t lo = g.leaf_range(en).first;
    std::size_t hi = lo;
    for (std::size_t p = 0; p < n; ++p) {
      if (std::abs(col(static_cast<Eigen::Index>(p))) > thr && target.leaf_mass(p) > 0.0) {
        lo = std::min(lo, p);
        hi = std::max(hi, p);
      }
    }
    // common ancestor of E and every supported leaf
    const int lca = std::min(t, levels - static_cast<int>(std::bit_width(lo ^ hi)));
    if (lca < root_level) {
      out.crosses = true;
      out.radius = levels + 1;
      out.witness = en;
      return out;
    }
    if (t - lca > out.radius) {
      out.radius = t - lca;
      out.witness = en;
    }
  }
  return out;
}

/// Scan of <T(sigma 1_Q), h^omega_R>_omega over all ill-positioned pairs.
std::optional<WlViolation> wl_side(const Grid& g, const Eigen::MatrixXd& kernel,
                                   const LeafMeasure& sigma, const LeafMeasure& omega, int r,
                                   int root_level, double frob, bool adjoint_side) {
  const auto n = static_cast<Eigen::Index>(g.leaf_count());
  Eigen::MatrixXd kh = kernel;
  for (Eigen::Index y = 0; y < n; ++y) kh.col(y) *= sigma.leaf_mass(static_cast<std::size_t>(y));
  const HaarBasis hw(omega);
  hw.analyze_columns(kh);
  // prefix(p, R) = sum over leaves y < p of kh(R, y)
  Eigen::MatrixXd prefix = Eigen::MatrixXd::Zero(n + 1, n);
  for (Eigen::Index y = 0; y < n; ++y) prefix.row(y + 1) = prefix.row(y) + kh.col(y).transpose();

  for (std::uint32_t q = 1; q < g.node_end(); ++q) {
    const Node qn{q};
    const int lq = g.level(qn);
    if (lq < root_level || !sigma.charged(qn)) continue;
    const Node qa = g.ancestor(qn, r, root_level);
    const auto [lo, hi] = g.leaf_range(qn);
    const double tol = 1e-10 * frob * std::sqrt(sigma(qn));
    for (std::uint32_t rid = 1; rid < g.leaf_count(); ++rid) {
      const Node rn{rid};
      const int lr = g.level(rn);
      if (lr < root_level || !hw.charged(rn)) continue;
      const bool near_bad = lr >= lq - 1 && !g.contains(qa, rn);
      const bool small_bad = lr >= lq + r && !g.contains(qn, rn);
      if (!near_bad && !small_bad) continue;
      const double v = prefix(static_cast<Eigen::Index>(hi), rid) - prefix(static_cast<Eigen::Index>(lo), rid);
      if (std::abs(v) > tol) return WlViolation{qn, rn, v, adjoint_side};
    }
  }
  return std::nullopt;
}

}  // namespace

EwlProfile ewl_profile(const DyadicOperator& t) {
  const Grid& g = t.grid();
  const int rho = t.root_level();
  const HaarBasis hs(t.sigma());
  const HaarBasis hw(t.omega());

  const Eigen::MatrixXd forward = t.haar_images();
  Eigen::MatrixXd backward = t.kernel().transpose();
  hw.analyze_rows(backward);

  const SideScan a = scan_side(g, forward, hs, t.omega(), rho);
  const SideScan b = a.crosses ? SideScan{} : scan_side(g, backward, hw, t.sigma(), rho);
  EwlProfile p;
  if (a.crosses || b.crosses) {
    p.crosses_roots = true;
    p.radius = g.levels() + 1;
    p.witness = a.crosses ? a.witness : b.witness;
    p.adjoint_side = !a.crosses;
    return p;
  }
  p.radius = std::max(a.radius, b.radius);
  p.adjoint_side = b.radius > a.radius;
  p.witness = p.adjoint_side ? b.witness : a.witness;
  return p;
}

int ewl_radius_raw(const DyadicOperator& t) { return ewl_profile(t).radius; }

std::optional<int> ewl_radius(const DyadicOperator& t) {
  const EwlProfile p = ewl_profile(t);
  if (p.crosses_roots) return std::nullopt;
  const int vacuous = t.grid().levels() - 1 - t.root_level();
  if (vacuous >= 1 && p.radius >= vacuous) return std::nullopt;
  return p.radius;
}

std::optional<WlViolation> wl_violation(const DyadicOperator& t, int r) {
  const Grid& g = t.grid();
  const double frob = t.whitened().norm();
  if (auto v = wl_side(g, t.kernel(), t.sigma(), t.omega(), r, t.root_level(), frob, false)) return v;
  const Eigen::MatrixXd kt = t.kernel().transpose();
  return wl_side(g, kt, t.omega(), t.sigma(), r, t.root_level(), frob, true);
}

bool wl_check(const DyadicOperator& t, int r) { return !wl_violation(t, r).has_value(); }

std::optional<int> wl_radius(const DyadicOperator& t, int max_r) {
  for (int r = 1; r <= max_r; ++r) {
    if (wl_check(t, r)) return r;
  }
  return std::nullopt;
}

}  // namespace ewl
