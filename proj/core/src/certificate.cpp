#include "ewl/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ewl/classify.hpp"
#include "ewl/errors.hpp"
#include "ewl/haar.hpp"

namespace ewl {

namespace {

struct MeanSplit {
  LeafFunction f0;
  double mean;
};

MeanSplit remove_mean(const LeafFunction& f, const LeafMeasure& mu) {
  const double m = mu.total() > 0.0 ? mu.integral(f, mu.grid().root()) / mu.total() : 0.0;
  LeafFunction f0 = f;
  for (std::size_t p = 0; p < f0.size(); ++p) f0[p] -= m;
  return {std::move(f0), m};
}

/// Haar coordinates of a mean-zero function, with the constant slot forced to 0.
std::vector<double> coordinates(const LeafFunction& f, const HaarBasis& basis) {
  std::vector<double> c(basis.size());
  basis.analyze(f.values().data(), c.data());
  c[0] = 0.0;
  return c;
}

/// omega-averages of g over every node (0 on massless nodes).
std::vector<double> node_averages(const LeafFunction& g, const LeafMeasure& omega) {
  const std::size_t n = omega.grid().leaf_count();
  std::vector<double> s(2 * n, 0.0);
  for (std::size_t p = 0; p < n; ++p) s[n + p] = g[p] * omega.leaf_mass(p);
  for (std::size_t id = n - 1; id >= 1; --id) s[id] = s[2 * id] + s[2 * id + 1];
  for (std::uint32_t id = 1; id < 2 * n; ++id) {
    const double m = omega(Node{id});
    s[id] = m > 0.0 ? s[id] / m : 0.0;
  }
  return s;
}

bool strictly_contains(const Grid& g, Node outer, Node inner) {
  return outer != inner && g.contains(outer, inner);
}

double frobenius(const DyadicOperator& t) { return t.whitened().norm(); }

}  // namespace

std::uint64_t count_M(int n, int r) {
  if (n < 1 || r < 0) throw DomainError("count_M needs n >= 1 and r >= 0");
  const long long bits = static_cast<long long>(n) * (2LL * r + 1);
  if (bits >= 64) throw DomainError("count_M overflows 64 bits");
  const std::uint64_t num = (std::uint64_t{1} << bits) - 1;
  const std::uint64_t den = (std::uint64_t{1} << n) - 1;
  return num / den;
}

Bound make_bound(std::string name, double lhs, double rhs, double scale) {
  Bound b{std::move(name), lhs, rhs, true};
  b.ok = lhs <= rhs * (1.0 + kBoundSlack) + 1e-12 * scale;
  return b;
}

Partition make_partition(std::string name, double lhs, double rhs, double tolerance) {
  Partition p{std::move(name), lhs, rhs, tolerance, true};
  p.ok = std::abs(lhs - rhs) <= tolerance;
  return p;
}

OrthantCheck orthant_vanishing_check(const DyadicOperator& t, const LeafFunction& f,
                                     const LeafFunction& g) {
  const Grid& grid = t.grid();
  const int rho = t.root_level();
  OrthantCheck out;
  out.tolerance = 1e-12 * std::max(1.0, frobenius(t)) * std::max(1.0, norm(f, t.sigma())) *
                  std::max(1.0, norm(g, t.omega()));
  const std::uint32_t first = 1u << rho;
  const std::uint32_t last = 2u << rho;
  for (std::uint32_t i = first; i < last; ++i) {
    LeafFunction fi(grid);
    const auto [ilo, ihi] = grid.leaf_range(Node{i});
    for (std::size_t p = ilo; p < ihi; ++p) fi[p] = f[p];
    const LeafFunction image = t.apply(fi);
    for (std::uint32_t j = first; j < last; ++j) {
      if (i == j) continue;
      const auto [jlo, jhi] = grid.leaf_range(Node{j});
      double v = 0.0;
      for (std::size_t p = jlo; p < jhi; ++p) v += image[p] * g[p] * t.omega().leaf_mass(p);
      if (std::abs(v) > out.max_cross) {
        out.max_cross = std::abs(v);
        out.first_root = static_cast<int>(i - first);
        out.second_root = static_cast<int>(j - first);
      }
    }
  }
  out.ok = out.max_cross <= out.tolerance;
  return out;
}

BoundaryTerms boundary_terms_check(const DyadicOperator& t, const LeafFunction& f,
                                   const LeafFunction& g, double c1, double c2) {
  const MeanSplit fs = remove_mean(f, t.sigma());
  const MeanSplit gs = remove_mean(g, t.omega());
  const LeafFunction one = LeafFunction::constant(t.grid(), 1.0);
  const double nf = norm(f, t.sigma());
  const double ng = norm(g, t.omega());
  const double scale = frobenius(t) * nf * ng;
  BoundaryTerms out;
  out.term1 = gs.mean * t.pairing(fs.f0, one);
  out.term2 = fs.mean * t.pairing(one, gs.f0);
  out.term3 = fs.mean * gs.mean * t.pairing(one, one);
  out.bound1 = make_bound("boundary: Haar(f) vs mean(g) <= c2 |f||g|", std::abs(out.term1), c2 * nf * ng, scale);
  out.bound2 = make_bound("boundary: mean(f) vs Haar(g) <= c1 |f||g|", std::abs(out.term2), c1 * nf * ng, scale);
  out.bound3 = make_bound("boundary: mean(f) vs mean(g) <= c1 |f||g|", std::abs(out.term3), c1 * nf * ng, scale);
  return out;
}

BoundaryTerms boundary_terms_check(const DyadicOperator& t, const LeafFunction& f,
                                   const LeafFunction& g) {
  const LocalTesting loc = local_testing(t);
  return boundary_terms_check(t, f, g, loc.c1.value, loc.c2.value);
}

AbcTerms decompose_ABC(const DyadicOperator& t, const LeafFunction& f, const LeafFunction& g,
                       int r, double op_norm) {
  if (r < 0) throw DomainError("radius must be nonnegative");
  const Grid& grid = t.grid();
  const int rho = t.root_level();
  const MeanSplit fs = remove_mean(f, t.sigma());
  const MeanSplit gs = remove_mean(g, t.omega());
  const HaarBasis hs(t.sigma());
  const HaarBasis hw(t.omega());
  const std::vector<double> fh = coordinates(fs.f0, hs);
  const std::vector<double> gh = coordinates(gs.f0, hw);
  const Eigen::MatrixXd m = t.haar_matrix();
  const double entry_floor = kSupportTolerance * std::max(1.0, m.cwiseAbs().maxCoeff());

  AbcTerms out;
  out.radius = r;
  out.norm_f = norm(fs.f0, t.sigma());
  out.norm_g = norm(gs.f0, t.omega());
  out.pi = t.pairing(fs.f0, gs.f0);

  const std::uint32_t n = static_cast<std::uint32_t>(grid.leaf_count());
  for (std::uint32_t e = 1; e < n; ++e) {
    const Node en{e};
    if (!hs.charged(en)) continue;
    const int te = grid.level(en);
    const Node re = grid.ancestor(en, r, rho);
    std::uint64_t list = 0;
    for (std::uint32_t gid = 1; gid < n; ++gid) {
      const Node gn{gid};
      if (!hw.charged(gn)) continue;
      const int tg = grid.level(gn);
      const double entry = m(gid, e);
      const bool comparable = std::abs(te - tg) <= r;
      if (comparable && std::abs(entry) > entry_floor) ++list;
      const double v = fh[e] * entry * gh[gid];
      if (comparable) {
        out.a += v;
      } else if (strictly_contains(grid, gn, re)) {
        out.b += v;
      } else if (strictly_contains(grid, en, grid.ancestor(gn, r, rho))) {
        out.c += v;
      } else if (std::abs(v) > out.worst_excluded) {
        out.worst_excluded = std::abs(v);
        out.excluded_e = en;
        out.excluded_g = gn;
      }
    }
    out.max_list = std::max(out.max_list, list);
  }

  const double tol = kPartitionTolerance * out.norm_f * out.norm_g * op_norm;
  out.partition = make_partition("Pi(f0,g0) = A + B + C", out.pi, out.a + out.b + out.c, tol);
  if (!out.partition.ok) {
    std::ostringstream os;
    os << "scale decomposition at r = " << r << " leaves residual "
       << std::abs(out.pi - (out.a + out.b + out.c)) << " > " << tol
       << "; largest excluded pair E = " << grid.describe(out.excluded_e)
       << ", G = " << grid.describe(out.excluded_g) << " contributes " << out.worst_excluded;
    throw DecompositionError(os.str());
  }
  return out;
}

Bound a_term_bound(const AbcTerms& abc, int n, double c3) {
  const double m = static_cast<double>(count_M(n, abc.radius));
  return make_bound("|A| <= 4 M c3(r+1) |f||g|", std::abs(abc.a), 4.0 * m * c3 * abc.norm_f * abc.norm_g);
}

BSplit split_B(const DyadicOperator& t, const LeafFunction& f, const LeafFunction& g,
               const StoppingFamily& family, int r, double c2, double b_total, double op_norm) {
  const Grid& grid = t.grid();
  const int rho = t.root_level();
  const LeafMeasure& omega = t.omega();
  const HaarBasis hs(t.sigma());
  const HaarBasis hw(omega);
  const std::vector<double> fh = coordinates(f, hs);
  const std::vector<double> gh = coordinates(g, hw);
  const std::vector<double> avg = node_averages(g, omega);
  const Eigen::MatrixXd m = t.haar_matrix();
  const Eigen::MatrixXd y = t.haar_images();
  const double nf = norm(f, t.sigma());
  const double ng = norm(g, omega);
  const double scale = frobenius(t) * nf * ng;
  const BoundConstants k = bound_constants(grid.dimension(), r);

  const std::uint32_t n = static_cast<std::uint32_t>(grid.leaf_count());
  std::vector<double> acc_i(2 * n, 0.0), acc_ii(2 * n, 0.0), acc_b(2 * n, 0.0), proj2(2 * n, 0.0);

  auto omega_integral = [&](std::uint32_t col, Node over) {
    const auto [lo, hi] = grid.leaf_range(over);
    double s = 0.0;
    for (std::size_t p = lo; p < hi; ++p) s += omega.leaf_mass(p) * y(static_cast<Eigen::Index>(p), col);
    return s;
  };

  BSplit out;
  out.b = b_total;
  for (std::uint32_t e = 1; e < n; ++e) {
    const Node en{e};
    if (!hs.charged(en)) continue;
    const Node re = grid.ancestor(en, r, rho);
    const Node s = family.parent_of(re);
    proj2[s.id] += fh[e] * fh[e];
    if (fh[e] == 0.0) continue;
    acc_i[s.id] += fh[e] * avg[re.id] * omega_integral(e, re);
    acc_ii[s.id] += fh[e] * avg[s.id] * omega_integral(e, s);
    for (std::uint32_t gid = re.id / 2; gid >= 1 && grid.level(Node{gid}) >= rho; gid /= 2) {
      const double v = fh[e] * gh[gid] * m(gid, e);
      if (family.parent_of(Node{gid}) == s) {
        acc_b[s.id] += v;
        out.b1 += v;
      } else {
        out.b2 += v;
      }
    }
  }

  const double tol = kPartitionTolerance * nf * ng * op_norm;
  double worst_s_residual = -1.0;
  Partition worst_s;
  Bound worst_i{"|I_S| <= 2 sqrt(M) c2 <|g|>_S omega(S)^1/2 |P_S f|", 0.0, 0.0, true};
  Bound worst_ii{"|II_S| <= c2 <|g|>_S omega(S)^1/2 |P_S f|", 0.0, 0.0, true};
  double worst_i_ratio = -1.0;
  double worst_ii_ratio = -1.0;
  for (Node s : family.members()) {
    StoppingTerm st;
    st.s = s;
    st.b_s = acc_b[s.id];
    st.i_s = acc_i[s.id];
    st.ii_s = acc_ii[s.id];
    st.projection_norm = std::sqrt(proj2[s.id]);
    st.average_abs = family.average(s);
    st.omega_s = omega(s);
    out.b2_collapsed += st.ii_s;
    const double base = c2 * st.average_abs * std::sqrt(st.omega_s) * st.projection_norm;
    st.bound_i = make_bound(worst_i.name, std::abs(st.i_s), k.i_factor * base, scale);
    st.bound_ii = make_bound(worst_ii.name, std::abs(st.ii_s), base, scale);
    const Partition p = make_partition("B_S = I_S - II_S", st.b_s, st.i_s - st.ii_s, tol);
    const double res = std::abs(p.lhs - p.rhs);
    if (res > worst_s_residual) {
      worst_s_residual = res;
      worst_s = p;
      worst_s.name = "B_S = I_S - II_S at " + grid.describe(s);
    }
    auto ratio = [](const Bound& b) { return b.rhs > 0.0 ? b.lhs / b.rhs : (b.lhs > 0.0 ? 1e300 : 0.0); };
    if (ratio(st.bound_i) > worst_i_ratio) {
      worst_i_ratio = ratio(st.bound_i);
      worst_i = st.bound_i;
      worst_i.name += " at " + grid.describe(s);
    }
    if (ratio(st.bound_ii) > worst_ii_ratio) {
      worst_ii_ratio = ratio(st.bound_ii);
      worst_ii = st.bound_ii;
      worst_ii.name += " at " + grid.describe(s);
    }
    out.per_stopping.push_back(std::move(st));
  }
  out.stopping_members = family.members();

  out.partitions.push_back(make_partition("B = B1 + B2", b_total, out.b1 + out.b2, tol));
  out.partitions.push_back(
      make_partition("B2 = sum_S <g>_S Pi(P_S f, 1_S)", out.b2, out.b2_collapsed, tol));
  out.partitions.push_back(worst_s);

  out.packing = check_packing(family, omega);
  out.embedding = carleson_embedding_check(family, g, omega);

  out.bounds.push_back(make_bound("|B2| <= sqrt(8) c2 |f||g|", std::abs(out.b2), k.b2_factor * c2 * nf * ng, scale));
  out.bounds.push_back(worst_i);
  out.bounds.push_back(worst_ii);
  out.bounds.push_back(make_bound("|B1| <= (2 sqrt(M) + 1) sqrt(8) c2 |f||g|", std::abs(out.b1),
                                  k.b1_factor * c2 * nf * ng, scale));
  out.bounds.push_back(make_bound("Carleson embedding <= 8",
                                  std::max(out.embedding.ratio_signed, out.embedding.ratio_abs), k.embedding));
  return out;
}

BoundConstants bound_constants(int n, int r) {
  BoundConstants k;
  k.m = count_M(n, r);
  const double m = static_cast<double>(k.m);
  k.a_factor = 4.0 * m;
  k.b2_factor = std::sqrt(8.0);
  k.i_factor = 2.0 * std::sqrt(m);
  k.ii_factor = 1.0;
  k.b1_factor = (k.i_factor + k.ii_factor) * std::sqrt(k.embedding);
  k.total = std::max(2.0 + k.b1_factor + k.b2_factor, k.a_factor);
  return k;
}

bool BilinearCertificate::partitions_ok() const {
  return std::all_of(partitions.begin(), partitions.end(), [](const Partition& p) { return p.ok; });
}

bool BilinearCertificate::bounds_ok() const {
  return std::all_of(bounds.begin(), bounds.end(), [](const Bound& b) { return b.ok; });
}

bool BilinearCertificate::packing_ok() const { return b_split.packing.ok && c_split.packing.ok; }

BilinearCertificate full_certificate(const DyadicOperator& t, const LeafFunction& f,
                                     const LeafFunction& g, std::optional<int> r) {
  BilinearCertificate cert;
  cert.radius = r ? *r : default_radius(t);
  cert.report = testing_report(t, cert.radius);
  const double c1 = cert.report.c1;
  const double c2 = cert.report.c2;
  const double c3 = cert.report.c3_wide;
  const double op_norm = cert.report.norm;
  cert.norm_f = norm(f, t.sigma());
  cert.norm_g = norm(g, t.omega());
  cert.constants = bound_constants(t.grid().dimension(), cert.radius);
  cert.pi_total = t.pairing(f, g);

  cert.boundary = boundary_terms_check(t, f, g, c1, c2);
  cert.abc = decompose_ABC(t, f, g, cert.radius, op_norm);
  cert.a_term = cert.abc.a;
  cert.b_term = cert.abc.b;
  cert.c_term = cert.abc.c;

  const MeanSplit fs = remove_mean(f, t.sigma());
  const MeanSplit gs = remove_mean(g, t.omega());
  const StoppingFamily g_family = build_stopping_family(gs.f0, t.omega());
  cert.b_split = split_B(t, fs.f0, gs.f0, g_family, cert.radius, c2, cert.abc.b, op_norm);
  cert.b1_term = cert.b_split.b1;
  cert.b2_term = cert.b_split.b2;
  const DyadicOperator adj = t.adjoint();
  const StoppingFamily f_family = build_stopping_family(fs.f0, t.sigma());
  cert.c_split = split_B(adj, gs.f0, fs.f0, f_family, cert.radius, c1, cert.abc.c, op_norm);

  const double tol = kPartitionTolerance * cert.norm_f * cert.norm_g * op_norm;
  const BoundaryTerms& bt = cert.boundary;
  cert.partitions.push_back(make_partition("Pi(f,g) = Pi(f0,g0) + boundary terms", cert.pi_total,
                                           cert.abc.pi + bt.term1 + bt.term2 + bt.term3, tol));
  cert.partitions.push_back(cert.abc.partition);
  for (const Partition& p : cert.b_split.partitions) cert.partitions.push_back(p);
  for (Partition p : cert.c_split.partitions) {
    p.name = "adjoint: " + p.name;
    cert.partitions.push_back(std::move(p));
  }

  const double scale = frobenius(t) * cert.norm_f * cert.norm_g;
  cert.bounds.push_back(bt.bound1);
  cert.bounds.push_back(bt.bound2);
  cert.bounds.push_back(bt.bound3);
  Bound a = a_term_bound(cert.abc, t.grid().dimension(), c3);
  a.ok = a.lhs <= a.rhs * (1.0 + kBoundSlack) + 1e-12 * scale;
  cert.bounds.push_back(a);
  cert.bounds.push_back(make_bound("list length <= M", static_cast<double>(cert.abc.max_list),
                                   static_cast<double>(cert.constants.m)));
  for (const Bound& b : cert.b_split.bounds) cert.bounds.push_back(b);
  for (Bound b : cert.c_split.bounds) {
    b.name = "adjoint: " + b.name;
    cert.bounds.push_back(std::move(b));
  }
  cert.bounds.push_back(make_bound("|Pi(f,g)| <= K (c1 + c2 + c3(r+1)) |f||g|", std::abs(cert.pi_total),
                                   cert.constants.total * (c1 + c2 + c3) * cert.norm_f * cert.norm_g, scale));
  return cert;
}

}  // namespace ewl
