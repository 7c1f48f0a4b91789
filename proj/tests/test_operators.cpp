#include <cmath>

#include "doctest.h"
#include "ewl/classify.hpp"
#include "ewl/errors.hpp"
#include "ewl/families.hpp"
#include "ewl/haar.hpp"
#include "ewl/rng.hpp"
#include "oracle.hpp"

using namespace ewl;

namespace {

LeafMeasure random_measure(const Grid& g, Rng& rng, double zero_p = 0.0) {
  std::vector<double> m(g.leaf_count());
  for (double& x : m) x = rng.bernoulli(zero_p) ? 0.0 : rng.unit_open_low();
  return LeafMeasure(g, m);
}

LeafFunction random_function(const Grid& g, Rng& rng) {
  LeafFunction f(g);
  for (std::size_t p = 0; p < f.size(); ++p) f[p] = rng.uniform(-1, 1);
  return f;
}

double max_diff(const LeafFunction& a, const LeafFunction& b, const LeafMeasure& mu) {
  double m = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) {
    if (mu.leaf_mass(p) > 0.0) m = std::max(m, std::abs(a[p] - b[p]));
  }
  return m;
}

}  // namespace

TEST_CASE("martingale transform") {
  Rng rng(1);
  const Grid g(GridSpec{2, 2});
  const LeafMeasure s = random_measure(g, rng), w = random_measure(g, rng);
  const CoefficientSequence b = CoefficientSequence::random(g, 9);
  const DyadicOperator t = martingale_transform(b, s, w);
  for (std::uint32_t id = 1; id < g.leaf_count(); ++id) {
    LeafFunction want = weighted_haar(Node{id}, w);
    want *= b[Node{id}];
    CHECK(max_diff(t.apply(weighted_haar(Node{id}, s)), want, w) < 1e-12);
    LeafFunction want_adj = weighted_haar(Node{id}, s);
    want_adj *= b[Node{id}];
    CHECK(max_diff(t.apply_adjoint(weighted_haar(Node{id}, w)), want_adj, s) < 1e-12);
  }
  SUBCASE("unweighted model") {
    const Grid h(GridSpec{1, 3});
    const LeafMeasure leb = LeafMeasure::lebesgue(h);
    const CoefficientSequence c = CoefficientSequence::random(h, 2);
    const DyadicOperator u = martingale_transform(c, leb, leb);
    for (std::uint32_t id = 1; id < h.leaf_count(); ++id) {
      LeafFunction want = haar0(h, Node{id});
      want *= c[Node{id}];
      CHECK(max_diff(u.apply(haar0(h, Node{id})), want, leb) < 1e-12);
    }
  }
  SUBCASE("b = 0 and b = 1") {
    CHECK(martingale_transform(CoefficientSequence(g), s, w).kernel().norm() == 0.0);
    const DyadicOperator p = martingale_transform(CoefficientSequence::constant(g, 1.0), s, s);
    const LeafFunction f = random_function(g, rng);
    LeafFunction want = f;
    want -= LeafFunction::constant(g, s.average(f, g.root()));
    CHECK(max_diff(p.apply(f), want, s) < 1e-12);
  }
}

TEST_CASE("paraproduct") {
  Rng rng(2);
  const Grid g(GridSpec{1, 3});
  SUBCASE("unweighted adjoint identity") {
    const LeafMeasure leb = LeafMeasure::lebesgue(g);
    const CoefficientSequence b = CoefficientSequence::random(g, 4);
    const DyadicOperator p = paraproduct(b, leb, leb);
    for (std::uint32_t id = 1; id < g.leaf_count(); ++id) {
      LeafFunction want = haar_avg(g, Node{id});
      want *= b[Node{id}];
      CHECK(max_diff(p.apply_adjoint(haar0(g, Node{id})), want, leb) < 1e-12);
    }
  }
  SUBCASE("weighted action") {
    const LeafMeasure s = random_measure(g, rng, 0.2), w = random_measure(g, rng);
    const CoefficientSequence b = CoefficientSequence::random(g, 5);
    const DyadicOperator p = paraproduct(b, s, w);
    const LeafFunction f = random_function(g, rng);
    LeafFunction want(g);
    for (std::uint32_t id = 1; id < g.leaf_count(); ++id) {
      LeafFunction term = weighted_haar(Node{id}, w);
      term *= b[Node{id}] * s.average(f, Node{id});
      want += term;
    }
    CHECK(max_diff(p.apply(f), want, w) < 1e-12);
    // P_b 1 = sum_E b_E h_E
    LeafFunction sum(g);
    for (std::uint32_t id = 1; id < g.leaf_count(); ++id) {
      if (s.charged(Node{id})) sum += b[Node{id}] * weighted_haar(Node{id}, w);
    }
    CHECK(max_diff(p.apply(LeafFunction::constant(g, 1.0)), sum, w) < 1e-12);
  }
  SUBCASE("single coefficient is rank one") {
    const LeafMeasure s = random_measure(g, rng), w = random_measure(g, rng);
    const DyadicOperator p = paraproduct(CoefficientSequence::single(g, Node{3}, 2.0), s, w);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(p.kernel());
    CHECK(svd.singularValues()(1) < 1e-12 * svd.singularValues()(0));
  }
}

TEST_CASE("haar shift") {
  const Grid g(GridSpec{1, 4});
  const LeafMeasure leb = LeafMeasure::lebesgue(g);
  const CoefficientSequence b = CoefficientSequence::random(g, 8);
  const DyadicOperator s = haar_shift(b, leb, leb);
  const oracle::Model m(g);
  for (std::uint32_t id = 1; id < g.leaf_count(); ++id) {
    const LeafFunction img = s.apply(haar0(g, Node{id}));
    LeafFunction want(g);
    if (!g.is_leaf(Node{2 * id})) {
      want = haar0(g, Node{2 * id + 1}) - haar0(g, Node{2 * id});
      want *= b[Node{id}];
    }
    CHECK(max_diff(img, want, leb) < 1e-12);
    // supp S h_I inside I, supp S* h_I inside I^(1)
    const LeafFunction adj = s.apply_adjoint(haar0(g, Node{id}));
    for (std::size_t p = 0; p < g.leaf_count(); ++p) {
      if (std::abs(img[p]) > 1e-12) CHECK(m.box[id].has(m.leaf[p]));
      if (std::abs(adj[p]) > 1e-12) CHECK(m.box[m.ancestor(id, 1)].has(m.leaf[p]));
    }
  }
  CHECK(ewl_radius(s) == 1);
  CHECK(haar_shift(CoefficientSequence(g), leb, leb).kernel().norm() == 0.0);
  const Grid g2(GridSpec{2, 2});
  const LeafMeasure l2 = LeafMeasure::lebesgue(g2);
  CHECK_THROWS_AS(haar_shift(CoefficientSequence(g2), l2, l2), UnsupportedDimensionError);
}

TEST_CASE("adjoint and linearity") {
  Rng rng(4);
  const Grid g(GridSpec{2, 2});
  for (int t = 0; t < 100; ++t) {
    const LeafMeasure s = random_measure(g, rng), w = random_measure(g, rng);
    const DyadicOperator op = random_dense(s, w, rng.bits());
    const LeafFunction f = random_function(g, rng), h = random_function(g, rng);
    const double lhs = op.pairing(f, h);
    const double rhs = inner(f, op.apply_adjoint(h), s);
    const double scale = norm(f, s) * norm(h, w) * op.whitened().norm();
    CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
    if (t < 5) {
      const DyadicOperator back = op.adjoint().adjoint();
      CHECK((back.kernel() - op.kernel()).norm() == 0.0);
      LeafFunction mix = 2.0 * f;
      mix -= 3.0 * h;
      const LeafFunction lin = 2.0 * op.apply(f) - 3.0 * op.apply(h);
      CHECK(max_diff(op.apply(mix), lin, w) < 1e-12);
    }
  }
}

TEST_CASE("random_ewl") {
  Rng rng(6);
  const Grid g(GridSpec{1, 4});
  for (int r = 0; r <= 3; ++r) {
    for (int t = 0; t < 20; ++t) {
      const LeafMeasure s = random_measure(g, rng, t % 3 == 0 ? 0.3 : 0.0);
      const LeafMeasure w = random_measure(g, rng, t % 4 == 1 ? 0.3 : 0.0);
      if (!(s.total() > 0.0) || !(w.total() > 0.0)) continue;
      const std::uint64_t seed = rng.bits();
      const DyadicOperator a = random_ewl(s, w, {r, seed, 0});
      CHECK(ewl_radius_raw(a) <= r);
      CHECK(oracle::ewl_radius(oracle::Lex(a)) <= r);
      if (t < 2) CHECK((random_ewl(s, w, {r, seed, 0}).kernel() - a.kernel()).norm() == 0.0);
    }
  }
}

TEST_CASE("classifiers against brute force") {
  Rng rng(7);
  for (int n = 1; n <= 2; ++n) {
    const Grid g(GridSpec{n, n == 1 ? 4 : 2});
    for (int t = 0; t < 12; ++t) {
      const LeafMeasure s = random_measure(g, rng, 0.15), w = random_measure(g, rng, 0.15);
      if (!(s.total() > 0.0) || !(w.total() > 0.0)) continue;
      const int r = t % 3;
      const DyadicOperator op = t % 4 == 3 ? martingale_transform(CoefficientSequence::random(g, rng.bits()), s, w)
                                           : random_ewl(s, w, {r, rng.bits(), 0});
      const oracle::Lex lex(op);
      CHECK(ewl_radius_raw(op) == oracle::ewl_radius(lex));
      for (int q = 1; q <= 3; ++q) CHECK(wl_check(op, q) == oracle::wl(lex, q));
    }
  }
}

TEST_CASE("paper radii") {
  const Grid g(GridSpec{1, 4});
  const LeafMeasure leb = LeafMeasure::lebesgue(g);
  const CoefficientSequence b = CoefficientSequence::random(g, 12);
  const DyadicOperator mt = martingale_transform(b, leb, leb);
  CHECK(ewl_radius(mt) == 0);
  CHECK(wl_check(mt, 1));
  const DyadicOperator sh = haar_shift(b, leb, leb);
  CHECK(ewl_radius(sh) == 1);
  CHECK(wl_check(sh, 2));
  CHECK(wl_check(paraproduct(b, leb, leb), 1));
}

TEST_CASE("dense operators are not localized") {
  Rng rng(8);
  const Grid g(GridSpec{1, 4});
  const LeafMeasure s = random_measure(g, rng), w = random_measure(g, rng);
  const DyadicOperator op = random_dense(s, w, 3);
  CHECK_FALSE(ewl_radius(op).has_value());
  CHECK_FALSE(wl_radius(op, 3).has_value());
}

TEST_CASE("perfect dyadic kernels") {
  const Grid g(GridSpec{1, 4});
  const LeafMeasure leb = LeafMeasure::lebesgue(g);
  for (int r = 0; r <= 1; ++r) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const PerfectDyadicKernel k = random_perfect_kernel(g, r, seed);
      CHECK_NOTHROW(validate_kernel(k));
      const auto radius = ewl_radius(perfect_dyadic_operator(k, leb, leb));
      REQUIRE(radius.has_value());
      CHECK(*radius <= r);
    }
  }
  SUBCASE("constant kernel annihilates haar functions") {
    PerfectDyadicKernel k{g, 1, Eigen::MatrixXd::Constant(16, 16, 0.5)};
    CHECK_NOTHROW(validate_kernel(k));
    const DyadicOperator op = perfect_dyadic_operator(k, leb, leb);
    for (std::uint32_t id = 1; id < g.leaf_count(); ++id) {
      const LeafFunction img = op.apply(haar0(g, Node{id}));
      for (std::size_t p = 0; p < img.size(); ++p) CHECK(std::abs(img[p]) < 1e-13);
    }
  }
  SUBCASE("corrupted kernels name the offending pair") {
    PerfectDyadicKernel k = random_perfect_kernel(g, 1, 3);
    k.values(0, 15) += 1e-3;
    try {
      validate_kernel(k);
      FAIL("corrupted kernel accepted");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("I = Q(") != std::string::npos);
    }
    PerfectDyadicKernel big = random_perfect_kernel(g, 1, 3);
    big.values(0, 1) = 100.0;
    CHECK_THROWS_AS(validate_kernel(big), ValidationError);
  }
}
