#include <cmath>

#include "doctest.h"
#include "ewl/errors.hpp"
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

}  // namespace

TEST_CASE("lebesgue haar functions") {
  const Grid g(GridSpec{1, 1});
  const LeafFunction h = haar0(g, g.root());
  CHECK(h[0] == -1.0);
  CHECK(h[1] == 1.0);
  const Grid g2(GridSpec{2, 2});
  const LeafMeasure leb = LeafMeasure::lebesgue(g2);
  for (std::uint32_t a = 1; a < g2.leaf_count(); ++a) {
    CHECK(inner(haar0(g2, Node{a}), haar0(g2, Node{a}), leb) == doctest::Approx(1.0));
    CHECK(inner(haar_avg(g2, Node{a}), LeafFunction::constant(g2, 1.0), leb) == doctest::Approx(1.0));
    for (std::uint32_t b = a + 1; b < g2.leaf_count(); ++b) {
      CHECK(std::abs(inner(haar0(g2, Node{a}), haar0(g2, Node{b}), leb)) < 1e-14);
    }
  }
}

TEST_CASE("weighted haar matches the two-valued formula") {
  Rng rng(3);
  for (int n = 1; n <= 3; ++n) {
    const Grid g(GridSpec{n, n == 3 ? 1 : 2});
    const oracle::Model m(g);
    const LeafMeasure mu = random_measure(g, rng, 0.25);
    const auto lex = mu.lexicographic();
    for (std::uint32_t id = 1; id < g.leaf_count(); ++id) {
      const auto want = m.haar(lex, id);
      const auto got = weighted_haar(Node{id}, mu).lexicographic();
      for (std::size_t p = 0; p < want.size(); ++p) CHECK(got[p] == doctest::Approx(want[p]).epsilon(1e-13));
    }
  }
}

TEST_CASE("zero convention and mean zero") {
  const Grid g(GridSpec{1, 2});
  const LeafMeasure mu(g, {0.0, 0.0, 1.0, 2.0});
  const LeafFunction h = weighted_haar(g.root(), mu);
  for (std::size_t p = 0; p < h.size(); ++p) CHECK(h[p] == 0.0);
  const LeafFunction h3 = weighted_haar(Node{3}, mu);
  CHECK(std::abs(inner(h3, LeafFunction::constant(g, 1.0), mu)) < 1e-15);
  CHECK(inner(h3, h3, mu) == doctest::Approx(1.0));
  const HaarBasis basis(mu);
  CHECK_FALSE(basis.charged(g.root()));
  CHECK(basis.charged(Node{3}));
}

TEST_CASE("orthonormality and completeness") {
  Rng rng(5);
  for (int n = 1; n <= 2; ++n) {
    for (int d = 1; d <= 3; ++d) {
      const Grid g(GridSpec{n, d});
      const LeafMeasure mu = random_measure(g, rng);
      std::size_t count = 0;
      for (std::uint32_t a = 1; a < g.leaf_count(); ++a) {
        const LeafFunction ha = weighted_haar(Node{a}, mu);
        count += mu.haar_charged(Node{a});
        CHECK(inner(ha, ha, mu) == doctest::Approx(1.0).epsilon(1e-12));
        for (std::uint32_t b = a + 1; b < g.leaf_count(); ++b) {
          CHECK(std::abs(inner(ha, weighted_haar(Node{b}, mu), mu)) <= 1e-12);
        }
      }
      // sum over scales of 2^{nk} (2^n - 1) rectangles, plus the constant
      std::size_t formula = 0;
      for (int k = 0; k < d; ++k) formula += (std::size_t{1} << (n * k)) * ((std::size_t{1} << n) - 1);
      CHECK(count == formula);
      CHECK(count + 1 == g.leaf_count());
    }
  }
}

TEST_CASE("martingale decomposition") {
  Rng rng(11);
  SUBCASE("constant") {
    const Grid g(GridSpec{2, 2});
    const LeafMeasure mu = random_measure(g, rng);
    const HaarCoefficients c = martingale_decompose(LeafFunction::constant(g, 1.0), mu);
    CHECK(c.mean == doctest::Approx(1.0));
    for (std::uint32_t id = 1; id < g.leaf_count(); ++id) CHECK(std::abs(c[Node{id}]) < 1e-13);
  }
  SUBCASE("a single haar function") {
    const Grid g(GridSpec{1, 3});
    const LeafMeasure mu = random_measure(g, rng);
    const HaarCoefficients c = martingale_decompose(weighted_haar(Node{5}, mu), mu);
    for (std::uint32_t id = 1; id < g.leaf_count(); ++id) CHECK(c[Node{id}] == doctest::Approx(id == 5 ? 1.0 : 0.0));
    CHECK(std::abs(c.mean) < 1e-14);
  }
  SUBCASE("reconstruction and parseval, with massless leaves") {
    for (int n = 1; n <= 3; ++n) {
      for (int d = 1; d <= 4 - (n == 3); ++d) {
        const Grid g(GridSpec{n, d});
        for (int t = 0; t < 10; ++t) {
          const LeafMeasure mu = random_measure(g, rng, t % 2 ? 0.3 : 0.0);
          if (!(mu.total() > 0.0)) continue;
          const LeafFunction f = random_function(g, rng);
          const HaarCoefficients c = martingale_decompose(f, mu);
          const LeafFunction back = reconstruct(c, mu);
          const double nf = inner(f, f, mu);
          CHECK(norm(f - back, mu) <= 1e-12 * std::sqrt(nf));
          double parseval = c.mean * c.mean * mu.total();
          for (std::uint32_t id = 1; id < g.leaf_count(); ++id) parseval += c[Node{id}] * c[Node{id}];
          CHECK(parseval == doctest::Approx(nf).epsilon(1e-10));
          for (std::uint32_t id = 1; id < g.leaf_count(); ++id) {
            if (!mu.haar_charged(Node{id})) CHECK(c[Node{id}] == 0.0);
          }
        }
      }
    }
  }
}

TEST_CASE("basis transforms against dense inner products") {
  Rng rng(17);
  const Grid g(GridSpec{2, 2});
  const LeafMeasure mu = random_measure(g, rng, 0.2);
  const HaarBasis basis(mu);
  const LeafFunction f = random_function(g, rng);
  Eigen::VectorXd v(static_cast<Eigen::Index>(f.size()));
  for (std::size_t p = 0; p < f.size(); ++p) v(static_cast<Eigen::Index>(p)) = f[p];
  const Eigen::VectorXd c = basis.analyze(v);
  CHECK(c(0) == doctest::Approx(inner(f, LeafFunction::constant(g, 1.0), mu) / std::sqrt(mu.total())));
  for (std::uint32_t id = 1; id < g.leaf_count(); ++id) {
    CHECK(c(id) == doctest::Approx(inner(f, weighted_haar(Node{id}, mu), mu)).epsilon(1e-12));
  }
  const Eigen::VectorXd back = basis.synthesize(c);
  for (std::size_t p = 0; p < f.size(); ++p) {
    if (mu.leaf_mass(p) > 0.0) CHECK(back(static_cast<Eigen::Index>(p)) == doctest::Approx(f[p]));
  }
  // normalized indicators: coordinates of 1_R / sqrt(mu(R))
  for (std::uint32_t id = 1; id < g.node_end(); ++id) {
    if (!mu.charged(Node{id})) continue;
    LeafFunction psi = LeafFunction::indicator(g, Node{id});
    psi *= 1.0 / std::sqrt(mu(Node{id}));
    Eigen::VectorXd pv(static_cast<Eigen::Index>(psi.size()));
    for (std::size_t p = 0; p < psi.size(); ++p) pv(static_cast<Eigen::Index>(p)) = psi[p];
    CHECK((basis.normalized_indicator(Node{id}) - basis.analyze(pv)).norm() < 1e-12);
  }
}

TEST_CASE("pointwise weights") {
  SUBCASE("u = v = 1 gives lebesgue") {
    const Grid g(GridSpec{2, 1});
    const auto [s, w] = from_pointwise_weights(LeafFunction::constant(g, 1.0), LeafFunction::constant(g, 1.0));
    for (std::size_t p = 0; p < g.leaf_count(); ++p) {
      CHECK(s.leaf_mass(p) == 0.25);
      CHECK(w.leaf_mass(p) == 0.25);
    }
  }
  SUBCASE("u = 2 on a single leaf") {
    const Grid g(GridSpec{1, 0});
    const auto [s, w] = from_pointwise_weights(LeafFunction::constant(g, 2.0), LeafFunction::constant(g, 1.0));
    CHECK(s.total() == 0.5);
  }
  SUBCASE("u = 1/x step weight at d = 2") {
    const Grid g(GridSpec{1, 2});
    LeafFunction u(g), one = LeafFunction::constant(g, 1.0);
    const std::vector<double> centers{0.125, 0.375, 0.625, 0.875};
    for (std::size_t p = 0; p < 4; ++p) u[p] = 1.0 / centers[p];
    const auto [s, w] = from_pointwise_weights(u, one);
    for (std::size_t p = 0; p < 4; ++p) CHECK(s.leaf_mass(p) == doctest::Approx(0.25 * centers[p]));
  }
  SUBCASE("nonpositive u is rejected") {
    const Grid g(GridSpec{1, 1});
    CHECK_THROWS_AS(from_pointwise_weights(LeafFunction(g, {1.0, 0.0}), LeafFunction::constant(g, 1.0)), DomainError);
  }
}
