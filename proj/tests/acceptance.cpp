// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ewl/certificate.hpp"
#include "ewl/classify.hpp"
#include "ewl/errors.hpp"
#include "ewl/families.hpp"
#include "ewl/haar.hpp"
#include "ewl/stopping.hpp"
#include "ewl/sweep.hpp"
#include "oracle.hpp"

using namespace ewl;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* what, const std::function<Verdict()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!v.pass) ++failures;
  std::printf("%s %d %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", id, what, v.detail.c_str(), s);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

LeafMeasure random_measure(const Grid& g, Rng& rng, double zero_p) {
  std::vector<double> m(g.leaf_count());
  for (double& x : m) x = rng.bernoulli(zero_p) ? 0.0 : g.leaf_volume() * rng.unit_open_low();
  return LeafMeasure(g, m);
}

LeafFunction random_function(const Grid& g, Rng& rng) {
  LeafFunction f(g);
  for (std::size_t p = 0; p < f.size(); ++p) f[p] = rng.uniform(-1, 1);
  return f;
}

const std::vector<MeasureSpec>& all_measures() {
  static const std::vector<MeasureSpec> m = [] {
    std::vector<MeasureSpec> v{{MeasureKind::uniform},     {MeasureKind::iid_uniform}, {MeasureKind::iid_exponential},
                               {MeasureKind::sparse_atoms}, {MeasureKind::lacunary},    {MeasureKind::from_weights}};
    v[3].p = 0.3;
    return v;
  }();
  return m;
}

// Necessity is checked inside run_trial; every suite feeds this tally.
struct Necessity {
  int trials = 0;
  int violations = 0;
  double worst = 0.0;  // max(c1, c2, c3) / norm
  void add(const TrialResult& t) {
    if (t.degenerate) return;
    ++trials;
    if (!t.necessity_ok) ++violations;
    worst = std::max(worst, t.report.ratio_max);
  }
} necessity;

// ---- 1 -------------------------------------------------------------------

Verdict basis() {
  double worst_rec = 0.0, worst_pars = 0.0;
  long pairs = 0, bad_pairs = 0;
  for (int n = 1; n <= 3; ++n) {
    for (int d = 1; d <= 4; ++d) {
      const Grid g(GridSpec{n, d});
      Rng rng(derive_seed(1, static_cast<std::uint64_t>(10 * n + d)));
      for (int t = 0; t < 100; ++t) {
        const LeafMeasure mu = random_measure(g, rng, t % 3 == 0 ? 0.3 : 0.0);
        const LeafFunction f = random_function(g, rng);
        const double nf2 = inner(f, f, mu);
        if (!(nf2 > 0.0)) continue;
        const HaarCoefficients c = martingale_decompose(f, mu);
        const LeafFunction back = reconstruct(c, mu);
        const LeafFunction diff = back - f;
        worst_rec = std::max(worst_rec, norm(diff, mu) / std::sqrt(nf2));
        double sum = c.mean * c.mean * mu.total();
        for (std::size_t e = 1; e < g.leaf_count(); ++e) sum += c.coeffs[e] * c.coeffs[e];
        worst_pars = std::max(worst_pars, std::abs(sum - nf2) / nf2);
      }
      // any two nodes are disjoint or nested, and a strictly smaller one sits
      // inside a half of the larger (checked on boxes built independently)
      const oracle::Model m(g);
      for (std::uint32_t a = 1; a < m.nodes; ++a) {
        for (std::uint32_t b = a + 1; b < m.nodes; ++b) {
          ++pairs;
          const oracle::Box& A = m.box[a];
          const oracle::Box& B = m.box[b];
          if (!A.meets(B)) continue;
          bool ok = false;
          if (A.contains(B) && !m.is_leaf(a)) {
            const auto [h1, h2] = m.halves(a);
            ok = m.box[h1].contains(B) || m.box[h2].contains(B);
          } else if (B.contains(A) && !m.is_leaf(b)) {
            const auto [h1, h2] = m.halves(b);
            ok = m.box[h1].contains(A) || m.box[h2].contains(A);
          }
          if (!ok || g.contains(Node{a}, Node{b}) != A.contains(B)) ++bad_pairs;
        }
      }
    }
  }
  const bool pass = worst_rec <= 1e-10 && worst_pars <= 1e-10 && bad_pairs == 0;
  return {pass, "reconstruction " + fmt("%.1e", worst_rec) + ", Parseval " + fmt("%.1e", worst_pars) +
                    ", trichotomy " + std::to_string(pairs - bad_pairs) + "/" + std::to_string(pairs) + " pairs"};
}

// ---- 2 -------------------------------------------------------------------

Verdict known_radii() {
  int checks = 0, bad = 0;
  auto expect = [&](bool ok) {
    ++checks;
    if (!ok) ++bad;
  };
  for (int t = 0; t < 12; ++t) {
    Rng rng(derive_seed(2, static_cast<std::uint64_t>(t)));
    const Grid g(GridSpec{1, 5});
    const bool leb = t < 4;
    const LeafMeasure s = leb ? LeafMeasure::lebesgue(g) : random_measure(g, rng, t % 3 == 0 ? 0.3 : 0.0);
    const LeafMeasure w = leb ? LeafMeasure::lebesgue(g) : random_measure(g, rng, t % 3 == 1 ? 0.3 : 0.0);
    const CoefficientSequence b = CoefficientSequence::random(g, rng.bits());
    const DyadicOperator mt = martingale_transform(b, s, w);
    expect(ewl_radius(mt) == 0);
    expect(wl_check(mt, 1));
    const DyadicOperator sh = haar_shift(b, s, w);
    expect(ewl_radius(sh) == 1);
    expect(wl_check(sh, 2));
    expect(wl_check(paraproduct(b, s, w), 1));
    const Grid g2(GridSpec{2, 3});
    const DyadicOperator mt2 =
        martingale_transform(CoefficientSequence::random(g2, rng.bits()), random_measure(g2, rng, 0.0),
                             random_measure(g2, rng, 0.0));
    expect(ewl_radius(mt2) == 0);
    expect(wl_check(mt2, 1));
  }
  return {bad == 0, std::to_string(checks - bad) + "/" + std::to_string(checks) +
                        " radius verdicts (martingale 0 / WL 1, shift 1 / WL 2, paraproduct WL 1)"};
}

// ---- 3 -------------------------------------------------------------------

Verdict bridge() {
  const Grid g(GridSpec{1, 5});
  int forward = 0, forward_bad = 0, backward = 0, backward_bad = 0;
  for (int r = 0; r <= 2; ++r) {
    for (int t = 0; t < 50; ++t) {
      Rng rng(derive_seed(3, static_cast<std::uint64_t>(100 * r + t)));
      const double p = t % 5 == 0 ? 0.3 : 0.0;
      LeafMeasure s = random_measure(g, rng, p), w = random_measure(g, rng, p);
      if (!(s.total() > 0.0) || !(w.total() > 0.0)) s = w = LeafMeasure::lebesgue(g);
      const DyadicOperator op = random_ewl(s, w, {r, rng.bits(), 0});
      const int r0 = ewl_radius_raw(op);
      ++forward;
      if (r0 > r || !wl_check(op, r0 + 1)) ++forward_bad;
      for (int q = 1; q <= g.levels() + 1; ++q) {
        if (!wl_check(op, q)) continue;
        ++backward;
        if (r0 > q) ++backward_bad;
      }
    }
  }
  return {forward_bad == 0 && backward_bad == 0,
          "EWL r0 => WL r0+1 in " + std::to_string(forward - forward_bad) + "/" + std::to_string(forward) +
              ", WL q => EWL <= q in " + std::to_string(backward - backward_bad) + "/" + std::to_string(backward)};
}

// ---- 5, 6, 7: the 200-trial certificate suite --------------------------------

struct SuiteStats {
  int trials = 0;
  int degenerate = 0;
  int partition_bad = 0;
  int decomposition_bad = 0;
  int packing_bad = 0;
  int bound_bad = 0;
  double embedding = 0.0;
  double carleson = 0.0;
  std::map<std::string, int> measures;
  std::vector<std::string> failures;
};

SuiteStats run_suite() {
  SuiteStats st;
  struct Cell {
    int n, d;
  };
  const std::vector<Cell> cells{{1, 2}, {1, 3}, {1, 4}, {1, 5}, {1, 6}, {2, 1}, {2, 2}, {2, 3}, {2, 4}, {2, 5}};
  const std::vector<std::string> families{"random_ewl", "martingale_transform", "paraproduct", "haar_shift",
                                          "perfect_dyadic"};
  for (int i = 0; i < 200; ++i) {
    const Cell c = cells[static_cast<std::size_t>(i) % cells.size()];
    const int r = (i / 10) % 3;
    std::string family = families[static_cast<std::size_t>(i / 30) % families.size()];
    if (c.n > 1 && (family == "haar_shift" || family == "perfect_dyadic")) family = "random_ewl";
    SweepConfig cfg;
    cfg.measures = {all_measures()[static_cast<std::size_t>(i) % all_measures().size()]};
    cfg.record_timing = false;
    const TrialKey key{static_cast<std::uint64_t>(i), derive_seed(5, static_cast<std::uint64_t>(i)), c.n, c.d, r, family};
    const TrialResult t = run_trial(cfg, key);
    necessity.add(t);
    ++st.trials;
    ++st.measures[describe(cfg.measures[0])];
    if (t.degenerate) {
      ++st.degenerate;
      continue;
    }
    if (!t.partitions_ok) ++st.partition_bad;
    if (!t.decomposition_ok) ++st.decomposition_bad;
    if (!t.packing_ok) ++st.packing_bad;
    if (!t.bounds_ok) ++st.bound_bad;
    st.embedding = std::max(st.embedding, t.embedding_ratio);
    st.carleson = std::max(st.carleson, t.carleson_ratio);
    for (const std::string& f : t.failures) st.failures.push_back("trial " + std::to_string(i) + ": " + f);
  }
  return st;
}

const SuiteStats& suite() {
  static const SuiteStats st = run_suite();
  return st;
}

Verdict exactness() {
  const SuiteStats& st = suite();
  const bool pass = st.partition_bad == 0 && st.decomposition_bad == 0 && st.degenerate < st.trials;
  std::string detail = std::to_string(st.trials - st.degenerate) + " certified trials (" +
                       std::to_string(st.degenerate) + " degenerate) over " + std::to_string(st.measures.size()) +
                       " measure generators; partition failures " + std::to_string(st.partition_bad) +
                       ", decomposition failures " + std::to_string(st.decomposition_bad);
  if (!st.failures.empty()) detail += "; first: " + st.failures.front();
  return {pass, detail};
}

// Embedding threshold by exhaustive search: every g in {0, +-1, +-4}^N on
// n = 1, d <= 3 under three measures.
double embedding_search(long& cases) {
  double worst = 0.0;
  const double vals[] = {0.0, 1.0, -1.0, 4.0, -4.0};
  for (int d = 1; d <= 3; ++d) {
    const Grid g(GridSpec{1, d});
    Rng rng(derive_seed(6, static_cast<std::uint64_t>(d)));
    const std::vector<LeafMeasure> ms{LeafMeasure::lebesgue(g), generate_measure({MeasureKind::lacunary}, g, 0),
                                      random_measure(g, rng, 0.0)};
    const std::size_t n = g.leaf_count();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= 5;
    for (const LeafMeasure& w : ms) {
      for (std::size_t code = 1; code < total; ++code) {
        LeafFunction h(g);
        std::size_t rest = code;
        for (std::size_t p = 0; p < n; ++p, rest /= 5) h[p] = vals[rest % 5];
        if (!(inner(h, h, w) > 0.0)) continue;
        const StoppingFamily fam = build_stopping_family(h, w);
        const EmbeddingCheck e = carleson_embedding_check(fam, h, w);
        if (!check_packing(fam, w).ok) worst = 1e300;
        worst = std::max(worst, e.ratio_abs);
        ++cases;
      }
    }
  }
  return worst;
}

Verdict carleson() {
  long cases = 0;
  const double search = embedding_search(cases);
  const SuiteStats& st = suite();
  const bool pass = search <= 8.0 && st.packing_bad == 0 && st.embedding <= 8.0 && st.carleson <= 2.0 + 1e-12;
  return {pass, "exhaustive d<=3 embedding max " + fmt("%.3f", search) + " over " + std::to_string(cases) +
                    " cases; suite packing failures " + std::to_string(st.packing_bad) + ", embedding max " +
                    fmt("%.3f", st.embedding) + ", Carleson max " + fmt("%.3f", st.carleson)};
}

// Per-term constants by exhaustive search: every sign pattern of b on n = 1,
// d <= 3 for the three coefficient families, three measure pairs each.
int constant_search(int& certs) {
  int bad = 0;
  for (int d = 1; d <= 3; ++d) {
    const Grid g(GridSpec{1, d});
    const std::uint32_t count = static_cast<std::uint32_t>(g.leaf_count()) - 1;
    for (int m = 0; m < 3; ++m) {
      Rng rng(derive_seed(7, static_cast<std::uint64_t>(10 * d + m)));
      const LeafMeasure s = m == 0 ? LeafMeasure::lebesgue(g) : random_measure(g, rng, m == 2 ? 0.25 : 0.0);
      const LeafMeasure w = m == 0 ? LeafMeasure::lebesgue(g) : random_measure(g, rng, 0.0);
      if (!(s.total() > 0.0)) continue;
      const LeafFunction f = random_function(g, rng), h = random_function(g, rng);
      for (std::uint32_t bits = 0; bits < (1u << count); ++bits) {
        CoefficientSequence b(g);
        for (std::uint32_t i = 0; i < count; ++i) b[Node{i + 1}] = (bits >> i) & 1u ? 1.0 : -1.0;
        for (const DyadicOperator& op : {martingale_transform(b, s, w), paraproduct(b, s, w), haar_shift(b, s, w)}) {
          const BilinearCertificate cert = full_certificate(op, f, h);
          ++certs;
          if (!cert.bounds_ok() || !cert.partitions_ok()) ++bad;
        }
      }
    }
  }
  return bad;
}

Verdict term_bounds() {
  int certs = 0;
  const int search_bad = constant_search(certs);
  const SuiteStats& st = suite();
  return {search_bad == 0 && st.bound_bad == 0,
          "exhaustive d<=3 sign search " + std::to_string(certs - search_bad) + "/" + std::to_string(certs) +
              " certificates clean; suite bound violations " + std::to_string(st.bound_bad)};
}

// ---- 8 -------------------------------------------------------------------

Verdict sufficiency() {
  SweepConfig cfg;
  cfg.dimensions = {1};
  cfg.depths = {4, 5, 6, 7, 8};
  cfg.radii = {1};
  cfg.trials = 500;
  cfg.families = {"random_ewl"};
  cfg.measures = all_measures();
  cfg.seed = 8;
  cfg.certificates = false;
  cfg.record_timing = false;
  std::map<int, double> k;
  for (const TrialKey& key : plan_trials(cfg)) {
    const TrialResult t = run_trial(cfg, key);
    necessity.add(t);
    if (!t.degenerate) k[key.d] = std::max(k[key.d], t.report.ratio_sum);
  }
  std::string detail;
  for (const auto& [d, v] : k) detail += "K_" + std::to_string(d) + "=" + fmt("%.3f", v) + " ";
  const double limit = 1.1 * std::max(k[4], k[5]);
  return {k[8] <= limit, detail + "(limit " + fmt("%.3f", limit) + ")"};
}

// ---- 9 -------------------------------------------------------------------

Verdict perfect() {
  const Grid g(GridSpec{1, 4});
  int good = 0, total = 0;
  for (int r = 0; r <= 1; ++r) {
    for (int i = 0; i < 20; ++i) {
      Rng rng(derive_seed(9, static_cast<std::uint64_t>(100 * r + i)));
      const PerfectDyadicKernel k = random_perfect_kernel(g, r, rng.bits());
      ++total;
      try {
        validate_kernel(k);
      } catch (const ValidationError&) {
        continue;
      }
      const DyadicOperator op =
          perfect_dyadic_operator(k, random_measure(g, rng, i % 4 == 0 ? 0.3 : 0.0), random_measure(g, rng, 0.0));
      const auto radius = ewl_radius(op);
      if (radius && *radius <= r) ++good;
    }
  }
  PerfectDyadicKernel bad = random_perfect_kernel(g, 1, 99);
  bad.values(1, 14) += 0.01;
  std::string message = "corrupted kernel accepted";
  bool rejected = false;
  try {
    validate_kernel(bad);
  } catch (const ValidationError& e) {
    rejected = true;
    message = e.what();
  }
  return {good == total && rejected,
          std::to_string(good) + "/" + std::to_string(total) + " kernels valid with ewl_radius <= r; corrupted: " + message};
}

// ---- 10 ------------------------------------------------------------------

Verdict degenerate() {
  int certs = 0, bad = 0;
  double worst_rec = 0.0;
  for (int n = 1; n <= 2; ++n) {
    const Grid g(GridSpec{n, n == 1 ? 5 : 3});
    for (int t = 0; t < 20; ++t) {
      Rng rng(derive_seed(10, static_cast<std::uint64_t>(100 * n + t)));
      const LeafMeasure s = random_measure(g, rng, 0.0);
      std::vector<double> wm(g.leaf_count(), 0.0);
      // second half of the root carries nothing
      for (std::size_t p = 0; p < g.leaf_count() / 2; ++p) wm[p] = g.leaf_volume() * rng.unit_open_low();
      const LeafMeasure w(g, wm);
      const LeafFunction f = random_function(g, rng), h = random_function(g, rng);
      const int r = t % 3;
      const DyadicOperator op = t % 3 == 0   ? martingale_transform(CoefficientSequence::random(g, rng.bits()), s, w)
                                : t % 3 == 1 ? paraproduct(CoefficientSequence::random(g, rng.bits()), s, w)
                                             : random_ewl(s, w, {r, rng.bits(), 0});
      if (weighted_haar(Node{1}, w).values()[g.leaf_count() - 1] != 0.0) ++bad;
      const BilinearCertificate cert = full_certificate(op, f, h, std::max(r, ewl_radius_raw(op)));
      ++certs;
      const TestingReport& rep = cert.report;
      const bool nec = std::max({rep.c1, rep.c2, rep.c3}) <= rep.norm * (1 + 1e-9) + 1e-13;
      if (!cert.partitions_ok() || !cert.bounds_ok() || !cert.packing_ok() || !nec) ++bad;
      for (const LeafMeasure* mu : {&s, &w}) {
        const LeafFunction back = reconstruct(martingale_decompose(f, *mu), *mu);
        worst_rec = std::max(worst_rec, norm(back - f, *mu) / norm(f, *mu));
      }
    }
  }
  return {bad == 0 && worst_rec <= 1e-10, std::to_string(certs - bad) + "/" + std::to_string(certs) +
                                              " certificates clean with omega = 0 on half the root; reconstruction " +
                                              fmt("%.1e", worst_rec)};
}

}  // namespace

int main() {
  report(1, "basis correctness", basis);
  report(2, "known radii", known_radii);
  report(3, "WL/EWL bridge", bridge);
  report(5, "certificate exactness", exactness);
  report(6, "Carleson suite", carleson);
  report(7, "per-term bounds", term_bounds);
  report(8, "depth-uniform comparability", sufficiency);
  report(9, "perfect dyadic kernels", perfect);
  report(10, "degenerate measures", degenerate);
  // last, so that it covers the trials of every suite above
  report(4, "necessity chain", [] {
    return Verdict{necessity.violations == 0 && necessity.trials > 0,
                   std::to_string(necessity.trials - necessity.violations) + "/" + std::to_string(necessity.trials) +
                       " trials, max(c1,c2,c3)/norm <= " + fmt("%.4f", necessity.worst)};
  });
  return failures == 0 ? 0 : 1;
}
