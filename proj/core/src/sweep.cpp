#include "ewl/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "json.hpp"

#include "ewl/certificate.hpp"
#include "ewl/classify.hpp"
#include "ewl/errors.hpp"
#include "ewl/families.hpp"
#include "ewl/serialize.hpp"

#ifndef EWL_VERSION
#define EWL_VERSION "0.0.0"
#endif

namespace ewl {

using nlohmann::json;

std::string_view version() { return EWL_VERSION; }

namespace {

const std::set<std::string>& known_families() {
  static const std::set<std::string> names{"martingale_transform", "paraproduct", "haar_shift",
                                           "perfect_dyadic", "random_ewl", "random_dense"};
  return names;
}

bool family_fits(const std::string& family, int n) {
  return n == 1 || (family != "haar_shift" && family != "perfect_dyadic");
}

const std::map<std::string, MeasureKind>& measure_names() {
  static const std::map<std::string, MeasureKind> names{
      {"uniform", MeasureKind::uniform},           {"iid_uniform", MeasureKind::iid_uniform},
      {"iid_exponential", MeasureKind::iid_exponential}, {"sparse_atoms", MeasureKind::sparse_atoms},
      {"lacunary", MeasureKind::lacunary},         {"from_weights", MeasureKind::from_weights}};
  return names;
}

std::string kind_name(MeasureKind k) {
  for (const auto& [name, kind] : measure_names()) {
    if (kind == k) return name;
  }
  return "uniform";
}

MeasureSpec measure_of(const json& j) {
  MeasureSpec m;
  std::string name;
  if (j.is_string()) {
    name = j.get<std::string>();
  } else if (j.is_object() && j.contains("kind") && j.at("kind").is_string()) {
    name = j.at("kind").get<std::string>();
    for (const auto& [key, value] : j.items()) {
      if (key == "kind") continue;
      if (!value.is_number()) throw ConfigError("measure parameter '" + key + "' must be a number");
      if (key == "p") {
        m.p = value.get<double>();
      } else if (key == "alpha_u") {
        m.alpha_u = value.get<double>();
      } else if (key == "alpha_v") {
        m.alpha_v = value.get<double>();
      } else {
        throw ConfigError("unknown measure parameter '" + key + "'");
      }
    }
  } else {
    throw ConfigError("a measure is a name or an object with a 'kind'");
  }
  const auto it = measure_names().find(name);
  if (it == measure_names().end()) throw ConfigError("unknown measure kind '" + name + "'");
  m.kind = it->second;
  if (!(m.p >= 0.0 && m.p <= 1.0)) throw ConfigError("sparse_atoms p must lie in [0, 1]");
  return m;
}

json measure_json(const MeasureSpec& m) {
  switch (m.kind) {
    case MeasureKind::sparse_atoms:
      return {{"kind", "sparse_atoms"}, {"p", m.p}};
    case MeasureKind::from_weights:
      return {{"kind", "from_weights"}, {"alpha_u", m.alpha_u}, {"alpha_v", m.alpha_v}};
    default:
      return kind_name(m.kind);
  }
}

std::string coefficient_name(CoefficientMode c) {
  switch (c) {
    case CoefficientMode::constant:
      return "constant";
    case CoefficientMode::zero:
      return "zero";
    default:
      return "uniform";
  }
}

template <typename T>
std::vector<T> int_list(const json& j, const char* key) {
  try {
    if (j.is_number_integer()) return {j.get<T>()};
    return j.get<std::vector<T>>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("'") + key + "' must be an integer or a list of integers");
  }
}

LeafFunction random_function(const Grid& g, Rng& rng) {
  LeafFunction f(g);
  for (std::size_t p = 0; p < f.size(); ++p) f[p] = rng.uniform(-1.0, 1.0);
  return f;
}

CoefficientSequence draw_coefficients(const Grid& g, CoefficientMode mode, std::uint64_t seed) {
  switch (mode) {
    case CoefficientMode::constant:
      return CoefficientSequence::constant(g, 1.0);
    case CoefficientMode::zero:
      return CoefficientSequence(g);
    default:
      return CoefficientSequence::random(g, seed);
  }
}

DyadicOperator build_operator(const SweepConfig& cfg, const TrialKey& key, const LeafMeasure& sigma,
                              const LeafMeasure& omega, std::uint64_t op_seed) {
  const Grid& g = sigma.grid();
  const std::string& f = key.family;
  if (f == "martingale_transform") return martingale_transform(draw_coefficients(g, cfg.coefficients, op_seed), sigma, omega);
  if (f == "paraproduct") return paraproduct(draw_coefficients(g, cfg.coefficients, op_seed), sigma, omega);
  if (f == "haar_shift") return haar_shift(draw_coefficients(g, cfg.coefficients, op_seed), sigma, omega);
  std::optional<DyadicOperator> t;
  if (f == "perfect_dyadic") {
    t = perfect_dyadic_operator(random_perfect_kernel(g, key.r, op_seed), sigma, omega);
  } else if (f == "random_ewl") {
    t = random_ewl(sigma, omega, RandomEwlOptions{key.r, op_seed, 0});
  } else if (f == "random_dense") {
    t = random_dense(sigma, omega, op_seed);
  } else {
    throw ConfigError("unknown family '" + f + "'");
  }
  if (cfg.coefficients == CoefficientMode::zero) {
    DyadicOperator z(sigma, omega, Eigen::MatrixXd::Zero(t->kernel().rows(), t->kernel().cols()), t->family(),
                     t->claimed_radius());
    return z.with_seed(op_seed);
  }
  return *t;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  return m;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json key_json(const TrialKey& k) {
  return {{"id", k.id}, {"seed", k.seed}, {"n", k.n}, {"d", k.d}, {"r", k.r}, {"family", k.family}};
}

}  // namespace

std::string describe(const MeasureSpec& m) { return measure_json(m).dump(); }

LeafMeasure generate_measure(const MeasureSpec& m, const Grid& grid, Rng& rng, MeasureSide side) {
  const std::size_t n = grid.leaf_count();
  const double vol = grid.leaf_volume();
  std::vector<double> mass(n, 0.0);
  switch (m.kind) {
    case MeasureKind::uniform:
      std::fill(mass.begin(), mass.end(), vol);
      break;
    case MeasureKind::iid_uniform:
      for (double& x : mass) x = vol * rng.unit_open_low();
      break;
    case MeasureKind::iid_exponential:
      for (double& x : mass) x = vol * rng.exponential();
      break;
    case MeasureKind::sparse_atoms:
      for (double& x : mass) {
        const double u = rng.unit_open_low();
        x = rng.bernoulli(m.p) ? 0.0 : vol * u;
      }
      break;
    case MeasureKind::lacunary: {
      // halve the remaining mass along the first levels() leaves of tree order
      const std::size_t chain = std::min<std::size_t>(static_cast<std::size_t>(grid.levels()), n - 1);
      const double total = grid.root_volume();
      for (std::size_t k = 0; k < chain; ++k) mass[k] = total * std::ldexp(1.0, -static_cast<int>(k + 1));
      mass[chain] = total * std::ldexp(1.0, -static_cast<int>(chain));
      break;
    }
    case MeasureKind::from_weights: {
      const int dim = grid.dimension();
      std::vector<double> c(static_cast<std::size_t>(dim), 0.5 * grid.spec().side);
      for (std::size_t a = 0; a < grid.spec().origin.size(); ++a) c[a] += grid.spec().origin[a];
      const double alpha = side == MeasureSide::sigma ? m.alpha_u : m.alpha_v;
      for (std::size_t p = 0; p < n; ++p) {
        const std::vector<double> x = grid.leaf_center(p);
        double r2 = 0.0;
        for (std::size_t a = 0; a < x.size(); ++a) r2 += (x[a] - c[a]) * (x[a] - c[a]);
        const double w = std::pow(std::sqrt(r2), alpha);
        mass[p] = side == MeasureSide::sigma ? vol / w : vol * w;
      }
      break;
    }
  }
  return LeafMeasure(grid, std::move(mass));
}

LeafMeasure generate_measure(const MeasureSpec& m, const Grid& grid, std::uint64_t seed, MeasureSide side) {
  Rng rng(seed);
  return generate_measure(m, grid, rng, side);
}

SweepConfig parse_sweep_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  SweepConfig cfg;
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "dimension" || key == "dimensions") {
        cfg.dimensions = int_list<int>(v, "dimension");
      } else if (key == "depths" || key == "depth") {
        cfg.depths = int_list<int>(v, "depths");
      } else if (key == "radii" || key == "radius") {
        cfg.radii = int_list<int>(v, "radii");
      } else if (key == "trials") {
        cfg.trials = v.get<int>();
      } else if (key == "families") {
        cfg.families = v.get<std::vector<std::string>>();
      } else if (key == "coefficients") {
        const auto name = v.get<std::string>();
        if (name == "uniform") {
          cfg.coefficients = CoefficientMode::uniform;
        } else if (name == "constant") {
          cfg.coefficients = CoefficientMode::constant;
        } else if (name == "zero") {
          cfg.coefficients = CoefficientMode::zero;
        } else {
          throw ConfigError("unknown coefficient distribution '" + name + "'");
        }
      } else if (key == "measures") {
        if (!v.is_array()) throw ConfigError("'measures' must be a list");
        cfg.measures.clear();
        for (const json& m : v) cfg.measures.push_back(measure_of(m));
      } else if (key == "seed") {
        cfg.seed = v.get<std::uint64_t>();
      } else if (key == "tolerances") {
        for (const auto& [tk, tv] : v.items()) {
          if (tk == "partition") {
            cfg.tolerances.partition = tv.get<double>();
          } else if (tk == "necessity") {
            cfg.tolerances.necessity = tv.get<double>();
          } else {
            throw ConfigError("unknown tolerance '" + tk + "'");
          }
        }
      } else if (key == "certificates") {
        cfg.certificates = v.get<bool>();
      } else if (key == "dump_certificates") {
        cfg.dump_certificates = v.get<bool>();
      } else if (key == "record_timing") {
        cfg.record_timing = v.get<bool>();
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    } catch (const json::exception& e) {
      throw ConfigError("bad value for '" + key + "': " + e.what());
    }
  }
  validate(cfg);
  return cfg;
}

void validate(const SweepConfig& cfg) {
  if (cfg.trials < 1) throw ConfigError("trials must be at least 1");
  if (cfg.dimensions.empty() || cfg.depths.empty() || cfg.radii.empty() || cfg.families.empty() ||
      cfg.measures.empty()) {
    throw ConfigError("dimensions, depths, radii, families and measures must be nonempty");
  }
  for (int n : cfg.dimensions) {
    if (n < 1) throw ConfigError("dimension must be at least 1");
    for (int d : cfg.depths) {
      if (d < 1) throw ConfigError("depth must be at least 1");
      if (n * d >= 31 || (std::size_t{1} << (n * d)) > kDenseLeafCap) {
        throw ConfigError("cell n=" + std::to_string(n) + " d=" + std::to_string(d) + " exceeds the dense cap of " +
                          std::to_string(kDenseLeafCap) + " leaves");
      }
    }
  }
  for (int r : cfg.radii) {
    if (r < 0) throw ConfigError("radii must be nonnegative");
  }
  for (const std::string& f : cfg.families) {
    if (!known_families().count(f)) throw ConfigError("unknown family '" + f + "'");
  }
  if (!(cfg.tolerances.partition > 0.0) || !(cfg.tolerances.necessity >= 0.0)) {
    throw ConfigError("tolerances must be positive");
  }
}

std::string to_json(const SweepConfig& cfg) {
  json measures = json::array();
  for (const MeasureSpec& m : cfg.measures) measures.push_back(measure_json(m));
  const json j{{"dimensions", cfg.dimensions},
               {"depths", cfg.depths},
               {"radii", cfg.radii},
               {"trials", cfg.trials},
               {"families", cfg.families},
               {"coefficients", coefficient_name(cfg.coefficients)},
               {"measures", measures},
               {"seed", cfg.seed},
               {"tolerances", {{"partition", cfg.tolerances.partition}, {"necessity", cfg.tolerances.necessity}}},
               {"certificates", cfg.certificates},
               {"dump_certificates", cfg.dump_certificates},
               {"record_timing", cfg.record_timing}};
  return j.dump();
}

std::string config_hash(const SweepConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<TrialKey> plan_trials(const SweepConfig& cfg) {
  std::vector<TrialKey> out;
  std::uint64_t id = 0;
  for (int n : cfg.dimensions) {
    for (int d : cfg.depths) {
      for (int r : cfg.radii) {
        for (const std::string& f : cfg.families) {
          if (!family_fits(f, n)) continue;
          for (int t = 0; t < cfg.trials; ++t, ++id) out.push_back(TrialKey{id, derive_seed(cfg.seed, id), n, d, r, f});
        }
      }
    }
  }
  return out;
}

TrialResult run_trial(const SweepConfig& cfg, const TrialKey& key) {
  const auto start = std::chrono::steady_clock::now();
  TrialResult res;
  res.key = key;
  const Grid grid(GridSpec{key.n, key.d, {}, 1.0});
  Rng rng(key.seed);
  const MeasureSpec& ms = cfg.measures[rng.below(cfg.measures.size())];
  const MeasureSpec& mw = cfg.measures[rng.below(cfg.measures.size())];
  const LeafMeasure sigma = generate_measure(ms, grid, rng, MeasureSide::sigma);
  const LeafMeasure omega = generate_measure(mw, grid, rng, MeasureSide::omega);
  const std::uint64_t op_seed = rng.bits();
  const LeafFunction f = random_function(grid, rng);
  const LeafFunction g = random_function(grid, rng);
  res.note = "sigma=" + describe(ms) + " omega=" + describe(mw);

  auto fail = [&res](std::string what) { res.failures.push_back(std::move(what)); };
  try {
    const DyadicOperator t = build_operator(cfg, key, sigma, omega, op_seed);
    const int r = std::max(key.r, ewl_radius_raw(t));
    const double tol = cfg.tolerances.necessity;
    if (cfg.certificates) {
      BilinearCertificate cert = full_certificate(t, f, g, r);
      res.report = cert.report;
      res.certified = true;
      for (const Partition& p : cert.partitions) {
        const double allowed = p.tolerance / kPartitionTolerance * cfg.tolerances.partition;
        if (!(std::abs(p.lhs - p.rhs) <= allowed)) {
          res.partitions_ok = false;
          fail("partition: " + p.name);
        }
      }
      if (!cert.packing_ok()) {
        res.packing_ok = false;
        fail("packing");
      }
      for (const Bound& b : cert.bounds) {
        if (!b.ok) {
          res.bounds_ok = false;
          fail("bound: " + b.name);
        }
      }
      res.embedding_ratio = std::max({cert.b_split.embedding.ratio_signed, cert.b_split.embedding.ratio_abs,
                                      cert.c_split.embedding.ratio_signed, cert.c_split.embedding.ratio_abs});
      res.carleson_ratio = std::max(cert.b_split.packing.carleson_ratio, cert.c_split.packing.carleson_ratio);
      res.child_ratio = std::max(cert.b_split.packing.child_ratio, cert.c_split.packing.child_ratio);
      if (cfg.dump_certificates) res.certificate_json = to_json(cert, grid);
    } else {
      res.report = testing_report(t, r);
    }
    const TestingReport& rep = res.report;
    const double floor = 1e-13 * t.whitened().norm();
    if (std::max({rep.c1, rep.c2, rep.c3}) > rep.norm * (1.0 + tol) + floor) {
      res.necessity_ok = false;
      fail("necessity: max(c1, c2, c3) > norm");
    }
    if (rep.c1 > rep.c1_global * (1.0 + tol) + floor || rep.c2 > rep.c2_global * (1.0 + tol) + floor) {
      res.necessity_ok = false;
      fail("necessity: local above global");
    }
  } catch (const UndefinedNormError& e) {
    res.degenerate = true;
    res.note += std::string(" degenerate: ") + e.what();
    res.report = TestingReport{};
    res.report.norm = res.report.c1 = res.report.c2 = res.report.c3 = std::nan("");
  } catch (const DecompositionError& e) {
    res.decomposition_ok = false;
    fail(std::string("decomposition: ") + e.what());
  }
  if (cfg.record_timing) {
    res.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return res;
}

std::string csv_header() { return "seed,n,d,r,family,norm,c1,c2,c3,c1g,c2g,ratio_sum,ratio_max,wall_ms"; }

std::string csv_row(const TrialResult& t) {
  const TestingReport& r = t.report;
  char ms[32];
  std::snprintf(ms, sizeof ms, "%.3f", t.wall_ms);
  std::ostringstream os;
  os << t.key.seed << ',' << t.key.n << ',' << t.key.d << ',' << t.key.r << ',' << t.key.family << ','
     << fmt(r.norm) << ',' << fmt(r.c1) << ',' << fmt(r.c2) << ',' << fmt(r.c3) << ',' << fmt(r.c1_global) << ','
     << fmt(r.c2_global) << ',' << fmt(r.ratio_sum) << ',' << fmt(r.ratio_max) << ',' << ms;
  return os.str();
}

SweepSummary summarize(const SweepConfig& cfg, const std::vector<TrialResult>& results) {
  SweepSummary s;
  s.config_hash = config_hash(cfg);
  for (int n : cfg.dimensions) {
    for (const std::string& f : cfg.families) {
      if (!family_fits(f, n)) s.skipped_cells.push_back(f + " at n=" + std::to_string(n) + " (one-dimensional only)");
    }
  }
  std::map<std::tuple<int, int, int, std::string>, std::size_t> index;
  std::vector<std::vector<double>> ratios;
  for (const TrialResult& t : results) {
    const auto cell_key = std::make_tuple(t.key.n, t.key.d, t.key.r, t.key.family);
    auto it = index.find(cell_key);
    if (it == index.end()) {
      it = index.emplace(cell_key, s.cells.size()).first;
      s.cells.push_back(CellSummary{t.key.n, t.key.d, t.key.r, t.key.family});
      ratios.emplace_back();
    }
    CellSummary& c = s.cells[it->second];
    ++c.trials;
    ++s.trials;
    if (t.invariants_ok()) {
      ++c.passed;
    } else {
      ++c.failed;
      ++s.failed;
    }
    if (!t.bounds_ok) {
      ++c.bound_violations;
      ++s.bound_violations;
    }
    if (!t.failures.empty()) s.counterexamples.push_back(Counterexample{t.key, t.failures});
    if (t.degenerate) {
      ++c.degenerate;
      ++s.degenerate;
      continue;
    }
    if (t.certified && t.invariants_ok() && t.bounds_ok) ++c.certificates_passed;
    ratios[it->second].push_back(t.report.ratio_sum);
    c.ratio_sum_max = std::max(c.ratio_sum_max, t.report.ratio_sum);
    c.ratio_max_max = std::max(c.ratio_max_max, t.report.ratio_max);
    c.embedding_max = std::max(c.embedding_max, t.embedding_ratio);
    c.carleson_max = std::max(c.carleson_max, t.carleson_ratio);
    c.child_max = std::max(c.child_max, t.child_ratio);
  }
  for (std::size_t i = 0; i < s.cells.size(); ++i) s.cells[i].ratio_sum_median = median(ratios[i]);
  return s;
}

std::string summary_json(const SweepConfig& cfg, const SweepSummary& s) {
  json cells = json::array();
  for (const CellSummary& c : s.cells) {
    cells.push_back({{"n", c.n},
                     {"d", c.d},
                     {"r", c.r},
                     {"family", c.family},
                     {"trials", c.trials},
                     {"passed", c.passed},
                     {"failed", c.failed},
                     {"degenerate", c.degenerate},
                     {"certificates_passed", c.certificates_passed},
                     {"bound_violations", c.bound_violations},
                     {"ratio_sum_max", c.ratio_sum_max},
                     {"ratio_sum_median", c.ratio_sum_median},
                     {"ratio_max_max", c.ratio_max_max},
                     {"embedding_max", c.embedding_max},
                     {"carleson_max", c.carleson_max},
                     {"child_max", c.child_max}});
  }
  json counter = json::array();
  for (const Counterexample& c : s.counterexamples) counter.push_back({{"trial", key_json(c.key)}, {"failures", c.failures}});
  const json j{{"version", std::string(version())},
               {"config_hash", s.config_hash},
               {"config", json::parse(to_json(cfg))},
               {"metadata", {{"finished_at", utc_now()}}},
               {"trials", s.trials},
               {"failed", s.failed},
               {"degenerate", s.degenerate},
               {"bound_violations", s.bound_violations},
               {"exit_code", s.exit_code()},
               {"cells", cells},
               {"skipped_cells", s.skipped_cells},
               {"counterexamples", counter}};
  return j.dump(2);
}

unsigned default_workers() {
  if (const char* env = std::getenv("EWL_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepSummary run_sweep(const SweepConfig& cfg, const std::filesystem::path& out, unsigned workers) {
  validate(cfg);
  const std::vector<TrialKey> plan = plan_trials(cfg);
  std::vector<TrialResult> results(plan.size());
  if (workers == 0) workers = default_workers();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(plan.size(), 1))));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < plan.size(); i = next++) results[i] = run_trial(cfg, plan[i]);
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& th : pool) th.join();

  std::filesystem::create_directories(out);
  {
    std::ofstream csv(out / "trials.csv");
    csv << csv_header() << '\n';
    for (const TrialResult& t : results) csv << csv_row(t) << '\n';
    if (!csv) throw Error("cannot write " + (out / "trials.csv").string());
  }
  if (cfg.dump_certificates) {
    std::filesystem::create_directories(out / "certificates");
    for (const TrialResult& t : results) {
      if (t.certificate_json.empty()) continue;
      std::ofstream(out / "certificates" / ("trial_" + std::to_string(t.key.id) + ".json")) << t.certificate_json << '\n';
    }
  }
  SweepSummary s = summarize(cfg, results);
  std::ofstream summary(out / "summary.json");
  summary << summary_json(cfg, s) << '\n';
  if (!summary) throw Error("cannot write " + (out / "summary.json").string());
  return s;
}

TrialResult replay_trial(const SweepConfig& cfg, std::uint64_t id) {
  for (const TrialKey& k : plan_trials(cfg)) {
    if (k.id == id) return run_trial(cfg, k);
  }
  throw ConfigError("trial " + std::to_string(id) + " is not part of this sweep");
}

}  // namespace ewl
