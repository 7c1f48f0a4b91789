// ewl: sweep runner, operator classifier and report printer.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ewl/classify.hpp"
#include "ewl/errors.hpp"
#include "ewl/families.hpp"
#include "ewl/serialize.hpp"
#include "ewl/sweep.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ewl::ConfigError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct SweepArgs {
  std::string config;
  std::string out;
  int trials = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool dump = false;
  std::int64_t replay = -1;
  unsigned workers = 0;
};

int run_sweep_cmd(const SweepArgs& a) {
  ewl::SweepConfig cfg = ewl::parse_sweep_config(slurp(a.config));
  if (a.trials > 0) cfg.trials = a.trials;
  if (a.seed_given) cfg.seed = a.seed;
  if (a.dump) cfg.dump_certificates = true;
  ewl::validate(cfg);

  if (a.replay >= 0) {
    const ewl::TrialResult t = ewl::replay_trial(cfg, static_cast<std::uint64_t>(a.replay));
    std::cout << ewl::csv_header() << '\n' << ewl::csv_row(t) << '\n';
    std::cout << "measures: " << t.note << '\n';
    for (const std::string& f : t.failures) std::cout << "FAILED " << f << '\n';
    if (!t.certificate_json.empty()) std::cout << t.certificate_json << '\n';
    return t.invariants_ok() ? 0 : kExitFailure;
  }
  if (a.out.empty()) throw ewl::ConfigError("--out is required unless --replay is given");
  const ewl::SweepSummary s = ewl::run_sweep(cfg, a.out, a.workers);
  std::printf("%d trials, %d failed, %d degenerate, %d bound violations -> %s\n", s.trials, s.failed, s.degenerate,
              s.bound_violations, a.out.c_str());
  for (const ewl::Counterexample& c : s.counterexamples) {
    std::printf("  trial %llu (seed %llu, n=%d d=%d r=%d %s): %s\n", static_cast<unsigned long long>(c.key.id),
                static_cast<unsigned long long>(c.key.seed), c.key.n, c.key.d, c.key.r, c.key.family.c_str(),
                c.failures.front().c_str());
  }
  return s.exit_code();
}

int run_classify(const std::string& path) {
  const ewl::DyadicOperator t = ewl::operator_from_json(slurp(path));
  const ewl::EwlProfile prof = ewl::ewl_profile(t);
  const std::optional<int> radius = ewl::ewl_radius(t);
  std::printf("grid          n=%d d=%d (%zu leaves)\n", t.grid().dimension(), t.grid().depth(), t.grid().leaf_count());
  std::printf("family        %s\n", std::string(ewl::to_string(t.family())).c_str());
  std::printf("ewl_radius    %s\n", radius ? std::to_string(*radius).c_str() : "none (vacuous)");
  std::printf("ewl_raw       %d at %s%s%s\n", ewl::ewl_radius_raw(t), t.grid().describe(prof.witness).c_str(),
              prof.adjoint_side ? " (adjoint)" : "", prof.crosses_roots ? ", crosses roots" : "");
  const int max_r = t.grid().levels() + 1;
  std::printf("wl_check     ");
  for (int r = 1; r <= max_r; ++r) std::printf(" r=%d:%s", r, ewl::wl_check(t, r) ? "yes" : "no");
  std::printf("\n");
  const std::optional<int> wl = ewl::wl_radius(t, max_r);
  std::printf("wl_radius     %s\n", wl ? std::to_string(*wl).c_str() : "none");
  return 0;
}

int run_report(const std::string& dir) {
  const nlohmann::json s = nlohmann::json::parse(slurp(dir + "/summary.json"));
  std::printf("ewl %s  config %s  trials %d  failed %d  degenerate %d  bound violations %d\n",
              s.at("version").get<std::string>().c_str(), s.at("config_hash").get<std::string>().c_str(),
              s.at("trials").get<int>(), s.at("failed").get<int>(), s.at("degenerate").get<int>(),
              s.at("bound_violations").get<int>());
  std::printf("%3s %3s %3s %-22s %6s %6s %6s %10s %10s %10s %9s %9s\n", "n", "d", "r", "family", "trials", "failed",
              "degen", "ratio_max", "ratio_med", "cmax/norm", "embed", "packing");
  for (const auto& c : s.at("cells")) {
    std::printf("%3d %3d %3d %-22s %6d %6d %6d %10.4f %10.4f %10.4f %9.4f %9.4f\n", c.at("n").get<int>(),
                c.at("d").get<int>(), c.at("r").get<int>(), c.at("family").get<std::string>().c_str(),
                c.at("trials").get<int>(), c.at("failed").get<int>(), c.at("degenerate").get<int>(),
                c.at("ratio_sum_max").get<double>(), c.at("ratio_sum_median").get<double>(),
                c.at("ratio_max_max").get<double>(), c.at("embedding_max").get<double>(),
                c.at("carleson_max").get<double>());
  }
  for (const auto& skipped : s.at("skipped_cells")) std::printf("skipped: %s\n", skipped.get<std::string>().c_str());
  return s.at("failed").get<int>() > 0 ? kExitFailure : 0;
}

struct EmitArgs {
  std::string family = "martingale_transform";
  std::string measure = "iid_uniform";
  int n = 1;
  int d = 3;
  int r = 1;
  std::uint64_t seed = 1;
  std::string out;
};

int run_emit(const EmitArgs& a) {
  const ewl::Grid g(ewl::GridSpec{a.n, a.d, {}, 1.0});
  ewl::SweepConfig cfg;
  cfg.dimensions = {a.n};
  cfg.depths = {a.d};
  cfg.radii = {a.r};
  cfg.families = {a.family};
  cfg.measures = {ewl::parse_sweep_config("{\"measures\": [\"" + a.measure + "\"]}").measures.front()};
  ewl::validate(cfg);
  ewl::Rng rng(a.seed);
  const auto sigma = ewl::generate_measure(cfg.measures[0], g, rng, ewl::MeasureSide::sigma);
  const auto omega = ewl::generate_measure(cfg.measures[0], g, rng, ewl::MeasureSide::omega);
  const std::uint64_t s = rng.bits();
  std::optional<ewl::DyadicOperator> t;
  if (a.family == "martingale_transform") {
    t = ewl::martingale_transform(ewl::CoefficientSequence::random(g, s), sigma, omega);
  } else if (a.family == "paraproduct") {
    t = ewl::paraproduct(ewl::CoefficientSequence::random(g, s), sigma, omega);
  } else if (a.family == "haar_shift") {
    t = ewl::haar_shift(ewl::CoefficientSequence::random(g, s), sigma, omega);
  } else if (a.family == "perfect_dyadic") {
    t = ewl::perfect_dyadic_operator(ewl::random_perfect_kernel(g, a.r, s), sigma, omega);
  } else if (a.family == "random_ewl") {
    t = ewl::random_ewl(sigma, omega, ewl::RandomEwlOptions{a.r, s, 0});
  } else {
    t = ewl::random_dense(sigma, omega, s);
  }
  const std::string text = ewl::to_json(*t);
  if (a.out.empty() || a.out == "-") {
    std::cout << text << '\n';
  } else {
    std::ofstream(a.out) << text << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-weight testing sweeps for essentially well localized dyadic operators"};
  app.set_version_flag("--version", std::string(ewl::version()));
  app.require_subcommand(1);

  SweepArgs sweep;
  auto* sw = app.add_subcommand("sweep", "run a configured randomized sweep");
  sw->add_option("--config", sweep.config, "sweep config JSON")->required()->check(CLI::ExistingFile);
  sw->add_option("--out", sweep.out, "output directory");
  sw->add_option("--trials", sweep.trials, "override trials per cell")->check(CLI::PositiveNumber);
  auto* seed_opt = sw->add_option("--seed", sweep.seed, "override the master seed");
  sw->add_flag("--dump-certificates", sweep.dump, "write one certificate JSON per trial");
  sw->add_option("--replay", sweep.replay, "rerun one trial by id and print it")->check(CLI::NonNegativeNumber);
  sw->add_option("--workers", sweep.workers, "worker threads (default: EWL_WORKERS or all cores)");

  std::string op_path;
  auto* cl = app.add_subcommand("classify", "print the localization radii of a serialized operator");
  cl->add_option("--operator", op_path, "operator JSON")->required()->check(CLI::ExistingFile);

  std::string report_dir;
  auto* rp = app.add_subcommand("report", "print the summary table of a finished sweep");
  rp->add_option("--in", report_dir, "sweep output directory")->required()->check(CLI::ExistingDirectory);

  EmitArgs emit;
  auto* em = app.add_subcommand("emit", "write a random operator as JSON");
  em->add_option("--family", emit.family)
      ->check(CLI::IsMember({"martingale_transform", "paraproduct", "haar_shift", "perfect_dyadic", "random_ewl",
                             "random_dense"}));
  em->add_option("--measure", emit.measure);
  em->add_option("--dimension,-n", emit.n);
  em->add_option("--depth,-d", emit.d);
  em->add_option("--radius,-r", emit.r);
  em->add_option("--seed", emit.seed);
  em->add_option("--out,-o", emit.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  sweep.seed_given = seed_opt->count() > 0;

  try {
    if (*sw) return run_sweep_cmd(sweep);
    if (*cl) return run_classify(op_path);
    if (*rp) return run_report(report_dir);
    if (*em) return run_emit(emit);
  } catch (const ewl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ewl::SizeError& e) {
    std::cerr << "size error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ewl::UnsupportedDimensionError& e) {
    std::cerr << "unsupported: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "bad JSON: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
