#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ewl/grid.hpp"
#include "ewl/measure.hpp"
#include "ewl/rng.hpp"
#include "ewl/testing.hpp"

namespace ewl {

std::string_view version();

enum class MeasureKind { uniform, iid_uniform, iid_exponential, sparse_atoms, lacunary, from_weights };

struct MeasureSpec {
  MeasureKind kind = MeasureKind::uniform;
  /// sparse_atoms: probability that a leaf is zeroed.
  double p = 0.3;
  /// from_weights: sigma = |Q| / u and omega = |Q| v with u = |x - c|^alpha_u,
  /// v = |x - c|^alpha_v at leaf centers, c the center of the root cube.
  double alpha_u = 0.5;
  double alpha_v = -0.5;
};

std::string describe(const MeasureSpec& m);

enum class MeasureSide { sigma, omega };

/// Draws leaf masses from `rng`. Only iid_uniform, iid_exponential and
/// sparse_atoms consume randomness.
LeafMeasure generate_measure(const MeasureSpec& m, const Grid& grid, Rng& rng,
                             MeasureSide side = MeasureSide::sigma);
LeafMeasure generate_measure(const MeasureSpec& m, const Grid& grid, std::uint64_t seed,
                             MeasureSide side = MeasureSide::sigma);

enum class CoefficientMode { uniform, constant, zero };

struct Tolerances {
  double partition = 1e-10;
  /// Relative slack on max(c1, c2, c3) <= norm and local <= global.
  double necessity = 1e-9;
};

struct SweepConfig {
  std::vector<int> dimensions{1};
  std::vector<int> depths{4};
  std::vector<int> radii{1};
  int trials = 10;
  std::vector<std::string> families{"random_ewl"};
  CoefficientMode coefficients = CoefficientMode::uniform;
  std::vector<MeasureSpec> measures{MeasureSpec{}};
  std::uint64_t seed = 1;
  Tolerances tolerances;
  bool certificates = true;
  bool dump_certificates = false;
  /// When false the wall_ms column is written as 0.
  bool record_timing = true;
};

/// Throws ConfigError on unknown keys, bad values or cells over the dense cap.
SweepConfig parse_sweep_config(std::string_view json_text);
std::string to_json(const SweepConfig& cfg);
void validate(const SweepConfig& cfg);

/// Everything needed to rerun one trial.
struct TrialKey {
  std::uint64_t id = 0;
  std::uint64_t seed = 0;
  int n = 1;
  int d = 1;
  int r = 0;
  std::string family;
};

struct TrialResult {
  TrialKey key;
  bool degenerate = false;
  std::string note;
  TestingReport report;
  double wall_ms = 0.0;
  bool certified = false;
  bool necessity_ok = true;
  bool partitions_ok = true;
  bool packing_ok = true;
  bool bounds_ok = true;
  bool decomposition_ok = true;
  double embedding_ratio = 0.0;
  double carleson_ratio = 0.0;
  double child_ratio = 0.0;
  /// Names of everything that failed, for counterexample records.
  std::vector<std::string> failures;
  std::string certificate_json;

  /// No exact invariant failed (bound verdicts are reported separately).
  bool invariants_ok() const { return necessity_ok && partitions_ok && packing_ok && decomposition_ok; }
};

/// Trials in run order: cells are (n, d, r, family) with families varying
/// fastest, `trials` consecutive ids per cell; the seed of trial `id` is
/// derive_seed(cfg.seed, id). Cells that a family cannot serve (haar_shift
/// and perfect_dyadic need n = 1) are skipped without consuming ids.
std::vector<TrialKey> plan_trials(const SweepConfig& cfg);

TrialResult run_trial(const SweepConfig& cfg, const TrialKey& key);

struct CellSummary {
  int n = 1;
  int d = 1;
  int r = 0;
  std::string family;
  int trials = 0;
  int passed = 0;
  int failed = 0;
  int degenerate = 0;
  int certificates_passed = 0;
  int bound_violations = 0;
  double ratio_sum_max = 0.0;
  double ratio_sum_median = 0.0;
  double ratio_max_max = 0.0;
  double embedding_max = 0.0;
  double carleson_max = 0.0;
  double child_max = 0.0;
};

struct Counterexample {
  TrialKey key;
  std::vector<std::string> failures;
};

struct SweepSummary {
  std::vector<CellSummary> cells;
  std::vector<std::string> skipped_cells;
  std::vector<Counterexample> counterexamples;
  int trials = 0;
  int failed = 0;
  int degenerate = 0;
  int bound_violations = 0;
  std::string config_hash;

  /// 1 when an exact invariant failed somewhere, else 0.
  int exit_code() const { return failed > 0 ? 1 : 0; }
};

SweepSummary summarize(const SweepConfig& cfg, const std::vector<TrialResult>& results);

std::string csv_header();
std::string csv_row(const TrialResult& t);

/// Runs every planned trial on a pool of `workers` threads (0: EWL_WORKERS,
/// else the hardware concurrency). Writes trials.csv and summary.json to
/// `out`, plus certificates/trial_<id>.json when dumping.
SweepSummary run_sweep(const SweepConfig& cfg, const std::filesystem::path& out, unsigned workers = 0);

/// Runs the single trial with the given id and prints nothing; used by --replay.
TrialResult replay_trial(const SweepConfig& cfg, std::uint64_t id);

std::string summary_json(const SweepConfig& cfg, const SweepSummary& s);

/// FNV-1a of the canonical config document, as 16 hex digits.
std::string config_hash(const SweepConfig& cfg);

/// Worker count from EWL_WORKERS, falling back to the hardware concurrency.
unsigned default_workers();

}  // namespace ewl
