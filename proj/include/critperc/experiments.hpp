#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "critperc/sampler.hpp"
#include "critperc/stats.hpp"

namespace critperc {

// d value standing for n-1 in a grid (the complete graph).
inline constexpr int kCompleteDegree = -1;

struct GridPoint {
  int n = 0;
  int d = 0;  // resolved; n-1 for complete grid entries
  double lambda = 0.0;
  bool complete = false;

  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

struct ExperimentConfig {
  std::vector<int> n_values{1000};
  std::vector<int> d_values{3};  // kCompleteDegree stands for n-1
  std::vector<double> lambda_values{0.0};
  double A = 100.0;
  std::vector<double> tail_A{4.0, 100.0};
  int replicates = 10;
  std::uint64_t seed = 1;
  SamplerPolicy policy;
  bool diameter = false;
  bool mixing = false;
  bool mixing_estimate = true;
  int exact_cap = 5000;
  double eps = 0.25;
  // Phase fields use mu = -lambda; requires lambda <= 0.
  bool phase = false;
  int threads = 1;
  std::string out_dir;

  // Throws PreconditionError / ParityError.
  void validate() const;
  std::vector<GridPoint> grid() const;
  nlohmann::ordered_json to_json() const;
};

// Flat key=value text, '#' comments, lists comma-separated. Keys:
// n, d (integers or "n-1"), lambda, A, tail_A, replicates, seed, sampler,
// burn_in, repaired_burn_in, repaired_budget, chain_budget, min_acceptance,
// max_attempts, diameter, mixing, mixing_estimate, exact_cap, eps, phase,
// threads, out. Unknown keys throw PreconditionError.
void apply_config_text(ExperimentConfig& config, std::istream& in);
void apply_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);
ExperimentConfig load_config(const std::string& path);

struct PhaseFields {
  long tau_h = 0;
  std::optional<long> tau_S1;
  long tau_1 = 0;
  long T1_steps = 0;
  bool tau1_at_T1 = false;
  bool E_holds = false;
  std::optional<long> tau_0;
  std::optional<long> tau_S2;
  std::optional<long> tau_2;
  long T2_steps = 0;
  long S_gain = 0;
  bool gain_single_component = true;
};

struct ResultRow {
  GridPoint point;
  double p = 0.0;
  int replicate = 0;
  std::uint64_t seed = 0;  // graph stream seed of this replicate
  std::string sampler;
  int L1 = 0;
  int L2 = 0;
  std::optional<int> diameter;
  std::optional<long> t_mix;
  std::optional<bool> t_mix_exact;
  std::optional<PhaseFields> phase;
  double wall_seconds = 0.0;  // not part of the rows files
};

nlohmann::ordered_json row_json(const ResultRow& row);
std::string csv_header();
std::string row_csv(const ResultRow& row);

struct Quartiles {
  long count = 0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

Quartiles quartiles(std::vector<double> values);

struct PointSummary {
  GridPoint point;
  double p = 0.0;
  std::string sampler;
  int rows = 0;
  Quartiles L1_scaled;    // L1 n^{-2/3}
  Quartiles diam_scaled;  // diam n^{-1/3}
  Quartiles tmix_scaled;  // t_mix n^{-1}
  int tmix_estimated = 0;
  std::optional<std::string> error;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<PointSummary> summaries;
};

// One replicate at one grid point; deterministic in (config, point, replicate).
ResultRow run_replicate(const ExperimentConfig& config, const GridPoint& point, int replicate);

// Runs tasks 0..count-1 on `threads` workers; results land at their index.
void parallel_for(int count, int threads, const std::function<void(int)>& task);

using Progress = std::function<void(int done, int total)>;

// Rows ordered by (grid point, replicate). A failing grid point contributes
// no rows; its summary carries the error message.
ExperimentResult scaling_study(const ExperimentConfig& config, const Progress& progress = {});

std::vector<PointSummary> summarize(const ExperimentConfig& config, std::span<const ResultRow> rows);

struct ProportionCheck {
  std::string name;
  Proportion estimate;
  double bound = 0.0;
  bool vacuous = false;
  bool pass = false;
};

// One-sided check of an empirical probability against an upper bound: pass
// when the one-sided 95% Wilson upper limit is at most the bound; a bound
// of at least 1 passes and is flagged vacuous.
ProportionCheck check_proportion(std::string name, long hits, long trials, double bound);

// P[L1 outside [A^{-1} n^{2/3}, A n^{2/3}]] against 20 A^{-1/2}.
ProportionCheck tail_check(std::span<const int> L1, int n, double A);
ProportionCheck tail_estimate(int n, int d, double lambda, double A, int replicates,
                              std::uint64_t seed, int threads = 1);

struct PhaseReport {
  std::vector<ResultRow> rows;
  std::vector<ProportionCheck> checks;  // tau1_at_T1, not_E, early_stop_given_E, small_L1
  bool gain_single_component = true;
};

PhaseReport phase_statistics(int n, int d, double mu, double A, int replicates, std::uint64_t seed,
                             int threads = 1, const SamplerPolicy& policy = {});
std::vector<ProportionCheck> phase_checks(std::span<const ResultRow> rows, int n, double A);

// rows.jsonl, rows.csv, manifest.json and timings.csv in `dir`, each written
// to a temporary file and renamed into place.
void persist(const std::string& dir, std::span<const ResultRow> rows, const nlohmann::ordered_json& manifest);

void write_rows_jsonl(std::ostream& out, std::span<const ResultRow> rows);
void write_rows_csv(std::ostream& out, std::span<const ResultRow> rows);

// Manifest: config, version string, seed, timestamps, summaries.
nlohmann::ordered_json make_manifest(const ExperimentConfig& config, std::span<const PointSummary> summaries,
                             const std::string& started, const std::string& finished);
std::string utc_timestamp();
std::string version_string();

}  // namespace critperc
