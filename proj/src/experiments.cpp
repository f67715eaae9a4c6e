#include "critperc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "critperc/error.hpp"
#include "critperc/exploration.hpp"
#include "critperc/io.hpp"
#include "critperc/metrics.hpp"
#include "critperc/percolation.hpp"

#ifndef CRITPERC_VERSION
#define CRITPERC_VERSION "0.1.0"
#endif

namespace critperc {

namespace {

double n_power(int n, double exponent) { return std::pow(static_cast<double>(n), exponent); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw PreconditionError("config key '" + key + "': cannot parse '" + value + "'");
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double x = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(x)) bad_value(key, value);
    return x;
  } catch (const std::logic_error&) {
    bad_value(key, value);
  }
}

long long parse_integer(const std::string& key, const std::string& value) {
  // Accepts plain integers and integral scientific notation such as 1e6.
  double x = parse_double(key, value);
  if (x != std::floor(x) || std::abs(x) > 9e15) bad_value(key, value);
  return static_cast<long long>(x);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t x = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value);
  return x;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value);
}

int to_int(const std::string& key, long long x) {
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    throw PreconditionError("config key '" + key + "': value out of range");
  }
  return static_cast<int>(x);
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

template <typename T>
std::string opt(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_same_v<T, bool>) {
    return *v ? "1" : "0";
  } else {
    return std::to_string(*v);
  }
}

template <typename T>
nlohmann::ordered_json opt_json(const std::optional<T>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (replicates < 1) throw PreconditionError("replicates must be at least 1");
  if (threads < 1) throw PreconditionError("threads must be at least 1");
  if (n_values.empty() || d_values.empty() || lambda_values.empty()) {
    throw PreconditionError("grid lists n, d and lambda must be non-empty");
  }
  if (!(A >= 1.0)) throw PreconditionError("A must be at least 1");
  for (double a : tail_A) {
    if (!(a >= 1.0)) throw PreconditionError("tail_A values must be at least 1");
  }
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("eps must lie in (0, 1)");
  if (exact_cap < 1) throw PreconditionError("exact_cap must be positive");
  for (const GridPoint& g : grid()) {
    if (g.d < 3 || g.d > g.n - 1) {
      throw PreconditionError("grid point (n=" + std::to_string(g.n) + ", d=" + std::to_string(g.d) +
                              ") violates 3 <= d <= n-1");
    }
    if ((static_cast<long long>(g.n) * g.d) % 2 != 0) {
      throw ParityError("grid point (n=" + std::to_string(g.n) + ", d=" + std::to_string(g.d) +
                        ") has n*d odd");
    }
    critical_p(g.d, g.lambda, g.n);
    if (phase && g.lambda > 0.0) throw PreconditionError("phase fields need lambda <= 0 (mu = -lambda)");
    if (phase && g.complete && g.n > 4096) {
      throw PreconditionError("phase fields on the complete graph are limited to n <= 4096");
    }
  }
}

std::vector<GridPoint> ExperimentConfig::grid() const {
  std::vector<GridPoint> out;
  for (int n : n_values) {
    for (int d : d_values) {
      for (double lambda : lambda_values) {
        GridPoint g;
        g.n = n;
        g.complete = d == kCompleteDegree || d == n - 1;
        g.d = d == kCompleteDegree ? n - 1 : d;
        g.lambda = lambda;
        out.push_back(g);
      }
    }
  }
  return out;
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n_values;
  nlohmann::ordered_json ds = nlohmann::ordered_json::array();
  for (int d : d_values) ds.push_back(d == kCompleteDegree ? nlohmann::ordered_json("n-1") : nlohmann::ordered_json(d));
  j["d"] = ds;
  j["lambda"] = lambda_values;
  j["A"] = A;
  j["tail_A"] = tail_A;
  j["replicates"] = replicates;
  j["seed"] = seed;
  j["sampler"] = std::string(to_string(policy.kind));
  j["min_acceptance"] = policy.min_acceptance;
  j["max_attempts"] = policy.max_attempts;
  j["burn_in"] = policy.burn_in ? nlohmann::ordered_json(*policy.burn_in) : nlohmann::ordered_json("50*n*d");
  j["chain_budget"] = policy.chain_budget;
  j["repaired_budget"] = policy.repaired_budget;
  j["repaired_burn_in"] = policy.repaired_burn_in ? nlohmann::ordered_json(*policy.repaired_burn_in)
                                                  : nlohmann::ordered_json("min(n*d/2, repaired_budget)");
  j["diameter"] = diameter;
  j["mixing"] = mixing;
  j["mixing_estimate"] = mixing_estimate;
  j["exact_cap"] = exact_cap;
  j["eps"] = eps;
  j["phase"] = phase;
  j["threads"] = threads;
  j["out"] = out_dir;
  return j;
}

void apply_config_value(ExperimentConfig& c, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "n") {
    c.n_values.clear();
    for (const auto& item : split_list(value)) c.n_values.push_back(to_int(key, parse_integer(key, item)));
  } else if (key == "d") {
    c.d_values.clear();
    for (const auto& item : split_list(value)) {
      c.d_values.push_back(item == "n-1" ? kCompleteDegree : to_int(key, parse_integer(key, item)));
    }
  } else if (key == "lambda") {
    c.lambda_values.clear();
    for (const auto& item : split_list(value)) c.lambda_values.push_back(parse_double(key, item));
  } else if (key == "A") {
    c.A = parse_double(key, value);
  } else if (key == "tail_A") {
    c.tail_A.clear();
    for (const auto& item : split_list(value)) c.tail_A.push_back(parse_double(key, item));
  } else if (key == "replicates") {
    c.replicates = to_int(key, parse_integer(key, value));
  } else if (key == "seed") {
    c.seed = parse_u64(key, value);
  } else if (key == "sampler") {
    c.policy.kind = parse_sampler_kind(value);
  } else if (key == "burn_in") {
    c.policy.burn_in = static_cast<std::uint64_t>(parse_integer(key, value));
  } else if (key == "repaired_burn_in") {
    c.policy.repaired_burn_in = static_cast<std::uint64_t>(parse_integer(key, value));
  } else if (key == "repaired_budget") {
    c.policy.repaired_budget = static_cast<std::uint64_t>(parse_integer(key, value));
  } else if (key == "chain_budget") {
    c.policy.chain_budget = static_cast<std::uint64_t>(parse_integer(key, value));
  } else if (key == "min_acceptance") {
    c.policy.min_acceptance = parse_double(key, value);
  } else if (key == "max_attempts") {
    c.policy.max_attempts = parse_integer(key, value);
  } else if (key == "diameter") {
    c.diameter = parse_bool(key, value);
  } else if (key == "mixing") {
    c.mixing = parse_bool(key, value);
  } else if (key == "mixing_estimate") {
    c.mixing_estimate = parse_bool(key, value);
  } else if (key == "exact_cap") {
    c.exact_cap = to_int(key, parse_integer(key, value));
  } else if (key == "eps") {
    c.eps = parse_double(key, value);
  } else if (key == "phase") {
    c.phase = parse_bool(key, value);
  } else if (key == "threads") {
    c.threads = to_int(key, parse_integer(key, value));
  } else if (key == "out") {
    c.out_dir = value;
  } else {
    throw PreconditionError("unknown config key '" + key + "'");
  }
}

void apply_config_text(ExperimentConfig& config, std::istream& in) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw PreconditionError("config line " + std::to_string(number) + ": expected key=value");
    }
    apply_config_value(config, line.substr(0, eq), line.substr(eq + 1));
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  ExperimentConfig config;
  apply_config_text(config, in);
  return config;
}

ResultRow run_replicate(const ExperimentConfig& config, const GridPoint& point, int replicate) {
  const auto started = std::chrono::steady_clock::now();
  ResultRow row;
  row.point = point;
  row.replicate = replicate;
  row.p = critical_p(point.d, point.lambda, point.n);
  row.seed = replicate_seed(config.seed, point.n, point.d, replicate, Stream::Graph);
  const std::uint64_t key = replicate_seed(config.seed, point.n, point.d, replicate, Stream::Percolation);
  const EdgeIndicator indicator(key, row.p);

  std::optional<RegularGraph> graph;
  PercolationOutcome outcome;
  if (point.complete) {
    row.sampler = std::string(to_string(SamplerKind::Complete));
    // The phase run explores K_n through the hashed indicator, so its rows
    // keep that realisation; otherwise the skip sampler is far cheaper.
    if (config.phase) {
      outcome = percolate_complete(point.n, indicator);
      graph = RegularGraph::complete(point.n);
    } else {
      outcome = percolate_complete_skip(point.n, row.p, key);
    }
  } else {
    Rng rng(row.seed);
    SampledGraph sampled = sample_regular(point.n, point.d, rng, config.policy);
    row.sampler = std::string(to_string(sampled.used));
    graph = std::move(sampled.graph);
    outcome = percolate(*graph, indicator);
  }
  row.L1 = outcome.largest();
  row.L2 = outcome.second_largest();

  if (config.diameter || config.mixing) {
    const ComponentGraph component = component_subgraph(outcome, outcome.largest_component_id());
    if (config.diameter) row.diameter = diameter(component);
    if (config.mixing && (component.size() <= config.exact_cap || config.mixing_estimate)) {
      MixingOptions options;
      options.eps = config.eps;
      options.exact_cap = config.exact_cap;
      const MixingResult mixing = mixing_time(component, options);
      row.t_mix = mixing.t_mix;
      row.t_mix_exact = mixing.is_exact;
    }
  }

  if (config.phase) {
    Rng input_rng(replicate_seed(config.seed, point.n, point.d, replicate, Stream::Input));
    const Input input = make_input(std::move(*graph), input_rng);
    const PhaseOutcome po = two_phase_experiment(input, -point.lambda, config.A, key);
    PhaseFields f;
    f.tau_h = po.tau_h;
    f.tau_S1 = po.tau_S1;
    f.tau_1 = po.tau_1;
    f.T1_steps = po.params.T1_steps;
    f.tau1_at_T1 = po.tau_1 == po.params.T1_steps;
    f.E_holds = po.E_holds;
    f.tau_0 = po.tau_0;
    f.tau_S2 = po.tau_S2;
    f.tau_2 = po.tau_2;
    f.T2_steps = po.params.T2_steps;
    f.S_gain = po.S_gain;
    if (po.params.p == row.p) {
      for (int v : po.second_phase_vertices) {
        if (outcome.component_id[v] != outcome.component_id[po.second_phase_vertices.front()]) {
          f.gain_single_component = false;
          break;
        }
      }
    }
    row.phase = f;
  }
  row.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return row;
}

void parallel_for(int count, int threads, const std::function<void(int)>& task) {
  if (count <= 0) return;
  threads = std::max(1, std::min(threads, count));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

ExperimentResult scaling_study(const ExperimentConfig& config, const Progress& progress) {
  config.validate();
  const std::vector<GridPoint> grid = config.grid();
  const int reps = config.replicates;
  const int total = static_cast<int>(grid.size()) * reps;
  std::vector<std::optional<ResultRow>> slots(total);
  std::vector<std::string> errors(total);
  std::mutex progress_mutex;
  int done = 0;
  parallel_for(total, config.threads, [&](int i) {
    try {
      slots[i] = run_replicate(config, grid[i / reps], i % reps);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
    if (progress) {
      std::lock_guard<std::mutex> lock(progress_mutex);
      progress(++done, total);
    }
  });
  ExperimentResult result;
  std::vector<std::optional<std::string>> point_error(grid.size());
  for (int i = 0; i < total; ++i) {
    if (!errors[i].empty() && !point_error[i / reps]) point_error[i / reps] = errors[i];
  }
  for (int i = 0; i < total; ++i) {
    if (!point_error[i / reps]) result.rows.push_back(std::move(*slots[i]));
  }
  result.summaries = summarize(config, result.rows);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (point_error[g]) result.summaries[g].error = point_error[g];
  }
  return result;
}

Quartiles quartiles(std::vector<double> values) {
  Quartiles q;
  q.count = static_cast<long>(values.size());
  if (values.empty()) return q;
  q.q1 = quantile(values, 0.25);
  q.median = quantile(values, 0.5);
  q.q3 = quantile(std::move(values), 0.75);
  return q;
}

std::vector<PointSummary> summarize(const ExperimentConfig& config, std::span<const ResultRow> rows) {
  std::vector<PointSummary> out;
  for (const GridPoint& g : config.grid()) {
    PointSummary s;
    s.point = g;
    s.p = critical_p(g.d, g.lambda, g.n);
    std::vector<double> l1, diam, tmix;
    std::map<std::string, int> samplers;
    for (const ResultRow& r : rows) {
      if (!(r.point == g)) continue;
      ++s.rows;
      ++samplers[r.sampler];
      l1.push_back(r.L1 * n_power(g.n, -2.0 / 3.0));
      if (r.diameter) diam.push_back(*r.diameter * n_power(g.n, -1.0 / 3.0));
      if (r.t_mix) {
        tmix.push_back(static_cast<double>(*r.t_mix) / g.n);
        if (r.t_mix_exact && !*r.t_mix_exact) ++s.tmix_estimated;
      }
    }
    for (const auto& [name, count] : samplers) {
      if (!s.sampler.empty()) s.sampler += "+";
      s.sampler += name;
    }
    s.L1_scaled = quartiles(std::move(l1));
    s.diam_scaled = quartiles(std::move(diam));
    s.tmix_scaled = quartiles(std::move(tmix));
    out.push_back(s);
  }
  return out;
}

ProportionCheck check_proportion(std::string name, long hits, long trials, double bound) {
  ProportionCheck c;
  c.name = std::move(name);
  c.estimate = wilson_interval(hits, trials, 1.6448536269514722);
  c.bound = bound;
  c.vacuous = bound >= 1.0 || trials == 0;
  c.pass = c.vacuous || c.estimate.wilson_high <= bound;
  return c;
}

ProportionCheck tail_check(std::span<const int> L1, int n, double A) {
  if (!(A >= 1.0)) throw PreconditionError("A must be at least 1");
  const double n23 = n_power(n, 2.0 / 3.0);
  long hits = 0;
  for (int l : L1) hits += (l < n23 / A || l > A * n23) ? 1 : 0;
  return check_proportion("tail_A=" + format_double(A), hits, static_cast<long>(L1.size()),
                          20.0 / std::sqrt(A));
}

ProportionCheck tail_estimate(int n, int d, double lambda, double A, int replicates, std::uint64_t seed,
                              int threads) {
  ExperimentConfig config;
  config.n_values = {n};
  config.d_values = {d};
  config.lambda_values = {lambda};
  config.A = A;
  config.replicates = replicates;
  config.seed = seed;
  config.threads = threads;
  ExperimentResult result = scaling_study(config);
  if (result.summaries.front().error) throw Error(*result.summaries.front().error);
  std::vector<int> l1;
  for (const ResultRow& r : result.rows) l1.push_back(r.L1);
  return tail_check(l1, n, A);
}

std::vector<ProportionCheck> phase_checks(std::span<const ResultRow> rows, int n, double A) {
  const double s = 1.0 / std::sqrt(A);
  const double n23 = n_power(n, 2.0 / 3.0);
  long total = 0, at_T1 = 0, not_E = 0, with_E = 0, early = 0, small = 0;
  for (const ResultRow& r : rows) {
    if (!r.phase) continue;
    ++total;
    at_T1 += r.phase->tau1_at_T1 ? 1 : 0;
    if (r.phase->E_holds) {
      ++with_E;
      early += (r.phase->tau_2 && *r.phase->tau_2 < r.phase->T2_steps) ? 1 : 0;
    } else {
      ++not_E;
    }
    small += r.L1 < n23 / A ? 1 : 0;
  }
  return {check_proportion("tau1_at_T1", at_T1, total, 12.0 * s),
          check_proportion("not_E", not_E, total, 13.0 * s),
          check_proportion("early_stop_given_E", early, with_E, 5.0 * s),
          check_proportion("small_L1", small, total, 19.0 * s)};
}

PhaseReport phase_statistics(int n, int d, double mu, double A, int replicates, std::uint64_t seed,
                             int threads, const SamplerPolicy& policy) {
  if (mu < 0.0) throw PreconditionError("mu must be non-negative");
  ExperimentConfig config;
  config.n_values = {n};
  config.d_values = {d};
  config.lambda_values = {-mu};
  config.A = A;
  config.replicates = replicates;
  config.seed = seed;
  config.threads = threads;
  config.policy = policy;
  config.phase = true;
  ExperimentResult result = scaling_study(config);
  if (result.summaries.front().error) throw Error(*result.summaries.front().error);
  PhaseReport report;
  report.rows = std::move(result.rows);
  report.checks = phase_checks(report.rows, n, A);
  for (const ResultRow& r : report.rows) {
    if (r.phase && r.phase->E_holds && !r.phase->gain_single_component) report.gain_single_component = false;
  }
  return report;
}

nlohmann::ordered_json row_json(const ResultRow& r) {
  nlohmann::ordered_json j;
  j["n"] = r.point.n;
  j["d"] = r.point.d;
  j["lambda"] = r.point.lambda;
  j["p"] = r.p;
  j["replicate"] = r.replicate;
  j["seed"] = r.seed;
  j["sampler"] = r.sampler;
  j["L1"] = r.L1;
  j["L2"] = r.L2;
  j["diameter"] = opt_json(r.diameter);
  j["t_mix"] = opt_json(r.t_mix);
  j["t_mix_exact"] = opt_json(r.t_mix_exact);
  if (r.phase) {
    const PhaseFields& f = *r.phase;
    j["tau_h"] = f.tau_h;
    j["tau_S1"] = opt_json(f.tau_S1);
    j["tau_1"] = f.tau_1;
    j["T1_steps"] = f.T1_steps;
    j["tau1_at_T1"] = f.tau1_at_T1;
    j["E_holds"] = f.E_holds;
    j["tau_0"] = opt_json(f.tau_0);
    j["tau_S2"] = opt_json(f.tau_S2);
    j["tau_2"] = opt_json(f.tau_2);
    j["T2_steps"] = f.T2_steps;
    j["S_gain"] = f.S_gain;
    j["gain_single_component"] = f.gain_single_component;
  }
  return j;
}

std::string csv_header() {
  return "n,d,lambda,p,replicate,seed,sampler,L1,L2,diameter,t_mix,t_mix_exact,tau_h,tau_S1,tau_1,"
         "T1_steps,tau1_at_T1,E_holds,tau_0,tau_S2,tau_2,T2_steps,S_gain,gain_single_component";
}

std::string row_csv(const ResultRow& r) {
  std::string s = std::to_string(r.point.n) + ',' + std::to_string(r.point.d) + ',' +
                  format_double(r.point.lambda) + ',' + format_double(r.p) + ',' +
                  std::to_string(r.replicate) + ',' + std::to_string(r.seed) + ',' + r.sampler + ',' +
                  std::to_string(r.L1) + ',' + std::to_string(r.L2) + ',' + opt(r.diameter) + ',' +
                  opt(r.t_mix) + ',' + opt(r.t_mix_exact);
  if (r.phase) {
    const PhaseFields& f = *r.phase;
    s += ',' + std::to_string(f.tau_h) + ',' + opt(f.tau_S1) + ',' + std::to_string(f.tau_1) + ',' +
         std::to_string(f.T1_steps) + ',' + (f.tau1_at_T1 ? "1" : "0") + ',' + (f.E_holds ? "1" : "0") +
         ',' + opt(f.tau_0) + ',' + opt(f.tau_S2) + ',' + opt(f.tau_2) + ',' +
         std::to_string(f.T2_steps) + ',' + std::to_string(f.S_gain) + ',' +
         (f.gain_single_component ? "1" : "0");
  } else {
    s += ",,,,,,,,,,,,";
  }
  return s;
}

void write_rows_jsonl(std::ostream& out, std::span<const ResultRow> rows) {
  for (const ResultRow& r : rows) out << row_json(r).dump() << '\n';
}

void write_rows_csv(std::ostream& out, std::span<const ResultRow> rows) {
  out << csv_header() << '\n';
  for (const ResultRow& r : rows) out << row_csv(r) << '\n';
}

void persist(const std::string& dir, std::span<const ResultRow> rows, const nlohmann::ordered_json& manifest) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  const std::filesystem::path base(dir);
  {
    AtomicFile f((base / "rows.jsonl").string());
    write_rows_jsonl(f.stream(), rows);
    f.commit();
  }
  {
    AtomicFile f((base / "rows.csv").string());
    write_rows_csv(f.stream(), rows);
    f.commit();
  }
  {
    AtomicFile f((base / "timings.csv").string());
    f.stream() << "n,d,lambda,replicate,wall_seconds\n";
    for (const ResultRow& r : rows) {
      f.stream() << r.point.n << ',' << r.point.d << ',' << format_double(r.point.lambda) << ','
                 << r.replicate << ',' << format_double(r.wall_seconds) << '\n';
    }
    f.commit();
  }
  {
    AtomicFile f((base / "manifest.json").string());
    f.stream() << manifest.dump(2) << '\n';
    f.commit();
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string version_string() { return CRITPERC_VERSION; }

nlohmann::ordered_json make_manifest(const ExperimentConfig& config, std::span<const PointSummary> summaries,
                                     const std::string& started, const std::string& finished) {
  nlohmann::ordered_json m;
  m["version"] = version_string();
  m["seed"] = config.seed;
  m["config"] = config.to_json();
  m["started"] = started;
  m["finished"] = finished;
  auto q = [](const Quartiles& x) {
    return nlohmann::ordered_json{{"count", x.count}, {"q1", x.q1}, {"median", x.median}, {"q3", x.q3}};
  };
  nlohmann::ordered_json points = nlohmann::ordered_json::array();
  for (const PointSummary& s : summaries) {
    nlohmann::ordered_json p;
    p["n"] = s.point.n;
    p["d"] = s.point.d;
    p["lambda"] = s.point.lambda;
    p["p"] = s.p;
    p["sampler"] = s.sampler;
    p["rows"] = s.rows;
    p["L1_n^-2/3"] = q(s.L1_scaled);
    p["diam_n^-1/3"] = q(s.diam_scaled);
    p["tmix_n^-1"] = q(s.tmix_scaled);
    p["tmix_estimated"] = s.tmix_estimated;
    p["error"] = s.error ? nlohmann::ordered_json(*s.error) : nlohmann::ordered_json(nullptr);
    points.push_back(p);
  }
  m["summaries"] = points;
  return m;
}

}  // namespace critperc
