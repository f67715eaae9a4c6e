#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "critperc/error.hpp"
#include "critperc/experiments.hpp"
#include "critperc/exploration.hpp"
#include "critperc/io.hpp"
#include "critperc/lemma_verifier.hpp"
#include "critperc/metrics.hpp"
#include "critperc/percolation.hpp"
#include "critperc/sampler.hpp"

using namespace critperc;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kPrecondition = 2, kVerifyFailed = 3, kIo = 4 };

struct Globals {
  std::optional<std::uint64_t> seed;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string out;
  std::string format = "jsonl";
  std::string config;
};

// Prints a generated seed before anything else so that every run can be
// repeated.
std::uint64_t resolve_seed(Globals& g) {
  if (!g.seed) {
    std::random_device rd;
    g.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::cerr << "seed: " << *g.seed << std::endl;
  }
  return *g.seed;
}

template <typename F>
void emit(const std::string& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  AtomicFile file(path);
  write(file.stream());
  file.commit();
}

struct GraphSource {
  std::string file;
  int n = 0;
  int d = 0;
  std::string sampler = "auto";
};

void add_graph_source(CLI::App* cmd, GraphSource& src, bool required_nd) {
  auto* file = cmd->add_option("--graph", src.file, "Edge-list file (header 'n d m', then 'u v' lines)");
  auto* n = cmd->add_option("--n", src.n, "Number of vertices");
  auto* d = cmd->add_option("--d", src.d, "Degree");
  cmd->add_option("--sampler", src.sampler, "Sampler: auto, rejection, chain, repaired, complete")
      ->capture_default_str();
  file->excludes(n)->excludes(d);
  if (required_nd) {
    n->required();
    d->required();
  }
}

SampledGraph load_or_sample(const GraphSource& src, std::uint64_t seed, int replicate) {
  if (!src.file.empty()) {
    RegularGraph g = load_edge_list(src.file);
    return {std::move(g), SamplerKind::Auto, 0};
  }
  if (src.n <= 0) throw PreconditionError("give --graph or both --n and --d");
  SamplerPolicy policy;
  policy.kind = parse_sampler_kind(src.sampler);
  Rng rng(replicate_seed(seed, src.n, src.d, replicate, Stream::Graph));
  return sample_regular(src.n, src.d, rng, policy);
}

struct Retention {
  std::optional<double> p;
  std::optional<double> lambda;
  std::optional<double> mu;
};

void add_retention(CLI::App* cmd, Retention& r, bool with_mu) {
  auto* p = cmd->add_option("--p", r.p, "Retention probability");
  auto* l = cmd->add_option("--lambda", r.lambda, "Critical-window parameter: p = (1 + lambda n^{-1/3})/(d-1)");
  p->excludes(l);
  if (with_mu) {
    auto* m = cmd->add_option("--mu", r.mu, "Subcritical shift: p = (1 - mu n^{-1/3})/(d-1)");
    m->excludes(p)->excludes(l);
  }
}

double resolve_p(const Retention& r, int n, int d) {
  if (r.p) return *r.p;
  if (r.lambda) return critical_p(d, *r.lambda, n);
  if (r.mu) return critical_p(d, -*r.mu, n);
  return critical_p(d, 0.0, n);
}

int levenshtein(const std::string& a, const std::string& b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

void suggest_flags(const CLI::App& app, int argc, char** argv) {
  std::vector<std::string> known;
  auto collect = [&](const CLI::App* a) {
    for (const CLI::Option* o : a->get_options()) {
      for (const std::string& l : o->get_lnames()) known.push_back("--" + l);
    }
  };
  collect(&app);
  for (const CLI::App* sub : app.get_subcommands()) collect(sub);
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg.rfind("--", 0) != 0) continue;
    arg = arg.substr(0, arg.find('='));
    if (std::find(known.begin(), known.end(), arg) != known.end()) continue;
    std::string best;
    int best_distance = 4;
    for (const std::string& k : known) {
      int dist = levenshtein(arg, k);
      if (dist < best_distance) {
        best_distance = dist;
        best = k;
      }
    }
    std::cerr << "unknown flag " << arg;
    if (!best.empty()) std::cerr << "; did you mean " << best << "?";
    std::cerr << '\n';
  }
}

std::string fmt(double x, int precision = 6) {
  std::ostringstream s;
  s << std::setprecision(precision) << x;
  return s.str();
}

void print_table(std::ostream& out, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    width.resize(std::max(width.size(), r.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      out << std::left << std::setw(static_cast<int>(width[i]) + 2) << r[i];
    }
    out << '\n';
  }
}

// ---- subcommands ----

int cmd_sample(Globals& g, const GraphSource& src, std::optional<std::uint64_t> burn_in) {
  const std::uint64_t seed = resolve_seed(g);
  SamplerPolicy policy;
  policy.kind = parse_sampler_kind(src.sampler);
  policy.burn_in = burn_in;
  Rng rng(replicate_seed(seed, src.n, src.d, 0, Stream::Graph));
  const SampledGraph s = sample_regular(src.n, src.d, rng, policy);
  emit(g.out, [&](std::ostream& out) {
    if (g.format == "csv") {
      out << "u,v\n";
      for (const Edge& e : s.graph.edges()) out << e.u << ',' << e.v << '\n';
    } else {
      json j;
      j["n"] = s.graph.n();
      j["d"] = s.graph.d();
      j["seed"] = seed;
      j["sampler"] = std::string(to_string(s.used));
      j["attempts_or_moves"] = s.attempts_or_moves;
      json edges = json::array();
      for (const Edge& e : s.graph.edges()) edges.push_back({e.u, e.v});
      j["edges"] = edges;
      out << j.dump() << '\n';
    }
  });
  return kOk;
}

int cmd_percolate(Globals& g, const GraphSource& src, const Retention& r, bool edges) {
  const std::uint64_t seed = resolve_seed(g);
  const SampledGraph s = load_or_sample(src, seed, 0);
  const int n = s.graph.n(), d = s.graph.d();
  const double p = resolve_p(r, n, d);
  const EdgeIndicator indicator(replicate_seed(seed, n, d, 0, Stream::Percolation), p);
  const PercolationOutcome outcome = percolate(s.graph, indicator);
  emit(g.out, [&](std::ostream& out) {
    if (g.format == "csv") {
      out << "n,d,p,base_edges,retained_count,L1,L2,components\n";
      out << n << ',' << d << ',' << fmt(p, 17) << ',' << outcome.base_edge_count << ','
          << outcome.retained_edges.size() << ',' << outcome.largest() << ',' << outcome.second_largest()
          << ',' << outcome.component_sizes.size() << '\n';
    } else {
      write_outcome_json(out, outcome, edges);
    }
  });
  return kOk;
}

int cmd_explore(Globals& g, const GraphSource& src, const Retention& r, std::optional<long> t_max, long every,
                bool identity) {
  const std::uint64_t seed = resolve_seed(g);
  SampledGraph s = load_or_sample(src, seed, 0);
  const int n = s.graph.n(), d = s.graph.d();
  const double p = resolve_p(r, n, d);
  Rng input_rng(replicate_seed(seed, n, d, 0, Stream::Input));
  const Input input = identity ? make_identity_input(std::move(s.graph)) : make_input(std::move(s.graph), input_rng);
  RunOptions options;
  options.t_max = t_max ? *t_max : static_cast<long>(n) * d / 2 + n;
  const Trajectory traj = run(input, EdgeIndicator(replicate_seed(seed, n, d, 0, Stream::Percolation), p), options);
  TrajectoryDumpOptions dump;
  dump.every = every;
  emit(g.out, [&](std::ostream& out) {
    if (g.format == "csv") {
      write_trajectory_csv(out, traj, dump);
    } else {
      json header{{"seed", seed}, {"sampler", std::string(to_string(s.used))}};
      write_trajectory_jsonl(out, traj, header.dump(), dump);
    }
  });
  return kOk;
}

int cmd_metrics(Globals& g, const GraphSource& src, const Retention& r, int k, int replicates,
                const MixingOptions& mixing, bool no_estimate, bool skip_diameter, bool skip_mixing) {
  const std::uint64_t seed = resolve_seed(g);
  if (k < 1) throw PreconditionError("--k must be at least 1");
  if (replicates < 1) throw PreconditionError("--replicates must be at least 1");
  std::vector<std::vector<std::string>> rows(static_cast<std::size_t>(replicates));
  std::vector<json> json_rows(static_cast<std::size_t>(replicates));
  parallel_for(replicates, g.threads, [&](int rep) {
    const SampledGraph s = load_or_sample(src, seed, rep);
    const int n = s.graph.n(), d = s.graph.d();
    const double p = resolve_p(r, n, d);
    const PercolationOutcome outcome =
        percolate(s.graph, EdgeIndicator(replicate_seed(seed, n, d, rep, Stream::Percolation), p));
    std::vector<int> ids(outcome.component_size_by_id.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
    std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
      return outcome.component_size_by_id[a] > outcome.component_size_by_id[b];
    });
    json arr = json::array();
    std::string csv;
    for (int rank = 0; rank < k && rank < static_cast<int>(ids.size()); ++rank) {
      const ComponentGraph c = component_subgraph(outcome, ids[rank]);
      ComponentSummary sum;
      sum.size = c.size();
      sum.edge_count = c.edge_count();
      if (!skip_diameter) sum.diameter = diameter(c);
      if (!skip_mixing && (c.size() <= mixing.exact_cap || !no_estimate)) {
        const MixingResult m = mixing_time(c, mixing);
        sum.t_mix = m.t_mix;
        sum.is_exact_mixing = m.is_exact;
      }
      json row;
      row["replicate"] = rep;
      row["rank"] = rank;
      row["size"] = sum.size;
      row["edge_count"] = sum.edge_count;
      row["diameter"] = sum.diameter ? json(*sum.diameter) : json(nullptr);
      row["t_mix"] = sum.t_mix ? json(*sum.t_mix) : json("capped");
      row["is_exact"] = sum.t_mix ? json(sum.is_exact_mixing) : json(nullptr);
      arr.push_back(row);
      csv += std::to_string(rep) + ',' + std::to_string(rank) + ',' + std::to_string(sum.size) + ',' +
             std::to_string(sum.edge_count) + ',' + (sum.diameter ? std::to_string(*sum.diameter) : "") + ',' +
             (sum.t_mix ? std::to_string(*sum.t_mix) : "capped") + ',' +
             (sum.t_mix ? (sum.is_exact_mixing ? "1" : "0") : "") + '\n';
    }
    json_rows[rep] = arr;
    rows[rep] = {csv};
  });
  emit(g.out, [&](std::ostream& out) {
    if (g.format == "csv") {
      out << "replicate,rank,size,edge_count,diameter,t_mix,is_exact\n";
      for (const auto& r2 : rows) out << r2.front();
    } else {
      for (const json& arr : json_rows) {
        for (const json& row : arr) out << row.dump() << '\n';
      }
    }
  });
  return kOk;
}

struct VerifyArgs {
  std::string suite = "all";
  std::optional<int> n;
  std::optional<int> d;
  int trials = 100;
  double mu = 0.0;
  double delta = 0.1;
  long samples = 100000;
};

int cmd_verify(Globals& g, const VerifyArgs& a) {
  const std::uint64_t seed = resolve_seed(g);
  const std::vector<std::string> all{"switchings", "frontier", "growth", "edgeprob"};
  std::vector<std::string> suites = a.suite == "all" ? all : std::vector<std::string>{a.suite};
  std::vector<std::vector<std::string>> table{{"suite", "check", "observed", "bound", "verdict"}};
  json report;
  report["seed"] = seed;
  report["version"] = version_string();
  json checks = json::array();
  bool ok = true;
  auto record = [&](const std::string& suite, const std::string& check, const std::string& observed,
                    const std::string& bound, bool pass, json extra = json::object()) {
    table.push_back({suite, check, observed, bound, pass ? "PASS" : "FAIL"});
    extra["suite"] = suite;
    extra["check"] = check;
    extra["observed"] = observed;
    extra["bound"] = bound;
    extra["pass"] = pass;
    checks.push_back(extra);
    ok = ok && pass;
  };
  auto rate = [](long pass, long total) {
    return std::to_string(pass) + "/" + std::to_string(total) + " (" +
           fmt(total ? 100.0 * pass / total : 100.0, 4) + "%)";
  };
  for (const std::string& suite : suites) {
    if (suite == "switchings") {
      const int n = a.n.value_or(200), d = a.d.value_or(3);
      const SwitchingSuiteReport r = switching_suite(n, d, a.trials, seed);
      record(suite, "forward >= dn-2d|S|-2d^2", rate(r.forward_pass, r.forward_checked), "100%",
             r.forward_pass == r.forward_checked);
      record(suite, "backward <= d(d-d_H(u)-d_F(u))", rate(r.backward_pass, r.backward_checked), "100%",
             r.backward_pass == r.backward_checked);
      record(suite, "up <= d^2|S|", rate(r.up_pass, r.up_checked), "100%", r.up_pass == r.up_checked);
      record(suite, "down >= k(dn-2d|S|-2d^2)", rate(r.down_pass, r.down_checked), "100%",
             r.down_pass == r.down_checked);
    } else if (suite == "frontier" || suite == "growth") {
      const int n = a.n.value_or(100000), d = a.d.value_or(3);
      const double n23 = std::pow(static_cast<double>(n), 2.0 / 3.0);
      const PhaseParameters pp = phase_parameters(n, d, a.mu, 1.0);
      const long t_max = std::max(static_cast<long>(std::ceil(d * n23)) + 1, pp.T1_steps);
      std::vector<Trajectory> trajectories(a.trials);
      parallel_for(a.trials, g.threads, [&](int i) {
        trajectories[i] = replicate_trajectory(n, d, pp.p, seed, i, t_max);
      });
      if (suite == "frontier") {
        FrontierAccumulator acc(n, d, pp.mu);
        for (const Trajectory& t : trajectories) acc.add(t);
        for (const BoundCheck& c : acc.checks()) {
          record(suite, c.name, fmt(c.observed) + " (95% one-sided " + fmt(c.one_sided_limit) + ")",
                 std::string(c.upper ? "<= " : ">= ") + fmt(c.bound), c.pass,
                 json{{"mean", c.observed}, {"se", c.se}, {"steps", c.count}});
        }
      } else {
        GrowthTally tally;
        for (const Trajectory& t : trajectories) tally.add(growth_check(t, 0, pp.T1_steps, a.delta));
        record(suite, "lower_ok", rate(tally.lower_ok, tally.trials), ">= 99%",
               tally.lower_ok >= 0.99 * tally.trials);
        record(suite, "upper_ok", rate(tally.upper_ok, tally.trials), ">= 99%",
               tally.upper_ok >= 0.99 * tally.trials);
        record(suite, "a_bound violations", rate(tally.a_violations, tally.trials), "<= 1%",
               tally.a_violations <= 0.01 * tally.trials);
      }
    } else if (suite == "edgeprob") {
      const int n = a.n.value_or(6), d = a.d.value_or(3);
      bool symmetric = true;
      const Rational expected = make_rational(d, n - 1);
      for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) symmetric = symmetric && exact_edge_probability(n, d, {}, {}, {}, u, v) == expected;
      }
      record(suite, "P[uv in E] = d/(n-1) for all pairs", symmetric ? "yes" : "no",
             std::to_string(expected.num) + "/" + std::to_string(expected.den), symmetric);
      const std::vector<int> S{0};
      const std::vector<Edge> F{{0, 1}};
      const EdgeFrequencyCheck f = empirical_edge_frequency(n, d, S, {}, F, 1, 2, a.samples, seed);
      record(suite, "sampled P[12 in E | 01 in E] vs exact", fmt(f.frequency) + " (chi2 p=" + fmt(f.test.p_value, 3) + ")",
             std::to_string(f.exact.num) + "/" + std::to_string(f.exact.den), f.test.p_value > 1e-3,
             json{{"conditioned", f.conditioned}, {"p_value", f.test.p_value}});
    } else {
      throw PreconditionError("unknown suite '" + suite + "'");
    }
  }
  report["checks"] = checks;
  report["pass"] = ok;
  print_table(std::cout, table);
  if (!g.out.empty()) emit(g.out, [&](std::ostream& out) { out << report.dump(2) << '\n'; });
  return ok ? kOk : kVerifyFailed;
}

struct ExperimentFlags {
  std::string n, d, lambda, A, tail_A, replicates, sampler, burn_in, exact_cap, eps, chain_budget;
  bool diameter = false, mixing = false, no_estimate = false, phase = false;
};

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& f) {
  cmd->add_option("--n", f.n, "Comma-separated vertex counts (default 1000)");
  cmd->add_option("--d", f.d, "Comma-separated degrees; 'n-1' selects the complete graph (default 3)");
  cmd->add_option("--lambda", f.lambda, "Comma-separated critical-window parameters (default 0)");
  cmd->add_option("--A", f.A, "Window constant A (default 100)");
  cmd->add_option("--tail-A", f.tail_A, "Comma-separated A values for tail fractions (default 4,100)");
  cmd->add_option("--replicates", f.replicates, "Replicates per grid point (default 10)");
  cmd->add_option("--sampler", f.sampler, "auto, rejection, chain, repaired (default auto)");
  cmd->add_option("--burn-in", f.burn_in, "Chain proposals (default 50*n*d)");
  cmd->add_option("--chain-budget", f.chain_budget, "Largest 50*n*d for a circulant-start chain (default 2e7)");
  cmd->add_option("--exact-cap", f.exact_cap, "Largest component with exact mixing time (default 5000)");
  cmd->add_option("--eps", f.eps, "Mixing threshold (default 0.25)");
  cmd->add_flag("--diameter", f.diameter, "Measure the diameter of the largest component");
  cmd->add_flag("--mixing", f.mixing, "Measure the mixing time of the largest component");
  cmd->add_flag("--no-mixing-estimate", f.no_estimate, "Skip mixing above --exact-cap instead of estimating");
  cmd->add_flag("--phase", f.phase, "Record the two-phase exploration fields (mu = -lambda)");
}

ExperimentConfig build_config(Globals& g, const ExperimentFlags& f) {
  ExperimentConfig c = g.config.empty() ? ExperimentConfig{} : load_config(g.config);
  auto set = [&](const char* key, const std::string& v) {
    if (!v.empty()) apply_config_value(c, key, v);
  };
  set("n", f.n);
  set("d", f.d);
  set("lambda", f.lambda);
  set("A", f.A);
  set("tail_A", f.tail_A);
  set("replicates", f.replicates);
  set("sampler", f.sampler);
  set("burn_in", f.burn_in);
  set("chain_budget", f.chain_budget);
  set("exact_cap", f.exact_cap);
  set("eps", f.eps);
  if (f.diameter) c.diameter = true;
  if (f.mixing) c.mixing = true;
  if (f.no_estimate) c.mixing_estimate = false;
  if (f.phase) c.phase = true;
  if (g.seed) {
    c.seed = *g.seed;
  } else if (g.config.empty()) {
    c.seed = resolve_seed(g);
  }
  c.threads = g.threads;
  if (!g.out.empty()) c.out_dir = g.out;
  return c;
}

void write_rows(const Globals& g, const std::vector<ResultRow>& rows) {
  if (g.format == "csv") {
    write_rows_csv(std::cout, rows);
  } else {
    write_rows_jsonl(std::cout, rows);
  }
}

int cmd_scaling(Globals& g, const ExperimentFlags& f) {
  const ExperimentConfig config = build_config(g, f);
  config.validate();
  const std::string started = utc_timestamp();
  const ExperimentResult result = scaling_study(config);
  json manifest = make_manifest(config, result.summaries, started, utc_timestamp());
  json tails = json::array();
  for (const PointSummary& s : result.summaries) {
    std::vector<int> l1;
    for (const ResultRow& r : result.rows) {
      if (r.point == s.point) l1.push_back(r.L1);
    }
    if (l1.empty()) continue;
    for (double A : config.tail_A) {
      const ProportionCheck t = tail_check(l1, s.point.n, A);
      tails.push_back({{"n", s.point.n}, {"d", s.point.d}, {"lambda", s.point.lambda}, {"A", A},
                       {"fraction_outside", t.estimate.fraction}, {"wilson_high", t.estimate.wilson_high},
                       {"bound", t.bound}, {"vacuous", t.vacuous}, {"pass", t.pass}});
    }
  }
  manifest["tails"] = tails;
  if (!config.out_dir.empty()) {
    persist(config.out_dir, result.rows, manifest);
  } else {
    write_rows(g, result.rows);
  }
  std::vector<std::vector<std::string>> table{{"n", "d", "lambda", "sampler", "rows", "median L1/n^(2/3)",
                                               "median diam/n^(1/3)", "median tmix/n", "error"}};
  for (const PointSummary& s : result.summaries) {
    table.push_back({std::to_string(s.point.n), std::to_string(s.point.d), fmt(s.point.lambda), s.sampler,
                     std::to_string(s.rows), fmt(s.L1_scaled.median),
                     s.diam_scaled.count ? fmt(s.diam_scaled.median) : "-",
                     s.tmix_scaled.count ? fmt(s.tmix_scaled.median) : "-", s.error.value_or("")});
  }
  print_table(std::cerr, table);
  bool any_error = false;
  for (const PointSummary& s : result.summaries) any_error = any_error || s.error.has_value();
  return any_error ? kPrecondition : kOk;
}

int cmd_phases(Globals& g, int n, int d, double mu, double A, int replicates, const std::string& sampler) {
  const std::uint64_t seed = resolve_seed(g);
  SamplerPolicy policy;
  policy.kind = parse_sampler_kind(sampler);
  const PhaseReport report = phase_statistics(n, d, mu, A, replicates, seed, g.threads, policy);
  std::vector<std::vector<std::string>> table{{"event", "fraction", "wilson_high", "bound", "verdict"}};
  json checks = json::array();
  for (const ProportionCheck& c : report.checks) {
    const std::string verdict = c.vacuous ? "vacuous" : (c.pass ? "PASS" : "FAIL");
    table.push_back({c.name, std::to_string(c.estimate.successes) + "/" + std::to_string(c.estimate.trials),
                     fmt(c.estimate.wilson_high), fmt(c.bound), verdict});
    checks.push_back({{"event", c.name}, {"hits", c.estimate.successes}, {"trials", c.estimate.trials},
                      {"fraction", c.estimate.fraction}, {"wilson_high", c.estimate.wilson_high},
                      {"bound", c.bound}, {"vacuous", c.vacuous}, {"pass", c.pass}});
  }
  table.push_back({"gain_single_component", report.gain_single_component ? "yes" : "no", "", "", ""});
  if (!g.out.empty()) {
    ExperimentConfig config;
    config.n_values = {n};
    config.d_values = {d};
    config.lambda_values = {-mu};
    config.A = A;
    config.replicates = replicates;
    config.seed = seed;
    config.policy = policy;
    config.phase = true;
    config.threads = g.threads;
    config.out_dir = g.out;
    json manifest = make_manifest(config, summarize(config, report.rows), utc_timestamp(), utc_timestamp());
    manifest["phase_checks"] = checks;
    persist(g.out, report.rows, manifest);
  } else {
    write_rows(g, report.rows);
  }
  print_table(std::cerr, table);
  return kOk;
}

int cmd_enumerate(Globals& g, int n, int d, const std::string& method, int cap) {
  std::vector<RegularGraph> graphs;
  if (method == "pairings") {
    graphs = enumerate_regular_by_pairings(n, d, std::max(20, cap * d));
  } else {
    graphs = enumerate_regular(n, d, cap);
  }
  emit(g.out, [&](std::ostream& out) {
    if (g.format == "csv") out << "graph,u,v\n";
    for (std::size_t i = 0; i < graphs.size(); ++i) {
      if (g.format == "csv") {
        for (const Edge& e : graphs[i].edges()) out << i << ',' << e.u << ',' << e.v << '\n';
      } else {
        json edges = json::array();
        for (const Edge& e : graphs[i].edges()) edges.push_back({e.u, e.v});
        out << json{{"index", i}, {"n", n}, {"d", d}, {"edges", edges}}.dump() << '\n';
      }
    }
  });
  std::cerr << graphs.size() << " graph(s)\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Critical percolation on random regular graphs: sampling, exploration, metrics and experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());
  Globals g;
  app.add_option("--seed", g.seed, "Master seed; generated and printed to stderr when omitted");
  app.add_option("--threads", g.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output file (directory for scaling and phases); stdout when omitted");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "jsonl"}))->capture_default_str();
  app.add_option("--config", g.config, "key=value experiment config file (flags override it)")
      ->check(CLI::ExistingFile);

  GraphSource sample_src;
  std::optional<std::uint64_t> burn_in;
  auto* sample = app.add_subcommand("sample", "Sample a random d-regular graph and emit its edges");
  sample->fallthrough();
  add_graph_source(sample, sample_src, true);
  sample->add_option("--burn-in", burn_in, "Chain proposals (default 50*n*d)");

  GraphSource perc_src;
  Retention perc_r;
  bool perc_edges = false;
  auto* perc = app.add_subcommand("percolate", "Bond percolation on a sampled or loaded graph");
  perc->fallthrough();
  add_graph_source(perc, perc_src, false);
  add_retention(perc, perc_r, false);
  perc->add_flag("--edges", perc_edges, "Include the retained edge list");

  GraphSource exp_src;
  Retention exp_r;
  std::optional<long> t_max;
  long every = 1;
  bool identity = false;
  auto* explore = app.add_subcommand("explore", "Run the exploration process and dump its trajectory");
  explore->fallthrough();
  add_graph_source(explore, exp_src, false);
  add_retention(explore, exp_r, true);
  explore->add_option("--t-max", t_max, "Step limit (default: run until every vertex is explored)");
  explore->add_option("--every", every, "Keep every k-th step (fresh and final steps always kept)")->capture_default_str();
  explore->add_flag("--identity", identity, "Identity label permutations instead of random ones");

  GraphSource met_src;
  Retention met_r;
  int met_k = 1, met_reps = 1;
  MixingOptions met_mix;
  bool met_no_estimate = false, met_skip_diam = false, met_skip_mix = false;
  auto* metrics = app.add_subcommand("metrics", "Component sizes, diameters and mixing times");
  metrics->fallthrough();
  add_graph_source(metrics, met_src, false);
  add_retention(metrics, met_r, false);
  metrics->add_option("--k", met_k, "Number of largest components")->capture_default_str();
  metrics->add_option("--replicates", met_reps, "Independent replicates")->capture_default_str();
  metrics->add_option("--eps", met_mix.eps, "Mixing threshold")->capture_default_str();
  metrics->add_option("--exact-cap", met_mix.exact_cap, "Largest component with exact mixing time")->capture_default_str();
  metrics->add_flag("--no-mixing-estimate", met_no_estimate, "Report 'capped' above --exact-cap instead of estimating");
  metrics->add_flag("--skip-diameter", met_skip_diam, "Do not compute diameters");
  metrics->add_flag("--skip-mixing", met_skip_mix, "Do not compute mixing times");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run the lemma verification suites");
  verify->fallthrough();
  verify->add_option("--suite", va.suite, "switchings, frontier, growth, edgeprob or all")
      ->check(CLI::IsMember({"switchings", "frontier", "growth", "edgeprob", "all"}))
      ->capture_default_str();
  verify->add_option("--n", va.n, "Vertices (defaults: switchings 200, frontier/growth 100000, edgeprob 6)");
  verify->add_option("--d", va.d, "Degree (default 3)");
  verify->add_option("--trials", va.trials, "Trials or trajectories")->capture_default_str();
  verify->add_option("--mu", va.mu, "Subcritical shift for frontier and growth")->capture_default_str();
  verify->add_option("--delta", va.delta, "Growth tolerance delta")->capture_default_str();
  verify->add_option("--samples", va.samples, "Samples for the edge-probability check")->capture_default_str();

  ExperimentFlags sf;
  auto* scaling = app.add_subcommand("scaling", "Replicated scaling study over an (n, d, lambda) grid");
  scaling->fallthrough();
  add_experiment_flags(scaling, sf);

  int ph_n = 1000000, ph_d = 3, ph_reps = 100;
  double ph_mu = 0.0, ph_A = 10000.0;
  std::string ph_sampler = "auto";
  auto* phases = app.add_subcommand("phases", "Two-phase exploration statistics");
  phases->fallthrough();
  phases->add_option("--n", ph_n, "Vertices")->capture_default_str();
  phases->add_option("--d", ph_d, "Degree")->capture_default_str();
  phases->add_option("--mu", ph_mu, "Subcritical shift mu >= 0")->capture_default_str();
  phases->add_option("--A", ph_A, "Window constant A")->capture_default_str();
  phases->add_option("--replicates", ph_reps, "Replicates")->capture_default_str();
  phases->add_option("--sampler", ph_sampler, "Sampler")->capture_default_str();

  int en_n = 0, en_d = 0, en_cap = 8;
  std::string en_method = "backtrack";
  auto* enumerate = app.add_subcommand("enumerate", "List every labelled d-regular graph on n vertices");
  enumerate->fallthrough();
  enumerate->add_option("--n", en_n, "Vertices")->required();
  enumerate->add_option("--d", en_d, "Degree")->required();
  enumerate->add_option("--method", en_method, "backtrack or pairings")
      ->check(CLI::IsMember({"backtrack", "pairings"}))
      ->capture_default_str();
  enumerate->add_option("--cap", en_cap, "Largest n accepted")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    if (dynamic_cast<const CLI::ExtrasError*>(&e) != nullptr) suggest_flags(app, argc, argv);
    return kUsage;
  }

  try {
    if (*sample) return cmd_sample(g, sample_src, burn_in);
    if (*perc) return cmd_percolate(g, perc_src, perc_r, perc_edges);
    if (*explore) return cmd_explore(g, exp_src, exp_r, t_max, every, identity);
    if (*metrics) {
      return cmd_metrics(g, met_src, met_r, met_k, met_reps, met_mix, met_no_estimate, met_skip_diam,
                         met_skip_mix);
    }
    if (*verify) return cmd_verify(g, va);
    if (*scaling) return cmd_scaling(g, sf);
    if (*phases) return cmd_phases(g, ph_n, ph_d, ph_mu, ph_A, ph_reps, ph_sampler);
    if (*enumerate) return cmd_enumerate(g, en_n, en_d, en_method, en_cap);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kPrecondition;
  }
  return kUsage;
}
