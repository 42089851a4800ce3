// qite: quantum-inspired imaginary-time Ising/QUBO solver CLI.
// Subcommands: generate, solve, sweep, oracle, entropy-report.
// Exit codes: 0 ok, 2 config error, 3 numerical error, 4 I/O error.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qite/errors.hpp"
#include "qite/io.hpp"
#include "qite/oracle.hpp"
#include "qite/ordering.hpp"
#include "qite/solver.hpp"
#include "qite/version.hpp"

using nlohmann::json;
using namespace qite;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;
constexpr int exit_io = 4;

std::string join_argv(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

void write_manifest(const std::string& command, const json& config,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs,
                    const json& seeds, const std::string& path) {
  json m;
  m["command"] = command;
  m["version"] = version_string;
  m["config"] = config;
  json in = json::array();
  for (const std::string& p : inputs) {
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64_file(p)));
    in.push_back({{"path", p}, {"fnv1a64", hex}});
  }
  m["inputs"] = std::move(in);
  m["outputs"] = outputs;
  m["seeds"] = seeds;
  write_text_file(path, m.dump(2) + "\n");
}

std::vector<int> parse_int_list(const std::string& spec) {
  std::vector<int> out;
  std::stringstream ss(spec);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) continue;
    out.push_back(std::stoi(cell));
  }
  if (out.empty()) throw config_error("empty list: '" + spec + "'");
  return out;
}

std::vector<std::string> parse_str_list(const std::string& spec) {
  std::vector<std::string> out;
  std::stringstream ss(spec);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty()) out.push_back(cell);
  }
  if (out.empty()) throw config_error("empty list: '" + spec + "'");
  return out;
}

struct SolveFlags {
  int chi = 16;
  double sv_cutoff = 1e-12;
  std::string arch = "tsn";
  std::string ordering = "spectral";
  double dtau = 1.0;
  int steps = 30;
  int samples = 1000;
  double stop_ratio = 1e-3;
  std::uint64_t seed = 0;
  std::uint64_t ordering_seed = 0;
};

void add_solve_flags(CLI::App* cmd, SolveFlags& f) {
  cmd->add_option("--chi", f.chi, "maximum bond dimension");
  cmd->add_option("--sv-cutoff", f.sv_cutoff, "relative singular value cutoff");
  cmd->add_option("--arch", f.arch, "SWAP network architecture (rsn|tsn)");
  cmd->add_option("--ordering", f.ordering,
                  "qubit ordering (spectral|shuffled|hierarchical|identity)");
  cmd->add_option("--dtau", f.dtau, "imaginary time step");
  cmd->add_option("--steps", f.steps, "maximum optimization steps");
  cmd->add_option("--samples", f.samples, "samples per step");
  cmd->add_option("--stop-ratio", f.stop_ratio,
                  "variance stopping threshold factor");
  cmd->add_option("--seed", f.seed, "sampling seed");
  cmd->add_option("--ordering-seed", f.ordering_seed,
                  "seed for the shuffled ordering");
}

SolverConfig config_from_flags(const SolveFlags& f, const Problem& problem) {
  SolverConfig cfg;
  cfg.truncation.chi_max = f.chi;
  cfg.truncation.sv_cutoff = f.sv_cutoff;
  cfg.arch = architecture_from_name(f.arch);
  cfg.ordering = ordering_from_name(f.ordering);
  cfg.dtau = f.dtau;
  cfg.n_step_max = f.steps;
  cfg.n_samples = f.samples;
  cfg.stop_ratio = f.stop_ratio;
  cfg.seed = f.seed;
  cfg.ordering_seed = f.ordering_seed;
  if (cfg.ordering == OrderingStrategy::hierarchical) {
    if (!problem.portfolio)
      throw config_error(
          "hierarchical ordering is only defined for portfolio problems");
    const PortfolioSpec& s = *problem.portfolio;
    cfg.ordering_override = hierarchical_order(s.n_assets, s.n_time, s.n_bits);
  }
  return cfg;
}

int cmd_generate(const std::string& command, const std::string& kind, int n,
                 double p, std::uint64_t seed, const std::string& out,
                 bool reference_brute, const std::string& csv, int na, int nt,
                 int nq, int window, double gamma, double nu, double rho,
                 double funds) {
  json problem;
  std::vector<std::string> inputs;
  std::optional<double> ref;

  auto brute_ref = [&](const IsingModel& m) -> std::optional<double> {
    if (!reference_brute) return std::nullopt;
    if (m.n > 24)
      throw config_error("--reference-brute needs at most 24 qubits");
    return brute_force_ground(m).first;
  };

  if (kind == "3reg" || kind == "er" || kind == "sk") {
    if (n < 1) throw config_error("generate needs --n");
    WeightedGraph g = kind == "3reg" ? gen_3regular(n, seed)
                      : kind == "er" ? gen_er(n, p, seed)
                                     : gen_sk(n, seed);
    ref = brute_ref(maxcut_ising(g));
    problem = maxcut_problem_json(g, ref);
  } else if (kind == "portfolio") {
    if (csv.empty()) throw config_error("portfolio generation needs --csv");
    if (na < 1 || nt < 1 || nq < 1)
      throw config_error("portfolio generation needs --na, --nt, --nq");
    ReturnsData data = ingest_prices(csv, nt, window);
    inputs.push_back(csv);
    if (static_cast<int>(data.assets.size()) < na)
      throw config_error("CSV has fewer assets than --na");
    PortfolioSpec spec;
    spec.n_assets = na;
    spec.n_time = nt;
    spec.n_bits = nq;
    spec.funds = funds;
    spec.risk_aversion = gamma;
    spec.transaction_cost = nu;
    spec.budget_penalty = rho;
    for (int t = 0; t < nt; ++t) {
      spec.mu.push_back(
          std::vector<double>(data.mu[t].begin(), data.mu[t].begin() + na));
      std::vector<std::vector<double>> block(na, std::vector<double>(na));
      for (int a = 0; a < na; ++a)
        for (int b = 0; b < na; ++b) block[a][b] = data.sigma[t][a][b];
      spec.sigma.push_back(std::move(block));
    }
    ref = brute_ref(qubo_to_ising(build_portfolio_qubo(spec)));
    problem = portfolio_problem_json(spec, ref);
  } else {
    throw config_error("unknown kind '" + kind +
                       "' (want 3reg, er, sk or portfolio)");
  }

  write_text_file(out, problem.dump(2) + "\n");
  write_manifest(command, {{"kind", kind}, {"n", n}, {"p", p}}, inputs, {out},
                 {{"seed", seed}}, out + ".manifest.json");
  std::cout << "wrote " << out << "\n";
  return exit_ok;
}

int cmd_solve(const std::string& command, const std::string& problem_path,
              const SolveFlags& flags, const std::string& out,
              std::string steps_csv, const std::string& dump_schedule) {
  Problem problem = load_problem(problem_path);
  SolverConfig cfg = config_from_flags(flags, problem);
  cfg.validate(problem.ising.n);  // fail before any file is written

  if (!dump_schedule.empty()) {
    GateSchedule sched = cfg.arch == Architecture::rectangular
                             ? rectangular_schedule(problem.ising.n)
                             : triangular_schedule(problem.ising.n);
    write_text_file(dump_schedule, schedule_to_json(sched).dump(2) + "\n");
  }

  SolveReport report =
      solve(problem.ising, cfg, problem.reference_cost);

  json j =
      report_to_json(report, cfg, problem_path, problem.type, problem.ising.n);
  if (problem.portfolio && !report.failed) {
    const PortfolioSpec& spec = *problem.portfolio;
    auto omega = decode_positions(spec, report.best_bits);
    BudgetMetrics budget = budget_metrics(omega);
    json pj;
    pj["budget_mean"] = budget.mean;
    pj["budget_min"] = budget.min_t;
    pj["budget_max"] = budget.max_t;
    try {
      pj["sharpe_ratio"] = sharpe_ratio(omega, spec.mu, spec.sigma);
    } catch (const config_error&) {
      pj["sharpe_ratio"] = nullptr;  // zero-risk portfolio
    }
    j["portfolio"] = std::move(pj);
  }
  write_text_file(out, j.dump(2) + "\n");

  if (steps_csv.empty()) {
    steps_csv = out;
    std::size_t dot = steps_csv.rfind('.');
    if (dot != std::string::npos) steps_csv.resize(dot);
    steps_csv += "_steps.csv";
  }
  write_text_file(steps_csv, records_to_csv(report));

  std::vector<std::string> outputs{out, steps_csv};
  if (!dump_schedule.empty()) outputs.push_back(dump_schedule);
  write_manifest(command, config_to_json(cfg), {problem_path}, outputs,
                 {{"seed", cfg.seed}, {"ordering_seed", cfg.ordering_seed}},
                 out + ".manifest.json");

  if (report.failed) {
    std::cerr << "solve failed: " << report.stop_reason << "\n";
    return exit_numerical;
  }
  std::cout << "best cost " << format_g17(report.best_cost);
  if (report.ar) std::cout << "  AR " << format_g17(*report.ar);
  std::cout << "\n";
  return exit_ok;
}

struct SweepTask {
  std::size_t problem_idx;
  int chi;
  std::string arch;
  std::string ordering;
  std::uint64_t seed;
};

struct SweepOutcome {
  bool failed = true;
  double best_cost = 0.0;
  std::optional<double> epsilon;
  int steps_run = 0;
  double mean_step_ms = 0.0;
};

int cmd_sweep(const std::string& command,
              const std::vector<std::string>& problem_paths,
              const SolveFlags& base, const std::string& chi_list,
              const std::string& arch_list, const std::string& ordering_list,
              const std::string& seed_list, const std::string& out) {
  std::vector<int> chis = parse_int_list(chi_list);
  std::vector<std::string> archs = parse_str_list(arch_list);
  std::vector<std::string> orderings = parse_str_list(ordering_list);
  std::vector<int> seeds = parse_int_list(seed_list);

  std::vector<Problem> problems;
  std::vector<std::optional<double>> references;
  for (const std::string& path : problem_paths) {
    problems.push_back(load_problem(path));
    const Problem& p = problems.back();
    std::optional<double> ref = p.reference_cost;
    if (!ref && p.ising.n <= 20) ref = brute_force_ground(p.ising).first;
    references.push_back(ref);
  }

  std::vector<SweepTask> tasks;
  for (std::size_t pi = 0; pi < problems.size(); ++pi)
    for (int chi : chis)
      for (const auto& arch : archs)
        for (const auto& ordering : orderings)
          for (int seed : seeds)
            tasks.push_back({pi, chi, arch, ordering, std::uint64_t(seed)});

  // worker pool over independent runs; per-cell determinism does not
  // depend on the thread count
  std::vector<SweepOutcome> outcomes(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const SweepTask& t = tasks[i];
      SweepOutcome& o = outcomes[i];
      try {
        SolveFlags f = base;
        f.chi = t.chi;
        f.arch = t.arch;
        f.ordering = t.ordering;
        f.seed = t.seed;
        f.ordering_seed = t.seed;
        SolverConfig cfg = config_from_flags(f, problems[t.problem_idx]);
        SolveReport rep = solve(problems[t.problem_idx].ising, cfg,
                                references[t.problem_idx]);
        o.failed = rep.failed;
        o.best_cost = rep.best_cost;
        o.epsilon = rep.epsilon;
        o.steps_run = rep.steps_run;
        double total_ms = 0.0;
        for (const StepRecord& r : rep.records) total_ms += r.wall_ms;
        o.mean_step_ms = rep.steps_run > 0 ? total_ms / rep.steps_run : 0.0;
      } catch (const std::exception&) {
        o.failed = true;  // recorded in the row, sweep continues
      }
    }
  };

  unsigned n_threads = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("QITE_THREADS")) {
    int cap = std::atoi(env);
    if (cap < 1) throw config_error("QITE_THREADS must be >= 1");
    n_threads = unsigned(cap);
  }
  n_threads = std::max(1u, std::min<unsigned>(n_threads, tasks.size()));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < n_threads; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  // one row per (instance, chi, arch, ordering), aggregated over seeds
  std::string csv =
      "problem,chi,arch,ordering,n_seeds,n_failed,mean_epsilon,std_epsilon,"
      "mean_best_cost,mean_steps,mean_step_ms\n";
  for (std::size_t pi = 0; pi < problems.size(); ++pi)
    for (int chi : chis)
      for (const auto& arch : archs)
        for (const auto& ordering : orderings) {
          std::vector<double> eps, costs, steps_v, step_ms;
          int failed = 0;
          for (std::size_t i = 0; i < tasks.size(); ++i) {
            const SweepTask& t = tasks[i];
            if (t.problem_idx != pi || t.chi != chi || t.arch != arch ||
                t.ordering != ordering)
              continue;
            const SweepOutcome& o = outcomes[i];
            if (o.failed) {
              ++failed;
              continue;
            }
            if (o.epsilon) eps.push_back(*o.epsilon);
            costs.push_back(o.best_cost);
            steps_v.push_back(o.steps_run);
            step_ms.push_back(o.mean_step_ms);
          }
          auto mean = [](const std::vector<double>& v) {
            if (v.empty()) return std::nan("");
            double m = 0.0;
            for (double x : v) m += x;
            return m / v.size();
          };
          auto stdev = [&](const std::vector<double>& v) {
            if (v.size() < 2) return std::nan("");
            double m = mean(v), acc = 0.0;
            for (double x : v) acc += (x - m) * (x - m);
            return std::sqrt(acc / (v.size() - 1));
          };
          csv += problem_paths[pi] + "," + std::to_string(chi) + "," + arch +
                 "," + ordering + "," + std::to_string(seeds.size()) + "," +
                 std::to_string(failed) + "," + format_g17(mean(eps)) + "," +
                 format_g17(stdev(eps)) + "," + format_g17(mean(costs)) + "," +
                 format_g17(mean(steps_v)) + "," + format_g17(mean(step_ms)) +
                 "\n";
        }
  write_text_file(out, csv);

  json seeds_j = json::array();
  for (int s : seeds) seeds_j.push_back(s);
  write_manifest(command,
                 {{"chi", chi_list},
                  {"arch", arch_list},
                  {"ordering", ordering_list},
                  {"dtau", base.dtau},
                  {"steps", base.steps},
                  {"samples", base.samples}},
                 problem_paths, {out}, {{"seeds", seeds_j}},
                 out + ".manifest.json");
  std::cout << "wrote " << out << " (" << tasks.size() << " runs)\n";
  return exit_ok;
}

int cmd_oracle(const std::string& command, const std::string& problem_path,
               const std::string& mode, double dtau, int steps,
               const std::string& out) {
  Problem problem = load_problem(problem_path);
  json j;
  if (mode == "ground") {
    auto [cost, bits] = brute_force_ground(problem.ising);
    std::string bitstr;
    for (std::uint8_t b : bits) bitstr.push_back(b ? '1' : '0');
    j["cost"] = cost;
    j["bits"] = bitstr;
  } else if (mode == "ite") {
    auto traj = dense_ite(problem.ising, dtau, steps, true);
    json energies = json::array();
    for (const DenseState& st : traj)
      energies.push_back(dense_energy(problem.ising, st));
    j["energies"] = std::move(energies);
    j["dtau"] = dtau;
  } else {
    throw config_error("oracle mode must be 'ground' or 'ite'");
  }
  std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_file(out, text);
    write_manifest(command, {{"mode", mode}}, {problem_path}, {out},
                   json::object(), out + ".manifest.json");
  }
  return exit_ok;
}

int cmd_entropy_report(const std::string& command,
                       const std::vector<std::string>& report_paths,
                       const std::string& out) {
  std::size_t bonds_max = 0;
  std::vector<std::vector<json>> all;  // records per report
  for (const std::string& path : report_paths) {
    json rep;
    try {
      rep = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
      throw io_error("cannot parse report " + path + ": " + e.what());
    }
    if (!rep.contains("records") || rep["records"].empty())
      throw io_error("report " + path + " has no step records");
    std::vector<json> rows;
    for (const json& r : rep["records"]) {
      if (!r.contains("entropies") || !r.contains("cumulative_entanglement"))
        throw io_error("report " + path + " is missing entropy records");
      bonds_max = std::max(bonds_max, r["entropies"].size());
      rows.push_back(r);
    }
    all.push_back(std::move(rows));
  }

  std::string csv = "report,step";
  for (std::size_t b = 1; b <= bonds_max; ++b) csv += ",S" + std::to_string(b);
  csv += ",A\n";
  for (std::size_t ri = 0; ri < all.size(); ++ri) {
    for (const json& r : all[ri]) {
      csv += report_paths[ri] + "," + std::to_string(r["step"].get<int>());
      const json& ent = r["entropies"];
      for (std::size_t b = 0; b < bonds_max; ++b)
        csv += "," + (b < ent.size() ? format_g17(ent[b].get<double>())
                                     : std::string());
      csv += "," + format_g17(r["cumulative_entanglement"].get<double>());
      csv += "\n";
    }
  }
  write_text_file(out, csv);
  write_manifest(command, json::object(), report_paths, {out}, json::object(),
                 out + ".manifest.json");
  std::cout << "wrote " << out << "\n";
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(version_string) +
               " - MPS imaginary-time QUBO/Ising solver"};
  app.require_subcommand(1);
  const std::string command = join_argv(argc, argv);

  auto* gen = app.add_subcommand("generate", "generate a problem instance");
  std::string g_kind, g_out = "problem.json", g_csv;
  int g_n = 0, g_na = 0, g_nt = 0, g_nq = 1, g_window = 1;
  double g_p = 0.5, g_gamma = 1.0, g_nu = 0.0, g_rho = 0.0, g_funds = 0.0;
  std::uint64_t g_seed = 0;
  bool g_ref = false;
  gen->add_option("kind", g_kind, "3reg|er|sk|portfolio")->required();
  gen->add_option("--n", g_n, "vertex count (graph kinds)");
  gen->add_option("--p", g_p, "ER edge probability");
  gen->add_option("--seed", g_seed, "generator seed");
  gen->add_option("--out", g_out, "output problem path");
  gen->add_flag("--reference-brute", g_ref,
                "embed the brute-force optimum as reference_cost");
  gen->add_option("--csv", g_csv, "price CSV (portfolio)");
  gen->add_option("--na", g_na, "assets (portfolio)");
  gen->add_option("--nt", g_nt, "time steps (portfolio)");
  gen->add_option("--nq", g_nq, "bits per position (portfolio)");
  gen->add_option("--window", g_window, "trailing window in price rows");
  gen->add_option("--gamma", g_gamma, "risk aversion");
  gen->add_option("--nu", g_nu, "proportional transaction cost");
  gen->add_option("--rho", g_rho, "budget penalty");
  gen->add_option("--funds", g_funds, "total funds K (0 = 2^nq - 1)");

  auto* sol = app.add_subcommand("solve", "run the MPS solver on a problem");
  std::string s_problem, s_out = "report.json", s_csv, s_sched;
  SolveFlags s_flags;
  sol->add_option("problem", s_problem, "problem JSON path")->required();
  sol->add_option("--out", s_out, "report JSON path");
  sol->add_option("--steps-csv", s_csv, "per-step CSV path");
  sol->add_option("--dump-schedule", s_sched, "write the gate schedule JSON");
  add_solve_flags(sol, s_flags);

  auto* swp = app.add_subcommand("sweep", "grid of solver runs, aggregated");
  std::vector<std::string> w_problems;
  std::string w_chi = "8", w_arch = "tsn", w_ordering = "spectral",
              w_seeds = "0", w_out = "sweep.csv";
  SolveFlags w_flags;
  swp->add_option("problems", w_problems, "problem JSON paths")->required();
  swp->add_option("--chi", w_chi, "comma list of bond dimensions");
  swp->add_option("--arch", w_arch, "comma list of architectures");
  swp->add_option("--ordering", w_ordering, "comma list of orderings");
  swp->add_option("--seeds", w_seeds, "comma list of seeds");
  swp->add_option("--out", w_out, "aggregate CSV path");
  swp->add_option("--dtau", w_flags.dtau, "imaginary time step");
  swp->add_option("--steps", w_flags.steps, "maximum steps");
  swp->add_option("--samples", w_flags.samples, "samples per step");
  swp->add_option("--stop-ratio", w_flags.stop_ratio, "variance threshold");
  swp->add_option("--sv-cutoff", w_flags.sv_cutoff, "singular value cutoff");

  auto* orc = app.add_subcommand("oracle", "ground truth for test fixtures");
  std::string o_problem, o_mode = "ground", o_out;
  double o_dtau = 0.1;
  int o_steps = 20;
  orc->add_option("problem", o_problem, "problem JSON path")->required();
  orc->add_option("--mode", o_mode, "ground|ite");
  orc->add_option("--dtau", o_dtau, "imaginary time step (ite)");
  orc->add_option("--steps", o_steps, "steps (ite)");
  orc->add_option("--out", o_out, "output path (stdout when omitted)");

  auto* ent = app.add_subcommand("entropy-report",
                                 "per-bond entropy matrix from reports");
  std::vector<std::string> e_reports;
  std::string e_out = "entropy.csv";
  ent->add_option("reports", e_reports, "report JSON paths")->required();
  ent->add_option("--out", e_out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? exit_ok : exit_config;
  }

  try {
    if (*gen)
      return cmd_generate(command, g_kind, g_n, g_p, g_seed, g_out, g_ref,
                          g_csv, g_na, g_nt, g_nq, g_window, g_gamma, g_nu,
                          g_rho, g_funds);
    if (*sol)
      return cmd_solve(command, s_problem, s_flags, s_out, s_csv, s_sched);
    if (*swp)
      return cmd_sweep(command, w_problems, w_flags, w_chi, w_arch, w_ordering,
                       w_seeds, w_out);
    if (*orc) return cmd_oracle(command, o_problem, o_mode, o_dtau, o_steps,
                                o_out);
    if (*ent) return cmd_entropy_report(command, e_reports, e_out);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return exit_numerical;
  } catch (const io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return exit_io;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_config;
  }
  return exit_config;
}
