#include "qite/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qite/errors.hpp"
#include "qite/version.hpp"

namespace qite {

using nlohmann::json;

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::uint64_t fnv1a64_file(const std::string& path) {
  return fnv1a64(read_text_file(path));
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open file for writing: " + path);
  out << content;
  if (!out) throw io_error("failed writing file: " + path);
}

nlohmann::json ising_problem_json(const IsingModel& model,
                                  std::optional<double> reference_cost) {
  model.validate();
  json j;
  j["type"] = "ising";
  j["n"] = model.n;
  json couplings = json::array();
  for (const auto& [key, value] : model.couplings)
    couplings.push_back({key.first, key.second, value});
  j["couplings"] = std::move(couplings);
  j["fields"] = model.fields;
  j["constant"] = model.constant;
  if (reference_cost) j["reference_cost"] = *reference_cost;
  return j;
}

nlohmann::json qubo_problem_json(const QuboModel& qubo,
                                 std::optional<double> reference_cost) {
  qubo.validate();
  json j;
  j["type"] = "qubo";
  j["n"] = qubo.n;
  json terms = json::array();
  for (const auto& [key, value] : qubo.q)
    terms.push_back({key.first, key.second, value});
  j["terms"] = std::move(terms);
  j["offset"] = qubo.offset;
  if (reference_cost) j["reference_cost"] = *reference_cost;
  return j;
}

nlohmann::json maxcut_problem_json(const WeightedGraph& graph,
                                   std::optional<double> reference_cost) {
  graph.validate();
  json j;
  j["type"] = "maxcut";
  j["n"] = graph.n;
  json edges = json::array();
  for (const auto& e : graph.edges) edges.push_back({e.u, e.v, e.w});
  j["edges"] = std::move(edges);
  if (reference_cost) j["reference_cost"] = *reference_cost;
  return j;
}

nlohmann::json portfolio_problem_json(const PortfolioSpec& spec,
                                      std::optional<double> reference_cost) {
  spec.validate();
  json s;
  s["n_assets"] = spec.n_assets;
  s["n_time"] = spec.n_time;
  s["n_bits"] = spec.n_bits;
  s["funds"] = spec.funds;
  s["risk_aversion"] = spec.risk_aversion;
  s["transaction_cost"] = spec.transaction_cost;
  s["budget_penalty"] = spec.budget_penalty;
  s["mu"] = spec.mu;
  s["sigma"] = spec.sigma;
  json j;
  j["type"] = "portfolio";
  j["n"] = spec.qubit_count();
  j["spec"] = std::move(s);
  if (reference_cost) j["reference_cost"] = *reference_cost;
  return j;
}

namespace {

IsingModel ising_from_json(const json& j) {
  IsingModel m;
  m.n = j.at("n").get<int>();
  m.fields.assign(m.n, 0.0);
  if (j.contains("fields")) {
    auto f = j.at("fields").get<std::vector<double>>();
    if (static_cast<int>(f.size()) != m.n)
      throw io_error("ising fields length mismatch");
    m.fields = std::move(f);
  }
  m.constant = j.value("constant", 0.0);
  for (const auto& t : j.value("couplings", json::array())) {
    if (!t.is_array() || t.size() != 3)
      throw io_error("ising coupling entries must be [i, j, J]");
    m.add_coupling(t[0].get<int>(), t[1].get<int>(), t[2].get<double>());
  }
  m.validate();
  return m;
}

QuboModel qubo_from_json(const json& j) {
  QuboModel q;
  q.n = j.at("n").get<int>();
  q.offset = j.value("offset", 0.0);
  for (const auto& t : j.value("terms", json::array())) {
    if (!t.is_array() || t.size() != 3)
      throw io_error("qubo term entries must be [i, j, q]");
    int a = t[0].get<int>(), b = t[1].get<int>();
    if (a > b) throw io_error("qubo terms must be upper-triangular");
    q.add(a, b, t[2].get<double>());
  }
  q.validate();
  return q;
}

WeightedGraph graph_from_json(const json& j) {
  WeightedGraph g;
  g.n = j.at("n").get<int>();
  for (const auto& t : j.value("edges", json::array())) {
    if (!t.is_array() || t.size() != 3)
      throw io_error("graph edge entries must be [u, v, w]");
    int u = t[0].get<int>(), v = t[1].get<int>();
    if (u > v) std::swap(u, v);
    g.edges.push_back({u, v, t[2].get<double>()});
  }
  g.validate();
  return g;
}

PortfolioSpec portfolio_from_json(const json& j) {
  const json& s = j.at("spec");
  PortfolioSpec spec;
  spec.n_assets = s.at("n_assets").get<int>();
  spec.n_time = s.at("n_time").get<int>();
  spec.n_bits = s.at("n_bits").get<int>();
  spec.funds = s.value("funds", 0.0);
  spec.risk_aversion = s.value("risk_aversion", 0.0);
  spec.transaction_cost = s.value("transaction_cost", 0.0);
  spec.budget_penalty = s.value("budget_penalty", 0.0);
  spec.mu = s.at("mu").get<std::vector<std::vector<double>>>();
  spec.sigma =
      s.at("sigma").get<std::vector<std::vector<std::vector<double>>>>();
  spec.validate();
  return spec;
}

}  // namespace

Problem problem_from_json(const json& j) {
  Problem p;
  p.type = j.at("type").get<std::string>();
  if (j.contains("reference_cost"))
    p.reference_cost = j.at("reference_cost").get<double>();

  if (p.type == "ising") {
    p.ising = ising_from_json(j);
  } else if (p.type == "qubo") {
    p.qubo = qubo_from_json(j);
    p.ising = qubo_to_ising(*p.qubo);
  } else if (p.type == "maxcut") {
    p.graph = graph_from_json(j);
    p.ising = maxcut_ising(*p.graph);
  } else if (p.type == "portfolio") {
    p.portfolio = portfolio_from_json(j);
    p.qubo = build_portfolio_qubo(*p.portfolio);
    p.ising = qubo_to_ising(*p.qubo);
  } else {
    throw io_error("unknown problem type '" + p.type + "'");
  }
  if (j.contains("n") && j.at("n").get<int>() != p.ising.n)
    throw io_error("problem 'n' does not match its terms");
  return p;
}

Problem load_problem(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw io_error("cannot parse problem JSON " + path + ": " + e.what());
  }
  try {
    return problem_from_json(j);
  } catch (const json::exception& e) {
    throw io_error("bad problem JSON " + path + ": " + e.what());
  }
}

nlohmann::json schedule_to_json(const GateSchedule& schedule) {
  json j;
  j["n"] = schedule.n;
  j["architecture"] = architecture_name(schedule.arch);
  j["depth"] = schedule.depth;
  json slots = json::array();
  for (const GateSlot& s : schedule.slots) {
    slots.push_back({{"layer", s.layer},
                     {"site", s.left_site},
                     {"pair", {s.logical_pair.first, s.logical_pair.second}}});
  }
  j["slots"] = std::move(slots);
  j["final_permutation"] = schedule.final_permutation;
  return j;
}

nlohmann::json config_to_json(const SolverConfig& cfg) {
  json j;
  j["dtau"] = cfg.dtau;
  j["steps"] = cfg.n_step_max;
  j["samples"] = cfg.n_samples;
  j["chi"] = cfg.truncation.chi_max;
  j["sv_cutoff"] = cfg.truncation.sv_cutoff;
  j["arch"] = architecture_name(cfg.arch);
  j["ordering"] = ordering_name(cfg.ordering);
  j["ordering_seed"] = cfg.ordering_seed;
  j["stop_ratio"] = cfg.stop_ratio;
  j["seed"] = cfg.seed;
  return j;
}

nlohmann::json report_to_json(const SolveReport& report,
                              const SolverConfig& cfg,
                              const std::string& problem_path,
                              const std::string& problem_type, int n) {
  json j;
  j["version"] = version_string;
  j["problem"] = {{"path", problem_path}, {"type", problem_type}, {"n", n}};
  j["config"] = config_to_json(cfg);
  j["ordering"] = {
      {"strategy", ordering_name(report.ordering.strategy)},
      {"logical_to_site", report.ordering.logical_to_site},
  };

  std::string bits;
  bits.reserve(report.best_bits.size());
  for (std::uint8_t b : report.best_bits) bits.push_back(b ? '1' : '0');
  j["best"] = {{"cost", report.best_cost}, {"bits", bits}};
  if (report.ar) j["ar"] = *report.ar;
  if (report.epsilon) j["epsilon"] = *report.epsilon;

  // wall-clock times stay out so identical-seed reruns serialize
  // byte-identically; sweep aggregates timings from memory instead
  json records = json::array();
  for (const StepRecord& r : report.records) {
    records.push_back({{"step", r.step},
                       {"energy", r.energy},
                       {"sample_mean", r.sample_mean},
                       {"sample_variance", r.sample_variance},
                       {"best_cost", r.best_cost},
                       {"entropies", r.entropies},
                       {"cumulative_entanglement", r.cumulative_entanglement}});
  }
  j["records"] = std::move(records);
  j["converged"] = report.converged;
  j["failed"] = report.failed;
  j["stop_reason"] = report.stop_reason;
  j["steps_run"] = report.steps_run;
  return j;
}

std::string records_to_csv(const SolveReport& report) {
  std::size_t bonds = 0;
  for (const StepRecord& r : report.records)
    bonds = std::max(bonds, r.entropies.size());
  std::string out = "step,energy,variance,best_cost,cumulative_entanglement";
  for (std::size_t b = 1; b <= bonds; ++b) out += ",S" + std::to_string(b);
  out += "\n";
  for (const StepRecord& r : report.records) {
    out += std::to_string(r.step);
    out += "," + format_g17(r.energy);
    out += "," + format_g17(r.sample_variance);
    out += "," + format_g17(r.best_cost);
    out += "," + format_g17(r.cumulative_entanglement);
    for (std::size_t b = 0; b < bonds; ++b)
      out += "," + (b < r.entropies.size() ? format_g17(r.entropies[b]) : "");
    out += "\n";
  }
  return out;
}

}  // namespace qite
