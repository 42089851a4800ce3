#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "qite/problem.hpp"
#include "qite/solver.hpp"
#include "qite/swap_network.hpp"

namespace qite {

// A loaded problem: the Ising form everything solves, plus whatever the
// original formulation carried (graph, QUBO, portfolio spec).
struct Problem {
  std::string type;  // ising | qubo | maxcut | portfolio
  IsingModel ising;
  std::optional<double> reference_cost;
  std::optional<QuboModel> qubo;
  std::optional<WeightedGraph> graph;
  std::optional<PortfolioSpec> portfolio;
};

nlohmann::json ising_problem_json(const IsingModel& model,
                                  std::optional<double> reference_cost);
nlohmann::json qubo_problem_json(const QuboModel& qubo,
                                 std::optional<double> reference_cost);
nlohmann::json maxcut_problem_json(const WeightedGraph& graph,
                                   std::optional<double> reference_cost);
nlohmann::json portfolio_problem_json(const PortfolioSpec& spec,
                                      std::optional<double> reference_cost);

Problem problem_from_json(const nlohmann::json& j);
Problem load_problem(const std::string& path);

nlohmann::json schedule_to_json(const GateSchedule& schedule);

nlohmann::json config_to_json(const SolverConfig& cfg);
nlohmann::json report_to_json(const SolveReport& report,
                              const SolverConfig& cfg,
                              const std::string& problem_path,
                              const std::string& problem_type, int n);
// step,energy,variance,best_cost,A,S1..S{N-1}; floats at 17 significant
// digits so reruns compare byte-identical
std::string records_to_csv(const SolveReport& report);

std::string format_g17(double v);

std::uint64_t fnv1a64(const std::string& bytes);
std::uint64_t fnv1a64_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace qite
