// Standalone 0/1 solver front end for serialized problems.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgqa/branch_bound.hpp"
#include "sgqa/ilp.hpp"

int main(int argc, char** argv) {
  CLI::App app{"exact 0/1 integer linear program solver"};
  app.require_subcommand(1);

  std::string problem_file;
  double time_limit = 60.0;
  double gap = 0.0;
  bool relax_only = false;

  auto* solve = app.add_subcommand("solve", "solve a problem JSON file");
  solve->add_option("file", problem_file, "problem JSON")->required();
  solve->add_option("--time-limit", time_limit, "seconds");
  solve->add_option("--gap", gap, "acceptable optimality gap");
  solve->add_flag("--relaxation", relax_only, "solve the LP relaxation only");

  CLI11_PARSE(app, argc, argv);

  try {
    std::ifstream in(problem_file);
    if (!in) {
      std::cerr << "error: cannot open " << problem_file << "\n";
      return 1;
    }
    nlohmann::json j;
    in >> j;
    const auto problem = sgqa::IlpProblem::from_json(j);

    if (relax_only) {
      const auto lp = sgqa::solve_lp(problem);
      switch (lp.status) {
        case sgqa::LpStatus::Optimal:
          std::cout << "status: optimal\nobjective: " << lp.objective << "\n";
          for (int v = 0; v < problem.variable_count(); ++v)
            if (lp.values[v] > 1e-9)
              std::cout << problem.variable(v).name << " = " << lp.values[v]
                        << "\n";
          break;
        case sgqa::LpStatus::Infeasible:
          std::cout << "status: infeasible\n";
          break;
        case sgqa::LpStatus::Unbounded:
          std::cout << "status: unbounded\n";
          break;
        default:
          std::cout << "status: numerical failure\n";
          return 1;
      }
      return 0;
    }

    const auto sol = sgqa::solve_ilp(problem, time_limit, gap);
    switch (sol.status) {
      case sgqa::IlpStatus::Optimal:
        std::cout << "status: optimal\n";
        break;
      case sgqa::IlpStatus::Timeout:
        std::cout << "status: timeout"
                  << (sol.has_solution() ? " (best incumbent below)" : "")
                  << "\n";
        break;
      default:
        std::cout << "status: infeasible\n";
        return 0;
    }
    if (sol.has_solution()) {
      std::cout << "objective: " << sol.objective << "\n";
      std::cout << "nodes: " << sol.nodes_explored
                << "  lp iterations: " << sol.lp_iterations << "\n";
      for (int v = 0; v < problem.variable_count(); ++v)
        if (sol.values[v] == 1)
          std::cout << problem.variable(v).name << " = 1\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
