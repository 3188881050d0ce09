#pragma once

// Exact 0/1 maximization: best-first branch and bound on the simplex
// relaxation, plus an exhaustive-enumeration oracle for small instances.
// Branching picks the most fractional variable (ties by name); node
// selection is best bound (ties by creation order). Identical inputs give
// identical outputs.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "sgqa/ilp.hpp"
#include "sgqa/simplex.hpp"

namespace sgqa {

enum class IlpStatus { Optimal, Infeasible, Timeout };

struct IlpSolution {
  IlpStatus status = IlpStatus::Infeasible;
  std::vector<int> values;  // one 0/1 entry per variable when a solution exists
  double objective = 0.0;
  long nodes_explored = 0;
  long lp_iterations = 0;

  bool has_solution() const { return !values.empty(); }
};

namespace detail {

constexpr double kIntTol = 1e-6;
constexpr double kPruneTol = 1e-9;

inline bool lex_smaller(const std::vector<int>& a, const std::vector<int>& b,
                        const std::vector<int>& name_order) {
  for (int idx : name_order) {
    if (a[idx] != b[idx]) return a[idx] < b[idx];
  }
  return false;
}

inline std::vector<int> name_sorted_order(const IlpProblem& p) {
  std::vector<int> order(p.variable_count());
  for (int j = 0; j < p.variable_count(); ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&p](int a, int b) {
    return p.variable(a).name < p.variable(b).name;
  });
  return order;
}

}  // namespace detail

inline IlpSolution solve_ilp(const IlpProblem& problem,
                             double time_limit_seconds = 60.0,
                             double gap = 0.0) {
  using Clock = std::chrono::steady_clock;
  const auto deadline =
      Clock::now() + std::chrono::duration_cast<Clock::duration>(
                         std::chrono::duration<double>(time_limit_seconds));

  IlpSolution result;
  const int n = problem.variable_count();
  if (n == 0) {
    result.status = IlpStatus::Optimal;
    result.objective = 0.0;
    return result;
  }

  SimplexSolver solver(problem);
  const std::vector<int> name_order = detail::name_sorted_order(problem);

  struct Node {
    double bound;
    long id;
    int branch_var;  // -1 when the node is a leaf candidate
    std::vector<std::pair<int, int>> fixings;
  };
  struct NodeLess {
    bool operator()(const Node& a, const Node& b) const {
      if (a.bound != b.bound) return a.bound < b.bound;
      return a.id > b.id;
    }
  };
  std::priority_queue<Node, std::vector<Node>, NodeLess> open;

  bool have_incumbent = false;
  std::vector<int> inc_values;
  double inc_obj = 0.0;
  long next_id = 0;

  auto consider_incumbent = [&](const std::vector<int>& cand) {
    const double obj = [&] {
      std::vector<double> x(cand.begin(), cand.end());
      return problem.objective_of(x);
    }();
    if (!have_incumbent || obj > inc_obj ||
        (obj == inc_obj && detail::lex_smaller(cand, inc_values, name_order))) {
      have_incumbent = true;
      inc_obj = obj;
      inc_values = cand;
    }
  };

  // Solves a node's relaxation; returns false if the node is closed
  // (infeasible, pruned, or finished as an integral incumbent).
  auto evaluate = [&](const std::vector<std::pair<int, int>>& fixings,
                      Node& out) -> bool {
    std::vector<double> lo(n, 0.0), hi(n, 1.0);
    for (const auto& [var, val] : fixings) {
      lo[var] = val;
      hi[var] = val;
    }
    const LpSolution lp = solver.solve(lo, hi);
    result.lp_iterations += lp.iterations;
    ++result.nodes_explored;
    if (lp.status == LpStatus::Infeasible) return false;
    if (lp.status != LpStatus::Optimal)
      throw IlpError("relaxation failed with a non-optimal status");
    if (have_incumbent && lp.objective <= inc_obj + gap + detail::kPruneTol)
      return false;

    int branch_var = -1;
    double most_frac = detail::kIntTol;
    for (int j = 0; j < n; ++j) {
      const double frac = std::min(lp.values[j], 1.0 - lp.values[j]);
      if (frac > most_frac ||
          (branch_var >= 0 && frac == most_frac &&
           problem.variable(j).name < problem.variable(branch_var).name)) {
        branch_var = j;
        most_frac = frac;
      }
    }
    if (branch_var < 0) {
      std::vector<int> rounded(n);
      for (int j = 0; j < n; ++j)
        rounded[j] = lp.values[j] > 0.5 ? 1 : 0;
      std::vector<double> x(rounded.begin(), rounded.end());
      if (!problem.feasible(x, detail::kIntTol))
        throw IlpError("integral relaxation failed the exact feasibility check");
      consider_incumbent(rounded);
      return false;
    }
    out.bound = lp.objective;
    out.branch_var = branch_var;
    out.fixings = fixings;
    out.id = next_id++;
    return true;
  };

  Node root;
  if (evaluate({}, root)) open.push(std::move(root));

  bool timed_out = false;
  while (!open.empty()) {
    if (Clock::now() >= deadline) {
      timed_out = true;
      break;
    }
    Node node = open.top();
    open.pop();
    if (have_incumbent && node.bound <= inc_obj + gap + detail::kPruneTol)
      continue;
    for (int val : {0, 1}) {
      auto fixings = node.fixings;
      fixings.emplace_back(node.branch_var, val);
      Node child;
      if (evaluate(fixings, child)) open.push(std::move(child));
    }
  }

  if (timed_out) {
    result.status = IlpStatus::Timeout;
    if (have_incumbent) {
      result.values = inc_values;
      result.objective = inc_obj;
    }
    return result;
  }
  if (!have_incumbent) {
    result.status = IlpStatus::Infeasible;
    return result;
  }
  result.status = IlpStatus::Optimal;
  result.values = inc_values;
  result.objective = inc_obj;
  return result;
}

// Exhaustive oracle. Enumerates assignments in lexicographic order over the
// name-sorted variable vector, so among equal optima the lexicographically
// smallest assignment wins.
inline IlpSolution brute_force_solve(const IlpProblem& problem) {
  const int n = problem.variable_count();
  if (n > 24)
    throw IlpError("brute force limited to 24 variables, got " +
                   std::to_string(n));
  IlpSolution result;
  if (n == 0) {
    result.status = IlpStatus::Optimal;
    result.objective = 0.0;
    return result;
  }

  const std::vector<int> order = detail::name_sorted_order(problem);
  std::vector<double> x(n, 0.0);
  std::vector<int> assignment(n, 0);
  bool found = false;
  double best = 0.0;
  std::vector<int> best_values;

  const uint64_t limit = 1ull << n;
  for (uint64_t r = 0; r < limit; ++r) {
    for (int i = 0; i < n; ++i) {
      const int bit = static_cast<int>((r >> (n - 1 - i)) & 1ull);
      assignment[order[i]] = bit;
      x[order[i]] = bit;
    }
    if (!problem.feasible(x, detail::kIntTol)) continue;
    const double obj = problem.objective_of(x);
    if (!found || obj > best) {
      found = true;
      best = obj;
      best_values = assignment;
    }
  }
  if (!found) {
    result.status = IlpStatus::Infeasible;
    return result;
  }
  result.status = IlpStatus::Optimal;
  result.values = best_values;
  result.objective = best;
  return result;
}

}  // namespace sgqa
