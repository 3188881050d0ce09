#pragma once

// Maps an optimal assignment back onto question/table elements, checks the
// structural properties every valid support graph must satisfy, and
// computes the per-option feature vector consumed by the ensemble.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgqa/branch_bound.hpp"
#include "sgqa/ilp.hpp"
#include "sgqa/model_builder.hpp"
#include "sgqa/question.hpp"
#include "sgqa/table.hpp"

namespace sgqa {

struct SupportGraph {
  std::vector<int> active_options;  // exactly one in a valid graph
  std::set<int> active_qcons;       // raw token positions
  std::set<std::string> active_cells;
  std::set<std::string> active_rows;
  std::set<std::string> active_columns;
  std::set<std::string> active_headers;
  std::set<std::string> active_tables;
  std::vector<IlpVariable> edges;  // alignment variables at 1, with scores
  double objective = 0.0;

  int active_option() const {
    return active_options.size() == 1 ? active_options.front() : -1;
  }
  bool empty_support() const {
    return active_cells.empty() || active_qcons.empty();
  }
};

struct GraphStats {
  long n_variables = 0;
  long n_constraints = 0;
  long lp_iterations = 0;
  long n_active_rows = 0;
  long n_active_tables = 0;
  double model_build_seconds = 0.0;
  double solve_seconds = 0.0;
};

namespace detail {

inline std::string element_id(const IlpVariable& v,
                              const std::vector<SelectedTable>& tables) {
  const auto& tid = tables[v.table_a].table->id;
  switch (v.kind) {
    case VarKind::ActiveCell:
      return tid + ":" + std::to_string(tables[v.table_a].rows[v.row_a]) +
             ":" + std::to_string(v.col_a);
    case VarKind::ActiveRow:
      return tid + ":" + std::to_string(tables[v.table_a].rows[v.row_a]);
    case VarKind::ActiveColumn:
    case VarKind::ActiveHeader:
      return tid + ":" + std::to_string(v.col_a);
    default:
      return tid;
  }
}

}  // namespace detail

inline SupportGraph extract_support_graph(
    const IlpProblem& problem, const IlpSolution& solution,
    const std::vector<SelectedTable>& tables) {
  if (solution.status != IlpStatus::Optimal)
    throw IlpError("support graph requires an optimal solution");
  SupportGraph g;
  g.objective = solution.objective;
  for (int j = 0; j < problem.variable_count(); ++j) {
    if (solution.values[j] != 1) continue;
    const IlpVariable& v = problem.variable(j);
    switch (v.kind) {
      case VarKind::ActiveOption:
        g.active_options.push_back(v.option);
        break;
      case VarKind::ActiveQCons:
        g.active_qcons.insert(v.qpos_a);
        break;
      case VarKind::ActiveCell:
        g.active_cells.insert(detail::element_id(v, tables));
        break;
      case VarKind::ActiveRow:
        g.active_rows.insert(detail::element_id(v, tables));
        break;
      case VarKind::ActiveColumn:
        g.active_columns.insert(detail::element_id(v, tables));
        break;
      case VarKind::ActiveHeader:
        g.active_headers.insert(detail::element_id(v, tables));
        break;
      case VarKind::ActiveTable:
        g.active_tables.insert(detail::element_id(v, tables));
        break;
      default:
        if (is_alignment_kind(v.kind)) g.edges.push_back(v);
        break;
    }
  }
  return g;
}

// Definition checks on an extracted graph. An empty result means valid.
//  1. exactly one option, at least one constituent and one cell
//  2. positive weight on every edge
//  3. cross-table edges only through sanctioned header joins
//  4. the augmented graph (same-row and cell-header edges added) is connected
inline std::vector<std::string> verify_support_graph(
    const SupportGraph& g, const Question& question,
    const std::vector<SelectedTable>& tables, const JoinMap& joins) {
  std::vector<std::string> violations;
  (void)question;

  if (g.active_options.size() != 1)
    violations.push_back("property 1: expected exactly one active option, got " +
                         std::to_string(g.active_options.size()));
  if (g.active_qcons.empty())
    violations.push_back("property 1: no active question constituent");
  if (g.active_cells.empty())
    violations.push_back("property 1: no active table cell");

  for (const auto& e : g.edges) {
    if (!(e.score > 0.0))
      violations.push_back("property 2: edge " + e.name +
                           " has non-positive weight");
  }

  for (const auto& e : g.edges) {
    if (e.kind != VarKind::CellCell) continue;
    const auto& ta = tables[e.table_a].table->id;
    const auto& tb = tables[e.table_b].table->id;
    if (!joins.joinable(ta, e.col_a, tb, e.col_b))
      violations.push_back("property 3: edge " + e.name +
                           " lacks a sanctioned header join");
  }

  // connectivity over question constituents, the option, cells and headers
  std::map<std::string, int> node_ids;
  auto node = [&node_ids](const std::string& key) {
    auto [it, inserted] = node_ids.emplace(key, node_ids.size());
    (void)inserted;
    return it->second;
  };
  auto cell_key = [&tables](int ti, int rp, int k) {
    return "t:" + tables[ti].table->id + ":" +
           std::to_string(tables[ti].rows[rp]) + ":" + std::to_string(k);
  };
  auto header_key = [&tables](int ti, int k) {
    return "h:" + tables[ti].table->id + ":" + std::to_string(k);
  };

  std::vector<std::pair<int, int>> arcs;
  for (const auto& e : g.edges) {
    switch (e.kind) {
      case VarKind::CellCell:
        arcs.emplace_back(node(cell_key(e.table_a, e.row_a, e.col_a)),
                          node(cell_key(e.table_b, e.row_b, e.col_b)));
        break;
      case VarKind::CellQCons:
        arcs.emplace_back(node(cell_key(e.table_a, e.row_a, e.col_a)),
                          node("q:" + std::to_string(e.qpos_a)));
        break;
      case VarKind::HeaderQCons:
        arcs.emplace_back(node(header_key(e.table_a, e.col_a)),
                          node("q:" + std::to_string(e.qpos_a)));
        break;
      case VarKind::CellOption:
        arcs.emplace_back(node(cell_key(e.table_a, e.row_a, e.col_a)),
                          node("a:" + std::to_string(e.option)));
        break;
      case VarKind::HeaderOption:
        arcs.emplace_back(node(header_key(e.table_a, e.col_a)),
                          node("a:" + std::to_string(e.option)));
        break;
      default:
        break;
    }
  }
  for (int m : g.active_options) node("a:" + std::to_string(m));
  for (int pos : g.active_qcons) node("q:" + std::to_string(pos));
  // augmented edges: same active row, header row, cell to column header
  std::map<std::string, std::vector<std::string>> row_members;
  std::map<std::string, std::vector<std::string>> table_headers;
  for (const auto& id : g.active_cells) {
    const auto c1 = id.find(':');
    const auto c2 = id.rfind(':');
    const std::string tid = id.substr(0, c1);
    const std::string row = id.substr(0, c2);
    row_members["t:" + row].push_back("t:" + id);
    node("t:" + id);
  }
  for (const auto& id : g.active_headers) {
    const auto c1 = id.find(':');
    table_headers[id.substr(0, c1)].push_back("h:" + id);
    node("h:" + id);
  }
  for (const auto& [row, members] : row_members)
    for (size_t i = 1; i < members.size(); ++i)
      arcs.emplace_back(node(members[i - 1]), node(members[i]));
  for (const auto& [tid, headers] : table_headers)
    for (size_t i = 1; i < headers.size(); ++i)
      arcs.emplace_back(node(headers[i - 1]), node(headers[i]));
  for (const auto& id : g.active_cells) {
    const auto c1 = id.find(':');
    const auto c2 = id.rfind(':');
    const std::string header = id.substr(0, c1) + ":" + id.substr(c2 + 1);
    if (g.active_headers.count(header))
      arcs.emplace_back(node("t:" + id), node("h:" + header));
  }

  if (!node_ids.empty()) {
    std::vector<int> parent(node_ids.size());
    for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& [a, b] : arcs) parent[find(a)] = find(b);
    std::set<int> roots;
    for (size_t i = 0; i < parent.size(); ++i) roots.insert(find(static_cast<int>(i)));
    if (roots.size() > 1)
      violations.push_back("property 4: augmented graph has " +
                           std::to_string(roots.size()) + " components");
  }
  return violations;
}

// The eleven per-option features derived from a support graph. Averages and
// minimums over empty edge sets are defined as zero.
struct FeatureVector {
  double avg_qcons_alignment = 0.0;
  double min_qcons_alignment = 0.0;
  double n_active_qcons = 0.0;
  double frac_active_qcons = 0.0;
  double avg_choice_alignment = 0.0;
  double sum_choice_alignment = 0.0;
  double n_active_cells = 0.0;
  double avg_edge_alignment = 0.0;
  double min_edge_alignment = 0.0;
  double log_n_variables = 0.0;
  double log_n_constraints = 0.0;

  std::vector<double> to_vector() const {
    return {avg_qcons_alignment,  min_qcons_alignment, n_active_qcons,
            frac_active_qcons,    avg_choice_alignment, sum_choice_alignment,
            n_active_cells,       avg_edge_alignment,  min_edge_alignment,
            log_n_variables,      log_n_constraints};
  }

  nlohmann::json to_json() const {
    return {{"avg_qcons_alignment", avg_qcons_alignment},
            {"min_qcons_alignment", min_qcons_alignment},
            {"n_active_qcons", n_active_qcons},
            {"frac_active_qcons", frac_active_qcons},
            {"avg_choice_alignment", avg_choice_alignment},
            {"sum_choice_alignment", sum_choice_alignment},
            {"n_active_cells", n_active_cells},
            {"avg_edge_alignment", avg_edge_alignment},
            {"min_edge_alignment", min_edge_alignment},
            {"log_n_variables", log_n_variables},
            {"log_n_constraints", log_n_constraints}};
  }
};

inline FeatureVector extract_features(const SupportGraph& g,
                                      const IlpProblem& problem,
                                      const Question& question) {
  FeatureVector f;
  auto aggregate = [](const std::vector<double>& xs, double& avg, double& mn) {
    if (xs.empty()) {
      avg = 0.0;
      mn = 0.0;
      return;
    }
    double sum = 0.0, lo = xs[0];
    for (double x : xs) {
      sum += x;
      lo = std::min(lo, x);
    }
    avg = sum / xs.size();
    mn = lo;
  };

  std::vector<double> qcons_scores, choice_scores, all_scores;
  for (const auto& e : g.edges) {
    all_scores.push_back(e.score);
    if (e.kind == VarKind::CellQCons || e.kind == VarKind::HeaderQCons)
      qcons_scores.push_back(e.score);
    if (e.kind == VarKind::CellOption || e.kind == VarKind::HeaderOption)
      choice_scores.push_back(e.score);
  }
  aggregate(qcons_scores, f.avg_qcons_alignment, f.min_qcons_alignment);
  f.n_active_qcons = static_cast<double>(g.active_qcons.size());
  f.frac_active_qcons =
      question.constituents.empty()
          ? 0.0
          : f.n_active_qcons / static_cast<double>(question.constituents.size());
  double ignored_min = 0.0;
  aggregate(choice_scores, f.avg_choice_alignment, ignored_min);
  f.sum_choice_alignment = 0.0;
  for (double s : choice_scores) f.sum_choice_alignment += s;
  f.n_active_cells = static_cast<double>(g.active_cells.size());
  aggregate(all_scores, f.avg_edge_alignment, f.min_edge_alignment);
  f.log_n_variables =
      problem.variable_count() > 0 ? std::log(problem.variable_count()) : 0.0;
  f.log_n_constraints = problem.constraint_count() > 0
                            ? std::log(problem.constraint_count())
                            : 0.0;
  return f;
}

inline nlohmann::json support_graph_to_json(const SupportGraph& g,
                                            const Question& question) {
  nlohmann::json j;
  j["objective"] = g.objective;
  if (g.active_option() >= 0) {
    j["option_index"] = g.active_option();
    j["option_text"] = question.options[g.active_option()].text;
  }
  j["active_qcons"] = nlohmann::json::array();
  for (int pos : g.active_qcons)
    j["active_qcons"].push_back(
        {{"position", pos}, {"token", question.raw_tokens[pos]}});
  auto dump_set = [&j](const char* key, const std::set<std::string>& s) {
    j[key] = nlohmann::json::array();
    for (const auto& id : s) j[key].push_back(id);
  };
  dump_set("active_cells", g.active_cells);
  dump_set("active_rows", g.active_rows);
  dump_set("active_columns", g.active_columns);
  dump_set("active_headers", g.active_headers);
  dump_set("active_tables", g.active_tables);
  j["edges"] = nlohmann::json::array();
  for (const auto& e : g.edges)
    j["edges"].push_back({{"name", e.name}, {"weight", e.score}});
  return j;
}

}  // namespace sgqa
