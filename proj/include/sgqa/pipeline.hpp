#pragma once

// End-to-end question answering: retrieve tables and rows, build the ILP,
// solve, and resolve ties by disabling the winner and re-solving until the
// objective gap exceeds the tie tolerance. Also the dataset evaluator with
// the 1/k tie scoring rule.

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgqa/alignment.hpp"
#include "sgqa/branch_bound.hpp"
#include "sgqa/config.hpp"
#include "sgqa/model_builder.hpp"
#include "sgqa/question.hpp"
#include "sgqa/retrieval.hpp"
#include "sgqa/support_graph.hpp"
#include "sgqa/table.hpp"

namespace sgqa {

struct AnswerSelection {
  std::vector<int> tie;  // chosen option(s); empty = abstain
  std::map<int, double> per_option_objective;
  std::optional<SupportGraph> support;  // winner's graph
  GraphStats stats;
  bool timed_out = false;

  bool abstained() const { return tie.empty(); }
  int chosen() const { return tie.empty() ? -1 : tie.front(); }
};

struct EvalRecord {
  std::string question_id;
  AnswerSelection selection;
  double score = 0.0;
};

struct EvalReport {
  double aggregate_score = 0.0;  // mean per-question score, times 100
  std::vector<EvalRecord> records;
  GraphStats mean_stats;
};

namespace detail {

inline double seconds_since(
    const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

}  // namespace detail

inline std::vector<SelectedTable> retrieve(const Question& q,
                                           const TableCorpus& corpus,
                                           const PipelineConfig& config) {
  std::vector<SelectedTable> out;
  for (const Table* t : select_tables(q, corpus, config.k_tables))
    out.push_back({t, select_rows(q, *t, config.n_rows)});
  return out;
}

inline AnswerSelection answer_question(const Question& q,
                                       const TableCorpus& corpus,
                                       const PipelineConfig& config) {
  AnswerSelection sel;
  const auto scorer = make_scorer(config.scorer);
  const auto t_build = std::chrono::steady_clock::now();
  const auto tables = retrieve(q, corpus, config);
  SupportModelBuilder builder(q, tables, corpus.join_map, *scorer,
                              config.thresholds, config.constants,
                              config.weights);
  builder.build_variables();
  builder.build_constraints();
  IlpProblem problem = apply_ablation(builder.problem(), config.ablation);
  sel.stats.model_build_seconds = detail::seconds_since(t_build);
  sel.stats.n_variables = problem.variable_count();
  sel.stats.n_constraints = problem.constraint_count();

  const auto t_solve = std::chrono::steady_clock::now();
  IlpSolution best = solve_ilp(problem, config.time_limit_seconds);
  sel.stats.lp_iterations = best.lp_iterations;
  if (best.status == IlpStatus::Timeout) sel.timed_out = true;
  if (!best.has_solution() || best.status == IlpStatus::Infeasible) {
    sel.stats.solve_seconds = detail::seconds_since(t_solve);
    return sel;  // abstain
  }

  SupportGraph graph = extract_support_graph(problem, best, tables);
  if (graph.empty_support() || graph.active_option() < 0) {
    // a solution with no table evidence behind it is no answer
    sel.stats.solve_seconds = detail::seconds_since(t_solve);
    return sel;
  }
  const int winner = graph.active_option();
  sel.tie.push_back(winner);
  sel.per_option_objective[winner] = best.objective;
  sel.support = std::move(graph);
  sel.stats.n_active_rows =
      static_cast<long>(sel.support->active_rows.size());
  sel.stats.n_active_tables =
      static_cast<long>(sel.support->active_tables.size());

  // disable-and-resolve: knock out the current winner and compare the
  // runner-up objective against the optimum
  IlpProblem restricted = problem;
  std::vector<int> disabled{winner};
  while (static_cast<int>(disabled.size()) < q.option_count()) {
    LinearConstraint c;
    c.terms.emplace_back(
        restricted.require("a(" + std::to_string(disabled.back()) + ")"), 1.0);
    c.sense = Sense::EQ;
    c.rhs = 0.0;
    c.tag = "disable-option";
    restricted.add_constraint(std::move(c));

    IlpSolution next = solve_ilp(restricted, config.time_limit_seconds);
    sel.stats.lp_iterations += next.lp_iterations;
    if (next.status == IlpStatus::Timeout) sel.timed_out = true;
    if (!next.has_solution()) break;
    SupportGraph next_graph = extract_support_graph(restricted, next, tables);
    if (next_graph.active_option() < 0) break;
    const int runner = next_graph.active_option();
    sel.per_option_objective[runner] = next.objective;
    if (best.objective - next.objective >= config.tie_epsilon) break;
    if (next_graph.empty_support()) break;  // zero-evidence pick, not a tie
    sel.tie.push_back(runner);
    disabled.push_back(runner);
  }
  sel.stats.solve_seconds = detail::seconds_since(t_solve);
  return sel;
}

// 1 for a sole correct answer, 1/k for a k-way tie containing the gold
// option, otherwise 0. Abstentions score 0.
inline double score_answer(const AnswerSelection& sel, int gold) {
  if (sel.abstained()) return 0.0;
  for (int m : sel.tie)
    if (m == gold) return 1.0 / static_cast<double>(sel.tie.size());
  return 0.0;
}

inline EvalReport evaluate(const std::vector<Question>& dataset,
                           const TableCorpus& corpus,
                           const PipelineConfig& config) {
  EvalReport report;
  double total = 0.0;
  for (const auto& q : dataset) {
    EvalRecord rec;
    rec.question_id = q.id;
    rec.selection = answer_question(q, corpus, config);
    rec.score = q.answer_key ? score_answer(rec.selection, *q.answer_key) : 0.0;
    total += rec.score;

    report.mean_stats.n_variables += rec.selection.stats.n_variables;
    report.mean_stats.n_constraints += rec.selection.stats.n_constraints;
    report.mean_stats.lp_iterations += rec.selection.stats.lp_iterations;
    report.mean_stats.n_active_rows += rec.selection.stats.n_active_rows;
    report.mean_stats.n_active_tables += rec.selection.stats.n_active_tables;
    report.mean_stats.model_build_seconds +=
        rec.selection.stats.model_build_seconds;
    report.mean_stats.solve_seconds += rec.selection.stats.solve_seconds;
    report.records.push_back(std::move(rec));
  }
  if (!dataset.empty()) {
    const double n = static_cast<double>(dataset.size());
    report.aggregate_score = 100.0 * total / n;
    report.mean_stats.n_variables =
        static_cast<long>(report.mean_stats.n_variables / n + 0.5);
    report.mean_stats.n_constraints =
        static_cast<long>(report.mean_stats.n_constraints / n + 0.5);
    report.mean_stats.lp_iterations =
        static_cast<long>(report.mean_stats.lp_iterations / n + 0.5);
    report.mean_stats.n_active_rows =
        static_cast<long>(report.mean_stats.n_active_rows / n + 0.5);
    report.mean_stats.n_active_tables =
        static_cast<long>(report.mean_stats.n_active_tables / n + 0.5);
    report.mean_stats.model_build_seconds /= n;
    report.mean_stats.solve_seconds /= n;
  }
  return report;
}

// Per-option analysis used for ensemble features: force each option on in
// turn and record its best support graph, objective and features.
struct OptionAnalysis {
  bool feasible = false;
  double objective = 0.0;
  SupportGraph graph;
  FeatureVector features;
};

inline std::vector<OptionAnalysis> analyze_options(
    const Question& q, const TableCorpus& corpus,
    const PipelineConfig& config) {
  const auto scorer = make_scorer(config.scorer);
  const auto tables = retrieve(q, corpus, config);
  SupportModelBuilder builder(q, tables, corpus.join_map, *scorer,
                              config.thresholds, config.constants,
                              config.weights);
  builder.build_variables();
  builder.build_constraints();
  const IlpProblem problem = apply_ablation(builder.problem(), config.ablation);

  std::vector<OptionAnalysis> out(q.option_count());
  for (int m = 0; m < q.option_count(); ++m) {
    IlpProblem forced = problem;
    LinearConstraint c;
    c.terms.emplace_back(forced.require("a(" + std::to_string(m) + ")"), 1.0);
    c.sense = Sense::EQ;
    c.rhs = 1.0;
    c.tag = "force-option";
    forced.add_constraint(std::move(c));
    IlpSolution sol = solve_ilp(forced, config.time_limit_seconds);
    if (sol.status != IlpStatus::Optimal) continue;
    out[m].feasible = true;
    out[m].objective = sol.objective;
    out[m].graph = extract_support_graph(forced, sol, tables);
    out[m].features = extract_features(out[m].graph, problem, q);
  }
  return out;
}

inline nlohmann::json report_to_json(const EvalReport& report,
                                     const std::vector<Question>& dataset) {
  nlohmann::json j;
  j["aggregate_score"] = report.aggregate_score;
  j["mean_stats"] = {
      {"n_variables", report.mean_stats.n_variables},
      {"n_constraints", report.mean_stats.n_constraints},
      {"lp_iterations", report.mean_stats.lp_iterations},
      {"n_active_rows", report.mean_stats.n_active_rows},
      {"n_active_tables", report.mean_stats.n_active_tables},
      {"model_build_seconds", report.mean_stats.model_build_seconds},
      {"solve_seconds", report.mean_stats.solve_seconds}};
  j["questions"] = nlohmann::json::array();
  for (size_t i = 0; i < report.records.size(); ++i) {
    const auto& rec = report.records[i];
    nlohmann::json jq;
    jq["id"] = rec.question_id;
    jq["score"] = rec.score;
    jq["abstained"] = rec.selection.abstained();
    jq["timed_out"] = rec.selection.timed_out;
    jq["tie"] = rec.selection.tie;
    if (!rec.selection.abstained() && i < dataset.size())
      jq["chosen_text"] =
          dataset[i].options[rec.selection.chosen()].text;
    nlohmann::json objs = nlohmann::json::object();
    for (const auto& [m, obj] : rec.selection.per_option_objective)
      objs[std::to_string(m)] = obj;
    jq["per_option_objective"] = objs;
    jq["stats"] = {
        {"n_variables", rec.selection.stats.n_variables},
        {"n_constraints", rec.selection.stats.n_constraints},
        {"lp_iterations", rec.selection.stats.lp_iterations},
        {"n_active_rows", rec.selection.stats.n_active_rows},
        {"n_active_tables", rec.selection.stats.n_active_tables},
        {"model_build_seconds", rec.selection.stats.model_build_seconds},
        {"solve_seconds", rec.selection.stats.solve_seconds}};
    j["questions"].push_back(jq);
  }
  return j;
}

// Questions file: JSONL, one object per line:
//   {"id": "...", "question": "...", "options": ["..."], "answerKey": 0}
inline std::vector<Question> load_questions(
    const std::filesystem::path& file,
    const StopwordSet& stop = default_stopwords()) {
  std::ifstream in(file);
  if (!in)
    throw QuestionError("cannot open questions file " + file.string());
  std::vector<Question> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      throw QuestionError(file.string() + ":" + std::to_string(lineno) + ": " +
                          e.what());
    }
    std::vector<std::string> options;
    for (const auto& o : j.at("options")) options.push_back(o.get<std::string>());
    std::optional<int> key;
    if (j.contains("answerKey") && !j["answerKey"].is_null())
      key = j["answerKey"].get<int>();
    out.push_back(parse_question(j.value("id", "q" + std::to_string(lineno)),
                                 j.at("question").get<std::string>(), options,
                                 key, stop));
  }
  return out;
}

}  // namespace sgqa
