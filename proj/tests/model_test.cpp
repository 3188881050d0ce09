#include "sgqa/model_builder.hpp"

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "sgqa/branch_bound.hpp"

namespace sgqa {
namespace {

using testing::all_rows;
using testing::make_table;

struct BuiltModel {
  IlpProblem problem;
  std::vector<SelectedTable> tables;
};

BuiltModel build(const Question& q, const std::vector<const Table*>& tables,
                 const JoinMap& joins, const PipelineConfig& config = {}) {
  std::vector<SelectedTable> sel;
  for (const Table* t : tables) sel.push_back(all_rows(*t));
  OverlapScorer scorer;
  SupportModelBuilder builder(q, sel, joins, scorer, config.thresholds,
                              config.constants, config.weights);
  builder.build_variables();
  builder.build_constraints();
  return {std::move(builder.problem()), std::move(sel)};
}

const IlpVariable* find_var(const IlpProblem& p, const std::string& name) {
  const int idx = p.find(name);
  return idx < 0 ? nullptr : &p.variable(idx);
}

TEST(BuildVariables, CellQConsThresholdGates) {
  // an 11-token cell dilutes the overlap to 1/11 < 0.1, a 10-token cell
  // sits exactly at the 0.1 threshold
  const auto wide = make_table(
      "wide", {"h"},
      {{"zebra w1 w2 w3 w4 w5 w6 w7 w8 w9 w10"},
       {"zebra w1 w2 w3 w4 w5 w6 w7 w8 w9"}});
  const auto q = parse_question("q", "zebra stripes", {"o1", "o2"}, 0);
  const auto built = build(q, {&wide}, {});
  EXPECT_EQ(find_var(built.problem, "cq(wide,0,0|0)"), nullptr);
  const auto* v = find_var(built.problem, "cq(wide,1,0|0)");
  ASSERT_NE(v, nullptr);
  EXPECT_DOUBLE_EQ(v->coeff, 0.1);
  EXPECT_DOUBLE_EQ(v->score, 0.1);
}

TEST(BuildVariables, ObjectiveCoefficientsPerKind) {
  auto seasons = make_table("seasons", {"hemisphere", "event", "month"},
                            {{"northern", "longest daylight", "june"}});
  auto regions =
      make_table("regions", {"region", "hemisphere"}, {{"new york", "northern"}});
  JoinMap joins;
  joins.add("regions", 1, "seasons", 0, 1);
  const auto q = parse_question(
      "ny", "In New York State, the longest period of daylight occurs during "
            "which month?",
      {"March", "June", "December", "September"}, 1);
  const auto built = build(q, {&regions, &seasons}, joins);
  const auto& p = built.problem;

  // pairwise weights are the alignment scores
  const auto* cq = find_var(p, "cq(regions,0,0|1)");  // "new" -> "new york"
  ASSERT_NE(cq, nullptr);
  EXPECT_DOUBLE_EQ(cq->coeff, 0.5);
  // cross-table pair: fixed bonus minus the inter-table penalty
  const auto* cc = find_var(p, "cc(regions,0,1|seasons,0,0)");
  ASSERT_NE(cc, nullptr);
  EXPECT_DOUBLE_EQ(cc->coeff, 0.9);
  EXPECT_DOUBLE_EQ(cc->score, 1.0);
  // unary weights, with the table usage penalty folded in
  EXPECT_DOUBLE_EQ(find_var(p, "T(seasons)")->coeff, 1.0 - 3.0);
  EXPECT_DOUBLE_EQ(find_var(p, "r(seasons,0)")->coeff, -1.0);
  EXPECT_DOUBLE_EQ(find_var(p, "col(seasons,2)")->coeff, 1.0);
  EXPECT_DOUBLE_EQ(find_var(p, "h(seasons,2)")->coeff, 0.3);
  EXPECT_DOUBLE_EQ(find_var(p, "t(seasons,0,2)")->coeff, 0.0);
  const auto* qv = find_var(p, "q(12)");  // "month"
  ASSERT_NE(qv, nullptr);
  EXPECT_DOUBLE_EQ(qv->coeff, 0.3);
  // aux boosts
  EXPECT_DOUBLE_EQ(find_var(p, "which_active")->coeff, 1.5);
  const auto* prox = find_var(p, "prox(regions,0,0|1,2)");
  ASSERT_NE(prox, nullptr);
  EXPECT_DOUBLE_EQ(prox->coeff, 0.5);  // adjacent constituents: 1/(1+1)
  // options carry zero weight
  EXPECT_DOUBLE_EQ(find_var(p, "a(1)")->coeff, 0.0);
}

TEST(BuildVariables, CellCellScoreReadingIsConfigurable) {
  auto a = make_table("a", {"x", "y"}, {{"fox", "northern winds"}});
  auto b = make_table("b", {"y", "z"}, {{"northern", "bird"}});
  JoinMap joins;
  joins.add("a", 1, "b", 0, 1);
  const auto q = parse_question("q", "fox bird", {"o1", "o2"}, 0);
  PipelineConfig config;
  config.weights.cell_cell_use_score = true;
  const auto built = build(q, {&a, &b}, joins, config);
  const auto* cc = find_var(built.problem, "cc(a,0,1|b,0,0)");
  ASSERT_NE(cc, nullptr);
  // similarity("northern winds","northern") = 1.0; score reading: w - 0.1
  EXPECT_DOUBLE_EQ(cc->score, 1.0);
  EXPECT_DOUBLE_EQ(cc->coeff, 0.9);

  PipelineConfig fixed;  // default: fixed bonus reading
  fixed.weights.cell_cell_bonus = 2.0;
  const auto built2 = build(q, {&a, &b}, joins, fixed);
  EXPECT_DOUBLE_EQ(find_var(built2.problem, "cc(a,0,1|b,0,0)")->coeff, 1.9);
}

TEST(BuildVariables, JoinMapGatesCrossTablePairs) {
  auto a = make_table("a", {"x", "y"}, {{"fox", "northern"}});
  auto b = make_table("b", {"y", "z"}, {{"northern", "bird"}});
  const auto q = parse_question("q", "fox bird", {"o1", "o2"}, 0);
  const auto no_join = build(q, {&a, &b}, {});
  EXPECT_EQ(find_var(no_join.problem, "cc(a,0,1|b,0,0)"), nullptr);
  JoinMap joins;
  joins.add("a", 1, "b", 0, 1);
  const auto with_join = build(q, {&a, &b}, joins);
  EXPECT_NE(find_var(with_join.problem, "cc(a,0,1|b,0,0)"), nullptr);
}

TEST(BuildVariables, NoAlignmentsYieldsOptionOnlyProblem) {
  const auto t = make_table("t", {"h1", "h2"}, {{"aaa", "bbb"}});
  const auto q = parse_question("q", "zebra stripes", {"o1", "o2", "o3"}, 0);
  const auto built = build(q, {&t}, {});
  EXPECT_EQ(built.problem.variable_count(), 3);  // the three option variables
  ASSERT_EQ(built.problem.constraint_count(), 2);
  EXPECT_EQ(built.problem.constraints()[0].tag, "option-at-most-one");
  EXPECT_EQ(built.problem.constraints()[1].tag, "option-at-least-one");
  const auto sol = brute_force_solve(built.problem);
  ASSERT_EQ(sol.status, IlpStatus::Optimal);
  EXPECT_DOUBLE_EQ(sol.objective, 0.0);
  EXPECT_EQ(sol.values[0] + sol.values[1] + sol.values[2], 1);
}

TEST(BuildVariables, EveryPairwiseScoreMeetsItsThreshold) {
  const auto& corpus = testing::bundled_corpus();
  PipelineConfig config;
  for (const auto& q : testing::bundled_questions()) {
    std::vector<SelectedTable> sel;
    for (const auto& t : corpus.tables) sel.push_back(all_rows(t));
    OverlapScorer scorer;
    SupportModelBuilder builder(q, sel, corpus.join_map, scorer,
                                config.thresholds, config.constants,
                                config.weights);
    builder.build_variables();
    const auto& thr = config.thresholds;
    for (const auto& v : builder.problem().variables()) {
      switch (v.kind) {
        case VarKind::CellCell:
          EXPECT_GE(v.score, thr.min_cell_cell_alignment);
          break;
        case VarKind::CellQCons:
          EXPECT_GE(v.score, thr.min_cell_qcons_alignment);
          break;
        case VarKind::HeaderQCons:
          EXPECT_GE(v.score, thr.min_title_qcons_alignment);
          break;
        case VarKind::CellOption:
          EXPECT_GE(v.score, thr.min_cell_qchoice_alignment);
          break;
        case VarKind::HeaderOption:
          EXPECT_GE(v.score, thr.min_title_qchoice_alignment);
          break;
        default:
          break;
      }
    }
  }
}

// Two active rows of one table with different active-column signatures are
// infeasible; confirmed by exhaustive enumeration on a 2x2 fixture.
TEST(BuildConstraints, RowSignatureEnforcedExhaustively) {
  const auto t = make_table("t", {"c0", "c1"},
                            {{"sleet", "precipitation"},
                             {"rain", "precipitation"}});
  const auto q = parse_question("q", "sleet rain falls",
                                {"precipitation", "lava"}, 0);
  const auto built = build(q, {&t}, {});
  const auto& p = built.problem;
  ASSERT_LE(p.variable_count(), 24);

  const int r0 = p.require("r(t,0)");
  const int r1 = p.require("r(t,1)");
  const int n = p.variable_count();
  long both_rows_feasible = 0;
  for (uint64_t mask = 0; mask < (1ull << n); ++mask) {
    std::vector<double> x(n);
    for (int j = 0; j < n; ++j) x[j] = (mask >> j) & 1ull;
    if (!p.feasible(x, 1e-9)) continue;
    if (x[r0] == 1.0 && x[r1] == 1.0) {
      ++both_rows_feasible;
      for (int k = 0; k < 2; ++k) {
        const int c0 = p.find("t(t,0," + std::to_string(k) + ")");
        const int c1 = p.find("t(t,1," + std::to_string(k) + ")");
        const double v0 = c0 >= 0 ? x[c0] : 0.0;
        const double v1 = c1 >= 0 ? x[c1] : 0.0;
        EXPECT_EQ(v0, v1) << "signature mismatch in a feasible assignment";
      }
    }
  }
  EXPECT_GT(both_rows_feasible, 0);  // parallel evidence must stay possible
}

TEST(BuildConstraints, TableBudgetIsEmitted) {
  auto a = make_table("a", {"x", "y"}, {{"fox", "glarp"}});
  auto b = make_table("b", {"y", "z"}, {{"glarp", "bird"}});
  JoinMap joins;
  joins.add("a", 1, "b", 0, 1);
  const auto q = parse_question("q", "fox bird", {"zzz"}, 0);
  const auto built = build(q, {&a, &b}, joins);
  bool found = false;
  for (const auto& c : built.problem.constraints()) {
    if (c.tag != "table-budget") continue;
    found = true;
    EXPECT_EQ(c.sense, Sense::LE);
    EXPECT_DOUBLE_EQ(c.rhs, 4.0);
    EXPECT_EQ(c.terms.size(), 2u);
  }
  EXPECT_TRUE(found);
}

TEST(WhichBoost, AlignedAuxTriggersOnQualifyingCell) {
  const auto t = make_table("cal", {"event", "when"},
                            {{"summer begin", "june month"}});
  const auto q = parse_question("q", "In which month does summer begin?",
                                {"june", "rock"}, 0);
  const auto built = build(q, {&t}, {});
  const auto& p = built.problem;
  ASSERT_NE(find_var(p, "which_active"), nullptr);
  const auto* aligned = find_var(p, "which_aligned");
  ASSERT_NE(aligned, nullptr);
  EXPECT_DOUBLE_EQ(aligned->coeff, 1.5);

  const auto best = testing::oracle_maximize(p);
  ASSERT_TRUE(best.feasible);
  EXPECT_EQ(best.values[p.require("which_active")], 1);
  EXPECT_EQ(best.values[p.require("which_aligned")], 1);
  EXPECT_EQ(best.values[p.require("a(0)")], 1);

  const auto sol = solve_ilp(p);
  ASSERT_EQ(sol.status, IlpStatus::Optimal);
  EXPECT_NEAR(sol.objective, best.objective, 1e-9);
}

TEST(Ablation, NoneIsIdentity) {
  auto a = make_table("a", {"x", "y"}, {{"fox", "glarp"}});
  const auto q = parse_question("q", "fox", {"o1", "o2"}, 0);
  const auto built = build(q, {&a}, {});
  const auto same = apply_ablation(built.problem, AblationMode::None);
  EXPECT_EQ(same.to_json(), built.problem.to_json());
}

TEST(Ablation, NoRelationMatchWithoutRelationsIsIdentity) {
  auto a = make_table("a", {"x", "y"}, {{"fox", "glarp"}});
  const auto q = parse_question("q", "fox", {"o1", "o2"}, 0);
  const auto built = build(q, {&a}, {});
  const auto same =
      apply_ablation(built.problem, AblationMode::NoRelationMatch);
  EXPECT_EQ(same.to_json(), built.problem.to_json());
}

TEST(Ablation, NoMultirowReplacesBudgets) {
  const auto t = make_table("t", {"c0", "c1"},
                            {{"sleet", "precipitation"},
                             {"rain", "precipitation"}});
  const auto q = parse_question("q", "sleet rain falls",
                                {"precipitation", "lava"}, 0);
  const auto built = build(q, {&t}, {});
  const auto single = apply_ablation(built.problem, AblationMode::NoMultirow);
  int row_budgets = 0;
  for (const auto& c : single.constraints()) {
    if (c.tag == "row-budget") {
      ++row_budgets;
      EXPECT_DOUBLE_EQ(c.rhs, 1.0);
      EXPECT_EQ(c.terms.size(), 2u);  // global, across every row variable
    }
    if (c.tag == "table-budget") EXPECT_DOUBLE_EQ(c.rhs, 1.0);
  }
  EXPECT_EQ(row_budgets, 1);

  // parallel evidence collapses to one active row in the optimum
  const auto best_full = testing::oracle_maximize(built.problem);
  const auto best_single = testing::oracle_maximize(single);
  ASSERT_TRUE(best_full.feasible);
  ASSERT_TRUE(best_single.feasible);
  EXPECT_GT(best_full.objective, best_single.objective);
  const int r0 = single.require("r(t,0)");
  const int r1 = single.require("r(t,1)");
  EXPECT_LE(best_single.values[r0] + best_single.values[r1], 1);
  EXPECT_EQ(best_full.values[r0] + best_full.values[r1], 2);
}

TEST(Ablation, NoRelationMatchDropsQuadsAndPenalties) {
  auto t = make_table("minerals", {"from", "to"},
                      {{"rock", "gem"}, {"gem", "rock"}});
  ColumnRelation rel;
  rel.name = "fromTo";
  rel.from_col = 0;
  rel.to_col = 1;
  rel.patterns = {"X to a Y"};
  t.relations.push_back(rel);
  const auto q = parse_question("q", "change rock to a gem", {"gem"}, 0);
  const auto built = build(q, {&t}, {});
  const auto& p = built.problem;
  ASSERT_NE(find_var(p, "rel(minerals,0|1,4)"), nullptr);
  ASSERT_NE(find_var(p, "relpen(minerals,0)"), nullptr);

  const auto stripped = apply_ablation(p, AblationMode::NoRelationMatch);
  EXPECT_EQ(stripped.find("rel(minerals,0|1,4)"), -1);
  EXPECT_EQ(stripped.find("relpen(minerals,0)"), -1);
  for (const auto& c : stripped.constraints()) {
    EXPECT_NE(c.tag, "relation-match-needs-columns");
    EXPECT_NE(c.tag, "column-needs-relation-match");
    EXPECT_NE(c.tag, "relation-match-position");
  }
}

// The relation machinery steers row choice: with the pattern matched at
// (rock@1, gem@4), the row whose columns align in the right order wins; the
// reversed row would need the -5 penalty.
TEST(RelationMatch, PositionRulesPickTheConsistentRow) {
  auto t = make_table("minerals", {"from", "to"},
                      {{"rock", "gem"}, {"gem", "rock"}});
  ColumnRelation rel;
  rel.name = "fromTo";
  rel.from_col = 0;
  rel.to_col = 1;
  rel.patterns = {"X to a Y"};
  t.relations.push_back(rel);
  const auto q = parse_question("q", "change rock to a gem", {"gem"}, 0);
  const auto built = build(q, {&t}, {});
  const auto best = testing::oracle_maximize(built.problem);
  ASSERT_TRUE(best.feasible);
  const auto& p = built.problem;
  EXPECT_EQ(best.values[p.require("r(minerals,0)")], 1);
  EXPECT_EQ(best.values[p.require("r(minerals,1)")], 0);
  EXPECT_EQ(best.values[p.require("rel(minerals,0|1,4)")], 1);
  EXPECT_EQ(best.values[p.require("relpen(minerals,0)")], 0);

  const auto sol = solve_ilp(p);
  ASSERT_EQ(sol.status, IlpStatus::Optimal);
  EXPECT_NEAR(sol.objective, best.objective, 1e-9);
}

}  // namespace
}  // namespace sgqa
