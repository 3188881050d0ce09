#pragma once

// Builds the support-graph ILP for one question over a set of filtered
// tables: pairwise alignment variables gated by per-kind thresholds, unary
// activity variables for every touched element, option aggregation
// variables, auxiliary boost variables, and the complete constraint
// catalog. Constraint tags name the rule they implement and are stable;
// ablation modes and tests key off them.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "sgqa/alignment.hpp"
#include "sgqa/config.hpp"
#include "sgqa/ilp.hpp"
#include "sgqa/question.hpp"
#include "sgqa/table.hpp"

namespace sgqa {

struct SelectedTable {
  const Table* table = nullptr;
  std::vector<int> rows;  // original row indices, retrieval order
};

class SupportModelBuilder {
 public:
  SupportModelBuilder(const Question& question,
                      std::vector<SelectedTable> tables, const JoinMap& joins,
                      const AlignmentScorer& scorer, const Thresholds& thr,
                      const ModelConstants& consts,
                      const ObjectiveWeights& weights)
      : q_(&question),
        joins_(&joins),
        scorer_(&scorer),
        thr_(thr),
        consts_(consts),
        weights_(weights) {
    for (auto& st : tables) {
      TableCtx ctx;
      ctx.sel = st;
      const int cols = st.table->column_count();
      const int nrows = static_cast<int>(st.rows.size());
      ctx.cell_inc.assign(nrows, std::vector<std::vector<int>>(cols));
      ctx.header_inc.assign(cols, {});
      ctx.cell_var.assign(nrows, std::vector<int>(cols, -1));
      ctx.row_var.assign(nrows, -1);
      ctx.col_var.assign(cols, -1);
      ctx.header_var.assign(cols, -1);
      ctx.col_opt_edges.assign(
          cols, std::vector<std::vector<int>>(q_->option_count()));
      ctx.col_opt_var.assign(cols,
                             std::vector<int>(q_->option_count(), -1));
      ctx.table_opt_var.assign(q_->option_count(), -1);
      tables_.push_back(std::move(ctx));
    }
    which_ = detect_which_term(*q_, consts_.which_term_span);
  }

  const WhichTermSpan& which_span() const { return which_; }

  // Stage 1: every variable of the model, with its objective coefficient.
  IlpProblem& build_variables() {
    build_pairwise();
    build_unary();
    build_option_aggregates();
    build_aux();
    build_relation_vars();
    variables_done_ = true;
    return problem_;
  }

  // Stage 2: the constraint catalog. Requires stage 1.
  IlpProblem& build_constraints() {
    if (!variables_done_) build_variables();
    emit_activity_links();
    emit_option_rules();
    emit_budgets();
    emit_aux_rules();
    emit_row_rules();
    emit_inter_table_rules();
    emit_relation_rules();
    return problem_;
  }

  IlpProblem& problem() { return problem_; }
  const IlpProblem& problem() const { return problem_; }
  const std::vector<SelectedTable> selected_tables() const {
    std::vector<SelectedTable> out;
    for (const auto& t : tables_) out.push_back(t.sel);
    return out;
  }

 private:
  struct TableCtx {
    SelectedTable sel;
    // incidence lists of pairwise variable indices
    std::vector<std::vector<std::vector<int>>> cell_inc;  // [rp][k]
    std::vector<std::vector<int>> header_inc;             // [k]
    // unary variable indices (-1 = element untouched)
    std::vector<std::vector<int>> cell_var;  // [rp][k]
    std::vector<int> row_var;                // [rp]
    std::vector<int> col_var;                // [k]
    std::vector<int> header_var;             // [k]
    int table_var = -1;
    std::vector<std::vector<std::vector<int>>> col_opt_edges;  // [k][m]
    std::vector<std::vector<int>> col_opt_var;                 // [k][m]
    std::vector<int> table_opt_var;                            // [m]
    std::vector<RelationMatch> matches;
    std::vector<int> quad_var;            // parallel to matches
    std::map<int, int> pen_var;           // relation index -> variable
    std::vector<std::vector<int>> cc_by_pair;  // filled lazily
  };

  const Table& tab(int ti) const { return *tables_[ti].sel.table; }
  int orig_row(int ti, int rp) const { return tables_[ti].sel.rows[rp]; }
  const std::string& tid(int ti) const { return tab(ti).id; }

  std::string cell_name(int ti, int rp, int k) const {
    return "t(" + tid(ti) + "," + std::to_string(orig_row(ti, rp)) + "," +
           std::to_string(k) + ")";
  }

  void touch_cell(int ti, int rp, int k, int var) {
    tables_[ti].cell_inc[rp][k].push_back(var);
  }

  void build_pairwise() {
    // cell/header vs question constituents and options
    for (int ti = 0; ti < static_cast<int>(tables_.size()); ++ti) {
      auto& ctx = tables_[ti];
      const Table& t = tab(ti);
      for (int rp = 0; rp < static_cast<int>(ctx.sel.rows.size()); ++rp) {
        for (int k = 0; k < t.column_count(); ++k) {
          const Cell& cell = t.cell(orig_row(ti, rp), k);
          if (cell.tokens.empty()) continue;
          for (const auto& c : q_->constituents) {
            const double w = scorer_->entail({c.text}, cell.tokens);
            if (w < thr_.min_cell_qcons_alignment) continue;
            IlpVariable v;
            v.name = "cq(" + tid(ti) + "," +
                     std::to_string(orig_row(ti, rp)) + "," +
                     std::to_string(k) + "|" + std::to_string(c.position) +
                     ")";
            v.kind = VarKind::CellQCons;
            v.coeff = w;
            v.score = w;
            v.table_a = ti;
            v.row_a = rp;
            v.col_a = k;
            v.qpos_a = c.position;
            const int idx = problem_.add_variable(std::move(v));
            touch_cell(ti, rp, k, idx);
            qcons_inc_[c.position].push_back(idx);
          }
          for (int m = 0; m < q_->option_count(); ++m) {
            const auto& opt = q_->options[m].tokens;
            if (opt.empty()) continue;
            const double w = scorer_->entail(cell.tokens, opt);
            if (w < thr_.min_cell_qchoice_alignment) continue;
            IlpVariable v;
            v.name = "ca(" + tid(ti) + "," +
                     std::to_string(orig_row(ti, rp)) + "," +
                     std::to_string(k) + "|" + std::to_string(m) + ")";
            v.kind = VarKind::CellOption;
            v.coeff = w;
            v.score = w;
            v.table_a = ti;
            v.row_a = rp;
            v.col_a = k;
            v.option = m;
            const int idx = problem_.add_variable(std::move(v));
            touch_cell(ti, rp, k, idx);
            option_inc_[m].push_back(idx);
            ctx.col_opt_edges[k][m].push_back(idx);
          }
        }
      }
      for (int k = 0; k < t.column_count(); ++k) {
        const Cell& header = t.headers[k];
        if (header.tokens.empty()) continue;
        for (const auto& c : q_->constituents) {
          const double w = scorer_->entail({c.text}, header.tokens);
          if (w < thr_.min_title_qcons_alignment) continue;
          IlpVariable v;
          v.name = "hq(" + tid(ti) + "," + std::to_string(k) + "|" +
                   std::to_string(c.position) + ")";
          v.kind = VarKind::HeaderQCons;
          v.coeff = w;
          v.score = w;
          v.table_a = ti;
          v.col_a = k;
          v.qpos_a = c.position;
          const int idx = problem_.add_variable(std::move(v));
          ctx.header_inc[k].push_back(idx);
          qcons_inc_[c.position].push_back(idx);
        }
        for (int m = 0; m < q_->option_count(); ++m) {
          const auto& opt = q_->options[m].tokens;
          if (opt.empty()) continue;
          const double w = scorer_->entail(header.tokens, opt);
          if (w < thr_.min_title_qchoice_alignment) continue;
          IlpVariable v;
          v.name = "ha(" + tid(ti) + "," + std::to_string(k) + "|" +
                   std::to_string(m) + ")";
          v.kind = VarKind::HeaderOption;
          v.coeff = w;
          v.score = w;
          v.table_a = ti;
          v.col_a = k;
          v.option = m;
          const int idx = problem_.add_variable(std::move(v));
          ctx.header_inc[k].push_back(idx);
          option_inc_[m].push_back(idx);
          ctx.col_opt_edges[k][m].push_back(idx);
        }
      }
    }

    // cross-table cell pairs, only through sanctioned header joins
    for (int ta = 0; ta < static_cast<int>(tables_.size()); ++ta) {
      for (int tb = ta + 1; tb < static_cast<int>(tables_.size()); ++tb) {
        std::vector<int>& pair_vars = inter_table_vars_[{ta, tb}];
        for (int ka = 0; ka < tab(ta).column_count(); ++ka) {
          for (int kb = 0; kb < tab(tb).column_count(); ++kb) {
            if (!joins_->joinable(tid(ta), ka, tid(tb), kb)) continue;
            for (int ra = 0; ra < static_cast<int>(tables_[ta].sel.rows.size());
                 ++ra) {
              const Cell& cell_a = tab(ta).cell(orig_row(ta, ra), ka);
              if (cell_a.tokens.empty()) continue;
              for (int rb = 0;
                   rb < static_cast<int>(tables_[tb].sel.rows.size()); ++rb) {
                const Cell& cell_b = tab(tb).cell(orig_row(tb, rb), kb);
                if (cell_b.tokens.empty()) continue;
                const double w =
                    similarity(cell_a.tokens, cell_b.tokens, *scorer_);
                if (w < thr_.min_cell_cell_alignment) continue;
                IlpVariable v;
                v.name = "cc(" + tid(ta) + "," +
                         std::to_string(orig_row(ta, ra)) + "," +
                         std::to_string(ka) + "|" + tid(tb) + "," +
                         std::to_string(orig_row(tb, rb)) + "," +
                         std::to_string(kb) + ")";
                v.kind = VarKind::CellCell;
                v.coeff = (weights_.cell_cell_use_score
                               ? w
                               : weights_.cell_cell_bonus) -
                          consts_.inter_table_alignment_penalty;
                v.score = w;
                v.table_a = ta;
                v.row_a = ra;
                v.col_a = ka;
                v.table_b = tb;
                v.row_b = rb;
                v.col_b = kb;
                const int idx = problem_.add_variable(std::move(v));
                touch_cell(ta, ra, ka, idx);
                touch_cell(tb, rb, kb, idx);
                pair_vars.push_back(idx);
              }
            }
          }
        }
      }
    }
  }

  void build_unary() {
    for (int ti = 0; ti < static_cast<int>(tables_.size()); ++ti) {
      auto& ctx = tables_[ti];
      const Table& t = tab(ti);
      bool table_touched = false;
      for (int rp = 0; rp < static_cast<int>(ctx.sel.rows.size()); ++rp) {
        bool row_touched = false;
        for (int k = 0; k < t.column_count(); ++k) {
          if (ctx.cell_inc[rp][k].empty()) continue;
          row_touched = true;
          IlpVariable v;
          v.name = cell_name(ti, rp, k);
          v.kind = VarKind::ActiveCell;
          v.coeff = weights_.active_cell;
          v.table_a = ti;
          v.row_a = rp;
          v.col_a = k;
          ctx.cell_var[rp][k] = problem_.add_variable(std::move(v));
        }
        if (row_touched) {
          IlpVariable v;
          v.name = "r(" + tid(ti) + "," + std::to_string(orig_row(ti, rp)) +
                   ")";
          v.kind = VarKind::ActiveRow;
          v.coeff = weights_.active_row;
          v.table_a = ti;
          v.row_a = rp;
          ctx.row_var[rp] = problem_.add_variable(std::move(v));
          table_touched = true;
        }
      }
      for (int k = 0; k < t.column_count(); ++k) {
        if (!ctx.header_inc[k].empty()) {
          IlpVariable v;
          v.name = "h(" + tid(ti) + "," + std::to_string(k) + ")";
          v.kind = VarKind::ActiveHeader;
          v.coeff = weights_.active_header;
          v.table_a = ti;
          v.col_a = k;
          ctx.header_var[k] = problem_.add_variable(std::move(v));
          table_touched = true;
        }
        bool col_touched = !ctx.header_inc[k].empty();
        for (int rp = 0; rp < static_cast<int>(ctx.sel.rows.size()) && !col_touched;
             ++rp)
          col_touched = !ctx.cell_inc[rp][k].empty();
        if (col_touched) {
          IlpVariable v;
          v.name = "col(" + tid(ti) + "," + std::to_string(k) + ")";
          v.kind = VarKind::ActiveColumn;
          v.coeff = weights_.active_column;
          v.table_a = ti;
          v.col_a = k;
          ctx.col_var[k] = problem_.add_variable(std::move(v));
          table_touched = true;
        }
      }
      if (table_touched) {
        IlpVariable v;
        v.name = "T(" + tid(ti) + ")";
        v.kind = VarKind::ActiveTable;
        v.coeff = weights_.active_table - consts_.table_usage_penalty;
        v.table_a = ti;
        ctx.table_var = problem_.add_variable(std::move(v));
      }
    }
    for (const auto& c : q_->constituents) {
      auto it = qcons_inc_.find(c.position);
      if (it == qcons_inc_.end() || it->second.empty()) continue;
      IlpVariable v;
      v.name = "q(" + std::to_string(c.position) + ")";
      v.kind = VarKind::ActiveQCons;
      v.coeff = weights_.active_qcons;
      v.qpos_a = c.position;
      qcons_var_[c.position] = problem_.add_variable(std::move(v));
    }
    option_var_.assign(q_->option_count(), -1);
    for (int m = 0; m < q_->option_count(); ++m) {
      IlpVariable v;
      v.name = "a(" + std::to_string(m) + ")";
      v.kind = VarKind::ActiveOption;
      v.coeff = 0.0;
      v.option = m;
      option_var_[m] = problem_.add_variable(std::move(v));
    }
  }

  void build_option_aggregates() {
    for (int ti = 0; ti < static_cast<int>(tables_.size()); ++ti) {
      auto& ctx = tables_[ti];
      for (int m = 0; m < q_->option_count(); ++m) {
        bool table_opt = false;
        for (int k = 0; k < tab(ti).column_count(); ++k) {
          if (ctx.col_opt_edges[k][m].empty()) continue;
          IlpVariable v;
          v.name = "la(" + tid(ti) + "," + std::to_string(k) + "|" +
                   std::to_string(m) + ")";
          v.kind = VarKind::ColumnOption;
          v.coeff = 0.0;
          v.table_a = ti;
          v.col_a = k;
          v.option = m;
          ctx.col_opt_var[k][m] = problem_.add_variable(std::move(v));
          table_opt = true;
        }
        if (table_opt) {
          IlpVariable v;
          v.name = "Ta(" + tid(ti) + "|" + std::to_string(m) + ")";
          v.kind = VarKind::TableOption;
          v.coeff = 0.0;
          v.table_a = ti;
          v.option = m;
          ctx.table_opt_var[m] = problem_.add_variable(std::move(v));
        }
      }
    }
  }

  void build_aux() {
    if (which_.present) {
      IlpVariable v;
      v.name = "which_active";
      v.kind = VarKind::AuxWhichActive;
      v.coeff = weights_.aux_which;
      which_active_var_ = problem_.add_variable(std::move(v));
    }
    // option alignments whose table-side phrase entails one of the
    // which-span constituents strongly enough
    if (which_.present && !which_.constituent_positions.empty()) {
      std::vector<Phrase> span_terms;
      for (int pos : which_.constituent_positions)
        span_terms.push_back({q_->raw_tokens[pos]});
      for (int j = 0; j < problem_.variable_count(); ++j) {
        const IlpVariable& v = problem_.variable(j);
        if (v.kind != VarKind::CellOption && v.kind != VarKind::HeaderOption)
          continue;
        const Table& t = tab(v.table_a);
        const auto& phrase = v.kind == VarKind::CellOption
                                 ? t.cell(orig_row(v.table_a, v.row_a), v.col_a)
                                       .tokens
                                 : t.headers[v.col_a].tokens;
        for (const auto& term : span_terms) {
          if (scorer_->entail(phrase, term) > consts_.min_alignment_which_term) {
            which_qualifying_.push_back(j);
            break;
          }
        }
      }
      if (!which_qualifying_.empty()) {
        IlpVariable v;
        v.name = "which_aligned";
        v.kind = VarKind::AuxWhichAligned;
        v.coeff = weights_.aux_which;
        which_aligned_var_ = problem_.add_variable(std::move(v));
      }
    }
    // proximity boosts: one per cell aligned to two nearby constituents
    for (int ti = 0; ti < static_cast<int>(tables_.size()); ++ti) {
      auto& ctx = tables_[ti];
      for (int rp = 0; rp < static_cast<int>(ctx.sel.rows.size()); ++rp) {
        for (int k = 0; k < tab(ti).column_count(); ++k) {
          std::vector<std::pair<int, int>> qedges;  // (position, var)
          for (int var : ctx.cell_inc[rp][k]) {
            const IlpVariable& v = problem_.variable(var);
            if (v.kind == VarKind::CellQCons)
              qedges.emplace_back(v.qpos_a, var);
          }
          for (size_t a = 0; a < qedges.size(); ++a) {
            for (size_t b = a + 1; b < qedges.size(); ++b) {
              const int lo = qedges[a].first, hi = qedges[b].first;
              const int dist = hi - lo;
              if (dist > consts_.qcons_coalign_max_dist) continue;
              IlpVariable v;
              v.name = "prox(" + tid(ti) + "," +
                       std::to_string(orig_row(ti, rp)) + "," +
                       std::to_string(k) + "|" + std::to_string(lo) + "," +
                       std::to_string(hi) + ")";
              v.kind = VarKind::AuxCellProximity;
              v.coeff = 1.0 / (dist + 1);
              v.table_a = ti;
              v.row_a = rp;
              v.col_a = k;
              v.qpos_a = lo;
              v.qpos_b = hi;
              const int idx = problem_.add_variable(std::move(v));
              prox_links_.push_back({idx, qedges[a].second, qedges[b].second});
            }
          }
        }
      }
    }
  }

  void build_relation_vars() {
    for (int ti = 0; ti < static_cast<int>(tables_.size()); ++ti) {
      auto& ctx = tables_[ti];
      const Table& t = tab(ti);
      if (t.relations.empty()) continue;
      std::set<std::tuple<int, int, int>> seen;  // (relation, from, to)
      for (const auto& match : match_relations(*q_, t)) {
        const auto& rel = t.relations[match.relation_index];
        if (ctx.col_var[rel.from_col] < 0 || ctx.col_var[rel.to_col] < 0)
          continue;
        if (!seen.insert({match.relation_index, match.q_from, match.q_to})
                 .second)
          continue;
        IlpVariable v;
        v.name = "rel(" + tid(ti) + "," +
                 std::to_string(match.relation_index) + "|" +
                 std::to_string(match.q_from) + "," +
                 std::to_string(match.q_to) + ")";
        v.kind = VarKind::RelationMatchQuad;
        v.coeff = consts_.relation_match_coeff;
        v.table_a = ti;
        v.relation = match.relation_index;
        v.qpos_a = match.q_from;
        v.qpos_b = match.q_to;
        ctx.quad_var.push_back(problem_.add_variable(std::move(v)));
        ctx.matches.push_back(match);
      }
      // fallback penalty per annotated pair whose columns can be active
      for (int ri = 0; ri < static_cast<int>(t.relations.size()); ++ri) {
        const auto& rel = t.relations[ri];
        if (ctx.col_var[rel.from_col] < 0 && ctx.col_var[rel.to_col] < 0)
          continue;
        IlpVariable v;
        v.name = "relpen(" + tid(ti) + "," + std::to_string(ri) + ")";
        v.kind = VarKind::ColumnColumnRelation;
        v.coeff = consts_.no_relation_match_coeff;
        v.table_a = ti;
        v.relation = ri;
        ctx.pen_var[ri] = problem_.add_variable(std::move(v));
      }
    }
  }

  // ---- constraints ----

  void le(std::vector<std::pair<int, double>> terms, double rhs,
          const std::string& tag) {
    LinearConstraint c;
    c.terms = std::move(terms);
    c.sense = Sense::LE;
    c.rhs = rhs;
    c.tag = tag;
    problem_.add_constraint(std::move(c));
  }
  void ge(std::vector<std::pair<int, double>> terms, double rhs,
          const std::string& tag) {
    LinearConstraint c;
    c.terms = std::move(terms);
    c.sense = Sense::GE;
    c.rhs = rhs;
    c.tag = tag;
    problem_.add_constraint(std::move(c));
  }

  // edge implies element: e - u <= 0
  void link_up(const std::vector<int>& edges, int unary,
               const std::string& tag) {
    for (int e : edges) le({{e, 1.0}, {unary, -1.0}}, 0.0, tag);
  }
  // element implies some edge: sum(e) - u >= 0
  void link_down(const std::vector<int>& edges, int unary,
                 const std::string& tag) {
    std::vector<std::pair<int, double>> terms;
    for (int e : edges) terms.emplace_back(e, 1.0);
    terms.emplace_back(unary, -1.0);
    ge(std::move(terms), 0.0, tag);
  }

  void emit_activity_links() {
    for (int ti = 0; ti < static_cast<int>(tables_.size()); ++ti) {
      auto& ctx = tables_[ti];
      const Table& t = tab(ti);
      std::vector<int> table_edges;
      for (int rp = 0; rp < static_cast<int>(ctx.sel.rows.size()); ++rp) {
        std::vector<int> row_edges;
        for (int k = 0; k < t.column_count(); ++k) {
          const auto& inc = ctx.cell_inc[rp][k];
          if (inc.empty()) continue;
          const int tv = ctx.cell_var[rp][k];
          link_up(inc, tv, "cell-active-if-edge");
          link_down(inc, tv, "cell-needs-edge");
          // active cell requires enough aggregate alignment mass
          std::vector<std::pair<int, double>> aggr;
          for (int e : inc) aggr.emplace_back(e, problem_.variable(e).score);
          aggr.emplace_back(tv, -thr_.min_active_cell_aggr_alignment);
          ge(std::move(aggr), 0.0, "cell-aggregate-alignment");
          std::vector<std::pair<int, double>> cap;
          for (int e : inc) cap.emplace_back(e, 1.0);
          le(std::move(cap), consts_.max_alignments_per_cell,
             "cell-alignment-cap");
          row_edges.insert(row_edges.end(), inc.begin(), inc.end());
        }
        if (ctx.row_var[rp] >= 0) {
          link_up(row_edges, ctx.row_var[rp], "row-active-if-edge");
          link_down(row_edges, ctx.row_var[rp], "row-needs-edge");
          table_edges.insert(table_edges.end(), row_edges.begin(),
                             row_edges.end());
        }
      }
      for (int k = 0; k < t.column_count(); ++k) {
        if (ctx.header_var[k] >= 0) {
          link_up(ctx.header_inc[k], ctx.header_var[k],
                  "header-active-if-edge");
          link_down(ctx.header_inc[k], ctx.header_var[k], "header-needs-edge");
          std::vector<std::pair<int, double>> aggr;
          for (int e : ctx.header_inc[k])
            aggr.emplace_back(e, problem_.variable(e).score);
          aggr.emplace_back(ctx.header_var[k],
                            -thr_.min_active_title_aggr_alignment);
          ge(std::move(aggr), 0.0, "header-aggregate-alignment");
          table_edges.insert(table_edges.end(), ctx.header_inc[k].begin(),
                             ctx.header_inc[k].end());
        }
        if (ctx.col_var[k] >= 0) {
          std::vector<int> col_edges = ctx.header_inc[k];
          std::vector<std::pair<int, double>> cells;
          for (int rp = 0; rp < static_cast<int>(ctx.sel.rows.size()); ++rp) {
            const auto& inc = ctx.cell_inc[rp][k];
            col_edges.insert(col_edges.end(), inc.begin(), inc.end());
            if (ctx.cell_var[rp][k] >= 0)
              cells.emplace_back(ctx.cell_var[rp][k], 1.0);
          }
          link_up(col_edges, ctx.col_var[k], "column-active-if-edge");
          link_down(col_edges, ctx.col_var[k], "column-needs-edge");
          // active column needs an active cell
          cells.emplace_back(ctx.col_var[k], -1.0);
          ge(std::move(cells), 0.0, "column-needs-active-cell");
          if (ctx.table_var >= 0) {
            le({{ctx.col_var[k], 1.0}, {ctx.table_var, -1.0}}, 0.0,
               "column-implies-table");
          }
        }
      }
      if (ctx.table_var >= 0) {
        link_up(table_edges, ctx.table_var, "table-active-if-edge");
        link_down(table_edges, ctx.table_var, "table-needs-edge");
        std::vector<std::pair<int, double>> cols;
        for (int k = 0; k < t.column_count(); ++k)
          if (ctx.col_var[k] >= 0) cols.emplace_back(ctx.col_var[k], 1.0);
        cols.emplace_back(ctx.table_var, -1.0);
        ge(std::move(cols), 0.0, "table-needs-active-column");
      }
    }
    for (const auto& [pos, inc] : qcons_inc_) {
      const int qv = qcons_var_.at(pos);
      link_up(inc, qv, "qcons-active-if-edge");
      link_down(inc, qv, "qcons-needs-edge");
      std::vector<std::pair<int, double>> cap;
      for (int e : inc) cap.emplace_back(e, 1.0);
      le(std::move(cap), consts_.max_alignments_per_qcons,
         "qcons-alignment-cap");
    }
    for (int m = 0; m < q_->option_count(); ++m) {
      auto it = option_inc_.find(m);
      if (it == option_inc_.end() || it->second.empty()) continue;
      link_up(it->second, option_var_[m], "option-active-if-edge");
      link_down(it->second, option_var_[m], "option-needs-edge");
    }
  }

  void emit_option_rules() {
    std::vector<std::pair<int, double>> all_opts;
    for (int m = 0; m < q_->option_count(); ++m)
      all_opts.emplace_back(option_var_[m], 1.0);
    le(all_opts, 1.0, "option-at-most-one");
    ge(all_opts, 1.0, "option-at-least-one");

    std::map<int, std::vector<int>> table_opts_by_option;
    for (int ti = 0; ti < static_cast<int>(tables_.size()); ++ti) {
      auto& ctx = tables_[ti];
      const Table& t = tab(ti);
      for (int m = 0; m < q_->option_count(); ++m) {
        std::vector<std::pair<int, double>> cols;
        for (int k = 0; k < t.column_count(); ++k) {
          const int la = ctx.col_opt_var[k][m];
          if (la < 0) continue;
          link_up(ctx.col_opt_edges[k][m], la, "choice-edge-implies-column");
          link_down(ctx.col_opt_edges[k][m], la, "choice-column-needs-edge");
          le({{la, 1.0}, {ctx.table_opt_var[m], -1.0}}, 0.0,
             "choice-column-implies-table");
          cols.emplace_back(la, 1.0);
        }
        if (ctx.table_opt_var[m] < 0) continue;
        le(cols, consts_.max_active_choice_column_vars,
           "choice-columns-per-table");
        le(cols, consts_.max_active_column_choice_alignments,
           "choice-columns-per-table-tight");
        auto down = cols;
        down.emplace_back(ctx.table_opt_var[m], -1.0);
        std::vector<std::pair<int, double>> ge_terms;
        for (auto& [var, coeff] : down) ge_terms.emplace_back(var, coeff);
        // table active for a choice needs a choice column, and some
        // alignment that is not to a choice
        ge(ge_terms, 0.0, "choice-table-needs-column");
        std::vector<std::pair<int, double>> nonchoice;
        for (int j : non_choice_edges(ti)) nonchoice.emplace_back(j, 1.0);
        nonchoice.emplace_back(ctx.table_opt_var[m], -1.0);
        ge(std::move(nonchoice), 0.0, "choice-table-needs-nonchoice-edge");
        table_opts_by_option[m].push_back(ctx.table_opt_var[m]);
      }
    }
    for (const auto& [m, vars] : table_opts_by_option) {
      std::vector<std::pair<int, double>> terms;
      for (int v : vars) terms.emplace_back(v, 1.0);
      le(std::move(terms), consts_.max_active_table_choice_alignments,
         "choice-tables-cap");
    }
  }

  std::vector<int> non_choice_edges(int ti) const {
    std::vector<int> out;
    for (int j = 0; j < problem_.variable_count(); ++j) {
      const IlpVariable& v = problem_.variable(j);
      const bool in_table = v.table_a == ti || v.table_b == ti;
      if (!in_table) continue;
      if (v.kind == VarKind::CellQCons || v.kind == VarKind::HeaderQCons ||
          v.kind == VarKind::CellCell)
        out.push_back(j);
    }
    return out;
  }

  void emit_budgets() {
    std::vector<std::pair<int, double>> tables;
    for (const auto& ctx : tables_)
      if (ctx.table_var >= 0) tables.emplace_back(ctx.table_var, 1.0);
    if (!tables.empty())
      le(std::move(tables), consts_.max_tables_to_chain, "table-budget");
    for (const auto& ctx : tables_) {
      std::vector<std::pair<int, double>> rows;
      for (int rv : ctx.row_var)
        if (rv >= 0) rows.emplace_back(rv, 1.0);
      if (!rows.empty())
        le(std::move(rows), consts_.max_rows_per_table, "row-budget");
    }
    if (!qcons_var_.empty()) {
      std::vector<std::pair<int, double>> qs;
      for (const auto& [pos, var] : qcons_var_) qs.emplace_back(var, 1.0);
      ge(std::move(qs), consts_.min_active_qcons, "min-active-qcons");
    }
  }

  void emit_aux_rules() {
    if (which_active_var_ >= 0)
      ge({{which_active_var_, 1.0}}, 1.0, "which-term-active");
    if (which_aligned_var_ >= 0) {
      std::vector<std::pair<int, double>> terms{{which_aligned_var_, 1.0}};
      for (int e : which_qualifying_) terms.emplace_back(e, -1.0);
      le(std::move(terms), 0.0, "which-term-aligned");
    }
    for (const auto& [aux, e1, e2] : prox_links_) {
      le({{aux, 1.0}, {e1, -1.0}}, 0.0, "proximity-boost");
      le({{aux, 1.0}, {e2, -1.0}}, 0.0, "proximity-boost");
    }
    // a cell may not align to two constituents that are far apart
    for (int ti = 0; ti < static_cast<int>(tables_.size()); ++ti) {
      auto& ctx = tables_[ti];
      for (int rp = 0; rp < static_cast<int>(ctx.sel.rows.size()); ++rp) {
        for (int k = 0; k < tab(ti).column_count(); ++k) {
          std::vector<const IlpVariable*> qedges;
          std::vector<int> qvars;
          for (int var : ctx.cell_inc[rp][k]) {
            const IlpVariable& v = problem_.variable(var);
            if (v.kind == VarKind::CellQCons) {
              qedges.push_back(&v);
              qvars.push_back(var);
            }
          }
          for (size_t a = 0; a < qedges.size(); ++a) {
            for (size_t b = a + 1; b < qedges.size(); ++b) {
              if (std::abs(qedges[a]->qpos_a - qedges[b]->qpos_a) >
                  consts_.qcons_coalign_max_dist)
                le({{qvars[a], 1.0}, {qvars[b], 1.0}}, 1.0,
                   "coalignment-distance-ban");
            }
          }
        }
      }
    }
  }

  void emit_row_rules() {
    for (int ti = 0; ti < static_cast<int>(tables_.size()); ++ti) {
      auto& ctx = tables_[ti];
      const Table& t = tab(ti);
      const int nrows = static_cast<int>(ctx.sel.rows.size());
      for (int rp = 0; rp < nrows; ++rp) {
        if (ctx.row_var[rp] < 0) continue;
        std::vector<std::pair<int, double>> fill;
        std::vector<int> nonchoice, nonquestion;
        for (int k = 0; k < t.column_count(); ++k) {
          if (ctx.cell_var[rp][k] >= 0)
            fill.emplace_back(ctx.cell_var[rp][k], 1.0);
          for (int e : ctx.cell_inc[rp][k]) {
            const VarKind kind = problem_.variable(e).kind;
            if (kind == VarKind::CellQCons || kind == VarKind::CellCell)
              nonchoice.push_back(e);
            if (kind == VarKind::CellOption || kind == VarKind::CellCell)
              nonquestion.push_back(e);
          }
        }
        fill.emplace_back(ctx.row_var[rp],
                          -static_cast<double>(consts_.min_active_cells_per_row));
        ge(std::move(fill), 0.0, "row-min-active-cells");
        std::vector<std::pair<int, double>> nc{{ctx.row_var[rp], 1.0}};
        for (int e : nonchoice) nc.emplace_back(e, -1.0);
        le(std::move(nc), 0.0, "row-needs-nonchoice-edge");
        std::vector<std::pair<int, double>> nq{{ctx.row_var[rp], 1.0}};
        for (int e : nonquestion) nq.emplace_back(e, -1.0);
        le(std::move(nq), 0.0, "row-needs-nonquestion-edge");
      }
      // active rows of one table must light up the same columns, and must
      // differ in at least one active column
      for (int rp = 0; rp < nrows; ++rp) {
        if (ctx.row_var[rp] < 0) continue;
        for (int rp2 = 0; rp2 < nrows; ++rp2) {
          if (rp2 == rp || ctx.row_var[rp2] < 0) continue;
          for (int k = 0; k < t.column_count(); ++k) {
            if (ctx.cell_var[rp][k] < 0) continue;
            std::vector<std::pair<int, double>> terms{
                {ctx.row_var[rp], 1.0},
                {ctx.row_var[rp2], 1.0},
                {ctx.cell_var[rp][k], 1.0}};
            if (ctx.cell_var[rp2][k] >= 0)
              terms.emplace_back(ctx.cell_var[rp2][k], -1.0);
            le(std::move(terms), 2.0, "row-signature-match");
          }
        }
      }
      for (int rp = 0; rp < nrows; ++rp) {
        if (ctx.row_var[rp] < 0) continue;
        for (int rp2 = rp + 1; rp2 < nrows; ++rp2) {
          if (ctx.row_var[rp2] < 0) continue;
          std::vector<std::pair<int, double>> terms{{ctx.row_var[rp], 1.0},
                                                    {ctx.row_var[rp2], 1.0}};
          for (int k = 0; k < t.column_count(); ++k) {
            if (ctx.col_var[k] < 0) continue;
            const auto& ca = t.cell(orig_row(ti, rp), k).tokens;
            const auto& cb = t.cell(orig_row(ti, rp2), k).tokens;
            if (ca != cb) terms.emplace_back(ctx.col_var[k], -1.0);
          }
          le(std::move(terms), 1.0, "rows-differ-in-active-column");
        }
      }
    }
  }

  void emit_inter_table_rules() {
    for (int ta = 0; ta < static_cast<int>(tables_.size()); ++ta) {
      if (tables_[ta].table_var < 0) continue;
      for (int tb = ta + 1; tb < static_cast<int>(tables_.size()); ++tb) {
        if (tables_[tb].table_var < 0) continue;
        std::vector<std::pair<int, double>> terms{
            {tables_[ta].table_var, 1.0}, {tables_[tb].table_var, 1.0}};
        auto it = inter_table_vars_.find({ta, tb});
        if (it != inter_table_vars_.end())
          for (int e : it->second) terms.emplace_back(e, -1.0);
        le(std::move(terms), 1.0, "active-tables-must-connect");
      }
    }
  }

  void emit_relation_rules() {
    for (int ti = 0; ti < static_cast<int>(tables_.size()); ++ti) {
      auto& ctx = tables_[ti];
      const Table& t = tab(ti);
      if (t.relations.empty()) continue;

      for (size_t qi = 0; qi < ctx.matches.size(); ++qi) {
        const auto& match = ctx.matches[qi];
        const auto& rel = t.relations[match.relation_index];
        const int quad = ctx.quad_var[qi];
        le({{quad, 1.0}, {ctx.col_var[rel.from_col], -1.0}}, 0.0,
           "relation-match-needs-columns");
        le({{quad, 1.0}, {ctx.col_var[rel.to_col], -1.0}}, 0.0,
           "relation-match-needs-columns");
        // an active match pins the columns to valid question positions:
        // the destination column may not align at or before X, the source
        // column may not align at or after Y
        for (int rp = 0; rp < static_cast<int>(ctx.sel.rows.size()); ++rp) {
          for (int e : ctx.cell_inc[rp][rel.to_col]) {
            const IlpVariable& v = problem_.variable(e);
            if (v.kind == VarKind::CellQCons && v.qpos_a <= match.q_from)
              le({{quad, 1.0}, {e, 1.0}}, 1.0, "relation-match-position");
          }
          for (int e : ctx.cell_inc[rp][rel.from_col]) {
            const IlpVariable& v = problem_.variable(e);
            if (v.kind == VarKind::CellQCons && v.qpos_a >= match.q_to)
              le({{quad, 1.0}, {e, 1.0}}, 1.0, "relation-match-position");
          }
        }
      }

      // an active annotated column requires a live match or the penalty
      std::set<int> annotated_cols;
      for (const auto& rel : t.relations) {
        annotated_cols.insert(rel.from_col);
        annotated_cols.insert(rel.to_col);
      }
      for (int k : annotated_cols) {
        if (ctx.col_var[k] < 0) continue;
        std::vector<std::pair<int, double>> terms{{ctx.col_var[k], 1.0}};
        for (size_t qi = 0; qi < ctx.matches.size(); ++qi) {
          const auto& rel = t.relations[ctx.matches[qi].relation_index];
          if (rel.from_col == k || rel.to_col == k)
            terms.emplace_back(ctx.quad_var[qi], -1.0);
        }
        for (const auto& [ri, pen] : ctx.pen_var) {
          const auto& rel = t.relations[ri];
          if (rel.from_col == k || rel.to_col == k)
            terms.emplace_back(pen, -1.0);
        }
        le(std::move(terms), 0.0, "column-needs-relation-match");
      }
    }
  }

  const Question* q_;
  const JoinMap* joins_;
  const AlignmentScorer* scorer_;
  Thresholds thr_;
  ModelConstants consts_;
  ObjectiveWeights weights_;

  IlpProblem problem_;
  std::vector<TableCtx> tables_;
  std::map<int, std::vector<int>> qcons_inc_;   // position -> pairwise vars
  std::map<int, std::vector<int>> option_inc_;  // option -> pairwise vars
  std::map<int, int> qcons_var_;
  std::vector<int> option_var_;
  std::map<std::pair<int, int>, std::vector<int>> inter_table_vars_;
  WhichTermSpan which_;
  int which_active_var_ = -1;
  int which_aligned_var_ = -1;
  std::vector<int> which_qualifying_;
  struct ProxLink {
    int aux, e1, e2;
  };
  std::vector<ProxLink> prox_links_;
  bool variables_done_ = false;
};

inline IlpProblem build_support_model(const Question& q,
                                      const std::vector<SelectedTable>& tables,
                                      const JoinMap& joins,
                                      const AlignmentScorer& scorer,
                                      const PipelineConfig& config) {
  SupportModelBuilder builder(q, tables, joins, scorer, config.thresholds,
                              config.constants, config.weights);
  builder.build_variables();
  builder.build_constraints();
  return std::move(builder.problem());
}

// Ablations rewrite a built model. NoMultirow swaps the row/table budgets
// for global single-row, single-table budgets; NoRelationMatch removes the
// relation machinery entirely.
inline IlpProblem apply_ablation(const IlpProblem& problem, AblationMode mode) {
  if (mode == AblationMode::None) return problem;
  if (mode == AblationMode::NoRelationMatch) {
    return problem.filtered([](const IlpVariable& v) {
      return v.kind != VarKind::RelationMatchQuad &&
             v.kind != VarKind::ColumnColumnRelation;
    });
  }
  // NoMultirow
  IlpProblem out;
  for (const auto& v : problem.variables()) out.add_variable(v);
  for (const auto& c : problem.constraints()) {
    if (c.tag == "row-budget" || c.tag == "table-budget") continue;
    out.add_constraint(c);
  }
  std::vector<std::pair<int, double>> rows, tables;
  for (int j = 0; j < problem.variable_count(); ++j) {
    if (problem.variable(j).kind == VarKind::ActiveRow)
      rows.emplace_back(j, 1.0);
    if (problem.variable(j).kind == VarKind::ActiveTable)
      tables.emplace_back(j, 1.0);
  }
  if (!rows.empty()) {
    LinearConstraint c;
    c.terms = rows;
    c.sense = Sense::LE;
    c.rhs = 1.0;
    c.tag = "row-budget";
    out.add_constraint(std::move(c));
  }
  if (!tables.empty()) {
    LinearConstraint c;
    c.terms = tables;
    c.sense = Sense::LE;
    c.rhs = 1.0;
    c.tag = "table-budget";
    out.add_constraint(std::move(c));
  }
  return out;
}

}  // namespace sgqa
