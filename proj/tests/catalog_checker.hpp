#pragma once

// Hand-coded re-statement of the support-graph constraint catalog, used to
// cross-examine the generated ILP: over every 0/1 assignment of a small
// fixture, an assignment satisfies the generated rows if and only if this
// checker accepts it. The rules below are written directly against the
// fixture structure (variables, scores, join map, constants), not against
// the emitted LinearConstraints.

#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "sgqa/alignment.hpp"
#include "sgqa/config.hpp"
#include "sgqa/ilp.hpp"
#include "sgqa/model_builder.hpp"
#include "sgqa/question.hpp"

namespace sgqa::testing {

class CatalogChecker {
 public:
  CatalogChecker(const IlpProblem& p, const Question& q,
                 const std::vector<SelectedTable>& tables,
                 const AlignmentScorer& scorer, const Thresholds& thr,
                 const ModelConstants& consts)
      : p_(&p), q_(&q), tables_(&tables), scorer_(&scorer), thr_(thr),
        consts_(consts) {
    for (int j = 0; j < p.variable_count(); ++j) {
      const IlpVariable& v = p.variable(j);
      by_kind_[v.kind].push_back(j);
      switch (v.kind) {
        case VarKind::CellQCons:
        case VarKind::CellOption:
          cell_edges_[{v.table_a, v.row_a, v.col_a}].push_back(j);
          break;
        case VarKind::CellCell:
          cell_edges_[{v.table_a, v.row_a, v.col_a}].push_back(j);
          cell_edges_[{v.table_b, v.row_b, v.col_b}].push_back(j);
          break;
        case VarKind::HeaderQCons:
        case VarKind::HeaderOption:
          header_edges_[{v.table_a, v.col_a}].push_back(j);
          break;
        case VarKind::ActiveCell:
          cell_var_[{v.table_a, v.row_a, v.col_a}] = j;
          break;
        case VarKind::ActiveRow:
          row_var_[{v.table_a, v.row_a}] = j;
          break;
        case VarKind::ActiveColumn:
          col_var_[{v.table_a, v.col_a}] = j;
          break;
        case VarKind::ActiveHeader:
          header_var_[{v.table_a, v.col_a}] = j;
          break;
        case VarKind::ActiveTable:
          table_var_[v.table_a] = j;
          break;
        case VarKind::ActiveQCons:
          qcons_var_[v.qpos_a] = j;
          break;
        case VarKind::ActiveOption:
          option_var_[v.option] = j;
          break;
        case VarKind::ColumnOption:
          colopt_var_[{v.table_a, v.col_a, v.option}] = j;
          break;
        case VarKind::TableOption:
          tabopt_var_[{v.table_a, v.option}] = j;
          break;
        default:
          break;
      }
    }
  }

  // true iff the assignment satisfies every catalog rule
  bool accepts(const std::vector<int>& x) const {
    const auto on = [&x](int j) { return j >= 0 && x[j] == 1; };
    const auto var = [this](VarKind k) -> const std::vector<int>& {
      static const std::vector<int> empty;
      auto it = by_kind_.find(k);
      return it == by_kind_.end() ? empty : it->second;
    };
    const IlpProblem& p = *p_;

    // --- cell activity: iff-link via aggregate mass, plus alignment cap
    for (const auto& [key, edges] : cell_edges_) {
      auto it = cell_var_.find(key);
      if (it == cell_var_.end()) return false;  // builder must create it
      const int cv = it->second;
      double mass = 0.0;
      int count = 0;
      for (int e : edges) {
        if (!x[e]) continue;
        if (!on(cv)) return false;  // an edge wakes its cell
        mass += p.variable(e).score;
        ++count;
      }
      if (on(cv) && mass < thr_.min_active_cell_aggr_alignment - 1e-9)
        return false;
      if (count > consts_.max_alignments_per_cell) return false;
    }
    // --- header activity
    for (const auto& [key, edges] : header_edges_) {
      const int hv = header_var_.at(key);
      double mass = 0.0;
      bool any = false;
      for (int e : edges)
        if (x[e]) {
          any = true;
          mass += p.variable(e).score;
        }
      if (any && !on(hv)) return false;
      if (on(hv) && !any) return false;
      if (on(hv) && mass < thr_.min_active_title_aggr_alignment - 1e-9)
        return false;
    }
    // --- row activity, fill, and the two row-support requirements
    std::map<std::pair<int, int>, std::vector<int>> row_edges;
    for (const auto& [key, edges] : cell_edges_) {
      auto& dst = row_edges[{std::get<0>(key), std::get<1>(key)}];
      dst.insert(dst.end(), edges.begin(), edges.end());
    }
    for (const auto& [key, rv] : row_var_) {
      const auto& edges = row_edges[key];
      bool any = false, nonchoice = false, nonquestion = false;
      for (int e : edges) {
        if (!x[e]) continue;
        any = true;
        const VarKind k = p.variable(e).kind;
        if (k == VarKind::CellQCons || k == VarKind::CellCell)
          nonchoice = true;
        if (k == VarKind::CellOption || k == VarKind::CellCell)
          nonquestion = true;
      }
      if (any && !on(rv)) return false;
      if (on(rv) && !any) return false;
      if (on(rv)) {
        if (!nonchoice || !nonquestion) return false;
        int active_cells = 0;
        const auto& tab = *(*tables_)[key.first].table;
        for (int k = 0; k < tab.column_count(); ++k) {
          auto cit = cell_var_.find({key.first, key.second, k});
          if (cit != cell_var_.end() && x[cit->second]) ++active_cells;
        }
        if (active_cells < consts_.min_active_cells_per_row) return false;
      }
    }
    // --- column activity: any incident edge (cell or header) wakes it; an
    // active column needs an edge, an active cell, and its table active
    for (const auto& [key, cv] : col_var_) {
      bool any = false;
      for (const auto& [ckey, edges] : cell_edges_) {
        if (std::get<0>(ckey) != key.first || std::get<2>(ckey) != key.second)
          continue;
        for (int e : edges)
          if (x[e]) any = true;
      }
      auto hit = header_edges_.find(key);
      if (hit != header_edges_.end())
        for (int e : hit->second)
          if (x[e]) any = true;
      if (any && !on(cv)) return false;
      if (on(cv) && !any) return false;
      if (on(cv)) {
        bool cell_on = false;
        const auto& tab = *(*tables_)[key.first].table;
        for (int rp = 0; rp < static_cast<int>((*tables_)[key.first].rows.size());
             ++rp) {
          auto cit = cell_var_.find({key.first, rp, key.second});
          if (cit != cell_var_.end() && x[cit->second]) cell_on = true;
        }
        (void)tab;
        if (!cell_on) return false;
        if (!on(table_var_.at(key.first))) return false;
      }
    }
    // --- table activity
    for (const auto& [ti, tv] : table_var_) {
      bool any = false;
      for (const auto& [ckey, edges] : cell_edges_)
        if (std::get<0>(ckey) == ti)
          for (int e : edges)
            if (x[e]) any = true;
      for (const auto& [hkey, edges] : header_edges_)
        if (hkey.first == ti)
          for (int e : edges)
            if (x[e]) any = true;
      if (any && !on(tv)) return false;
      if (on(tv) && !any) return false;
      if (on(tv)) {
        bool col_on = false;
        for (const auto& [key, cv] : col_var_)
          if (key.first == ti && x[cv]) col_on = true;
        if (!col_on) return false;
      }
    }
    // --- question constituents: iff-link and per-constituent cap
    std::map<int, std::vector<int>> qcons_edges;
    for (VarKind k : {VarKind::CellQCons, VarKind::HeaderQCons})
      for (int j : var(k)) qcons_edges[p.variable(j).qpos_a].push_back(j);
    for (const auto& [pos, qv] : qcons_var_) {
      int count = 0;
      for (int e : qcons_edges[pos])
        if (x[e]) ++count;
      if (count > 0 && !on(qv)) return false;
      if (on(qv) && count == 0) return false;
      if (count > consts_.max_alignments_per_qcons) return false;
    }
    if (!qcons_var_.empty()) {
      int active = 0;
      for (const auto& [pos, qv] : qcons_var_)
        if (x[qv]) ++active;
      if (active < consts_.min_active_qcons) return false;
    }
    // --- options: exactly one, linked to its edges when it has any
    std::map<int, std::vector<int>> option_edges;
    for (VarKind k : {VarKind::CellOption, VarKind::HeaderOption})
      for (int j : var(k)) option_edges[p.variable(j).option].push_back(j);
    int active_options = 0;
    for (const auto& [m, ov] : option_var_) {
      if (x[ov]) ++active_options;
      bool any = false;
      for (int e : option_edges[m])
        if (x[e]) any = true;
      if (any && !x[ov]) return false;
      if (x[ov] && !option_edges[m].empty() && !any) return false;
    }
    if (active_options != 1) return false;
    // --- budgets
    int active_tables = 0;
    for (const auto& [ti, tv] : table_var_)
      if (x[tv]) ++active_tables;
    if (active_tables > consts_.max_tables_to_chain) return false;
    std::map<int, int> rows_per_table;
    for (const auto& [key, rv] : row_var_)
      if (x[rv]) ++rows_per_table[key.first];
    for (const auto& [ti, cnt] : rows_per_table)
      if (cnt > consts_.max_rows_per_table) return false;
    // --- option aggregation machinery
    std::map<std::tuple<int, int, int>, std::vector<int>> m_edges;
    for (VarKind k : {VarKind::CellOption, VarKind::HeaderOption})
      for (int j : var(k)) {
        const auto& v = p.variable(j);
        m_edges[{v.table_a, v.col_a, v.option}].push_back(j);
      }
    for (const auto& [key, edges] : m_edges) {
      const int la = colopt_var_.at(key);
      bool any = false;
      for (int e : edges)
        if (x[e]) any = true;
      if (any && !x[la]) return false;
      if (x[la] && !any) return false;
      if (x[la] &&
          !x[tabopt_var_.at({std::get<0>(key), std::get<2>(key)})])
        return false;
    }
    std::map<int, int> tabopt_count;  // per option
    for (const auto& [key, ta] : tabopt_var_) {
      int active_cols = 0;
      for (const auto& [ckey, la] : colopt_var_)
        if (std::get<0>(ckey) == key.first &&
            std::get<2>(ckey) == key.second && x[la])
          ++active_cols;
      if (active_cols > consts_.max_active_choice_column_vars) return false;
      if (active_cols > consts_.max_active_column_choice_alignments)
        return false;
      if (x[ta] && active_cols == 0) return false;
      if (x[ta]) {
        ++tabopt_count[key.second];
        // some alignment that is not to a choice must exist in the table
        bool nonchoice = false;
        for (VarKind k :
             {VarKind::CellQCons, VarKind::HeaderQCons, VarKind::CellCell})
          for (int j : var(k)) {
            const auto& v = p.variable(j);
            if ((v.table_a == key.first || v.table_b == key.first) && x[j])
              nonchoice = true;
          }
        if (!nonchoice) return false;
      }
    }
    for (const auto& [m, cnt] : tabopt_count)
      if (cnt > consts_.max_active_table_choice_alignments) return false;
    // --- which-term boosts
    const auto span = detect_which_term(*q_, consts_.which_term_span);
    for (int j : var(VarKind::AuxWhichActive))
      if (span.present && !x[j]) return false;
    for (int j : var(VarKind::AuxWhichAligned)) {
      if (!x[j]) continue;
      bool qualifying_on = false;
      for (VarKind k : {VarKind::CellOption, VarKind::HeaderOption})
        for (int e : var(k)) {
          if (!x[e]) continue;
          const auto& v = p.variable(e);
          const auto& tab = *(*tables_)[v.table_a].table;
          const auto& phrase =
              v.kind == VarKind::CellOption
                  ? tab.cell((*tables_)[v.table_a].rows[v.row_a], v.col_a)
                        .tokens
                  : tab.headers[v.col_a].tokens;
          for (int pos : span.constituent_positions)
            if (scorer_->entail(phrase, {q_->raw_tokens[pos]}) >
                consts_.min_alignment_which_term)
              qualifying_on = true;
        }
      if (!qualifying_on) return false;
    }
    // --- proximity boosts and the far-apart co-alignment ban
    for (int j : var(VarKind::AuxCellProximity)) {
      if (!x[j]) continue;
      const auto& v = p.variable(j);
      bool lo_on = false, hi_on = false;
      for (int e : var(VarKind::CellQCons)) {
        const auto& ev = p.variable(e);
        if (ev.table_a != v.table_a || ev.row_a != v.row_a ||
            ev.col_a != v.col_a || !x[e])
          continue;
        if (ev.qpos_a == v.qpos_a) lo_on = true;
        if (ev.qpos_a == v.qpos_b) hi_on = true;
      }
      if (!lo_on || !hi_on) return false;
    }
    for (const auto& [key, edges] : cell_edges_) {
      std::vector<int> positions;
      for (int e : edges)
        if (x[e] && p.variable(e).kind == VarKind::CellQCons)
          positions.push_back(p.variable(e).qpos_a);
      for (size_t a = 0; a < positions.size(); ++a)
        for (size_t b = a + 1; b < positions.size(); ++b)
          if (std::abs(positions[a] - positions[b]) >
              consts_.qcons_coalign_max_dist)
            return false;
    }
    // --- semantic relation rules
    for (int j : var(VarKind::RelationMatchQuad)) {
      const auto& v = p.variable(j);
      const auto& rel = (*tables_)[v.table_a].table->relations[v.relation];
      if (x[j]) {
        if (!on(lookup(col_var_, {v.table_a, rel.from_col}))) return false;
        if (!on(lookup(col_var_, {v.table_a, rel.to_col}))) return false;
        for (int e : var(VarKind::CellQCons)) {
          const auto& ev = p.variable(e);
          if (!x[e] || ev.table_a != v.table_a) continue;
          if (ev.col_a == rel.to_col && ev.qpos_a <= v.qpos_a) return false;
          if (ev.col_a == rel.from_col && ev.qpos_a >= v.qpos_b) return false;
        }
      }
    }
    for (const auto& [key, cv] : col_var_) {
      if (!x[cv]) continue;
      const auto& tab = *(*tables_)[key.first].table;
      bool annotated = false, satisfied = false;
      for (size_t ri = 0; ri < tab.relations.size(); ++ri) {
        const auto& rel = tab.relations[ri];
        if (rel.from_col != key.second && rel.to_col != key.second) continue;
        annotated = true;
        for (int j : var(VarKind::RelationMatchQuad)) {
          const auto& v = p.variable(j);
          if (v.table_a == key.first &&
              v.relation == static_cast<int>(ri) && x[j])
            satisfied = true;
        }
        for (int j : var(VarKind::ColumnColumnRelation)) {
          const auto& v = p.variable(j);
          if (v.table_a == key.first &&
              v.relation == static_cast<int>(ri) && x[j])
            satisfied = true;
        }
      }
      if (annotated && !satisfied) return false;
    }
    // --- identical activity signature and distinctness across active rows
    for (const auto& [ka, ra] : row_var_) {
      for (const auto& [kb, rb] : row_var_) {
        if (ka.first != kb.first || ka.second >= kb.second) continue;
        if (!x[ra] || !x[rb]) continue;
        const auto& st = (*tables_)[ka.first];
        const auto& tab = *st.table;
        bool differ_active = false;
        for (int k = 0; k < tab.column_count(); ++k) {
          const bool ca = on(lookup(cell_var_, {ka.first, ka.second, k}));
          const bool cb = on(lookup(cell_var_, {kb.first, kb.second, k}));
          if (ca != cb) return false;  // signature mismatch
          const auto& ta = tab.cell(st.rows[ka.second], k).tokens;
          const auto& tb = tab.cell(st.rows[kb.second], k).tokens;
          if (ta != tb && on(lookup(col_var_, {ka.first, k})))
            differ_active = true;
        }
        if (!differ_active) return false;
      }
    }
    // --- active tables must connect through an inter-table alignment
    for (const auto& [ta, tva] : table_var_) {
      for (const auto& [tb, tvb] : table_var_) {
        if (ta >= tb || !x[tva] || !x[tvb]) continue;
        bool connected = false;
        for (int j : var(VarKind::CellCell)) {
          const auto& v = p.variable(j);
          if (((v.table_a == ta && v.table_b == tb) ||
               (v.table_a == tb && v.table_b == ta)) &&
              x[j])
            connected = true;
        }
        if (!connected) return false;
      }
    }
    return true;
  }

 private:
  template <typename K>
  static int lookup(const std::map<K, int>& m, const K& key) {
    auto it = m.find(key);
    return it == m.end() ? -1 : it->second;
  }

  const IlpProblem* p_;
  const Question* q_;
  const std::vector<SelectedTable>* tables_;
  const AlignmentScorer* scorer_;
  Thresholds thr_;
  ModelConstants consts_;

  std::map<VarKind, std::vector<int>> by_kind_;
  std::map<std::tuple<int, int, int>, std::vector<int>> cell_edges_;
  std::map<std::pair<int, int>, std::vector<int>> header_edges_;
  std::map<std::tuple<int, int, int>, int> cell_var_;
  std::map<std::pair<int, int>, int> row_var_;
  std::map<std::pair<int, int>, int> col_var_;
  std::map<std::pair<int, int>, int> header_var_;
  std::map<int, int> table_var_;
  std::map<int, int> qcons_var_;
  std::map<int, int> option_var_;
  std::map<std::tuple<int, int, int>, int> colopt_var_;
  std::map<std::pair<int, int>, int> tabopt_var_;
};

}  // namespace sgqa::testing
