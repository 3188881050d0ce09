#pragma once

// Pre-ILP filtering: rank tables by TF-IDF against the question, then keep
// the rows that share the most content tokens with it.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sgqa/question.hpp"
#include "sgqa/table.hpp"

namespace sgqa {

// All header and cell tokens of the table as one bag of words.
inline std::map<std::string, int> table_term_counts(const Table& t) {
  std::map<std::string, int> counts;
  auto add = [&counts](const Cell& c) {
    for (const auto& tok : c.tokens) ++counts[tok];
  };
  for (const auto& h : t.headers) add(h);
  for (const auto& row : t.rows)
    for (const auto& c : row) add(c);
  return counts;
}

// TF = raw term count in the table document, IDF = ln(N / df). Question
// terms that appear in no table contribute nothing. Ties break toward the
// lexicographically smaller table id.
inline std::vector<const Table*> select_tables(const Question& q,
                                               const TableCorpus& corpus,
                                               int k = 7) {
  const int n = static_cast<int>(corpus.tables.size());
  if (n == 0) return {};

  std::vector<std::map<std::string, int>> term_counts;
  term_counts.reserve(n);
  for (const auto& t : corpus.tables) term_counts.push_back(table_term_counts(t));

  std::set<std::string> q_terms;
  for (const auto& c : q.constituents) q_terms.insert(c.text);

  std::map<std::string, int> df;
  for (const auto& term : q_terms)
    for (const auto& counts : term_counts)
      if (counts.count(term)) ++df[term];

  std::vector<std::pair<double, const Table*>> scored;
  for (int i = 0; i < n; ++i) {
    double score = 0.0;
    for (const auto& term : q_terms) {
      auto it = term_counts[i].find(term);
      if (it == term_counts[i].end()) continue;
      score += it->second * std::log(static_cast<double>(n) / df[term]);
    }
    scored.emplace_back(score, &corpus.tables[i]);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) {
                     if (a.first != b.first) return a.first > b.first;
                     return a.second->id < b.second->id;
                   });

  std::vector<const Table*> out;
  for (int i = 0; i < std::min(k, n); ++i) out.push_back(scored[i].second);
  return out;
}

// Overlap = number of distinct question content tokens present anywhere in
// the row. Ties break toward the lower row index.
inline std::vector<int> select_rows(const Question& q, const Table& table,
                                    int n = 20) {
  std::set<std::string> q_terms;
  for (const auto& c : q.constituents) q_terms.insert(c.text);

  std::vector<std::pair<int, int>> scored;  // (overlap, row index)
  for (int j = 0; j < table.row_count(); ++j) {
    std::set<std::string> row_terms;
    for (const auto& c : table.rows[j])
      row_terms.insert(c.tokens.begin(), c.tokens.end());
    int overlap = 0;
    for (const auto& term : q_terms)
      if (row_terms.count(term)) ++overlap;
    scored.emplace_back(overlap, j);
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  std::vector<int> out;
  const int keep = std::min(n, table.row_count());
  for (int i = 0; i < keep; ++i) out.push_back(scored[i].second);
  return out;
}

}  // namespace sgqa
