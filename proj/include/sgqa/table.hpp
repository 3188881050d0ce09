#pragma once

// Semi-structured knowledge: tables of n-ary string predicates with headers,
// optional semantic relation annotations between columns, and a manually
// curated join map that marks which header pairs across tables line up.

#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "sgqa/text.hpp"

namespace sgqa {

struct CorpusError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A linguistic pattern annotation between two columns of one table,
// e.g. fromTo(from_col, to_col) expressed as "X to a Y".
struct ColumnRelation {
  std::string name;
  int from_col = -1;
  int to_col = -1;
  std::vector<std::string> patterns;  // each contains X and Y exactly once
};

struct Cell {
  std::string text;                  // normalized
  std::vector<std::string> tokens;   // content tokens (stopwords removed)
};

struct Table {
  std::string id;
  std::string title;
  std::vector<Cell> headers;
  std::vector<std::vector<Cell>> rows;  // every row has headers.size() cells
  std::vector<ColumnRelation> relations;
  bool is_open_ie = false;

  int column_count() const { return static_cast<int>(headers.size()); }
  int row_count() const { return static_cast<int>(rows.size()); }

  const Cell& cell(int row, int col) const { return rows.at(row).at(col); }

  void validate() const {
    if (id.empty()) throw CorpusError("table with empty id");
    if (headers.empty()) throw CorpusError("table '" + id + "' has no headers");
    for (const auto& h : headers)
      if (h.text.empty())
        throw CorpusError("table '" + id + "' has an empty header");
    for (size_t j = 0; j < rows.size(); ++j) {
      if (rows[j].size() != headers.size())
        throw CorpusError("table '" + id + "' row " + std::to_string(j) +
                          " has " + std::to_string(rows[j].size()) +
                          " cells, expected " + std::to_string(headers.size()));
      for (const auto& c : rows[j])
        if (c.text.empty())
          throw CorpusError("table '" + id + "' row " + std::to_string(j) +
                            " has an empty cell");
    }
    for (const auto& rel : relations) {
      if (rel.from_col == rel.to_col)
        throw CorpusError("relation '" + rel.name + "' on table '" + id +
                          "' uses the same column twice");
      if (rel.from_col < 0 || rel.from_col >= column_count() ||
          rel.to_col < 0 || rel.to_col >= column_count())
        throw CorpusError("relation '" + rel.name + "' on table '" + id +
                          "' references a column out of range");
      for (const auto& p : rel.patterns) {
        auto toks = tokenize(p);
        int xs = 0, ys = 0;
        for (auto& t : toks) {
          if (t == "x") ++xs;
          if (t == "y") ++ys;
        }
        if (xs != 1 || ys != 1)
          throw CorpusError("pattern '" + p + "' of relation '" + rel.name +
                            "' must contain placeholders X and Y exactly once");
      }
    }
  }
};

// Manual 0/1 weights on header pairs across tables. Symmetric; absent = 0.
class JoinMap {
 public:
  void add(const std::string& t1, int c1, const std::string& t2, int c2,
           int weight) {
    if (weight != 0 && weight != 1)
      throw CorpusError("join weight must be 0 or 1");
    entries_[key(t1, c1, t2, c2)] = weight;
    entries_[key(t2, c2, t1, c1)] = weight;
  }

  int weight(const std::string& t1, int c1, const std::string& t2,
             int c2) const {
    auto it = entries_.find(key(t1, c1, t2, c2));
    return it == entries_.end() ? 0 : it->second;
  }

  bool joinable(const std::string& t1, int c1, const std::string& t2,
                int c2) const {
    return weight(t1, c1, t2, c2) == 1;
  }

  size_t size() const { return entries_.size(); }

  // unique undirected entries, for serialization
  std::vector<std::tuple<std::string, int, std::string, int, int>> items()
      const {
    std::vector<std::tuple<std::string, int, std::string, int, int>> out;
    for (const auto& [k, w] : entries_) {
      auto [t1, c1, t2, c2] = unkey(k);
      if (std::tie(t1, c1) <= std::tie(t2, c2))
        out.emplace_back(t1, c1, t2, c2, w);
    }
    return out;
  }

 private:
  static std::string key(const std::string& t1, int c1, const std::string& t2,
                         int c2) {
    return t1 + "\x1f" + std::to_string(c1) + "\x1f" + t2 + "\x1f" +
           std::to_string(c2);
  }
  static std::tuple<std::string, int, std::string, int> unkey(
      const std::string& k) {
    std::vector<std::string> parts;
    size_t start = 0;
    for (size_t i = 0; i <= k.size(); ++i) {
      if (i == k.size() || k[i] == '\x1f') {
        parts.push_back(k.substr(start, i - start));
        start = i + 1;
      }
    }
    return {parts[0], std::stoi(parts[1]), parts[2], std::stoi(parts[3])};
  }
  std::map<std::string, int> entries_;
};

struct TableCorpus {
  std::vector<Table> tables;
  StopwordSet stopwords;
  JoinMap join_map;

  const Table* find(const std::string& id) const {
    for (const auto& t : tables)
      if (t.id == id) return &t;
    return nullptr;
  }

  void validate() const {
    if (stopwords.empty()) throw CorpusError("stopword set is empty");
    std::set<std::string> seen;
    for (const auto& t : tables) {
      t.validate();
      if (!seen.insert(t.id).second)
        throw CorpusError("duplicate table id '" + t.id + "'");
    }
  }
};

inline Cell make_cell(const std::string& raw, const StopwordSet& stop) {
  Cell c;
  c.text = normalize_text(raw);
  c.tokens = content_tokens(raw, stop);
  return c;
}

}  // namespace sgqa
