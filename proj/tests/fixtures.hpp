#pragma once

// Shared helpers for building small in-memory corpora and questions.

#include <string>
#include <vector>

#include "sgqa/corpus_io.hpp"
#include "sgqa/pipeline.hpp"
#include "sgqa/question.hpp"
#include "sgqa/table.hpp"

namespace sgqa::testing {

inline Table make_table(const std::string& id,
                        const std::vector<std::string>& headers,
                        const std::vector<std::vector<std::string>>& rows,
                        const StopwordSet& stop = default_stopwords()) {
  Table t;
  t.id = id;
  t.title = id;
  for (const auto& h : headers) t.headers.push_back(make_cell(h, stop));
  for (const auto& row : rows) {
    std::vector<Cell> cells;
    for (const auto& c : row) cells.push_back(make_cell(c, stop));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

inline SelectedTable all_rows(const Table& t) {
  SelectedTable st;
  st.table = &t;
  for (int j = 0; j < t.row_count(); ++j) st.rows.push_back(j);
  return st;
}

inline std::string data_dir() { return SGQA_DATA_DIR; }

inline const TableCorpus& bundled_corpus() {
  static const TableCorpus corpus = load_corpus(data_dir() + "/corpus");
  return corpus;
}

inline const std::vector<Question>& bundled_questions() {
  static const std::vector<Question> questions =
      load_questions(data_dir() + "/questions.jsonl",
                     bundled_corpus().stopwords);
  return questions;
}

inline const Question& bundled_question(const std::string& id) {
  for (const auto& q : bundled_questions())
    if (q.id == id) return q;
  throw std::runtime_error("no bundled question with id " + id);
}

}  // namespace sgqa::testing
