#pragma once

// Corpus directory layout:
//   corpus.json    metadata: table list, relation annotations, join map
//   <table>.tsv    one file per table; line 1 = headers, then rows;
//                  lines whose first byte is '#' are comments
//   stopwords.txt  optional override of the built-in stopword list

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgqa/table.hpp"

namespace sgqa {

namespace fs = std::filesystem;

inline StopwordSet load_stopwords(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw CorpusError("cannot open stopword file " + file.string());
  StopwordSet out;
  std::string line;
  while (std::getline(in, line)) {
    for (auto& t : tokenize(line)) out.insert(std::move(t));
  }
  if (out.empty()) throw CorpusError("stopword file " + file.string() + " is empty");
  return out;
}

inline Table load_table_tsv(const fs::path& file, const std::string& id,
                            const std::string& title,
                            const StopwordSet& stop) {
  std::ifstream in(file);
  if (!in) throw CorpusError("cannot open table file " + file.string());
  Table t;
  t.id = id;
  t.title = normalize_text(title);
  std::string line;
  int lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] == '#') continue;
    if (line.empty()) continue;
    std::vector<Cell> cells;
    std::istringstream row(line);
    std::string field;
    while (std::getline(row, field, '\t')) cells.push_back(make_cell(field, stop));
    if (!have_header) {
      t.headers = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.headers.size())
      throw CorpusError(file.string() + ":" + std::to_string(lineno) +
                        ": row has " + std::to_string(cells.size()) +
                        " cells, expected " + std::to_string(t.headers.size()));
    t.rows.push_back(std::move(cells));
  }
  if (!have_header)
    throw CorpusError(file.string() + ": table file has no header line");
  return t;
}

inline TableCorpus load_corpus(const fs::path& dir,
                               const fs::path& stopword_override = {}) {
  if (!fs::is_directory(dir))
    throw CorpusError("corpus directory " + dir.string() + " does not exist");

  TableCorpus corpus;
  if (!stopword_override.empty())
    corpus.stopwords = load_stopwords(stopword_override);
  else if (fs::exists(dir / "stopwords.txt"))
    corpus.stopwords = load_stopwords(dir / "stopwords.txt");
  else
    corpus.stopwords = default_stopwords();

  const fs::path meta_path = dir / "corpus.json";
  if (!fs::exists(meta_path))
    throw CorpusError("missing metadata file " + meta_path.string());
  std::ifstream meta_in(meta_path);
  nlohmann::json meta;
  try {
    meta_in >> meta;
  } catch (const std::exception& e) {
    throw CorpusError("cannot parse " + meta_path.string() + ": " + e.what());
  }

  for (const auto& jt : meta.value("tables", nlohmann::json::array())) {
    const std::string id = jt.at("id").get<std::string>();
    const std::string file = jt.at("file").get<std::string>();
    const std::string title = jt.value("title", id);
    Table t = load_table_tsv(dir / file, id, title, corpus.stopwords);
    t.is_open_ie = jt.value("open_ie", false);
    for (const auto& jr : jt.value("relations", nlohmann::json::array())) {
      ColumnRelation rel;
      rel.name = jr.at("name").get<std::string>();
      rel.from_col = jr.at("from_col").get<int>();
      rel.to_col = jr.at("to_col").get<int>();
      for (const auto& p : jr.at("patterns"))
        rel.patterns.push_back(p.get<std::string>());
      t.relations.push_back(std::move(rel));
    }
    corpus.tables.push_back(std::move(t));
  }
  if (corpus.tables.empty())
    throw CorpusError("no tables found in " + dir.string());

  for (const auto& jj : meta.value("joins", nlohmann::json::array())) {
    corpus.join_map.add(jj.at("t1").get<std::string>(), jj.at("c1").get<int>(),
                        jj.at("t2").get<std::string>(), jj.at("c2").get<int>(),
                        jj.at("weight").get<int>());
  }

  corpus.validate();
  return corpus;
}

// Writes a corpus back out in the same format load_corpus reads. Loading a
// saved corpus reproduces it exactly (content is already normalized).
inline void save_corpus(const TableCorpus& corpus, const fs::path& dir) {
  fs::create_directories(dir);
  nlohmann::json meta;
  meta["tables"] = nlohmann::json::array();
  for (const auto& t : corpus.tables) {
    nlohmann::json jt;
    jt["id"] = t.id;
    jt["file"] = t.id + ".tsv";
    jt["title"] = t.title;
    jt["open_ie"] = t.is_open_ie;
    jt["relations"] = nlohmann::json::array();
    for (const auto& rel : t.relations) {
      nlohmann::json jr;
      jr["name"] = rel.name;
      jr["from_col"] = rel.from_col;
      jr["to_col"] = rel.to_col;
      jr["patterns"] = rel.patterns;
      jt["relations"].push_back(jr);
    }
    meta["tables"].push_back(jt);

    std::ofstream out(dir / (t.id + ".tsv"));
    auto write_row = [&out](const std::vector<Cell>& cells) {
      for (size_t k = 0; k < cells.size(); ++k) {
        if (k) out << '\t';
        out << cells[k].text;
      }
      out << '\n';
    };
    write_row(t.headers);
    for (const auto& row : t.rows) write_row(row);
  }
  meta["joins"] = nlohmann::json::array();
  for (const auto& [t1, c1, t2, c2, w] : corpus.join_map.items()) {
    nlohmann::json jj;
    jj["t1"] = t1;
    jj["c1"] = c1;
    jj["t2"] = t2;
    jj["c2"] = c2;
    jj["weight"] = w;
    meta["joins"].push_back(jj);
  }
  std::ofstream meta_out(dir / "corpus.json");
  meta_out << meta.dump(2) << '\n';

  std::ofstream stop_out(dir / "stopwords.txt");
  for (const auto& w : corpus.stopwords) stop_out << w << '\n';
}

}  // namespace sgqa
