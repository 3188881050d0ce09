#pragma once

// Phrase alignment scoring. The engine only ever asks two questions of a
// scorer: how strongly does phrase A entail phrase B (directional), and how
// similar are two phrases (the max of both entailment directions). The
// bundled scorer is asymmetric word overlap |T ∩ H| / |H| over content
// tokens; richer scorers plug in behind the same interface and must be
// usable concurrently.

#include <algorithm>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgqa/question.hpp"
#include "sgqa/table.hpp"
#include "sgqa/text.hpp"

namespace sgqa {

using Phrase = std::vector<std::string>;  // content tokens

class AlignmentScorer {
 public:
  virtual ~AlignmentScorer() = default;
  virtual std::string name() const = 0;
  // premise -> hypothesis score in [0,1]; hypothesis must be non-empty
  virtual double entail(const Phrase& premise,
                        const Phrase& hypothesis) const = 0;
};

class OverlapScorer final : public AlignmentScorer {
 public:
  std::string name() const override { return "overlap"; }

  double entail(const Phrase& premise, const Phrase& hypothesis) const override {
    if (hypothesis.empty())
      throw std::invalid_argument("overlap scorer: empty hypothesis");
    std::set<std::string> t(premise.begin(), premise.end());
    std::set<std::string> h(hypothesis.begin(), hypothesis.end());
    size_t common = 0;
    for (const auto& w : h)
      if (t.count(w)) ++common;
    return static_cast<double>(common) / static_cast<double>(h.size());
  }
};

inline double similarity(const Phrase& a, const Phrase& b,
                         const AlignmentScorer& scorer) {
  return std::max(scorer.entail(a, b), scorer.entail(b, a));
}

inline std::shared_ptr<AlignmentScorer> make_scorer(const std::string& name) {
  if (name == "overlap") return std::make_shared<OverlapScorer>();
  throw std::invalid_argument("unknown alignment scorer '" + name + "'");
}

// One spotted mention of a table's column relation in the question:
// constituent at q_from instantiates X, constituent at q_to instantiates Y.
struct RelationMatch {
  std::string relation_name;
  int relation_index = -1;  // index into table.relations
  int q_from = -1;          // raw-token position of the X constituent
  int q_to = -1;            // raw-token position of the Y constituent
  std::string pattern;
};

// Scan the raw token sequence of the question for instantiations of the
// table's relation patterns. Placeholders bind to exactly one constituent
// each; the pattern's literal tokens must appear verbatim between them.
inline std::vector<RelationMatch> match_relations(const Question& q,
                                                  const Table& table) {
  std::vector<RelationMatch> out;
  std::set<int> constituent_pos;
  for (const auto& c : q.constituents) constituent_pos.insert(c.position);

  const auto& raw = q.raw_tokens;
  for (int ri = 0; ri < static_cast<int>(table.relations.size()); ++ri) {
    const auto& rel = table.relations[ri];
    for (const auto& pattern : rel.patterns) {
      auto ptoks = tokenize(pattern);
      int xs = 0, ys = 0;
      for (auto& t : ptoks) {
        if (t == "x") ++xs;
        if (t == "y") ++ys;
      }
      if (xs != 1 || ys != 1)
        throw std::invalid_argument("pattern '" + pattern + "' of relation '" +
                                    rel.name +
                                    "' must contain X and Y exactly once");
      const int plen = static_cast<int>(ptoks.size());
      for (int start = 0; start + plen <= static_cast<int>(raw.size());
           ++start) {
        int x_pos = -1, y_pos = -1;
        bool ok = true;
        for (int k = 0; k < plen && ok; ++k) {
          const auto& pt = ptoks[k];
          const int pos = start + k;
          if (pt == "x") {
            if (!constituent_pos.count(pos)) ok = false;
            x_pos = pos;
          } else if (pt == "y") {
            if (!constituent_pos.count(pos)) ok = false;
            y_pos = pos;
          } else if (raw[pos] != pt) {
            ok = false;
          }
        }
        if (ok && x_pos != y_pos)
          out.push_back({rel.name, ri, x_pos, y_pos, pattern});
      }
    }
  }
  return out;
}

}  // namespace sgqa
