#pragma once

// Robustness probe: rewrite each question's incorrect options with the most
// frequent corpus words that are unrelated to the question. The caller
// supplies the frequency-ranked word list; this module filters it and
// produces the perturbed variants deterministically.

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgqa/question.hpp"
#include "sgqa/text.hpp"

namespace sgqa {

struct PerturbError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Drops stopwords, strings that normalize to nothing or to several tokens,
// duplicates, and words whose stem collides with a question word. Keeps at
// most `pool` survivors, in rank order.
inline std::vector<std::string> filter_replacement_pool(
    const Question& q, const std::vector<std::string>& freq_words, int pool,
    const StopwordSet& stop = default_stopwords()) {
  std::set<std::string> question_stems;
  for (const auto& tok : q.raw_tokens) question_stems.insert(stem(tok));

  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& raw : freq_words) {
    if (static_cast<int>(out.size()) >= pool) break;
    const auto toks = tokenize(raw);
    if (toks.size() != 1) continue;  // special characters or phrases
    const std::string& w = toks[0];
    if (stop.count(w)) continue;
    if (question_stems.count(stem(w))) continue;
    if (!seen.insert(w).second) continue;
    out.push_back(w);
  }
  return out;
}

// Emits n_variants copies of the question. Variant v replaces the incorrect
// options, in option order, with pool words 3v, 3v+1, 3v+2 (mod pool size;
// round-robin), leaving the gold option untouched in place.
inline std::vector<Question> perturb_question(
    const Question& q, const std::vector<std::string>& freq_words,
    int n_variants = 10, int pool = 30,
    const StopwordSet& stop = default_stopwords()) {
  if (!q.answer_key)
    throw PerturbError("question '" + q.id + "' has no answer key");
  const int wrong = q.option_count() - 1;
  const auto words = filter_replacement_pool(q, freq_words, pool, stop);
  if (static_cast<int>(words.size()) < wrong)
    throw PerturbError("replacement pool for '" + q.id + "' has only " +
                       std::to_string(words.size()) + " words, need " +
                       std::to_string(wrong));
  const int p = static_cast<int>(words.size());

  std::vector<Question> out;
  for (int v = 0; v < n_variants; ++v) {
    std::vector<std::string> options;
    int slot = 0;
    for (int m = 0; m < q.option_count(); ++m) {
      if (m == *q.answer_key) {
        options.push_back(q.options[m].text);
      } else {
        options.push_back(words[(static_cast<size_t>(v) * wrong + slot) % p]);
        ++slot;
      }
    }
    out.push_back(parse_question(q.id + "-p" + std::to_string(v), q.text,
                                 options, q.answer_key, stop));
  }
  return out;
}

}  // namespace sgqa
