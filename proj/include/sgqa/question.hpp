#pragma once

// Multiple-choice question representation: the raw token sequence, the
// lexical constituents (content tokens with their original positions) and
// the answer options.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgqa/text.hpp"

namespace sgqa {

struct QuestionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Constituent {
  std::string text;  // single normalized token
  int position = -1; // index into the raw token sequence
};

struct Option {
  std::string text;                 // original text, for display
  std::vector<std::string> tokens;  // content tokens used for alignment
};

struct Question {
  std::string id;
  std::string text;
  std::vector<std::string> raw_tokens;       // normalized, stopwords kept
  std::vector<Constituent> constituents;     // stopwords removed
  std::vector<Option> options;
  std::optional<int> answer_key;

  int option_count() const { return static_cast<int>(options.size()); }
};

// Up to `which_term_span` constituents following the first "which" token.
struct WhichTermSpan {
  bool present = false;
  std::vector<int> constituent_positions;
};

inline Question parse_question(const std::string& id, const std::string& text,
                               const std::vector<std::string>& options,
                               std::optional<int> answer_key,
                               const StopwordSet& stop = default_stopwords()) {
  if (text.empty()) throw QuestionError("question '" + id + "': empty text");
  if (options.empty())
    throw QuestionError("question '" + id + "': no options");
  if (answer_key && (*answer_key < 0 ||
                     *answer_key >= static_cast<int>(options.size())))
    throw QuestionError("question '" + id + "': answer key out of range");

  Question q;
  q.id = id;
  q.text = text;
  q.raw_tokens = tokenize(text);
  for (int i = 0; i < static_cast<int>(q.raw_tokens.size()); ++i)
    if (!stop.count(q.raw_tokens[i]))
      q.constituents.push_back({q.raw_tokens[i], i});
  if (q.constituents.empty())
    throw QuestionError("question '" + id + "': no constituents");

  for (const auto& opt : options) {
    Option o;
    o.text = opt;
    o.tokens = content_tokens(opt, stop);
    q.options.push_back(std::move(o));
  }
  q.answer_key = answer_key;
  return q;
}

inline WhichTermSpan detect_which_term(const Question& q, int span = 2) {
  WhichTermSpan out;
  int which_pos = -1;
  for (int i = 0; i < static_cast<int>(q.raw_tokens.size()); ++i) {
    if (q.raw_tokens[i] == "which") {
      which_pos = i;
      break;
    }
  }
  if (which_pos < 0) return out;
  out.present = true;
  for (const auto& c : q.constituents) {
    if (c.position > which_pos) {
      out.constituent_positions.push_back(c.position);
      if (static_cast<int>(out.constituent_positions.size()) >= span) break;
    }
  }
  return out;
}

}  // namespace sgqa
