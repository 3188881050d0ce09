#pragma once

// Text normalization shared by the corpus loader, question parser and
// alignment scorers. Everything downstream assumes one canonical form:
// lowercase, punctuation stripped to spaces, whitespace collapsed.

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace sgqa {

using StopwordSet = std::set<std::string>;

inline std::string normalize_text(const std::string& raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (unsigned char c : raw) {
    if (std::isalnum(c)) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else if (c >= 0x80) {
      // keep non-ASCII bytes verbatim; they normalize as word characters
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(c));
    } else {
      pending_space = true;
    }
  }
  return out;
}

inline std::vector<std::string> tokenize(const std::string& raw) {
  std::istringstream in(normalize_text(raw));
  std::vector<std::string> toks;
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

// Default stopword list. A corpus directory may override it with a
// stopwords.txt file, and the config file may point at another list.
inline const StopwordSet& default_stopwords() {
  static const StopwordSet words = {
      "a",      "about",  "above",  "after",  "again",  "all",    "am",
      "an",     "and",    "any",    "are",    "as",     "at",     "be",
      "because", "been",  "being",  "below",  "between", "both",  "but",
      "by",     "can",    "could",  "did",    "do",     "does",   "doing",
      "down",   "during", "each",   "few",    "for",    "from",   "further",
      "had",    "has",    "have",   "having", "he",     "her",    "here",
      "hers",   "him",    "his",    "how",    "i",      "if",     "in",
      "into",   "is",     "it",     "its",    "itself", "just",   "me",
      "might",  "more",   "most",   "must",   "my",     "no",     "nor",
      "not",    "now",    "of",     "off",    "on",     "once",   "only",
      "or",     "other",  "our",    "out",    "over",   "own",    "s",
      "same",   "shall",  "she",    "should", "so",     "some",   "such",
      "t",      "than",   "that",   "the",    "their",  "theirs", "them",
      "then",   "there",  "these",  "they",   "this",   "those",  "through",
      "to",     "too",    "under",  "until",  "up",     "upon",   "was",
      "we",     "were",   "what",   "when",   "where",  "which",  "while",
      "who",    "whom",   "whose",  "why",    "will",   "with",   "would",
      "you",    "your",   "yours"};
  return words;
}

inline std::vector<std::string> content_tokens(const std::string& raw,
                                               const StopwordSet& stop) {
  std::vector<std::string> out;
  for (auto& t : tokenize(raw))
    if (!stop.count(t)) out.push_back(std::move(t));
  return out;
}

// Crude suffix stripper used when comparing replacement candidates against
// question words. Full lemmatization is out of scope.
inline std::string stem(const std::string& word) {
  static const char* suffixes[] = {"ing", "ed", "es", "s"};
  for (const char* suf : suffixes) {
    const size_t n = std::string(suf).size();
    if (word.size() > n + 2 && word.ends_with(suf))
      return word.substr(0, word.size() - n);
  }
  return word;
}

inline std::string join_tokens(const std::vector<std::string>& toks) {
  std::string out;
  for (size_t i = 0; i < toks.size(); ++i) {
    if (i) out.push_back(' ');
    out += toks[i];
  }
  return out;
}

}  // namespace sgqa
