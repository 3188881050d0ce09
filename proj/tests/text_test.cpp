#include "sgqa/text.hpp"

#include <gtest/gtest.h>

#include <fstream>

#include "fixtures.hpp"

namespace sgqa {
namespace {

TEST(Normalize, LowercasesAndStripsPunctuation) {
  EXPECT_EQ(normalize_text("In New York State,"), "in new york state");
  EXPECT_EQ(normalize_text("  (United   States) "), "united states");
  EXPECT_EQ(normalize_text("fox's"), "fox s");
  EXPECT_EQ(normalize_text("H2O"), "h2o");
  EXPECT_EQ(normalize_text("???"), "");
}

TEST(Tokenize, SplitsNormalizedText) {
  const auto toks = tokenize("Sleet, rain, snow, and hail!");
  ASSERT_EQ(toks.size(), 5u);
  EXPECT_EQ(toks[0], "sleet");
  EXPECT_EQ(toks[4], "hail");
}

TEST(ContentTokens, DropsStopwords) {
  const auto toks =
      content_tokens("Which characteristic helps a fox find food?",
                     default_stopwords());
  const std::vector<std::string> expected{"characteristic", "helps", "fox",
                                          "find", "food"};
  EXPECT_EQ(toks, expected);
}

TEST(Stem, StripsCommonSuffixes) {
  EXPECT_EQ(stem("years"), "year");
  EXPECT_EQ(stem("occurs"), "occur");
  EXPECT_EQ(stem("running"), "runn");
  EXPECT_EQ(stem("walked"), "walk");
  EXPECT_EQ(stem("is"), "is");     // too short to strip
  EXPECT_EQ(stem("month"), "month");
}

TEST(Stopwords, BundledFileMatchesBuiltinList) {
  std::ifstream in(testing::data_dir() + "/corpus/stopwords.txt");
  ASSERT_TRUE(in.good());
  StopwordSet from_file;
  std::string line;
  while (std::getline(in, line))
    for (auto& t : tokenize(line)) from_file.insert(t);
  EXPECT_EQ(from_file, default_stopwords());
}

}  // namespace
}  // namespace sgqa
