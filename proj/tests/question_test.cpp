#include "sgqa/question.hpp"

#include <gtest/gtest.h>

namespace sgqa {
namespace {

TEST(ParseQuestion, FoxExample) {
  const auto q = parse_question(
      "fox", "Which characteristic helps a fox find food?",
      {"sense of smell", "thick fur", "long tail", "pointed teeth"}, 0);
  std::vector<std::string> texts;
  for (const auto& c : q.constituents) texts.push_back(c.text);
  const std::vector<std::string> expected{"characteristic", "helps", "fox",
                                          "find", "food"};
  EXPECT_EQ(texts, expected);
  // positions index the raw token sequence and strictly increase
  for (size_t i = 1; i < q.constituents.size(); ++i)
    EXPECT_LT(q.constituents[i - 1].position, q.constituents[i].position);
  ASSERT_EQ(q.option_count(), 4);
  EXPECT_EQ(q.options[0].tokens, (std::vector<std::string>{"sense", "smell"}));
  EXPECT_EQ(q.options[0].text, "sense of smell");
}

TEST(ParseQuestion, ErrorsOnDegenerateInput) {
  EXPECT_THROW(parse_question("x", "", {"a"}, std::nullopt), QuestionError);
  EXPECT_THROW(parse_question("x", "question text", {}, std::nullopt),
               QuestionError);
  EXPECT_THROW(parse_question("x", "the of a", {"opt"}, std::nullopt),
               QuestionError);
  EXPECT_THROW(parse_question("x", "real question", {"a", "b"}, 2),
               QuestionError);
}

TEST(ParseQuestion, SingleOptionAllowed) {
  const auto q = parse_question("x", "water freezes", {"ice"}, 0);
  EXPECT_EQ(q.option_count(), 1);
}

TEST(WhichTerm, FindsSpanAfterWhich) {
  const auto q = parse_question(
      "ny", "In New York State, the longest period of daylight occurs during "
            "which month?",
      {"March", "June", "December", "September"}, 1);
  const auto span = detect_which_term(q);
  ASSERT_TRUE(span.present);
  ASSERT_EQ(span.constituent_positions.size(), 1u);
  EXPECT_EQ(q.raw_tokens[span.constituent_positions[0]], "month");
}

TEST(WhichTerm, SpanIsCappedAtTwo) {
  const auto q = parse_question(
      "fox", "Which characteristic helps a fox find food?", {"a", "b"}, 0);
  const auto span = detect_which_term(q);
  ASSERT_TRUE(span.present);
  ASSERT_EQ(span.constituent_positions.size(), 2u);
  EXPECT_EQ(q.raw_tokens[span.constituent_positions[0]], "characteristic");
  EXPECT_EQ(q.raw_tokens[span.constituent_positions[1]], "helps");
}

TEST(WhichTerm, AbsentWhich) {
  const auto q =
      parse_question("x", "sleet and rain are forms of", {"a", "b"}, 0);
  const auto span = detect_which_term(q);
  EXPECT_FALSE(span.present);
  EXPECT_TRUE(span.constituent_positions.empty());
}

TEST(WhichTerm, WhichAsFinalToken) {
  const auto q = parse_question("x", "the fox knows which", {"a", "b"}, 0);
  const auto span = detect_which_term(q);
  EXPECT_TRUE(span.present);
  EXPECT_TRUE(span.constituent_positions.empty());
}

TEST(WhichTerm, OnlyFirstOccurrenceCounts) {
  const auto q =
      parse_question("x", "which fox knows which month", {"a", "b"}, 0);
  const auto span = detect_which_term(q);
  ASSERT_EQ(span.constituent_positions.size(), 2u);
  EXPECT_EQ(q.raw_tokens[span.constituent_positions[0]], "fox");
  EXPECT_EQ(q.raw_tokens[span.constituent_positions[1]], "knows");
}

}  // namespace
}  // namespace sgqa
