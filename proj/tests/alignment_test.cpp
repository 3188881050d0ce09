#include "sgqa/alignment.hpp"

#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"

namespace sgqa {
namespace {

using testing::make_table;

TEST(OverlapScorer, AsymmetricWordOverlap) {
  OverlapScorer scorer;
  EXPECT_DOUBLE_EQ(scorer.entail({"sense", "smell"}, {"smell"}), 1.0);
  EXPECT_DOUBLE_EQ(scorer.entail({"smell"}, {"sense", "smell"}), 0.5);
  EXPECT_DOUBLE_EQ(scorer.entail({"precipitation"}, {"precipitation"}), 1.0);
  EXPECT_DOUBLE_EQ(scorer.entail({"thick", "fur"}, {"sense", "smell"}), 0.0);
  EXPECT_THROW(scorer.entail({"rain"}, {}), std::invalid_argument);
}

TEST(Similarity, MaxOfBothDirections) {
  OverlapScorer scorer;
  EXPECT_DOUBLE_EQ(similarity({"sense", "smell"}, {"smell"}, scorer), 1.0);
  EXPECT_DOUBLE_EQ(similarity({"rain"}, {"sleet"}, scorer), 0.0);
  EXPECT_DOUBLE_EQ(similarity({"rain"}, {"rain"}, scorer), 1.0);
}

TEST(Similarity, SymmetryProperty) {
  OverlapScorer scorer;
  std::mt19937 rng(7);
  const std::vector<std::string> vocab{"a1", "b2", "c3", "d4", "e5"};
  for (int trial = 0; trial < 200; ++trial) {
    auto draw = [&rng, &vocab] {
      Phrase p;
      std::uniform_int_distribution<int> len(1, 4);
      std::uniform_int_distribution<size_t> pick(0, vocab.size() - 1);
      const int n = len(rng);
      for (int i = 0; i < n; ++i) p.push_back(vocab[pick(rng)]);
      return p;
    };
    const Phrase a = draw(), b = draw();
    const double ab = similarity(a, b, scorer);
    EXPECT_DOUBLE_EQ(ab, similarity(b, a, scorer));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    EXPECT_DOUBLE_EQ(similarity(a, a, scorer), 1.0);
    EXPECT_LE(scorer.entail(a, b), 1.0);
    EXPECT_GE(scorer.entail(a, b), 0.0);
  }
}

TEST(MatchRelations, PhaseChangePattern) {
  auto table = make_table("phase", {"change", "initial state", "final state"},
                          {{"increase temperature", "solid", "liquid"},
                           {"decrease temperature", "liquid", "solid"}});
  ColumnRelation rel;
  rel.name = "fromTo";
  rel.from_col = 1;
  rel.to_col = 2;
  rel.patterns = {"X to a Y"};
  table.relations.push_back(rel);

  const auto q = parse_question(
      "pc", "What is one way to change water from a liquid to a solid?",
      {"decrease the temperature", "increase the temperature"}, 0);
  const auto matches = match_relations(q, table);
  ASSERT_EQ(matches.size(), 1u);
  EXPECT_EQ(matches[0].relation_name, "fromTo");
  EXPECT_EQ(q.raw_tokens[matches[0].q_from], "liquid");
  EXPECT_EQ(q.raw_tokens[matches[0].q_to], "solid");
  EXPECT_LT(matches[0].q_from, matches[0].q_to);
}

TEST(MatchRelations, NoRelationsMeansNoMatches) {
  const auto table = make_table("t", {"a", "b"}, {{"x", "y"}});
  const auto q = parse_question("q", "change water to a gas", {"x"}, 0);
  EXPECT_TRUE(match_relations(q, table).empty());
}

TEST(MatchRelations, PatternLiteralsMustAppearVerbatim) {
  auto table = make_table("t", {"a", "b"}, {{"x", "y"}});
  ColumnRelation rel;
  rel.name = "fromTo";
  rel.from_col = 0;
  rel.to_col = 1;
  rel.patterns = {"X to a Y"};
  table.relations.push_back(rel);
  const auto q =
      parse_question("q", "the liquid becomes solid quickly", {"x"}, 0);
  EXPECT_TRUE(match_relations(q, table).empty());
}

TEST(MatchRelations, MalformedPatternIsRejected) {
  auto table = make_table("t", {"a", "b"}, {{"x", "y"}});
  ColumnRelation rel;
  rel.name = "bad";
  rel.from_col = 0;
  rel.to_col = 1;
  rel.patterns = {"X to a X"};
  table.relations.push_back(rel);
  const auto q = parse_question("q", "liquid to a solid", {"x"}, 0);
  EXPECT_THROW(match_relations(q, table), std::invalid_argument);
}

TEST(MakeScorer, KnowsOverlapOnly) {
  EXPECT_EQ(make_scorer("overlap")->name(), "overlap");
  EXPECT_THROW(make_scorer("wordnet"), std::invalid_argument);
}

}  // namespace
}  // namespace sgqa
