#include <sstream>

#include "gtest/gtest.h"
#include "test_support.h"
#include "uidthat/common/errors.h"
#include "uidthat/corpus/sentence.h"
#include "uidthat/corpus/tokens.h"

namespace uidthat::corpus {
namespace {

SentenceRecord FiveTokens() {
  return testing::MakeRecord(
      "r1", "I think you win .",
      "(S (NP (PRP I)) (VP (VBP think) (SBAR (S (NP (PRP you)) (VP (VBP win))))) (. .))");
}

TEST(ValidateRecordTest, WellFormedRecordHasNoDiagnostics) {
  EXPECT_TRUE(ValidateRecord(FiveTokens()).empty());
}

TEST(ValidateRecordTest, HeadOutOfBounds) {
  SentenceRecord r = FiveTokens();
  r.dep_head[2] = 99;
  auto diags = ValidateRecord(r);
  ASSERT_EQ(1u, diags.size());
  EXPECT_EQ("dep_head", diags[0].field);
  EXPECT_EQ("in-bounds", diags[0].invariant);
}

TEST(ValidateRecordTest, LeafCountMismatch) {
  SentenceRecord r = FiveTokens();
  r.parse = "(S (NP (PRP I)) (VP (VBP think) (SBAR (S (NP (PRP you)) (VP (VBP win) (RB now))))) (. .))";
  auto diags = ValidateRecord(r);
  ASSERT_EQ(1u, diags.size());
  EXPECT_EQ("leaf-count", diags[0].invariant);
}

TEST(ValidateRecordTest, LeafTextMismatchAndBadTree) {
  SentenceRecord r = FiveTokens();
  r.tokens[1] = "thinks";
  EXPECT_EQ("leaf-match", ValidateRecord(r).at(0).invariant);
  r = FiveTokens();
  r.parse = "(S (NP (PRP I)";
  EXPECT_EQ("tree", ValidateRecord(r).at(0).invariant);
}

TEST(ValidateRecordTest, EmptyTokens) {
  SentenceRecord r;
  r.id = "empty";
  EXPECT_EQ("non-empty", ValidateRecord(r).at(0).invariant);
}

TEST(LoadCorpusTest, ThreeValidRecords) {
  std::ostringstream src;
  for (int i = 0; i < 3; ++i) {
    SentenceRecord r = FiveTokens();
    r.id = "r" + std::to_string(i);
    src << ToJsonLine(r) << "\n";
  }
  std::istringstream in(src.str());
  LoadResult res = LoadCorpus(in);
  EXPECT_EQ(3u, res.records.size());
  EXPECT_TRUE(res.diagnostics.empty());
  EXPECT_EQ(0, res.skipped);
}

TEST(LoadCorpusTest, LengthMismatchIsSkippedWithDiagnostic) {
  SentenceRecord r = FiveTokens();
  r.lemmas.pop_back();
  std::istringstream in(ToJsonLine(r) + "\n");
  LoadResult res = LoadCorpus(in);
  EXPECT_TRUE(res.records.empty());
  ASSERT_EQ(1u, res.diagnostics.size());
  EXPECT_EQ("lemmas", res.diagnostics[0].field);
  EXPECT_EQ(1, res.diagnostics[0].line);
  EXPECT_EQ(1, res.skipped);
}

TEST(LoadCorpusTest, SchemaViolations) {
  std::istringstream in(
      "not json\n"
      "{\"id\": \"x\"}\n"
      "\n"
      "{\"id\": 1, \"tokens\": [], \"lemmas\": [], \"pos\": [], \"dep_head\": [], "
      "\"dep_rel\": [], \"parse\": \"\"}\n");
  LoadResult res = LoadCorpus(in);
  EXPECT_TRUE(res.records.empty());
  EXPECT_EQ(3, res.skipped);
  EXPECT_EQ("json", res.diagnostics[0].invariant);
  EXPECT_EQ(1, res.diagnostics[0].line);
  EXPECT_EQ(4, res.diagnostics.back().line);
}

TEST(LoadCorpusTest, MissingFileIsIoError) {
  EXPECT_THROW(LoadCorpusFile("/nonexistent/corpus.jsonl"), IoError);
}

TEST(LoadCorpusTest, BundledFixture) {
  LoadResult res = LoadCorpusFile(testing::FixturePath("gold_corpus.jsonl"));
  ASSERT_EQ(20u, res.records.size());
  EXPECT_TRUE(res.diagnostics.empty());
  for (const SentenceRecord& r : res.records) {
    EXPECT_EQ(r.size(), r.Tree().LeafCount()) << r.id;
    EXPECT_TRUE(ValidateRecord(r).empty()) << r.id;
  }
}

TEST(TokensTest, Punctuation) {
  EXPECT_TRUE(IsPunctuationToken("?"));
  EXPECT_TRUE(IsPunctuationToken("..."));
  EXPECT_FALSE(IsPunctuationToken("#1"));
  EXPECT_FALSE(IsPunctuationToken("'s"));
  EXPECT_FALSE(IsPunctuationToken(""));
  std::vector<std::string> toks = {"Well", ",", "I", "'ve", "seen", "it", "."};
  EXPECT_EQ(5, WordCount(toks));
}

TEST(TokensTest, DetokenizeReattachesClitics) {
  std::vector<std::string> toks = {"Well", ",", "I", "'ve", "never", "seen",
                                   "it", ",", "do", "n't", "you", "?"};
  EXPECT_EQ("Well, I've never seen it, don't you?", Detokenize(toks));
  EXPECT_EQ("", Detokenize(std::vector<std::string>{}));
}

}  // namespace
}  // namespace uidthat::corpus
