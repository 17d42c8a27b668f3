#include <fstream>
#include <random>

#include "gtest/gtest.h"
#include "json.hpp"
#include "test_support.h"
#include "uidthat/common/errors.h"
#include "uidthat/extraction/constructions.h"

namespace uidthat::extraction {

void PrintTo(const ConstructionRecord& c, std::ostream* os) { *os << ToJsonLine(c); }

namespace {

using corpus::SentenceRecord;
using testing::MakeRecord;

SentenceRecord WithWords(int n) {
  std::string text, tree = "(S";
  for (int i = 0; i < n; ++i) {
    text += "w ";
    tree += " (NN w)";
  }
  text += ".";
  tree += " (. .))";
  return MakeRecord("len", text, tree);
}

TEST(LengthFilterTest, InclusiveBoundsIgnorePunctuation) {
  EXPECT_FALSE(PassesLengthFilter(WithWords(4)));
  EXPECT_TRUE(PassesLengthFilter(WithWords(5)));
  EXPECT_TRUE(PassesLengthFilter(WithWords(50)));
  EXPECT_FALSE(PassesLengthFilter(WithWords(51)));
}

TEST(ClassifyThatTest, DemonstrativeDeterminer) {
  auto r = MakeRecord("d", "I have never been to that part of the city",
                      "(S (NP (PRP I)) (VP (VBP have) (ADVP (RB never)) (VP (VBN been) (PP (TO to) (NP (NP (DT that) (NN part)) (PP (IN of) (NP (DT the) (NN city))))))))");
  EXPECT_EQ((std::vector<ThatUsage>{{5, ThatRole::kDemonstrativeDeterminer}}),
            ClassifyThatUsages(r));
  EXPECT_TRUE(DetectConstructions(r).empty());
}

TEST(ClassifyThatTest, DemonstrativePronoun) {
  auto r = MakeRecord("p", "that is a beautiful view",
                      "(S (NP (DT that)) (VP (VBZ is) (NP (DT a) (JJ beautiful) (NN view))))");
  EXPECT_EQ((std::vector<ThatUsage>{{0, ThatRole::kDemonstrativePronoun}}),
            ClassifyThatUsages(r));
}

TEST(ClassifyThatTest, RelativePronoun) {
  auto r = MakeRecord("r", "Ann is on the team that lost .",
                      "(S (NP (NNP Ann)) (VP (VBZ is) (PP (IN on) (NP (NP (DT the) (NN team)) (SBAR (WHNP (WDT that)) (S (VP (VBD lost))))))) (. .))");
  EXPECT_EQ((std::vector<ThatUsage>{{5, ThatRole::kRelativePronoun}}),
            ClassifyThatUsages(r));
  // Relative clause attached to an NP without a WHNP wrapper.
  auto bare = MakeRecord("r2", "the team that lost went home",
                         "(S (NP (NP (DT the) (NN team)) (SBAR (IN that) (S (VP (VBD lost))))) (VP (VBD went) (ADVP (RB home))))");
  EXPECT_EQ(ThatRole::kRelativePronoun, ClassifyThatUsages(bare).at(0).role);
}

TEST(ClassifyThatTest, OtherAndCaseInsensitive) {
  auto r = MakeRecord("o", "It was not That bad at all",
                      "(S (NP (PRP It)) (VP (VBD was) (RB not) (ADJP (RB That) (JJ bad)) (ADVP (IN at) (DT all))))");
  EXPECT_EQ((std::vector<ThatUsage>{{3, ThatRole::kOther}}), ClassifyThatUsages(r));
}

TEST(DetectTest, ExplicitAgree) {
  auto r = MakeRecord("a", "do you agree that his suggestion sounds better ?",
                      "(SQ (VBP do) (NP (PRP you)) (VP (VB agree) (SBAR (IN that) (S (NP (PRP$ his) (NN suggestion)) (VP (VBZ sounds) (ADJP (JJR better)))))) (. ?))");
  auto out = DetectConstructions(r);
  ASSERT_EQ(1u, out.size());
  EXPECT_EQ(Label::kExplicit, out[0].label);
  EXPECT_EQ("agree", out[0].main_verb_lemma);
  EXPECT_EQ("his", r.tokens[out[0].sc_onset_index]);
  EXPECT_EQ(3, out[0].sconj_index);
  EXPECT_EQ(7, out[0].sc_end_index);  // "?" excluded
}

TEST(DetectTest, ImplicitThinks) {
  auto r = MakeRecord("i", "my brother thinks partners should always choose the former alternative",
                      "(S (NP (PRP$ my) (NN brother)) (VP (VBZ thinks) (SBAR (S (NP (NNS partners)) (VP (MD should) (ADVP (RB always)) (VP (VB choose) (NP (DT the) (JJ former) (NN alternative))))))))");
  r.lemmas[2] = "think";
  auto out = DetectConstructions(r);
  ASSERT_EQ(1u, out.size());
  EXPECT_EQ(Label::kImplicit, out[0].label);
  EXPECT_EQ("think", out[0].main_verb_lemma);
  EXPECT_EQ("partners", r.tokens[out[0].sc_onset_index]);
  EXPECT_FALSE(out[0].sconj_index.has_value());
}

TEST(DetectTest, BareFiniteSClauseWithoutSbar) {
  auto r = MakeRecord("s", "I guess he left early today",
                      "(S (NP (PRP I)) (VP (VBP guess) (S (NP (PRP he)) (VP (VBD left) (ADVP (RB early)) (NP (NN today))))))");
  auto out = DetectConstructions(r);
  ASSERT_EQ(1u, out.size());
  EXPECT_EQ(Label::kImplicit, out[0].label);
  EXPECT_EQ(2, out[0].sc_onset_index);
}

TEST(DetectTest, NonFiniteAndNonThatComplementsAreIgnored) {
  auto want = MakeRecord("w", "I want him to go home now",
                         "(S (NP (PRP I)) (VP (VBP want) (S (NP (PRP him)) (VP (TO to) (VP (VB go) (ADVP (RB home)) (ADVP (RB now)))))))");
  EXPECT_TRUE(DetectConstructions(want).empty());
  auto wonder = MakeRecord("q", "I wonder if that is true .",
                           "(S (NP (PRP I)) (VP (VBP wonder) (SBAR (IN if) (S (NP (DT that)) (VP (VBZ is) (ADJP (JJ true)))))) (. .))");
  EXPECT_TRUE(DetectConstructions(wonder).empty());
  // Pronoun "that" opening a bare complement is not an omitted complementizer.
  auto pron = MakeRecord("t", "I think that is really wrong",
                         "(S (NP (PRP I)) (VP (VBP think) (SBAR (S (NP (DT that)) (VP (VBZ is) (ADJP (RB really) (JJ wrong)))))))");
  EXPECT_TRUE(DetectConstructions(pron).empty());
  EXPECT_EQ(ThatRole::kDemonstrativePronoun, ClassifyThatUsages(pron).at(0).role);
}

TEST(DetectTest, InterveningMaterialBlocksConstruction) {
  auto r = MakeRecord("m", "My boyfriend has mentioned several times that we should approach this guy with the offer",
                      "(S (NP (PRP$ My) (NN boyfriend)) (VP (VBZ has) (VP (VBN mentioned) (NP (JJ several) (NNS times)) (SBAR (IN that) (S (NP (PRP we)) (VP (MD should) (VP (VB approach) (NP (DT this) (NN guy)) (PP (IN with) (NP (DT the) (NN offer))))))))))");
  EXPECT_TRUE(DetectConstructions(r).empty());
  EXPECT_EQ(ThatRole::kSconj, ClassifyThatUsages(r).at(0).role);
}

// Gold fixture comparison: labels, spans and subjects for all 20 sentences.
class GoldFixtureTest : public ::testing::Test {
 protected:
  void SetUp() override {
    corpus_ = testing::GoldCorpus();
    std::ifstream in(testing::FixturePath("gold_constructions.jsonl"));
    gold_ = ReadConstructions(in);
  }
  std::vector<SentenceRecord> corpus_;
  std::vector<ConstructionRecord> gold_;
};

TEST_F(GoldFixtureTest, DetectionMatchesGold) {
  ASSERT_EQ(20u, corpus_.size());
  std::vector<ConstructionRecord> detected;
  for (const SentenceRecord& r : corpus_) {
    if (!PassesLengthFilter(r)) continue;
    for (auto& c : DetectConstructions(r)) detected.push_back(c);
  }
  ASSERT_EQ(gold_.size(), detected.size());
  for (std::size_t i = 0; i < gold_.size(); ++i) {
    EXPECT_EQ(ToJsonLine(gold_[i]), ToJsonLine(detected[i]));
  }
}

TEST_F(GoldFixtureTest, ExtractCorpusAgreesWithPerSentenceDetection) {
  ExtractionResult serial = ExtractCorpus(corpus_, 1);
  ExtractionResult parallel = ExtractCorpus(corpus_, 4);
  EXPECT_EQ(gold_, serial.constructions);
  EXPECT_EQ(serial.constructions, parallel.constructions);
  EXPECT_EQ(20, serial.counts.sentences_read);
  EXPECT_EQ(19, serial.counts.sentences_in_range);  // "I think so ." is too short
  EXPECT_EQ(7, serial.counts.constructions_by_label[0]);
  EXPECT_EQ(7, serial.counts.constructions_by_label[1]);
  // s03 s04 s05 s15 s16 carry "that" but no construction.
  EXPECT_EQ(5, serial.counts.other_that_sentences);
}

TEST_F(GoldFixtureTest, RolesMatchGold) {
  auto by_id = testing::ById(corpus_);
  std::ifstream in(testing::FixturePath("gold_that_roles.jsonl"));
  std::string line;
  int total = 0;
  while (std::getline(in, line)) {
    auto obj = nlohmann::json::parse(line);
    std::vector<ThatUsage> expected;
    for (const auto& u : obj["usages"]) {
      expected.push_back({u["token_index"].get<int>(),
                          *RoleFromName(u["role"].get<std::string>())});
    }
    EXPECT_EQ(expected, ClassifyThatUsages(by_id.at(obj["sentence_id"].get<std::string>())))
        << obj["sentence_id"];
    total += static_cast<int>(expected.size());
  }
  EXPECT_EQ(15, total);
}

void CheckInvariants(const SentenceRecord& r) {
  auto usages = ClassifyThatUsages(r);
  for (const ConstructionRecord& c : DetectConstructions(r)) {
    EXPECT_EQ("", CheckConstructionInvariants(c, r.size())) << r.parse;
    if (c.sconj_index) {
      bool found = false;
      for (const ThatUsage& u : usages) {
        if (u.token_index == *c.sconj_index) {
          EXPECT_EQ(ThatRole::kSconj, u.role);
          found = true;
        }
      }
      EXPECT_TRUE(found);
    }
  }
}

TEST_F(GoldFixtureTest, InvariantsHoldOnFixture) {
  for (const SentenceRecord& r : corpus_) CheckInvariants(r);
}

// Relabels internal nodes, swaps words for "that" and scrambles dependency
// labels, then checks that whatever is detected still satisfies the
// positional and role invariants.
TEST_F(GoldFixtureTest, InvariantsHoldOnPerturbedRecords) {
  static const char* kLabels[] = {"S", "SBAR", "VP", "NP", "WHNP", "ADJP"};
  static const char* kTags[] = {"VBD", "VBP", "IN", "DT", "NN", "MD"};
  static const char* kRels[] = {"nsubj", "dobj", "mark", "nsubjpass"};
  std::mt19937 rng(7);
  for (int trial = 0; trial < 400; ++trial) {
    SentenceRecord r = corpus_[rng() % corpus_.size()];
    corpus::ParseTree tree = r.Tree();
    std::vector<corpus::ParseTree*> stack = {&tree};
    while (!stack.empty()) {
      corpus::ParseTree* node = stack.back();
      stack.pop_back();
      if (node->IsTerminal()) {
        if (rng() % 5 == 0) node->label = kTags[rng() % 6];
        if (rng() % 6 == 0) node->leaf->word = "that";
      } else {
        if (rng() % 4 == 0) node->label = kLabels[rng() % 6];
        for (auto& child : node->children) stack.push_back(&child);
      }
    }
    r.parse = corpus::ToBracketedString(tree);
    r.tokens = tree.LeafWords();
    for (auto& rel : r.dep_rel) {
      if (rng() % 3 == 0) rel = kRels[rng() % 4];
    }
    for (auto& head : r.dep_head) {
      if (rng() % 4 == 0) head = static_cast<int>(rng() % r.tokens.size());
    }
    ASSERT_TRUE(corpus::ValidateRecord(r).empty());
    CheckInvariants(r);
    EXPECT_EQ(DetectConstructions(r), DetectConstructions(r));
  }
}

TEST(ConstructionIoTest, JsonLineRoundTrip) {
  ConstructionRecord c{"s1", Label::kExplicit, 2, "agree", 3, 4, 7, 5};
  EXPECT_EQ(c, ConstructionFromJson(ToJsonLine(c)));
  ConstructionRecord d{"s2", Label::kImplicit, 1, "think", std::nullopt, 2, 8, std::nullopt};
  EXPECT_EQ(d, ConstructionFromJson(ToJsonLine(d)));
  std::istringstream bad("{\"sentence_id\": \"x\"}\n");
  EXPECT_THROW(ReadConstructions(bad), DataError);
}

}  // namespace
}  // namespace uidthat::extraction
