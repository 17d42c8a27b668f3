#ifndef UIDTHAT_EXTRACTION_CONSTRUCTIONS_H_
#define UIDTHAT_EXTRACTION_CONSTRUCTIONS_H_

#include <array>
#include <istream>
#include <optional>
#include <span>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "uidthat/corpus/sentence.h"

namespace uidthat::extraction {

inline constexpr int kMinWords = 5;
inline constexpr int kMaxWords = 50;

enum class ThatRole {
  kSconj,
  kDemonstrativeDeterminer,
  kDemonstrativePronoun,
  kRelativePronoun,
  kOther,
};
inline constexpr int kNumThatRoles = 5;

std::string_view RoleName(ThatRole role);  // "SCONJ", "DEMONSTRATIVE_PRONOUN", ...
std::optional<ThatRole> RoleFromName(std::string_view name);

struct ThatUsage {
  int token_index = 0;
  ThatRole role = ThatRole::kOther;

  bool operator==(const ThatUsage&) const = default;
};

enum class Label { kExplicit, kImplicit };

std::string_view LabelName(Label label);  // "EXPLICIT" / "IMPLICIT"
std::optional<Label> LabelFromName(std::string_view name);

// A main clause verb directly followed by its complement clause, with or
// without the complementizer "that". Indices are token positions.
struct ConstructionRecord {
  std::string sentence_id;
  Label label = Label::kImplicit;
  int main_verb_index = 0;
  std::string main_verb_lemma;
  std::optional<int> sconj_index;  // set iff EXPLICIT
  int sc_onset_index = 0;          // first SC word, "that" excluded
  int sc_end_index = 0;            // last SC token, final punctuation excluded
  std::optional<int> sc_subject_index;

  bool operator==(const ConstructionRecord&) const = default;
};

// Positional invariants of a construction inside a sentence of the given
// length; returns a description of the first violation, or empty.
std::string CheckConstructionInvariants(const ConstructionRecord& c,
                                        int sentence_length);

// 5 <= word count <= 50, punctuation-only tokens not counted.
bool PassesLengthFilter(const corpus::SentenceRecord& record);

// Role of every "that" token (case-insensitive), decided by tree position.
// Rules, most specific first:
//   relative pronoun   under WHNP, or heading an SBAR attached to an NP
//   demonstrative det  DT inside an NP with a following nominal sibling
//   demonstrative pron sole child of an NP
//   complementizer     first child of an SBAR followed by a clause
// Anything else is kOther.
std::vector<ThatUsage> ClassifyThatUsages(const corpus::SentenceRecord& record);

// Every verb whose VP continues directly with a complement clause starting
// at the next token. "that" + S yields EXPLICIT; a bare finite clause
// yields IMPLICIT. Nested constructions are returned independently, ordered
// by main verb position. Callers apply PassesLengthFilter first.
std::vector<ConstructionRecord> DetectConstructions(
    const corpus::SentenceRecord& record);

// Aggregate counts shaped like the dataset table: constructions per label,
// "that" usages per role, and sentences whose "that" tokens are all outside
// a detected construction.
struct ExtractionCounts {
  int sentences_read = 0;
  int sentences_in_range = 0;
  std::array<int, 2> constructions_by_label{};
  std::array<long, 2> construction_sentence_words{};
  std::array<int, kNumThatRoles> usages_by_role{};
  int other_that_sentences = 0;
  long other_that_sentence_words = 0;
};

struct ExtractionResult {
  std::vector<ConstructionRecord> constructions;
  ExtractionCounts counts;
};

// Length filter, role classification and detection over a whole corpus.
// Output is ordered by corpus order, then main verb position. jobs > 1
// processes sentences on worker threads.
ExtractionResult ExtractCorpus(std::span<const corpus::SentenceRecord> corpus,
                               int jobs = 1);

std::string ToJsonLine(const ConstructionRecord& c);
ConstructionRecord ConstructionFromJson(std::string_view line);
void WriteConstructions(std::ostream& out,
                        std::span<const ConstructionRecord> records);
// Throws DataError naming the line on malformed input.
std::vector<ConstructionRecord> ReadConstructions(std::istream& in);

}  // namespace uidthat::extraction

#endif  // UIDTHAT_EXTRACTION_CONSTRUCTIONS_H_
