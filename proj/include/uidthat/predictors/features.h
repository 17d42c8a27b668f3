#ifndef UIDTHAT_PREDICTORS_FEATURES_H_
#define UIDTHAT_PREDICTORS_FEATURES_H_

#include <array>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uidthat/corpus/sentence.h"
#include "uidthat/extraction/constructions.h"
#include "uidthat/lm/language_model.h"

namespace uidthat::predictors {

inline constexpr int kNumPredictors = 6;
inline constexpr std::array<std::string_view, kNumPredictors> kPredictorNames = {
    "mc_length",          "mc_verb_frequency",  "sc_length",
    "sc_subject_distance", "sc_onset_surprisal", "sc_onset_entropy"};

// Verb lemma counts over a whole corpus. Tokens tagged VERB or AUX count.
struct CorpusStats {
  std::map<std::string, long> verb_lemma_counts;
  long total_verb_tokens = 0;
  long sentence_count = 0;

  static CorpusStats FromCorpus(std::span<const corpus::SentenceRecord> corpus);
  // count / total; throws DataError for an unseen lemma.
  double RelativeFrequency(const std::string& lemma) const;
};

struct StructuralFeatures {
  int mc_length = 0;  // non-punctuation tokens before the SCONJ / SC onset
  int sc_length = 0;  // onset..end inclusive
  std::optional<int> sc_subject_distance;
  double main_verb_frequency = 0.0;
};

StructuralFeatures ComputeStructuralFeatures(
    const extraction::ConstructionRecord& c, const corpus::SentenceRecord& s,
    const CorpusStats& stats);

// Tokens 0..main_verb_index. "that" is never part of it.
std::vector<std::string> MainClausePrefix(const extraction::ConstructionRecord& c,
                                          const corpus::SentenceRecord& s);

// -ln(exp(lp1) + exp(lp2)), computed without underflow.
double MarginalizedSurprisal(double logprob_without, double logprob_with_that);

double ScOnsetSurprisal(const lm::LanguageModel& lm,
                        const extraction::ConstructionRecord& c,
                        const corpus::SentenceRecord& s);
double ScOnsetEntropy(const lm::LanguageModel& lm,
                      const extraction::ConstructionRecord& c,
                      const corpus::SentenceRecord& s);

struct FeatureRow {
  std::string sentence_id;
  int main_verb_index = 0;
  std::string main_verb_lemma;
  std::array<double, kNumPredictors> values{};  // in kPredictorNames order
  int label = 0;                                // 1 = EXPLICIT
  bool sc_subject_missing = false;              // distance was imputed

  double& operator[](int i) { return values[i]; }
  double operator[](int i) const { return values[i]; }
};

struct FeaturizeOptions {
  bool log_frequency = false;  // ln of the relative frequency
  int jobs = 1;
};

// One row per construction, sorted by (sentence_id, main_verb_index).
// Missing SC subject distances are replaced by the mean of the present
// ones. Throws DataError listing constructions whose sentence is absent.
std::vector<FeatureRow> Featurize(
    std::span<const extraction::ConstructionRecord> constructions,
    std::span<const corpus::SentenceRecord> corpus, const CorpusStats& stats,
    const lm::LanguageModel& lm, const FeaturizeOptions& options = {});

// Header: sentence_id, main_verb_index, main_verb_lemma, the six
// predictors, label, sc_subject_missing.
void WriteFeatureCsv(std::ostream& out, std::span<const FeatureRow> rows);
// Throws DataError on a bad header or malformed row.
std::vector<FeatureRow> ReadFeatureCsv(std::istream& in);

}  // namespace uidthat::predictors

#endif  // UIDTHAT_PREDICTORS_FEATURES_H_
