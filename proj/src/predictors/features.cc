#include "uidthat/predictors/features.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "uidthat/common/csv.h"
#include "uidthat/common/errors.h"
#include "uidthat/common/parallel.h"
#include "uidthat/corpus/tokens.h"
#include "uidthat/lm/distribution.h"

namespace uidthat::predictors {

using corpus::SentenceRecord;
using extraction::ConstructionRecord;

CorpusStats CorpusStats::FromCorpus(std::span<const SentenceRecord> corpus) {
  CorpusStats stats;
  stats.sentence_count = static_cast<long>(corpus.size());
  for (const SentenceRecord& s : corpus) {
    for (int i = 0; i < s.size(); ++i) {
      if (s.pos[i] != "VERB" && s.pos[i] != "AUX") continue;
      ++stats.verb_lemma_counts[corpus::ToLower(s.lemmas[i])];
      ++stats.total_verb_tokens;
    }
  }
  return stats;
}

double CorpusStats::RelativeFrequency(const std::string& lemma) const {
  auto it = verb_lemma_counts.find(corpus::ToLower(lemma));
  if (it == verb_lemma_counts.end()) {
    throw DataError("verb lemma '" + lemma + "' does not occur as a verb in the corpus");
  }
  return static_cast<double>(it->second) / static_cast<double>(total_verb_tokens);
}

StructuralFeatures ComputeStructuralFeatures(const ConstructionRecord& c,
                                             const SentenceRecord& s,
                                             const CorpusStats& stats) {
  std::string bad = extraction::CheckConstructionInvariants(c, static_cast<int>(s.size()));
  if (!bad.empty()) throw DataError(c.sentence_id + ": " + bad);
  StructuralFeatures f;
  const int boundary = c.sconj_index.value_or(c.sc_onset_index);
  f.mc_length = corpus::WordCount(std::span(s.tokens).first(boundary));
  f.sc_length = c.sc_end_index - c.sc_onset_index + 1;
  if (c.sc_subject_index) f.sc_subject_distance = *c.sc_subject_index - c.sc_onset_index + 1;
  f.main_verb_frequency = stats.RelativeFrequency(c.main_verb_lemma);
  return f;
}

std::vector<std::string> MainClausePrefix(const ConstructionRecord& c,
                                          const SentenceRecord& s) {
  return {s.tokens.begin(), s.tokens.begin() + c.main_verb_index + 1};
}

double MarginalizedSurprisal(double logprob_without, double logprob_with_that) {
  return -lm::LogAddExp(logprob_without, logprob_with_that);
}

double ScOnsetSurprisal(const lm::LanguageModel& lm, const ConstructionRecord& c,
                        const SentenceRecord& s) {
  std::vector<std::string> prefix = MainClausePrefix(c, s);
  const std::string& onset = s.tokens.at(c.sc_onset_index);
  double lp1 = lm.ContinuationLogprob(prefix, onset);
  prefix.push_back("that");
  double lp2 = lm.ContinuationLogprob(prefix, onset);
  return MarginalizedSurprisal(lp1, lp2);
}

double ScOnsetEntropy(const lm::LanguageModel& lm, const ConstructionRecord& c,
                      const SentenceRecord& s) {
  return lm.NextTokenEntropy(MainClausePrefix(c, s));
}

std::vector<FeatureRow> Featurize(std::span<const ConstructionRecord> constructions,
                                  std::span<const SentenceRecord> corpus,
                                  const CorpusStats& stats, const lm::LanguageModel& lm,
                                  const FeaturizeOptions& options) {
  std::unordered_map<std::string, const SentenceRecord*> by_id;
  for (const SentenceRecord& s : corpus) by_id.emplace(s.id, &s);
  std::vector<const SentenceRecord*> sources;
  std::string dangling;
  for (const ConstructionRecord& c : constructions) {
    auto it = by_id.find(c.sentence_id);
    if (it == by_id.end()) {
      dangling += (dangling.empty() ? "" : ", ") + c.sentence_id;
      sources.push_back(nullptr);
    } else {
      sources.push_back(it->second);
    }
  }
  if (!dangling.empty()) {
    throw DataError("constructions reference sentences missing from the corpus: " + dangling);
  }

  std::vector<FeatureRow> rows(constructions.size());
  std::vector<std::optional<int>> distances(constructions.size());
  ParallelFor(constructions.size(), options.jobs, [&](std::size_t i) {
    const ConstructionRecord& c = constructions[i];
    const SentenceRecord& s = *sources[i];
    StructuralFeatures sf = ComputeStructuralFeatures(c, s, stats);
    FeatureRow& row = rows[i];
    row.sentence_id = c.sentence_id;
    row.main_verb_index = c.main_verb_index;
    row.main_verb_lemma = c.main_verb_lemma;
    row[0] = sf.mc_length;
    row[1] = options.log_frequency ? std::log(sf.main_verb_frequency)
                                   : sf.main_verb_frequency;
    row[2] = sf.sc_length;
    row[4] = ScOnsetSurprisal(lm, c, s);
    row[5] = ScOnsetEntropy(lm, c, s);
    row.label = c.label == extraction::Label::kExplicit ? 1 : 0;
    distances[i] = sf.sc_subject_distance;
  });

  double sum = 0.0;
  int present = 0;
  for (const auto& d : distances) {
    if (d) {
      sum += *d;
      ++present;
    }
  }
  if (present == 0 && !rows.empty()) {
    throw DataError("no construction has an SC subject; subject distance cannot be imputed");
  }
  const double mean = present > 0 ? sum / present : 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i][3] = distances[i] ? static_cast<double>(*distances[i]) : mean;
    rows[i].sc_subject_missing = !distances[i];
  }

  std::stable_sort(rows.begin(), rows.end(), [](const FeatureRow& a, const FeatureRow& b) {
    if (a.sentence_id != b.sentence_id) return a.sentence_id < b.sentence_id;
    return a.main_verb_index < b.main_verb_index;
  });
  return rows;
}

namespace {

std::vector<std::string> Header() {
  std::vector<std::string> h = {"sentence_id", "main_verb_index", "main_verb_lemma"};
  for (std::string_view name : kPredictorNames) h.emplace_back(name);
  h.push_back("label");
  h.push_back("sc_subject_missing");
  return h;
}

}  // namespace

void WriteFeatureCsv(std::ostream& out, std::span<const FeatureRow> rows) {
  csv::WriteRow(out, Header());
  for (const FeatureRow& r : rows) {
    std::vector<std::string> f = {r.sentence_id, std::to_string(r.main_verb_index),
                                  r.main_verb_lemma};
    for (double v : r.values) f.push_back(csv::FormatDouble(v));
    f.push_back(std::to_string(r.label));
    f.push_back(r.sc_subject_missing ? "1" : "0");
    csv::WriteRow(out, f);
  }
}

std::vector<FeatureRow> ReadFeatureCsv(std::istream& in) {
  std::vector<std::string> fields;
  if (!csv::ReadRow(in, fields)) throw DataError("feature CSV is empty");
  if (fields != Header()) throw DataError("feature CSV has an unexpected header");
  const std::size_t width = fields.size();
  std::vector<FeatureRow> rows;
  int line = 1;
  while (csv::ReadRow(in, fields)) {
    ++line;
    const std::string where = "feature CSV row " + std::to_string(line);
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != width) throw DataError(where + ": expected " + std::to_string(width) + " fields");
    FeatureRow r;
    r.sentence_id = fields[0];
    r.main_verb_index = static_cast<int>(csv::ParseInt(fields[1], where));
    r.main_verb_lemma = fields[2];
    for (int k = 0; k < kNumPredictors; ++k) r[k] = csv::ParseDouble(fields[3 + k], where);
    long label = csv::ParseInt(fields[3 + kNumPredictors], where);
    long missing = csv::ParseInt(fields[4 + kNumPredictors], where);
    if ((label != 0 && label != 1) || (missing != 0 && missing != 1)) {
      throw DataError(where + ": label and sc_subject_missing must be 0 or 1");
    }
    r.label = static_cast<int>(label);
    r.sc_subject_missing = missing == 1;
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace uidthat::predictors
