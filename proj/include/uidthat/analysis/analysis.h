#ifndef UIDTHAT_ANALYSIS_ANALYSIS_H_
#define UIDTHAT_ANALYSIS_ANALYSIS_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uidthat/corpus/sentence.h"
#include "uidthat/extraction/constructions.h"

namespace uidthat::analysis {

struct LabelSummary {
  int count = 0;
  std::optional<double> mean_sentence_length;  // unset when count == 0
};

// Indexed by extraction::Label.
using DatasetSummary = std::array<LabelSummary, 2>;

struct LabeledLength {
  extraction::Label label;
  int words;
};

DatasetSummary SummarizeDataset(std::span<const LabeledLength> items);
// Sentence length is the source sentence's non-punctuation word count.
DatasetSummary SummarizeDataset(std::span<const extraction::ConstructionRecord> constructions,
                                std::span<const corpus::SentenceRecord> corpus);

struct LemmaCount {
  std::string lemma;
  int total = 0;
  int explicit_count = 0;
  int implicit_count = 0;
  double share = 0.0;  // total / all constructions
};

struct LemmaDistribution {
  std::vector<LemmaCount> lemmas;  // every lemma, by total desc then name
  int top_k = 0;
  double top_k_share = 0.0;        // cumulative share of the first top_k
};

LemmaDistribution ComputeLemmaDistribution(
    std::span<const extraction::ConstructionRecord> constructions, int top_k);

// Sample Pearson correlation. Throws DataError on unequal lengths, fewer
// than 2 points, or zero variance.
double PearsonR(std::span<const double> x, std::span<const double> y);

struct KdeCurve {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
};

// Scott's rule: sample std * n^(-1/5). Throws DataError when all values are
// equal.
double ScottBandwidth(std::span<const double> values);
// `points` evenly spaced values from min - 3h to max + 3h.
std::vector<double> DefaultGrid(std::span<const double> values, double bandwidth, int points);
// Gaussian kernel estimate. bandwidth defaults to Scott's rule.
KdeCurve Kde(std::span<const double> values, std::span<const double> grid,
             std::optional<double> bandwidth = std::nullopt);

// Indices of n/2 EXPLICIT and n/2 IMPLICIT constructions drawn without
// replacement, in ascending order. n must be even and positive; throws
// DataError when a class is too small.
std::vector<std::size_t> AnnotationSample(
    std::span<const extraction::ConstructionRecord> constructions, int n,
    std::uint64_t seed);

}  // namespace uidthat::analysis

#endif  // UIDTHAT_ANALYSIS_ANALYSIS_H_
