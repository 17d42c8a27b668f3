#ifndef UIDTHAT_PIPELINE_PIPELINE_H_
#define UIDTHAT_PIPELINE_PIPELINE_H_

#include <exception>
#include <memory>
#include <ostream>
#include <span>

#include "uidthat/corpus/sentence.h"
#include "uidthat/lm/language_model.h"
#include "uidthat/pipeline/config.h"

namespace uidthat::pipeline {

// File names inside the output directory.
inline constexpr const char* kConstructionsFile = "constructions.jsonl";
inline constexpr const char* kExtractionCountsFile = "extraction_counts.csv";
inline constexpr const char* kThatRolesFile = "that_roles.csv";
inline constexpr const char* kFeaturesFile = "features.csv";
inline constexpr const char* kFeaturesMetaFile = "features.meta.json";
inline constexpr const char* kSummaryFile = "summary.csv";
inline constexpr const char* kLemmasFile = "lemmas.csv";
inline constexpr const char* kCorrelationsFile = "correlations.csv";
inline constexpr const char* kAnnotationSampleFile = "annotation_sample.csv";

enum ExitCode {
  kExitOk = 0,
  kExitIo = 1,
  kExitConfig = 2,
  kExitProvider = 3,
  kExitData = 4,
};

// Maps the library's error types to process exit codes.
int ExitCodeFor(const std::exception& e);

// Trains the n-gram model on `corpus` or connects to the sidecar.
std::unique_ptr<lm::LanguageModel> MakeProvider(
    const PipelineConfig& config, std::span<const corpus::SentenceRecord> corpus);

// Each stage reads its inputs, computes everything in memory and only then
// writes its outputs. Human-readable results go to `out`, progress and
// warnings to `log`.
void RunExtract(const PipelineConfig& config, std::ostream& out, std::ostream& log);
void RunFeaturize(const PipelineConfig& config, std::ostream& out, std::ostream& log);
void RunFit(const PipelineConfig& config, std::ostream& out, std::ostream& log);
void RunReport(const PipelineConfig& config, std::ostream& out, std::ostream& log);
void RunSample(const PipelineConfig& config, std::ostream& out, std::ostream& log);
// extract, featurize, fit, report.
void RunAll(const PipelineConfig& config, std::ostream& out, std::ostream& log);

}  // namespace uidthat::pipeline

#endif  // UIDTHAT_PIPELINE_PIPELINE_H_
