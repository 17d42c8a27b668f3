#ifndef UIDTHAT_PIPELINE_CONFIG_H_
#define UIDTHAT_PIPELINE_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "uidthat/lm/ngram.h"
#include "uidthat/regression/logistic.h"

namespace uidthat::pipeline {

struct ExternalProviderConfig {
  std::string transport = "http";  // "http" or "stdio"
  std::string endpoint;            // http
  std::string command;             // stdio
  int topk = 50;
  int retries = 2;
  double timeout_seconds = 30.0;
};

struct ProviderConfig {
  std::string kind = "ngram";  // "ngram" or "external"
  lm::NgramConfig ngram;
  ExternalProviderConfig external;
};

struct RegressionConfig {
  regression::FitOptions fit;
  bool log_frequency = false;
  int cv_folds = 5;
};

struct ReportConfig {
  int annotation_sample_size = 500;
  int kde_points = 200;
  std::optional<double> kde_bandwidth;
  int top_k = 10;
};

struct PipelineConfig {
  std::string corpus;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  int jobs = 1;
  ProviderConfig provider;
  std::optional<std::string> lemma_filter;     // featurize keeps only this lemma
  std::vector<std::string> fit_scopes = {"all"};  // "all" or a lemma
  RegressionConfig regression;
  ReportConfig report;
};

// Missing keys keep their defaults; unknown keys and ill-typed or
// out-of-range values throw ConfigError naming the field.
PipelineConfig ConfigFromJson(const nlohmann::json& j);
PipelineConfig LoadConfigFile(const std::string& path);
nlohmann::ordered_json ConfigToJson(const PipelineConfig& config);

// Range checks shared by file and command-line values.
void ValidateConfig(const PipelineConfig& config);

// FNV-1a over the settings that affect measured values: corpus path,
// provider, lemma filter and frequency transform.
std::string MeasurementHash(const PipelineConfig& config);

}  // namespace uidthat::pipeline

#endif  // UIDTHAT_PIPELINE_CONFIG_H_
