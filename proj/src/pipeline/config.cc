#include "uidthat/pipeline/config.h"

#include <cstdio>
#include <fstream>
#include <set>

#include "uidthat/common/errors.h"

namespace uidthat::pipeline {
namespace {

using nlohmann::json;

void CheckKeys(const json& j, const std::string& where, std::set<std::string> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      throw ConfigError((where.empty() ? "" : where + ".") + key + ": unknown setting");
    }
  }
}

template <typename T>
void Read(const json& j, const char* key, const std::string& where, T& out) {
  if (!j.contains(key)) return;
  const std::string field = (where.empty() ? "" : where + ".") + key;
  try {
    const json& v = j.at(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(field + ": expected true or false");
    } else if constexpr (std::is_arithmetic_v<T>) {
      if (!v.is_number()) throw ConfigError(field + ": expected a number");
      if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError(field + ": expected an integer");
      }
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(field + ": expected a string");
    }
    out = v.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(field + ": " + e.what());
  }
}

template <typename T>
void ReadOptional(const json& j, const char* key, const std::string& where,
                  std::optional<T>& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  T value{};
  Read(j, key, where, value);
  out = value;
}

}  // namespace

PipelineConfig ConfigFromJson(const json& j) {
  PipelineConfig c;
  CheckKeys(j, "", {"corpus", "output_dir", "seed", "jobs", "provider", "lemma_filter",
                    "fit_scopes", "regression", "report"});
  Read(j, "corpus", "", c.corpus);
  Read(j, "output_dir", "", c.output_dir);
  Read(j, "seed", "", c.seed);
  Read(j, "jobs", "", c.jobs);
  ReadOptional(j, "lemma_filter", "", c.lemma_filter);
  if (j.contains("fit_scopes")) {
    const json& s = j.at("fit_scopes");
    if (!s.is_array()) throw ConfigError("fit_scopes: expected a list of strings");
    c.fit_scopes.clear();
    for (const json& v : s) {
      if (!v.is_string()) throw ConfigError("fit_scopes: expected a list of strings");
      c.fit_scopes.push_back(v.get<std::string>());
    }
  }
  if (j.contains("provider")) {
    const json& p = j.at("provider");
    CheckKeys(p, "provider", {"kind", "ngram", "external"});
    Read(p, "kind", "provider", c.provider.kind);
    if (p.contains("ngram")) {
      const json& n = p.at("ngram");
      CheckKeys(n, "provider.ngram", {"order", "smoothing_k", "min_count", "lowercase"});
      Read(n, "order", "provider.ngram", c.provider.ngram.order);
      Read(n, "smoothing_k", "provider.ngram", c.provider.ngram.smoothing_k);
      Read(n, "min_count", "provider.ngram", c.provider.ngram.min_count);
      Read(n, "lowercase", "provider.ngram", c.provider.ngram.lowercase);
    }
    if (p.contains("external")) {
      const json& e = p.at("external");
      const std::string w = "provider.external";
      CheckKeys(e, w, {"transport", "endpoint", "command", "topk", "retries", "timeout_seconds"});
      Read(e, "transport", w, c.provider.external.transport);
      Read(e, "endpoint", w, c.provider.external.endpoint);
      Read(e, "command", w, c.provider.external.command);
      Read(e, "topk", w, c.provider.external.topk);
      Read(e, "retries", w, c.provider.external.retries);
      Read(e, "timeout_seconds", w, c.provider.external.timeout_seconds);
    }
  }
  if (j.contains("regression")) {
    const json& r = j.at("regression");
    CheckKeys(r, "regression", {"tolerance", "max_iter", "ridge", "log_frequency", "cv_folds"});
    Read(r, "tolerance", "regression", c.regression.fit.tolerance);
    Read(r, "max_iter", "regression", c.regression.fit.max_iter);
    Read(r, "ridge", "regression", c.regression.fit.ridge);
    Read(r, "log_frequency", "regression", c.regression.log_frequency);
    Read(r, "cv_folds", "regression", c.regression.cv_folds);
  }
  if (j.contains("report")) {
    const json& r = j.at("report");
    CheckKeys(r, "report", {"annotation_sample_size", "kde_points", "kde_bandwidth", "top_k"});
    Read(r, "annotation_sample_size", "report", c.report.annotation_sample_size);
    Read(r, "kde_points", "report", c.report.kde_points);
    ReadOptional(r, "kde_bandwidth", "report", c.report.kde_bandwidth);
    Read(r, "top_k", "report", c.report.top_k);
  }
  return c;
}

PipelineConfig LoadConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: '" + path + "' is not valid JSON: " + e.what());
  }
  return ConfigFromJson(j);
}

nlohmann::ordered_json ConfigToJson(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  j["corpus"] = c.corpus;
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  j["provider"]["kind"] = c.provider.kind;
  j["provider"]["ngram"] = {{"order", c.provider.ngram.order},
                            {"smoothing_k", c.provider.ngram.smoothing_k},
                            {"min_count", c.provider.ngram.min_count},
                            {"lowercase", c.provider.ngram.lowercase}};
  const ExternalProviderConfig& e = c.provider.external;
  j["provider"]["external"] = {{"transport", e.transport}, {"endpoint", e.endpoint},
                               {"command", e.command},     {"topk", e.topk},
                               {"retries", e.retries},     {"timeout_seconds", e.timeout_seconds}};
  j["lemma_filter"] = c.lemma_filter ? nlohmann::ordered_json(*c.lemma_filter) : nullptr;
  j["fit_scopes"] = c.fit_scopes;
  j["regression"] = {{"tolerance", c.regression.fit.tolerance},
                     {"max_iter", c.regression.fit.max_iter},
                     {"ridge", c.regression.fit.ridge},
                     {"log_frequency", c.regression.log_frequency},
                     {"cv_folds", c.regression.cv_folds}};
  j["report"] = {{"annotation_sample_size", c.report.annotation_sample_size},
                 {"kde_points", c.report.kde_points},
                 {"kde_bandwidth", c.report.kde_bandwidth ? nlohmann::ordered_json(*c.report.kde_bandwidth)
                                                          : nlohmann::ordered_json(nullptr)},
                 {"top_k", c.report.top_k}};
  return j;
}

void ValidateConfig(const PipelineConfig& c) {
  if (c.jobs < 1) throw ConfigError("jobs: must be at least 1");
  if (c.output_dir.empty()) throw ConfigError("output_dir: must not be empty");
  const ProviderConfig& p = c.provider;
  if (p.kind == "ngram") {
    if (p.ngram.order < 1) throw ConfigError("provider.ngram.order: must be at least 1");
    if (p.ngram.smoothing_k < 0) throw ConfigError("provider.ngram.smoothing_k: must be >= 0");
    if (p.ngram.min_count < 1) throw ConfigError("provider.ngram.min_count: must be at least 1");
  } else if (p.kind == "external") {
    const ExternalProviderConfig& e = p.external;
    if (e.transport == "http") {
      if (e.endpoint.empty()) throw ConfigError("provider.external.endpoint: required for http");
    } else if (e.transport == "stdio") {
      if (e.command.empty()) throw ConfigError("provider.external.command: required for stdio");
    } else {
      throw ConfigError("provider.external.transport: expected \"http\" or \"stdio\"");
    }
    if (e.topk < 1) throw ConfigError("provider.external.topk: must be at least 1");
    if (e.retries < 0) throw ConfigError("provider.external.retries: must be >= 0");
    if (!(e.timeout_seconds > 0)) throw ConfigError("provider.external.timeout_seconds: must be > 0");
  } else {
    throw ConfigError("provider.kind: expected \"ngram\" or \"external\"");
  }
  if (c.lemma_filter && c.lemma_filter->empty()) throw ConfigError("lemma_filter: must not be empty");
  if (c.fit_scopes.empty()) throw ConfigError("fit_scopes: needs at least one scope");
  for (const auto& s : c.fit_scopes) {
    if (s.empty()) throw ConfigError("fit_scopes: scopes must not be empty");
  }
  const RegressionConfig& r = c.regression;
  if (!(r.fit.tolerance > 0)) throw ConfigError("regression.tolerance: must be > 0");
  if (r.fit.max_iter < 1) throw ConfigError("regression.max_iter: must be at least 1");
  if (r.fit.ridge < 0) throw ConfigError("regression.ridge: must be >= 0");
  if (r.cv_folds < 2) throw ConfigError("regression.cv_folds: must be at least 2");
  const ReportConfig& rep = c.report;
  if (rep.annotation_sample_size < 0 || rep.annotation_sample_size % 2 != 0) {
    throw ConfigError("report.annotation_sample_size: must be a non-negative even number");
  }
  if (rep.kde_points < 2) throw ConfigError("report.kde_points: must be at least 2");
  if (rep.kde_bandwidth && !(*rep.kde_bandwidth > 0)) {
    throw ConfigError("report.kde_bandwidth: must be > 0");
  }
  if (rep.top_k < 1) throw ConfigError("report.top_k: must be at least 1");
}

std::string MeasurementHash(const PipelineConfig& c) {
  nlohmann::ordered_json full = ConfigToJson(c);
  nlohmann::ordered_json j;
  j["corpus"] = full["corpus"];
  j["provider"]["kind"] = c.provider.kind;
  j["provider"]["params"] = full["provider"][c.provider.kind];
  j["lemma_filter"] = full["lemma_filter"];
  j["log_frequency"] = c.regression.log_frequency;
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace uidthat::pipeline
