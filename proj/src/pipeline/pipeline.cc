#include "uidthat/pipeline/pipeline.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "uidthat/analysis/analysis.h"
#include "uidthat/common/csv.h"
#include "uidthat/common/errors.h"
#include "uidthat/corpus/tokens.h"
#include "uidthat/extraction/constructions.h"
#include "uidthat/lm/external.h"
#include "uidthat/lm/ngram.h"
#include "uidthat/predictors/features.h"
#include "uidthat/regression/logistic.h"

namespace uidthat::pipeline {
namespace {

namespace fs = std::filesystem;
using corpus::SentenceRecord;
using extraction::ConstructionRecord;
using predictors::FeatureRow;

fs::path OutPath(const PipelineConfig& c, const std::string& name) {
  return fs::path(c.output_dir) / name;
}

// Output files are assembled in memory first so that a failing stage leaves
// no partial results behind.
class OutputSet {
 public:
  std::ostringstream& Add(const std::string& name) {
    files_.emplace_back(name, std::make_unique<std::ostringstream>());
    return *files_.back().second;
  }

  void Commit(const PipelineConfig& c, std::ostream& log) {
    std::error_code ec;
    fs::create_directories(c.output_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + c.output_dir + "': " + ec.message());
    for (const auto& [name, content] : files_) {
      fs::path path = OutPath(c, name);
      std::ofstream f(path, std::ios::binary | std::ios::trunc);
      f << content->str();
      if (!f) throw IoError("cannot write " + path.string());
      log << "wrote " << path.string() << "\n";
    }
  }

 private:
  std::vector<std::pair<std::string, std::unique_ptr<std::ostringstream>>> files_;
};

void Warn(std::ostream& log, const std::string& msg) { log << "warning: " << msg << "\n"; }

std::vector<SentenceRecord> LoadCorpus(const PipelineConfig& c, std::ostream& log) {
  if (c.corpus.empty()) throw ConfigError("corpus: path is required");
  if (!fs::exists(c.corpus)) throw ConfigError("corpus: file '" + c.corpus + "' does not exist");
  corpus::LoadResult loaded = corpus::LoadCorpusFile(c.corpus);
  if (loaded.skipped > 0) {
    Warn(log, std::to_string(loaded.skipped) + " corpus record(s) skipped");
    const std::size_t shown = std::min<std::size_t>(loaded.diagnostics.size(), 5);
    for (std::size_t i = 0; i < shown; ++i) {
      log << "  " << corpus::FormatDiagnostic(loaded.diagnostics[i]) << "\n";
    }
  }
  return std::move(loaded.records);
}

std::ifstream OpenInput(const PipelineConfig& c, const std::string& name, const char* stage) {
  fs::path path = OutPath(c, name);
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read " + path.string() + " (run '" + stage + "' first)");
  }
  return in;
}

std::vector<ConstructionRecord> LoadConstructions(const PipelineConfig& c) {
  std::ifstream in = OpenInput(c, kConstructionsFile, "extract");
  return extraction::ReadConstructions(in);
}

std::vector<FeatureRow> LoadFeatures(const PipelineConfig& c) {
  std::ifstream in = OpenInput(c, kFeaturesFile, "featurize");
  return predictors::ReadFeatureCsv(in);
}

std::string FormatMaybe(const std::optional<double>& v) {
  return v ? csv::FormatDouble(*v) : "NA";
}

std::string Slug(const std::string& s) {
  std::string out;
  for (char ch : s) {
    out += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
  }
  return out;
}

std::string LabelSlug(int label) { return label == 1 ? "explicit" : "implicit"; }

std::vector<std::size_t> ClampedSample(std::span<const ConstructionRecord> cons, int requested,
                                       std::uint64_t seed, std::ostream& log) {
  int per_class[2] = {0, 0};
  for (const auto& c : cons) ++per_class[static_cast<int>(c.label)];
  int n = std::min(requested, 2 * std::min(per_class[0], per_class[1]));
  if (n < requested) {
    Warn(log, "annotation sample reduced from " + std::to_string(requested) + " to " +
                  std::to_string(n) + " (explicit " + std::to_string(per_class[0]) +
                  ", implicit " + std::to_string(per_class[1]) + " available)");
  }
  if (n == 0) return {};
  return analysis::AnnotationSample(cons, n, seed);
}

void WriteAnnotationSample(std::ostream& out, std::span<const ConstructionRecord> cons,
                           std::span<const std::size_t> picked,
                           std::span<const SentenceRecord> corpus) {
  std::unordered_map<std::string, const SentenceRecord*> by_id;
  for (const auto& s : corpus) by_id.emplace(s.id, &s);
  csv::WriteRow(out, std::vector<std::string>{"sentence_id", "label", "main_verb_index",
                                              "main_verb_lemma", "sc_onset_index", "text",
                                              "valid"});
  for (std::size_t i : picked) {
    const ConstructionRecord& c = cons[i];
    auto it = by_id.find(c.sentence_id);
    if (it == by_id.end()) throw DataError("construction references unknown sentence " + c.sentence_id);
    csv::WriteRow(out, std::vector<std::string>{
                           c.sentence_id, std::string(extraction::LabelName(c.label)),
                           std::to_string(c.main_verb_index), c.main_verb_lemma,
                           std::to_string(c.sc_onset_index),
                           corpus::Detokenize(it->second->tokens), ""});
  }
}

}  // namespace

int ExitCodeFor(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const ProviderError*>(&e)) return kExitProvider;
  if (dynamic_cast<const DataError*>(&e)) return kExitData;
  return kExitIo;
}

std::unique_ptr<lm::LanguageModel> MakeProvider(const PipelineConfig& c,
                                                std::span<const SentenceRecord> corpus) {
  const ProviderConfig& p = c.provider;
  if (p.kind == "ngram") {
    return std::make_unique<lm::NgramModel>(lm::NgramModel::Train(corpus, p.ngram));
  }
  const ExternalProviderConfig& e = p.external;
  auto timeout = std::chrono::milliseconds(static_cast<long>(e.timeout_seconds * 1000));
  auto transport = e.transport == "http" ? lm::MakeHttpTransport(e.endpoint, timeout)
                                         : lm::MakeStdioTransport(e.command, timeout);
  return std::make_unique<lm::ExternalModel>(std::move(transport),
                                             lm::ExternalConfig{e.topk, e.retries});
}

void RunExtract(const PipelineConfig& c, std::ostream& out, std::ostream& log) {
  ValidateConfig(c);
  std::vector<SentenceRecord> corpus = LoadCorpus(c, log);
  extraction::ExtractionResult result = extraction::ExtractCorpus(corpus, c.jobs);
  const extraction::ExtractionCounts& n = result.counts;
  if (result.constructions.empty()) Warn(log, "no constructions found in the corpus");

  OutputSet files;
  extraction::WriteConstructions(files.Add(kConstructionsFile), result.constructions);

  std::ostringstream& counts = files.Add(kExtractionCountsFile);
  csv::WriteRow(counts, std::vector<std::string>{"type", "count", "mean_sentence_length"});
  auto mean = [](long words, int count) -> std::optional<double> {
    if (count == 0) return std::nullopt;
    return static_cast<double>(words) / count;
  };
  for (int l = 0; l < 2; ++l) {
    csv::WriteRow(counts, std::vector<std::string>{
                              LabelSlug(l == 0 ? 1 : 0), std::to_string(n.constructions_by_label[l]),
                              FormatMaybe(mean(n.construction_sentence_words[l],
                                               n.constructions_by_label[l]))});
  }
  csv::WriteRow(counts, std::vector<std::string>{
                            "other", std::to_string(n.other_that_sentences),
                            FormatMaybe(mean(n.other_that_sentence_words, n.other_that_sentences))});

  std::ostringstream& roles = files.Add(kThatRolesFile);
  csv::WriteRow(roles, std::vector<std::string>{"role", "count"});
  for (int r = 0; r < extraction::kNumThatRoles; ++r) {
    csv::WriteRow(roles, std::vector<std::string>{
                             std::string(extraction::RoleName(static_cast<extraction::ThatRole>(r))),
                             std::to_string(n.usages_by_role[r])});
  }
  files.Commit(c, log);

  out << "sentences read: " << n.sentences_read << "\n"
      << "sentences within length bounds: " << n.sentences_in_range << "\n"
      << "explicit constructions: " << n.constructions_by_label[0] << "\n"
      << "implicit constructions: " << n.constructions_by_label[1] << "\n"
      << "sentences with other \"that\" usages: " << n.other_that_sentences << "\n";
}

void RunFeaturize(const PipelineConfig& c, std::ostream& out, std::ostream& log) {
  ValidateConfig(c);
  std::vector<SentenceRecord> corpus = LoadCorpus(c, log);
  std::vector<ConstructionRecord> cons = LoadConstructions(c);
  if (c.lemma_filter) {
    std::erase_if(cons, [&](const ConstructionRecord& r) { return r.main_verb_lemma != *c.lemma_filter; });
  }
  if (cons.empty()) Warn(log, "no constructions to featurize");
  predictors::CorpusStats stats = predictors::CorpusStats::FromCorpus(corpus);
  std::unique_ptr<lm::LanguageModel> provider = MakeProvider(c, corpus);
  predictors::FeaturizeOptions options;
  options.log_frequency = c.regression.log_frequency;
  options.jobs = c.jobs;
  std::vector<FeatureRow> rows = predictors::Featurize(cons, corpus, stats, *provider, options);
  int missing = 0;
  for (const FeatureRow& r : rows) missing += r.sc_subject_missing;
  if (missing > 0) {
    Warn(log, std::to_string(missing) + " row(s) without an SC subject; distance imputed with the mean");
  }

  OutputSet files;
  predictors::WriteFeatureCsv(files.Add(kFeaturesFile), rows);
  nlohmann::ordered_json meta;
  meta["provider"] = provider->Identity();
  meta["measurement_hash"] = MeasurementHash(c);
  meta["corpus"] = c.corpus;
  meta["lemma_filter"] = c.lemma_filter ? nlohmann::ordered_json(*c.lemma_filter) : nullptr;
  meta["log_frequency"] = c.regression.log_frequency;
  meta["rows"] = rows.size();
  meta["imputed_subject_distance_rows"] = missing;
  meta["corpus_sentences"] = stats.sentence_count;
  meta["corpus_verb_tokens"] = stats.total_verb_tokens;
  files.Add(kFeaturesMetaFile) << meta.dump(2) << "\n";
  files.Commit(c, log);
  out << "feature rows: " << rows.size() << " (provider " << provider->Identity() << ")\n";
}

void RunFit(const PipelineConfig& c, std::ostream& out, std::ostream& log) {
  ValidateConfig(c);
  std::vector<FeatureRow> rows = LoadFeatures(c);
  if (rows.empty()) throw DataError("feature table is empty; nothing to fit");

  OutputSet files;
  std::string printed;
  for (const std::string& scope : c.fit_scopes) {
    std::vector<const FeatureRow*> subset;
    for (const FeatureRow& r : rows) {
      if (scope == "all" || r.main_verb_lemma == scope) subset.push_back(&r);
    }
    if (subset.size() < 2) {
      throw DataError("scope '" + scope + "' has " + std::to_string(subset.size()) +
                      " row(s); at least 2 are needed");
    }
    std::vector<int> columns;
    std::vector<std::string> names;
    for (int k = 0; k < predictors::kNumPredictors; ++k) {
      bool constant = std::all_of(subset.begin(), subset.end(), [&](const FeatureRow* r) {
        return (*r)[k] == (*subset.front())[k];
      });
      if (constant) {
        Warn(log, "scope '" + scope + "': predictor " + std::string(predictors::kPredictorNames[k]) +
                      " is constant and is left out");
        continue;
      }
      columns.push_back(k);
      names.emplace_back(predictors::kPredictorNames[k]);
    }
    Eigen::MatrixXd x(subset.size(), columns.size());
    Eigen::VectorXd y(subset.size());
    for (std::size_t i = 0; i < subset.size(); ++i) {
      for (std::size_t j = 0; j < columns.size(); ++j) x(i, j) = (*subset[i])[columns[j]];
      y[i] = subset[i]->label;
    }
    regression::ScalerParams scaler = regression::FitScaler(x, names);
    Eigen::MatrixXd xs = regression::ApplyScaler(scaler, x);
    regression::RegressionFit fit = regression::FitLogistic(xs, y, c.regression.fit);
    if (!fit.converged) {
      throw DataError("scope '" + scope + "': logistic fit did not converge in " +
                      std::to_string(c.regression.fit.max_iter) + " iterations");
    }
    regression::RegressionSummary summary = regression::WaldSummary(fit, names);
    summary.n = static_cast<int>(subset.size());
    summary.accuracy = regression::Accuracy(fit, xs, y);
    summary.cv = regression::CrossValidatedAccuracy(x, y, c.regression.cv_folds, c.seed,
                                                    c.regression.fit);
    const std::string title = scope == "all" ? "scope: all main verb lemmas"
                                             : "scope: main verb lemma '" + scope + "'";
    std::string text = regression::FormatSummary(summary, title);
    files.Add("regression_" + Slug(scope) + ".txt") << text;
    files.Add("regression_" + Slug(scope) + ".json") << regression::SummaryJson(summary, scope, scaler);
    printed += text + "\n";
  }
  files.Commit(c, log);
  out << printed;
}

namespace {

// Relative frequency of lowercased word forms over all corpus tokens.
std::unordered_map<std::string, double> WordFrequencies(std::span<const SentenceRecord> corpus) {
  std::unordered_map<std::string, long> counts;
  long total = 0;
  for (const auto& s : corpus) {
    for (const auto& t : s.tokens) {
      ++counts[corpus::ToLower(t)];
      ++total;
    }
  }
  std::unordered_map<std::string, double> freq;
  for (const auto& [w, n] : counts) freq[w] = static_cast<double>(n) / static_cast<double>(total);
  return freq;
}

}  // namespace

void RunReport(const PipelineConfig& c, std::ostream& out, std::ostream& log) {
  ValidateConfig(c);
  std::vector<SentenceRecord> corpus = LoadCorpus(c, log);
  std::vector<ConstructionRecord> cons = LoadConstructions(c);
  std::vector<FeatureRow> rows = LoadFeatures(c);
  OutputSet files;

  analysis::DatasetSummary summary = analysis::SummarizeDataset(cons, corpus);
  std::ostringstream& sf = files.Add(kSummaryFile);
  csv::WriteRow(sf, std::vector<std::string>{"type", "count", "mean_sentence_length"});
  for (int l = 0; l < 2; ++l) {
    csv::WriteRow(sf, std::vector<std::string>{LabelSlug(l == 0 ? 1 : 0),
                                               std::to_string(summary[l].count),
                                               FormatMaybe(summary[l].mean_sentence_length)});
  }

  analysis::LemmaDistribution lemmas = analysis::ComputeLemmaDistribution(cons, c.report.top_k);
  std::ostringstream& lf = files.Add(kLemmasFile);
  csv::WriteRow(lf, std::vector<std::string>{"rank", "lemma", "total", "explicit", "implicit",
                                             "share", "cumulative_share"});
  double cumulative = 0.0;
  for (std::size_t i = 0; i < lemmas.lemmas.size(); ++i) {
    const analysis::LemmaCount& lc = lemmas.lemmas[i];
    cumulative += lc.share;
    csv::WriteRow(lf, std::vector<std::string>{
                          std::to_string(i + 1), lc.lemma, std::to_string(lc.total),
                          std::to_string(lc.explicit_count), std::to_string(lc.implicit_count),
                          csv::FormatDouble(lc.share), csv::FormatDouble(cumulative)});
  }

  std::vector<std::pair<std::string, std::vector<const FeatureRow*>>> groups;
  groups.emplace_back("", std::vector<const FeatureRow*>{});
  for (const FeatureRow& r : rows) groups[0].second.push_back(&r);
  for (const std::string& scope : c.fit_scopes) {
    if (scope == "all") continue;
    std::vector<const FeatureRow*> subset;
    for (const FeatureRow& r : rows) {
      if (r.main_verb_lemma == scope) subset.push_back(&r);
    }
    groups.emplace_back("_" + Slug(scope), std::move(subset));
  }
  int kde_written = 0;
  for (const auto& [suffix, subset] : groups) {
    for (int k = 0; k < predictors::kNumPredictors; ++k) {
      for (int label : {1, 0}) {
        std::vector<double> values;
        for (const FeatureRow* r : subset) {
          if (r->label == label) values.push_back((*r)[k]);
        }
        const std::string name = "kde_" + std::string(predictors::kPredictorNames[k]) + "_" +
                                 LabelSlug(label) + suffix + ".csv";
        analysis::KdeCurve curve;
        try {
          double h = c.report.kde_bandwidth ? *c.report.kde_bandwidth
                                            : analysis::ScottBandwidth(values);
          curve = analysis::Kde(values, analysis::DefaultGrid(values, h, c.report.kde_points), h);
        } catch (const DataError& e) {
          Warn(log, name + " skipped: " + e.what());
          continue;
        }
        std::ostringstream& kf = files.Add(name);
        csv::WriteRow(kf, std::vector<std::string>{"x", "density", "bandwidth"});
        for (std::size_t i = 0; i < curve.grid.size(); ++i) {
          csv::WriteRow(kf, std::vector<std::string>{csv::FormatDouble(curve.grid[i]),
                                                     csv::FormatDouble(curve.density[i]),
                                                     csv::FormatDouble(curve.bandwidth)});
        }
        ++kde_written;
      }
    }
  }

  // Correlations over the feature rows, plus the onset and subject word
  // frequencies that are not used as predictors.
  std::map<std::pair<std::string, int>, const ConstructionRecord*> con_by_key;
  for (const ConstructionRecord& r : cons) con_by_key[{r.sentence_id, r.main_verb_index}] = &r;
  std::unordered_map<std::string, const SentenceRecord*> sent_by_id;
  for (const SentenceRecord& s : corpus) sent_by_id.emplace(s.id, &s);
  std::unordered_map<std::string, double> freq = WordFrequencies(corpus);
  std::vector<std::string> col_names;
  for (auto n : predictors::kPredictorNames) col_names.emplace_back(n);
  col_names.push_back("sc_onset_frequency");
  col_names.push_back("sc_subject_frequency");
  const std::size_t ncols = col_names.size();
  std::vector<std::vector<std::optional<double>>> cols(ncols);
  for (const FeatureRow& r : rows) {
    for (int k = 0; k < predictors::kNumPredictors; ++k) {
      cols[k].push_back(k == 3 && r.sc_subject_missing ? std::nullopt : std::optional((r)[k]));
    }
    std::optional<double> onset_f, subject_f;
    auto ci = con_by_key.find({r.sentence_id, r.main_verb_index});
    if (ci != con_by_key.end()) {
      auto si = sent_by_id.find(r.sentence_id);
      if (si != sent_by_id.end()) {
        const auto& toks = si->second->tokens;
        onset_f = freq.at(corpus::ToLower(toks.at(ci->second->sc_onset_index)));
        if (ci->second->sc_subject_index) {
          subject_f = freq.at(corpus::ToLower(toks.at(*ci->second->sc_subject_index)));
        }
      }
    }
    cols[ncols - 2].push_back(onset_f);
    cols[ncols - 1].push_back(subject_f);
  }
  std::ostringstream& cf = files.Add(kCorrelationsFile);
  csv::WriteRow(cf, std::vector<std::string>{"x", "y", "n", "r"});
  for (std::size_t a = 0; a < ncols; ++a) {
    for (std::size_t b = a + 1; b < ncols; ++b) {
      std::vector<double> xs, ys;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (cols[a][i] && cols[b][i]) {
          xs.push_back(*cols[a][i]);
          ys.push_back(*cols[b][i]);
        }
      }
      std::string r = "NA";
      try {
        r = csv::FormatDouble(analysis::PearsonR(xs, ys));
      } catch (const DataError&) {
      }
      csv::WriteRow(cf, std::vector<std::string>{col_names[a], col_names[b],
                                                 std::to_string(xs.size()), r});
    }
  }

  std::vector<std::size_t> picked =
      ClampedSample(cons, c.report.annotation_sample_size, c.seed, log);
  WriteAnnotationSample(files.Add(kAnnotationSampleFile), cons, picked, corpus);
  files.Commit(c, log);

  out << "constructions: explicit " << summary[0].count << ", implicit " << summary[1].count
      << "\n"
      << "distinct main verb lemmas: " << lemmas.lemmas.size() << "; top-" << lemmas.top_k
      << " share " << csv::FormatDouble(lemmas.top_k_share) << "\n"
      << "KDE curves: " << kde_written << "; annotation sample: " << picked.size() << "\n";
}

void RunSample(const PipelineConfig& c, std::ostream& out, std::ostream& log) {
  ValidateConfig(c);
  std::vector<SentenceRecord> corpus = LoadCorpus(c, log);
  std::vector<ConstructionRecord> cons = LoadConstructions(c);
  std::vector<std::size_t> picked =
      ClampedSample(cons, c.report.annotation_sample_size, c.seed, log);
  OutputSet files;
  WriteAnnotationSample(files.Add(kAnnotationSampleFile), cons, picked, corpus);
  files.Commit(c, log);
  out << "annotation sample: " << picked.size() << " constructions\n";
}

void RunAll(const PipelineConfig& c, std::ostream& out, std::ostream& log) {
  RunExtract(c, out, log);
  RunFeaturize(c, out, log);
  RunFit(c, out, log);
  RunReport(c, out, log);
}

}  // namespace uidthat::pipeline
