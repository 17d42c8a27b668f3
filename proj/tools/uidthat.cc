// Command-line driver for the pipeline stages.

#include <iostream>

#include "CLI11.hpp"
#include "uidthat/common/errors.h"
#include "uidthat/pipeline/config.h"
#include "uidthat/pipeline/pipeline.h"

namespace {

using uidthat::pipeline::PipelineConfig;

struct Overrides {
  std::string config_path;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<std::string> corpus;
  std::optional<std::string> provider;
  std::optional<std::string> endpoint;
  std::optional<std::string> command;
  std::optional<std::string> lemma_filter;
  std::vector<std::string> scopes;
  std::optional<double> ridge;
  std::optional<int> sample_size;
};

PipelineConfig Resolve(const Overrides& o) {
  PipelineConfig c;
  if (!o.config_path.empty()) c = uidthat::pipeline::LoadConfigFile(o.config_path);
  if (o.jobs) c.jobs = *o.jobs;
  if (o.seed) c.seed = *o.seed;
  if (o.output_dir) c.output_dir = *o.output_dir;
  if (o.corpus) c.corpus = *o.corpus;
  if (o.provider) c.provider.kind = *o.provider;
  if (o.endpoint) {
    c.provider.external.transport = "http";
    c.provider.external.endpoint = *o.endpoint;
  }
  if (o.command) {
    c.provider.external.transport = "stdio";
    c.provider.external.command = *o.command;
  }
  if (o.lemma_filter) c.lemma_filter = *o.lemma_filter;
  if (!o.scopes.empty()) c.fit_scopes = o.scopes;
  if (o.ridge) c.regression.fit.ridge = *o.ridge;
  if (o.sample_size) c.report.annotation_sample_size = *o.sample_size;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optional-\"that\" complement clause extraction and information-density analysis"};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("--config", o.config_path, "JSON configuration file");
  app.add_option("--jobs", o.jobs, "Worker thread cap");
  app.add_option("--seed", o.seed, "Seed for sampling and cross-validation");
  app.add_option("--output-dir", o.output_dir, "Directory for all stage outputs");
  app.add_option("--corpus", o.corpus, "Corpus JSONL file");
  app.add_option("--provider", o.provider, "ngram or external");
  app.add_option("--endpoint", o.endpoint, "Sidecar URL (external provider over HTTP)");
  app.add_option("--sidecar-command", o.command, "Sidecar command (external provider over stdio)");
  app.add_option("--lemma-filter", o.lemma_filter, "Featurize only this main verb lemma");
  app.add_option("--scope", o.scopes, "Fit scope: 'all' or a lemma (repeatable)");
  app.add_option("--ridge", o.ridge, "L2 penalty on slopes");
  app.add_option("--sample-size", o.sample_size, "Annotation sample size (even)");

  using Stage = void (*)(const PipelineConfig&, std::ostream&, std::ostream&);
  const std::vector<std::tuple<const char*, const char*, Stage>> stages = {
      {"extract", "Detect constructions and count \"that\" roles", uidthat::pipeline::RunExtract},
      {"featurize", "Compute the predictor table", uidthat::pipeline::RunFeaturize},
      {"fit", "Fit logistic regression per scope", uidthat::pipeline::RunFit},
      {"report", "Write summary, lemma, KDE, correlation and sample tables",
       uidthat::pipeline::RunReport},
      {"sample", "Draw the balanced annotation sample", uidthat::pipeline::RunSample},
      {"run", "extract, featurize, fit and report in sequence", uidthat::pipeline::RunAll},
  };
  Stage selected = nullptr;
  for (const auto& [name, help, fn] : stages) {
    app.add_subcommand(name, help)->callback([&selected, fn = fn] { selected = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : uidthat::pipeline::kExitConfig;
  }

  try {
    selected(Resolve(o), std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return uidthat::pipeline::ExitCodeFor(e);
  }
  return uidthat::pipeline::kExitOk;
}
