// Acceptance checks. Prints one PASS/FAIL/SKIP line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pipeline_support.h"
#include "regression_oracle.h"
#include "uidthat/analysis/analysis.h"
#include "uidthat/common/csv.h"
#include "uidthat/extraction/constructions.h"
#include "uidthat/lm/distribution.h"
#include "uidthat/lm/ngram.h"
#include "uidthat/pipeline/pipeline.h"
#include "uidthat/predictors/features.h"
#include "uidthat/regression/logistic.h"

namespace {

using namespace uidthat;
using Clock = std::chrono::steady_clock;

// Collects failed checks for one criterion.
struct Check {
  std::vector<std::string> failures;
  void Expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void Near(double want, double got, double tol, const std::string& what) {
    if (!(std::abs(want - got) <= tol)) {
      std::ostringstream s;
      s << what << ": want " << want << " got " << got;
      failures.push_back(s.str());
    }
  }
};

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// 1. Gold extraction suite.
void GoldExtraction(Check& check) {
  auto start = Clock::now();
  auto corpus = testing::GoldCorpus();
  extraction::ExtractionResult result = extraction::ExtractCorpus(corpus, 1);
  double elapsed = Seconds(start);
  std::ifstream in(testing::FixturePath("gold_constructions.jsonl"));
  auto gold = extraction::ReadConstructions(in);

  // Per sentence: the set of detected constructions must equal gold.
  std::map<std::string, std::vector<std::string>> want, got;
  for (const auto& r : corpus) want[r.id], got[r.id];
  for (const auto& c : gold) want[c.sentence_id].push_back(extraction::ToJsonLine(c));
  for (const auto& c : result.constructions) got[c.sentence_id].push_back(extraction::ToJsonLine(c));
  int matched = 0;
  for (const auto& [id, lines] : want) {
    if (got[id] == lines) {
      ++matched;
    } else {
      check.failures.push_back("sentence " + id + " differs");
    }
  }
  check.Expect(corpus.size() == 20, "fixture has " + std::to_string(corpus.size()) + " sentences");
  check.Expect(matched == 20, std::to_string(matched) + "/20 sentences match");
  check.Expect(elapsed < 1.0, "took " + std::to_string(elapsed) + " s");
}

// 2. Closed forms.
void ClosedForms(Check& check) {
  for (int n : {1, 2, 5, 1000}) {
    check.Near(std::log(n), lm::Entropy(std::vector<double>(n, 1.0 / n)), 1e-9,
               "uniform entropy n=" + std::to_string(n));
    std::vector<double> one_hot(n, 0.0);
    one_hot[n - 1] = 1.0;
    check.Near(0.0, lm::Entropy(one_hot), 1e-9, "one-hot entropy");
  }
  for (double p1 : {0.0, 0.1, 0.5, 0.9, 1.0}) {
    double p2 = 1.0 - p1;
    double s = predictors::MarginalizedSurprisal(p1 > 0 ? std::log(p1) : -INFINITY,
                                                 p2 > 0 ? std::log(p2) : -INFINITY);
    check.Near(0.0, s, 1e-9, "marginalized surprisal with p1+p2=1");
  }
  std::vector<double> values = {-1.0, 1.0};
  analysis::KdeCurve kde = analysis::Kde(values, std::vector<double>{0.0}, 1.0);
  check.Near(0.24197072451914337, kde.density[0], 1e-9, "two-point KDE at 0");
  check.Near(std::exp(-0.5) / std::sqrt(2 * std::numbers::pi), kde.density[0], 1e-9,
             "two-point KDE equals phi(1)");
}

// 3. N-gram toy corpus against counts taken directly from the sentences.
void NgramOracle(Check& check) {
  const std::vector<std::string> texts = {"i think you win", "i think he lost",
                                          "i know that you win", "she said that he lost",
                                          "i said you win"};
  std::vector<corpus::SentenceRecord> records;
  std::vector<std::vector<std::string>> sentences;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    records.push_back(testing::MakeRecord("t" + std::to_string(i), texts[i], "(S (X x))"));
    sentences.push_back(records.back().tokens);
  }
  // Bigram counts with an explicit start symbol.
  std::map<std::string, std::map<std::string, int>> pair;
  std::map<std::string, int> context;
  std::vector<std::string> vocab = {"<unk>"};
  for (const auto& s : sentences) {
    std::string prev = "<s>";
    for (const auto& w : s) {
      ++pair[prev][w];
      ++context[prev];
      prev = w;
      if (std::find(vocab.begin(), vocab.end(), w) == vocab.end()) vocab.push_back(w);
    }
  }
  const double v = static_cast<double>(vocab.size());
  for (double k : {0.0, 0.01, 0.5}) {
    lm::NgramConfig cfg;
    cfg.order = 2;
    cfg.smoothing_k = k;
    cfg.min_count = 1;
    lm::NgramModel model = lm::NgramModel::Train(records, cfg);
    check.Expect(model.VocabularySize() == static_cast<int>(vocab.size()), "vocabulary size");
    auto prob = [&](const std::string& prev, const std::string& w) {
      double c = context.count(prev) ? context[prev] : 0;
      double cw = pair.count(prev) && pair[prev].count(w) ? pair[prev][w] : 0;
      if (c + k * v == 0) return 1.0 / v;
      return (cw + k) / (c + k * v);
    };
    std::vector<std::string> contexts = vocab;
    contexts[0] = "<s>";
    for (const auto& prev : contexts) {
      std::vector<std::string> prefix;
      if (prev != "<s>") prefix = {"x", prev};
      double h = 0.0;
      for (const auto& w : vocab) {
        if (w == "<unk>") continue;
        double p = prob(prev, w);
        if (p > 0) h -= p * std::log(p);
        check.Near(p, model.Probability(prefix, w), 1e-9, "p(" + w + "|" + prev + ")");
      }
      double p_unk = prob(prev, "<unk>");
      if (p_unk > 0) h -= p_unk * std::log(p_unk);
      check.Near(p_unk, model.Probability(prefix, "zebra"), 1e-9, "p(unseen|" + prev + ")");
      check.Near(h, model.NextTokenEntropy(prefix), 1e-9, "entropy after " + prev);
    }
    // Constructions: implicit "i think you win" and explicit "i know that you win".
    struct Case {
      int record, verb, onset;
      extraction::Label label;
    };
    for (Case cs : {Case{0, 1, 2, extraction::Label::kImplicit}, Case{1, 1, 2, extraction::Label::kImplicit},
                    Case{2, 1, 3, extraction::Label::kExplicit}, Case{3, 1, 3, extraction::Label::kExplicit},
                    Case{4, 1, 2, extraction::Label::kImplicit}}) {
      const auto& s = records[cs.record];
      extraction::ConstructionRecord c;
      c.sentence_id = s.id;
      c.label = cs.label;
      c.main_verb_index = cs.verb;
      c.main_verb_lemma = s.lemmas[cs.verb];
      c.sc_onset_index = cs.onset;
      c.sc_end_index = s.size() - 1;
      c.sc_subject_index = cs.onset;
      const std::string& verb = s.tokens[cs.verb];
      const std::string& onset = s.tokens[cs.onset];
      double want = -std::log(prob(verb, onset) + prob("that", onset));
      check.Near(want, predictors::ScOnsetSurprisal(model, c, s), 1e-9, "marginalized surprisal " + s.id);
      check.Near(model.NextTokenEntropy(std::vector<std::string>{"x", verb}),
                 predictors::ScOnsetEntropy(model, c, s), 1e-9, "onset entropy " + s.id);
    }
  }
}

// 4. Regression against a plain Newton oracle.
void RegressionOracle(Check& check) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> features(1, 5), rows(20, 50);
  std::normal_distribution<double> normal(0.0, 0.7);
  int compared = 0;
  for (int attempt = 0; compared < 50 && attempt < 500; ++attempt) {
    int p = features(rng);
    std::vector<double> beta(p + 1);
    for (double& b : beta) b = normal(rng);
    auto [x, y] = testing::SimulateLogistic(rng, beta, rows(rng));
    auto oracle = testing::OracleLogisticFit(x, y);
    if (!oracle) continue;  // separable draw
    Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), y.size());
    try {
      regression::RegressionFit fit = regression::FitLogistic(testing::ToMatrix(x, p), yv);
      for (int j = 0; j <= p; ++j) check.Near((*oracle)[j], fit.beta[j], 1e-6, "instance beta");
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("fit threw: ") + e.what());
    }
    ++compared;
  }
  check.Expect(compared == 50, "only " + std::to_string(compared) + " non-separable instances");

  for (int positives : {1, 7, 13, 29}) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(30);
    y.head(positives).setOnes();
    regression::RegressionFit fit = regression::FitLogistic(Eigen::MatrixXd(30, 0), y);
    double rate = positives / 30.0;
    check.Near(std::log(rate / (1 - rate)), fit.beta[0], 1e-9, "intercept-only logit");
  }

  std::mt19937_64 grad_rng(5);
  auto [x, y] = testing::SimulateLogistic(grad_rng, {0.3, -1.0, 0.5, 2.0}, 50);
  Eigen::MatrixXd xm = testing::ToMatrix(x, 3);
  Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), y.size());
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd beta(4);
    for (double& b : beta) b = normal(grad_rng);
    Eigen::VectorXd g = regression::Gradient(beta, xm, yv);
    for (int j = 0; j < 4; ++j) {
      const double h = 1e-5;
      Eigen::VectorXd up = beta, down = beta;
      up[j] += h;
      down[j] -= h;
      double fd = (regression::Objective(up, xm, yv) - regression::Objective(down, xm, yv)) / (2 * h);
      check.Expect(std::abs(fd - g[j]) <= 1e-6 * std::max(1.0, std::abs(g[j])),
                   "finite difference on coordinate " + std::to_string(j));
    }
  }
}

// 5. Coverage of the Wald interval on simulated data.
void CoefficientRecovery(Check& check) {
  auto start = Clock::now();
  const std::vector<double> truth = {-0.4, 0.8, -0.5, 0.3, 0.0};
  std::vector<int> covered(truth.size(), 0);
  std::mt19937_64 rng(20240601);
  for (int rep = 0; rep < 100; ++rep) {
    auto [x, y] = testing::SimulateLogistic(rng, truth, 10000);
    Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), y.size());
    regression::RegressionFit fit = regression::FitLogistic(testing::ToMatrix(x, truth.size() - 1), yv);
    regression::RegressionSummary summary =
        regression::WaldSummary(fit, {"x1", "x2", "x3", "x4"});
    for (std::size_t j = 0; j < truth.size(); ++j) {
      const auto& c = summary.coefficients[j];
      covered[j] += c.ci_low <= truth[j] && truth[j] <= c.ci_high;
    }
  }
  double elapsed = Seconds(start);
  for (std::size_t j = 0; j < truth.size(); ++j) {
    check.Expect(covered[j] >= 90, "coefficient " + std::to_string(j) + " covered " +
                                       std::to_string(covered[j]) + "/100");
  }
  check.Expect(elapsed < 60.0, "took " + std::to_string(elapsed) + " s");
}

// 6. Two full runs give identical bytes.
void Determinism(Check& check) {
  testing::TempDir a, b;
  std::ostringstream out, log;
  pipeline::PipelineConfig first = testing::FixtureConfig(a.str());
  pipeline::PipelineConfig second = testing::FixtureConfig(b.str());
  pipeline::RunAll(first, out, log);
  pipeline::RunAll(second, out, log);
  auto x = testing::DirectoryContents(a.path());
  auto y = testing::DirectoryContents(b.path());
  check.Expect(!x.empty(), "no outputs written");
  check.Expect(x.size() == y.size(), "different file sets");
  for (const auto& [name, bytes] : x) {
    auto it = y.find(name);
    check.Expect(it != y.end() && it->second == bytes, name + " differs");
  }
}

// 7. Numbers on the released dataset. Needs a pipeline config pointing at
// that corpus (and a sidecar provider) in UIDTHAT_RELEASE_CONFIG.
std::vector<std::vector<std::string>> ReadCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> fields;
  while (csv::ReadRow(in, fields)) rows.push_back(fields);
  return rows;
}

void ReleasedDataset(Check& check, const std::string& config_path) {
  testing::TempDir dir;
  pipeline::PipelineConfig c = pipeline::LoadConfigFile(config_path);
  c.output_dir = dir.str();
  c.fit_scopes = {"all", "think"};
  std::ostringstream out, log;
  pipeline::RunAll(c, out, log);

  auto summary = ReadCsv(dir.path() / pipeline::kSummaryFile);
  std::map<std::string, std::vector<std::string>> by_type;
  for (const auto& row : summary) by_type[row[0]] = row;
  check.Expect(by_type["explicit"].at(1) == "40786", "explicit count " + by_type["explicit"].at(1));
  check.Expect(by_type["implicit"].at(1) == "57845", "implicit count " + by_type["implicit"].at(1));
  check.Near(21.85, csv::ParseDouble(by_type["explicit"].at(2), "mean"), 0.005, "explicit mean length");
  check.Near(18.07, csv::ParseDouble(by_type["implicit"].at(2), "mean"), 0.005, "implicit mean length");

  auto lemmas = ReadCsv(dir.path() / pipeline::kLemmasFile);
  check.Expect(lemmas.size() == 435, "distinct lemmas " + std::to_string(lemmas.size() - 1));
  if (lemmas.size() > 10) {
    check.Near(0.647, csv::ParseDouble(lemmas[10].back(), "share"), 0.001, "top-10 share");
  }

  auto fit = [&](const std::string& scope) {
    return nlohmann::json::parse(testing::ReadFile(dir.path() / ("regression_" + scope + ".json")));
  };
  nlohmann::json all = fit("all"), think = fit("think");
  check.Near(0.63, all["accuracy"].get<double>(), 0.02, "all-lemma accuracy");
  check.Near(0.88, think["accuracy"].get<double>(), 0.02, "think accuracy");
  for (const auto& coef : all["coefficients"]) {
    std::string name = coef["name"];
    if (name == "const") continue;
    double beta = coef["beta"];
    bool negative = name == "mc_verb_frequency";
    check.Expect(negative ? beta < 0 : beta > 0, "sign of " + name);
  }

  auto corr = ReadCsv(dir.path() / pipeline::kCorrelationsFile);
  for (const auto& row : corr) {
    if (row[0] != "sc_onset_surprisal" || row[3] == "NA") continue;
    if (row[1] == "sc_onset_entropy") check.Near(-0.02, csv::ParseDouble(row[3], "r"), 0.05, "surprisal-entropy r");
    if (row[1] == "sc_onset_frequency") check.Near(-0.57, csv::ParseDouble(row[3], "r"), 0.05, "surprisal-frequency r");
  }
}

bool Report(int number, const std::string& title, const std::function<void(Check&)>& body) {
  Check check;
  try {
    body(check);
  } catch (const std::exception& e) {
    check.failures.push_back(std::string("exception: ") + e.what());
  }
  bool ok = check.failures.empty();
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << number << ": " << title << "\n";
  for (std::size_t i = 0; i < check.failures.size() && i < 10; ++i) {
    std::cout << "    " << check.failures[i] << "\n";
  }
  return ok;
}

}  // namespace

int main() {
  bool ok = true;
  ok &= Report(1, "gold extraction 20/20 under 1 s", GoldExtraction);
  ok &= Report(2, "closed-form surprisal, entropy and KDE", ClosedForms);
  ok &= Report(3, "n-gram hand-count oracle", NgramOracle);
  ok &= Report(4, "regression Newton oracle, intercept logit, gradient", RegressionOracle);
  ok &= Report(5, "coefficient recovery coverage", CoefficientRecovery);
  ok &= Report(6, "pipeline determinism", Determinism);
  if (const char* config = std::getenv("UIDTHAT_RELEASE_CONFIG"); config && *config) {
    ok &= Report(7, "released dataset numbers",
                 [&](Check& check) { ReleasedDataset(check, config); });
  } else {
    std::cout << "SKIP criterion 7: released dataset numbers (set UIDTHAT_RELEASE_CONFIG)\n";
  }
  return ok ? 0 : 1;
}
