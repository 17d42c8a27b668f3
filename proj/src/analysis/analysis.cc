#include "uidthat/analysis/analysis.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <unordered_map>

#include "uidthat/common/errors.h"
#include "uidthat/corpus/tokens.h"

namespace uidthat::analysis {

using extraction::ConstructionRecord;
using extraction::Label;

DatasetSummary SummarizeDataset(std::span<const LabeledLength> items) {
  DatasetSummary out;
  std::array<double, 2> sums{};
  for (const LabeledLength& it : items) {
    int l = static_cast<int>(it.label);
    ++out[l].count;
    sums[l] += it.words;
  }
  for (int l = 0; l < 2; ++l) {
    if (out[l].count > 0) out[l].mean_sentence_length = sums[l] / out[l].count;
  }
  return out;
}

DatasetSummary SummarizeDataset(std::span<const ConstructionRecord> constructions,
                                std::span<const corpus::SentenceRecord> corpus) {
  std::unordered_map<std::string, int> words;
  for (const auto& s : corpus) words[s.id] = corpus::WordCount(s.tokens);
  std::vector<LabeledLength> items;
  for (const ConstructionRecord& c : constructions) {
    auto it = words.find(c.sentence_id);
    if (it == words.end()) throw DataError("construction references unknown sentence " + c.sentence_id);
    items.push_back({c.label, it->second});
  }
  return SummarizeDataset(items);
}

LemmaDistribution ComputeLemmaDistribution(std::span<const ConstructionRecord> constructions,
                                           int top_k) {
  if (top_k < 1) throw ConfigError("top_k must be at least 1");
  std::map<std::string, LemmaCount> by_lemma;
  for (const ConstructionRecord& c : constructions) {
    LemmaCount& lc = by_lemma[c.main_verb_lemma];
    lc.lemma = c.main_verb_lemma;
    ++lc.total;
    ++(c.label == Label::kExplicit ? lc.explicit_count : lc.implicit_count);
  }
  LemmaDistribution d;
  for (auto& [lemma, lc] : by_lemma) {
    lc.share = static_cast<double>(lc.total) / static_cast<double>(constructions.size());
    d.lemmas.push_back(lc);
  }
  std::stable_sort(d.lemmas.begin(), d.lemmas.end(),
                   [](const LemmaCount& a, const LemmaCount& b) { return a.total > b.total; });
  d.top_k = top_k;
  long covered = 0;
  for (int i = 0; i < std::min<int>(top_k, static_cast<int>(d.lemmas.size())); ++i) {
    covered += d.lemmas[i].total;
  }
  if (!constructions.empty()) {
    d.top_k_share = static_cast<double>(covered) / static_cast<double>(constructions.size());
  }
  return d;
}

double PearsonR(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("pearson_r: inputs differ in length");
  if (x.size() < 2) throw DataError("pearson_r: need at least 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) throw DataError("pearson_r: zero variance");
  double cov = sxy / (n - 1);
  double r = cov / (std::sqrt(sxx / (n - 1)) * std::sqrt(syy / (n - 1)));
  return std::clamp(r, -1.0, 1.0);
}

double ScottBandwidth(std::span<const double> values) {
  if (values.size() < 2) throw DataError("KDE needs at least 2 values");
  const double n = static_cast<double>(values.size());
  double mean = 0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0;
  for (double v : values) ss += (v - mean) * (v - mean);
  double sd = std::sqrt(ss / (n - 1));
  if (!(sd > 0)) {
    throw DataError("KDE values are all equal; pass an explicit bandwidth");
  }
  return sd * std::pow(n, -0.2);
}

std::vector<double> DefaultGrid(std::span<const double> values, double bandwidth, int points) {
  if (values.empty() || points < 2) throw DataError("KDE grid needs values and >= 2 points");
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  double a = *lo - 3 * bandwidth, b = *hi + 3 * bandwidth;
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = a + (b - a) * i / (points - 1);
  return grid;
}

KdeCurve Kde(std::span<const double> values, std::span<const double> grid,
             std::optional<double> bandwidth) {
  if (values.size() < 2) throw DataError("KDE needs at least 2 values");
  KdeCurve curve;
  if (bandwidth) {
    if (!(*bandwidth > 0)) throw ConfigError("KDE bandwidth must be positive");
    curve.bandwidth = *bandwidth;
  } else {
    curve.bandwidth = ScottBandwidth(values);
  }
  const double h = curve.bandwidth;
  const double norm = 1.0 / (static_cast<double>(values.size()) * h *
                             std::sqrt(2.0 * std::numbers::pi));
  curve.grid.assign(grid.begin(), grid.end());
  curve.density.reserve(grid.size());
  for (double g : grid) {
    double sum = 0;
    for (double v : values) {
      double u = (g - v) / h;
      sum += std::exp(-0.5 * u * u);
    }
    curve.density.push_back(sum * norm);
  }
  return curve;
}

std::vector<std::size_t> AnnotationSample(std::span<const ConstructionRecord> constructions,
                                          int n, std::uint64_t seed) {
  if (n <= 0 || n % 2 != 0) throw ConfigError("annotation sample size must be a positive even number");
  std::array<std::vector<std::size_t>, 2> pools;
  for (std::size_t i = 0; i < constructions.size(); ++i) {
    pools[static_cast<int>(constructions[i].label)].push_back(i);
  }
  const std::size_t half = static_cast<std::size_t>(n / 2);
  if (pools[0].size() < half || pools[1].size() < half) {
    throw DataError("annotation sample of " + std::to_string(n) + " needs " +
                    std::to_string(half) + " per class; available: explicit " +
                    std::to_string(pools[0].size()) + ", implicit " +
                    std::to_string(pools[1].size()));
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> out;
  for (auto& pool : pools) {
    std::shuffle(pool.begin(), pool.end(), rng);
    out.insert(out.end(), pool.begin(), pool.begin() + static_cast<long>(half));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace uidthat::analysis
