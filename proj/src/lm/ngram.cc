#include "uidthat/lm/ngram.h"

#include <cmath>
#include <set>
#include <sstream>

#include "uidthat/common/errors.h"
#include "uidthat/corpus/tokens.h"

namespace uidthat::lm {

std::size_t NgramModel::ContextHash::operator()(const Context& c) const {
  std::size_t h = 1469598103934665603ull;
  for (int id : c) {
    h ^= static_cast<std::size_t>(id + 2);
    h *= 1099511628211ull;
  }
  return h;
}

NgramModel NgramModel::Train(std::span<const corpus::SentenceRecord> corpus,
                             const NgramConfig& config) {
  std::vector<std::vector<std::string>> sentences;
  sentences.reserve(corpus.size());
  for (const auto& r : corpus) sentences.push_back(r.tokens);
  return Train(sentences, config);
}

NgramModel NgramModel::Train(std::span<const std::vector<std::string>> sentences,
                             const NgramConfig& config) {
  if (config.order < 1) throw ConfigError("n-gram order must be >= 1");
  if (config.smoothing_k < 0) throw ConfigError("smoothing_k must be >= 0");
  if (config.min_count < 1) throw ConfigError("min_count must be >= 1");
  if (sentences.empty()) throw DataError("cannot train an n-gram model on an empty corpus");

  NgramModel model(config);
  std::map<std::string, long> unigram;
  for (const auto& sentence : sentences) {
    for (const auto& token : sentence) ++unigram[model.Normalize(token)];
  }
  model.id_to_word_.push_back("<unk>");
  for (const auto& [word, count] : unigram) {
    if (count >= config.min_count && word != "<unk>") {
      model.word_to_id_[word] = static_cast<int>(model.id_to_word_.size());
      model.id_to_word_.push_back(word);
    }
  }

  const int history = config.order - 1;
  for (const auto& sentence : sentences) {
    Context ctx(history, kBosId);
    for (const auto& token : sentence) {
      int id = model.WordId(token);
      ContextCounts& cc = model.counts_[ctx];
      ++cc.next[id];
      ++cc.total;
      if (history > 0) {
        ctx.erase(ctx.begin());
        ctx.push_back(id);
      }
    }
  }
  return model;
}

std::string NgramModel::Normalize(std::string_view word) const {
  return config_.lowercase ? corpus::ToLower(word) : std::string(word);
}

int NgramModel::WordId(std::string_view word) const {
  auto it = word_to_id_.find(Normalize(word));
  return it == word_to_id_.end() ? kUnkId : it->second;
}

NgramModel::Context NgramModel::ContextOf(
    std::span<const std::string> prefix) const {
  const int history = config_.order - 1;
  Context ctx(history, kBosId);
  const int n = static_cast<int>(prefix.size());
  for (int i = 0; i < history; ++i) {
    int pos = n - history + i;
    if (pos >= 0) ctx[i] = WordId(prefix[pos]);
  }
  return ctx;
}

const NgramModel::ContextCounts* NgramModel::Find(const Context& ctx) const {
  auto it = counts_.find(ctx);
  return it == counts_.end() ? nullptr : &it->second;
}

double NgramModel::Conditional(const ContextCounts* counts, int word_id) const {
  const double v = VocabularySize();
  const double k = config_.smoothing_k;
  long total = counts ? counts->total : 0;
  if (total == 0 && k == 0.0) return 1.0 / v;
  long c = 0;
  if (counts) {
    auto it = counts->next.find(word_id);
    if (it != counts->next.end()) c = it->second;
  }
  return (static_cast<double>(c) + k) / (static_cast<double>(total) + k * v);
}

bool NgramModel::UsesUniformFallback(std::span<const std::string> prefix) const {
  return config_.smoothing_k == 0.0 && Find(ContextOf(prefix)) == nullptr;
}

Distribution NgramModel::NextTokenDistribution(
    std::span<const std::string> prefix) const {
  const ContextCounts* counts = Find(ContextOf(prefix));
  Distribution d;
  d.vocab_ids.resize(VocabularySize());
  d.probs.resize(VocabularySize());
  for (int id = 0; id < VocabularySize(); ++id) {
    d.vocab_ids[id] = id;
    d.probs[id] = Conditional(counts, id);
  }
  return d;
}

double NgramModel::Probability(std::span<const std::string> prefix,
                               std::string_view word) const {
  return Conditional(Find(ContextOf(prefix)), WordId(word));
}

double NgramModel::ContinuationLogprob(std::span<const std::string> prefix,
                                       std::string_view word) const {
  if (word.empty()) throw DataError("continuation word is empty");
  return std::log(Probability(prefix, word));
}

std::string NgramModel::Identity() const {
  std::ostringstream os;
  os.precision(17);
  os << "ngram(order=" << config_.order << ", k=" << config_.smoothing_k
     << ", min_count=" << config_.min_count
     << ", lowercase=" << (config_.lowercase ? "true" : "false")
     << ", vocab=" << VocabularySize() << ")";
  return os.str();
}

}  // namespace uidthat::lm
