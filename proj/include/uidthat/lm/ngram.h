#ifndef UIDTHAT_LM_NGRAM_H_
#define UIDTHAT_LM_NGRAM_H_

#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "uidthat/corpus/sentence.h"
#include "uidthat/lm/language_model.h"

namespace uidthat::lm {

struct NgramConfig {
  int order = 2;
  double smoothing_k = 0.01;  // additive constant; 0 disables smoothing
  int min_count = 2;          // rarer words map to <unk>
  bool lowercase = true;
};

// Word-level n-gram model with add-k smoothing, trained on corpus tokens.
// Vocabulary id 0 is <unk>; remaining words are numbered in lexicographic
// order so the model does not depend on sentence order. Contexts shorter
// than order-1 are padded with a sentence-start marker that is never
// predicted.
class NgramModel : public LanguageModel {
 public:
  static constexpr int kUnkId = 0;
  static constexpr int kBosId = -1;

  // Throws DataError on an empty corpus and ConfigError on bad parameters.
  static NgramModel Train(std::span<const corpus::SentenceRecord> corpus,
                          const NgramConfig& config = {});
  static NgramModel Train(std::span<const std::vector<std::string>> sentences,
                          const NgramConfig& config = {});

  ProviderKind kind() const override { return ProviderKind::kNgram; }
  TokenizerContract tokenizer() const override {
    return TokenizerContract::kWordLevel;
  }
  std::string Identity() const override;

  Distribution NextTokenDistribution(
      std::span<const std::string> prefix) const override;
  double ContinuationLogprob(std::span<const std::string> prefix,
                             std::string_view word) const override;

  // p(word | last order-1 tokens of prefix).
  double Probability(std::span<const std::string> prefix,
                     std::string_view word) const;

  // True when the context was never observed and smoothing is off, in which
  // case queries fall back to the uniform distribution.
  bool UsesUniformFallback(std::span<const std::string> prefix) const;

  int VocabularySize() const { return static_cast<int>(id_to_word_.size()); }
  int WordId(std::string_view word) const;
  const std::string& Word(int id) const { return id_to_word_.at(id); }
  const NgramConfig& config() const { return config_; }

 private:
  using Context = std::vector<int>;
  struct ContextHash {
    std::size_t operator()(const Context& c) const;
  };
  struct ContextCounts {
    std::map<int, long> next;
    long total = 0;
  };

  explicit NgramModel(NgramConfig config) : config_(config) {}
  std::string Normalize(std::string_view word) const;
  Context ContextOf(std::span<const std::string> prefix) const;
  const ContextCounts* Find(const Context& ctx) const;
  double Conditional(const ContextCounts* counts, int word_id) const;

  NgramConfig config_;
  std::vector<std::string> id_to_word_;
  std::unordered_map<std::string, int> word_to_id_;
  std::unordered_map<Context, ContextCounts, ContextHash> counts_;
};

}  // namespace uidthat::lm

#endif  // UIDTHAT_LM_NGRAM_H_
