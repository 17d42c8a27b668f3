#ifndef UIDTHAT_LM_LANGUAGE_MODEL_H_
#define UIDTHAT_LM_LANGUAGE_MODEL_H_

#include <span>
#include <string>
#include <string_view>

#include "uidthat/lm/distribution.h"

namespace uidthat::lm {

enum class ProviderKind { kNgram, kExternal };

// How prefixes and continuations are segmented by the provider.
enum class TokenizerContract { kWordLevel, kSubword };

// A source of next-token distributions. Prefixes are always passed as the
// corpus' own tokens; subword providers detokenize them before querying.
// Implementations must be safe to query from several threads at once.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  virtual ProviderKind kind() const = 0;
  virtual TokenizerContract tokenizer() const = 0;

  // Stable description of the provider and its parameters, recorded next to
  // every measurement file.
  virtual std::string Identity() const = 0;

  virtual Distribution NextTokenDistribution(
      std::span<const std::string> prefix) const = 0;

  // Natural-log probability of `word` following `prefix`. Subword providers
  // return the sum over the word's subword pieces, a lower bound on the
  // word-level log-probability.
  virtual double ContinuationLogprob(std::span<const std::string> prefix,
                                     std::string_view word) const = 0;

  // Entropy (nats) of the next-token distribution. Subword providers use the
  // first subword position after the prefix.
  virtual double NextTokenEntropy(std::span<const std::string> prefix) const {
    return Entropy(NextTokenDistribution(prefix));
  }
};

}  // namespace uidthat::lm

#endif  // UIDTHAT_LM_LANGUAGE_MODEL_H_
