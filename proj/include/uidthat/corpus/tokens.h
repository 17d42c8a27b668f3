#ifndef UIDTHAT_CORPUS_TOKENS_H_
#define UIDTHAT_CORPUS_TOKENS_H_

#include <span>
#include <string>
#include <string_view>

namespace uidthat::corpus {

// True for tokens made only of ASCII punctuation ("?", ",", "--", "...").
bool IsPunctuationToken(std::string_view token);

// Clitics produced by clitic-splitting tokenizers: 's 've n't 're 'm 'll 'd.
bool IsClitic(std::string_view token);

std::string ToLower(std::string_view s);

// Number of non-punctuation tokens.
int WordCount(std::span<const std::string> tokens);

// Whitespace join that reattaches clitics and closing punctuation to the
// preceding token: {"I", "'ve", "seen", "it", "."} -> "I've seen it."
std::string Detokenize(std::span<const std::string> tokens);

}  // namespace uidthat::corpus

#endif  // UIDTHAT_CORPUS_TOKENS_H_
