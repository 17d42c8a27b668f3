#include "uidthat/corpus/tokens.h"

#include <algorithm>
#include <array>
#include <cctype>

namespace uidthat::corpus {

bool IsPunctuationToken(std::string_view token) {
  if (token.empty()) return false;
  return std::all_of(token.begin(), token.end(), [](char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
  });
}

bool IsClitic(std::string_view token) {
  static constexpr std::array<std::string_view, 7> kClitics = {
      "'s", "'ve", "n't", "'re", "'m", "'ll", "'d"};
  std::string lower = ToLower(token);
  return std::find(kClitics.begin(), kClitics.end(), lower) != kClitics.end();
}

std::string ToLower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

int WordCount(std::span<const std::string> tokens) {
  return static_cast<int>(std::count_if(
      tokens.begin(), tokens.end(),
      [](const std::string& t) { return !IsPunctuationToken(t); }));
}

std::string Detokenize(std::span<const std::string> tokens) {
  static constexpr std::string_view kAttachLeft = ".,?!;:)]}%";
  std::string out;
  for (const std::string& token : tokens) {
    bool attach = IsClitic(token) ||
                  (token.size() == 1 &&
                   kAttachLeft.find(token[0]) != std::string_view::npos) ||
                  token == "..." ;
    if (!out.empty() && !attach) out.push_back(' ');
    out.append(token);
  }
  return out;
}

}  // namespace uidthat::corpus
