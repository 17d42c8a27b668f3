#ifndef UIDTHAT_CORPUS_SENTENCE_H_
#define UIDTHAT_CORPUS_SENTENCE_H_

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "uidthat/corpus/parse_tree.h"

namespace uidthat::corpus {

// Root marker in dep_head.
inline constexpr int kRootHead = -1;

// One pre-parsed sentence as produced by the offline annotation tooling.
// Tokens follow a clitic-splitting convention ("I've" -> "I", "'ve").
struct SentenceRecord {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<std::string> lemmas;
  std::vector<std::string> pos;
  std::vector<int> dep_head;
  std::vector<std::string> dep_rel;
  std::string parse;

  int size() const { return static_cast<int>(tokens.size()); }
  ParseTree Tree() const { return ParseBracketedTree(parse); }
};

struct Diagnostic {
  std::string field;
  std::string invariant;
  std::string message;
  // 1-based line in the source stream; 0 when not loaded from a stream.
  int line = 0;
};

std::string FormatDiagnostic(const Diagnostic& d);

// Empty iff every record invariant holds: equal non-zero field lengths,
// dep_head within bounds (or the root marker), and a tree whose leaves
// reproduce the tokens in order.
std::vector<Diagnostic> ValidateRecord(const SentenceRecord& record);

struct LoadResult {
  std::vector<SentenceRecord> records;
  std::vector<Diagnostic> diagnostics;
  int skipped = 0;
};

// Reads one JSON object per line. Malformed or invalid records are skipped
// and reported; blank lines are ignored.
LoadResult LoadCorpus(std::istream& in);

// Throws IoError when the file cannot be opened.
LoadResult LoadCorpusFile(const std::filesystem::path& path);

// One JSON line, key order id, tokens, lemmas, pos, dep_head, dep_rel, parse.
std::string ToJsonLine(const SentenceRecord& record);

}  // namespace uidthat::corpus

#endif  // UIDTHAT_CORPUS_SENTENCE_H_
