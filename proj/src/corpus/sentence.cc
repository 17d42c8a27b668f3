#include "uidthat/corpus/sentence.h"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "uidthat/common/errors.h"

namespace uidthat::corpus {
namespace {

using nlohmann::json;

template <typename T>
bool ReadField(const json& obj, const char* key, T* out,
               std::vector<Diagnostic>* diags) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    diags->push_back({key, "schema", std::string("missing field '") + key + "'"});
    return false;
  }
  try {
    *out = it->template get<T>();
  } catch (const json::exception& e) {
    diags->push_back({key, "schema",
                      std::string("field '") + key + "' has wrong type: " + e.what()});
    return false;
  }
  return true;
}

}  // namespace

std::string FormatDiagnostic(const Diagnostic& d) {
  std::ostringstream os;
  if (d.line > 0) os << "line " << d.line << ": ";
  os << d.field << " [" << d.invariant << "] " << d.message;
  return os.str();
}

std::vector<Diagnostic> ValidateRecord(const SentenceRecord& r) {
  std::vector<Diagnostic> diags;
  const std::size_t n = r.tokens.size();
  if (n == 0) {
    diags.push_back({"tokens", "non-empty", "sentence has no tokens"});
    return diags;
  }
  auto check_length = [&](const char* field, std::size_t len) {
    if (len != n) {
      diags.push_back({field, "equal-length",
                       std::string(field) + " has " + std::to_string(len) +
                           " entries, tokens has " + std::to_string(n)});
    }
  };
  check_length("lemmas", r.lemmas.size());
  check_length("pos", r.pos.size());
  check_length("dep_head", r.dep_head.size());
  check_length("dep_rel", r.dep_rel.size());

  for (std::size_t i = 0; i < r.dep_head.size(); ++i) {
    int h = r.dep_head[i];
    if (h != kRootHead && (h < 0 || h >= static_cast<int>(n))) {
      diags.push_back({"dep_head", "in-bounds",
                       "head " + std::to_string(h) + " of token " +
                           std::to_string(i) + " is outside 0.." +
                           std::to_string(n - 1)});
    }
  }

  if (r.parse.empty()) {
    diags.push_back({"parse", "tree", "empty parse string"});
    return diags;
  }
  try {
    ParseTree tree = ParseBracketedTree(r.parse);
    std::vector<std::string> leaves = tree.LeafWords();
    if (leaves.size() != n) {
      diags.push_back({"parse", "leaf-count",
                       "tree has " + std::to_string(leaves.size()) +
                           " leaves, tokens has " + std::to_string(n)});
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        if (leaves[i] != r.tokens[i]) {
          diags.push_back({"parse", "leaf-match",
                           "leaf " + std::to_string(i) + " '" + leaves[i] +
                               "' differs from token '" + r.tokens[i] + "'"});
          break;
        }
      }
    }
  } catch (const ParseError& e) {
    diags.push_back({"parse", "tree", e.what()});
  }
  return diags;
}

LoadResult LoadCorpus(std::istream& in) {
  LoadResult result;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<Diagnostic> diags;
    SentenceRecord record;
    json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded() || !obj.is_object()) {
      diags.push_back({"<record>", "json", "line is not a JSON object"});
    } else {
      bool ok = ReadField(obj, "id", &record.id, &diags);
      ok &= ReadField(obj, "tokens", &record.tokens, &diags);
      ok &= ReadField(obj, "lemmas", &record.lemmas, &diags);
      ok &= ReadField(obj, "pos", &record.pos, &diags);
      ok &= ReadField(obj, "dep_head", &record.dep_head, &diags);
      ok &= ReadField(obj, "dep_rel", &record.dep_rel, &diags);
      ok &= ReadField(obj, "parse", &record.parse, &diags);
      if (ok) diags = ValidateRecord(record);
    }
    if (diags.empty()) {
      result.records.push_back(std::move(record));
    } else {
      ++result.skipped;
      for (Diagnostic& d : diags) {
        d.line = line_no;
        if (!record.id.empty()) d.message = record.id + ": " + d.message;
        result.diagnostics.push_back(std::move(d));
      }
    }
  }
  if (in.bad()) throw IoError("read failure in corpus stream");
  return result;
}

LoadResult LoadCorpusFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file " + path.string());
  return LoadCorpus(in);
}

std::string ToJsonLine(const SentenceRecord& r) {
  nlohmann::ordered_json obj;
  obj["id"] = r.id;
  obj["tokens"] = r.tokens;
  obj["lemmas"] = r.lemmas;
  obj["pos"] = r.pos;
  obj["dep_head"] = r.dep_head;
  obj["dep_rel"] = r.dep_rel;
  obj["parse"] = r.parse;
  return obj.dump();
}

}  // namespace uidthat::corpus
