#include "uidthat/extraction/constructions.h"

#include <algorithm>
#include <sstream>

#include "json.hpp"
#include "uidthat/common/errors.h"
#include "uidthat/common/parallel.h"
#include "uidthat/corpus/tokens.h"

namespace uidthat::extraction {
namespace {

using corpus::ParseTree;
using corpus::SentenceRecord;

constexpr std::array<std::string_view, kNumThatRoles> kRoleNames = {
    "SCONJ", "DEMONSTRATIVE_DETERMINER", "DEMONSTRATIVE_PRONOUN",
    "RELATIVE_PRONOUN", "OTHER"};

// Flattened tree with parent links, built once per sentence.
struct NodeInfo {
  const ParseTree* node = nullptr;
  int parent = -1;
  int child_pos = 0;
  std::vector<int> children;
};

class IndexedTree {
 public:
  explicit IndexedTree(const ParseTree& root) {
    Add(root, -1, 0);
    terminal_of_token_.assign(root.LeafCount(), -1);
    for (int id = 0; id < static_cast<int>(nodes_.size()); ++id) {
      if (nodes_[id].node->IsTerminal()) {
        terminal_of_token_[nodes_[id].node->leaf->index] = id;
      }
    }
  }

  const NodeInfo& at(int id) const { return nodes_[id]; }
  const ParseTree& tree(int id) const { return *nodes_[id].node; }
  int terminal(int token_index) const { return terminal_of_token_[token_index]; }
  int parent(int id) const { return nodes_[id].parent; }

  // Sibling at the given offset from id, or -1.
  int Sibling(int id, int offset) const {
    int p = nodes_[id].parent;
    if (p < 0) return -1;
    int pos = nodes_[id].child_pos + offset;
    const auto& kids = nodes_[p].children;
    if (pos < 0 || pos >= static_cast<int>(kids.size())) return -1;
    return kids[pos];
  }

  int ChildCount(int id) const {
    return static_cast<int>(nodes_[id].children.size());
  }
  int Child(int id, int pos) const { return nodes_[id].children[pos]; }

 private:
  int Add(const ParseTree& node, int parent, int child_pos) {
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back({&node, parent, child_pos, {}});
    for (int i = 0; i < static_cast<int>(node.children.size()); ++i) {
      int child = Add(node.children[i], id, i);
      nodes_[id].children.push_back(child);
    }
    return id;
  }

  std::vector<NodeInfo> nodes_;
  std::vector<int> terminal_of_token_;
};

bool StartsWith(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

bool IsVerbTag(std::string_view tag) { return StartsWith(tag, "VB"); }

bool IsClauseLabel(std::string_view label) { return label == "S"; }

bool IsNominalLabel(std::string_view label) {
  return StartsWith(label, "NN") || StartsWith(label, "JJ") || label == "NP" ||
         label == "NML" || label == "ADJP" || label == "CD" || label == "QP";
}

bool IsThat(std::string_view word) { return corpus::ToLower(word) == "that"; }

// Tag of the verb heading a VP, descending through nested VPs. Empty when
// the VP has no verbal head (e.g. headed by TO).
std::string_view HeadVerbTag(const ParseTree& vp) {
  for (const ParseTree& child : vp.children) {
    if (child.IsTerminal()) {
      if (IsVerbTag(child.label) || child.label == "MD") return child.label;
      if (child.label == "TO") return {};
    } else if (child.label == "VP") {
      return HeadVerbTag(child);
    }
  }
  return {};
}

bool IsFiniteVerbTag(std::string_view tag) {
  return tag == "VBD" || tag == "VBZ" || tag == "VBP" || tag == "MD";
}

// A clause with an NP subject followed by a tensed VP.
bool IsFiniteClause(const ParseTree& s) {
  if (!IsClauseLabel(s.label)) return false;
  bool seen_subject = false;
  for (const ParseTree& child : s.children) {
    if (child.label == "NP") seen_subject = true;
    if (child.label == "VP" && seen_subject) {
      return IsFiniteVerbTag(HeadVerbTag(child));
    }
  }
  return false;
}

ThatRole ClassifyAt(const IndexedTree& tree, int term) {
  const ParseTree& t = tree.tree(term);
  int parent = tree.parent(term);
  if (parent < 0) return ThatRole::kOther;
  const ParseTree& p = tree.tree(parent);
  int grandparent = tree.parent(parent);
  bool first_child = tree.at(term).child_pos == 0;

  if (p.label == "WHNP") return ThatRole::kRelativePronoun;
  if (p.label == "SBAR" && first_child && grandparent >= 0 &&
      tree.tree(grandparent).label == "NP") {
    return ThatRole::kRelativePronoun;
  }
  if (p.label == "NP" && t.label == "DT") {
    int next = tree.Sibling(term, 1);
    if (next >= 0 && IsNominalLabel(tree.tree(next).label)) {
      return ThatRole::kDemonstrativeDeterminer;
    }
  }
  if (p.label == "NP" && tree.ChildCount(parent) == 1) {
    return ThatRole::kDemonstrativePronoun;
  }
  if (p.label == "SBAR" && first_child) {
    int next = tree.Sibling(term, 1);
    if (next >= 0 && IsClauseLabel(tree.tree(next).label)) {
      return ThatRole::kSconj;
    }
  }
  return ThatRole::kOther;
}

std::optional<int> FindSubject(const SentenceRecord& r, int begin, int end) {
  for (int i = begin; i <= end; ++i) {
    const std::string& rel = r.dep_rel[i];
    if (rel != "nsubj" && rel != "nsubjpass" && rel != "nsubj:pass") continue;
    int head = r.dep_head[i];
    if (head >= begin && head <= end) return i;
  }
  return std::nullopt;
}

std::vector<ConstructionRecord> Detect(const SentenceRecord& r,
                                       const IndexedTree& tree) {
  std::vector<ConstructionRecord> out;
  const int n = r.size();
  for (int verb = 0; verb + 1 < n; ++verb) {
    int term = tree.terminal(verb);
    if (!IsVerbTag(tree.tree(term).label)) continue;
    int parent = tree.parent(term);
    if (parent < 0 || tree.tree(parent).label != "VP") continue;
    int next = tree.Sibling(term, 1);
    if (next < 0) continue;
    const ParseTree& comp = tree.tree(next);
    if (comp.IsTerminal() || comp.FirstLeafIndex() != verb + 1) continue;

    ConstructionRecord c;
    const ParseTree* clause = nullptr;
    if (comp.label == "SBAR") {
      const ParseTree& head = comp.children.front();
      if (head.IsTerminal() && IsThat(head.leaf->word)) {
        if (ClassifyAt(tree, tree.Child(next, 0)) != ThatRole::kSconj) continue;
        c.label = Label::kExplicit;
        c.sconj_index = head.leaf->index;
        clause = &comp.children[1];
      } else if (IsFiniteClause(head)) {
        c.label = Label::kImplicit;
        clause = &head;
      } else {
        continue;
      }
    } else if (IsFiniteClause(comp)) {
      c.label = Label::kImplicit;
      clause = &comp;
    } else {
      continue;
    }

    int onset = clause->FirstLeafIndex();
    int end = clause->LastLeafIndex();
    if (c.label == Label::kImplicit && IsThat(r.tokens[onset])) continue;
    if (corpus::IsPunctuationToken(r.tokens[onset])) continue;
    while (end > onset && corpus::IsPunctuationToken(r.tokens[end])) --end;

    c.sentence_id = r.id;
    c.main_verb_index = verb;
    c.main_verb_lemma = corpus::ToLower(r.lemmas[verb]);
    c.sc_onset_index = onset;
    c.sc_end_index = end;
    c.sc_subject_index = FindSubject(r, onset, end);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<ThatUsage> Classify(const SentenceRecord& r,
                                const IndexedTree& tree) {
  std::vector<ThatUsage> out;
  for (int i = 0; i < r.size(); ++i) {
    if (IsThat(r.tokens[i])) out.push_back({i, ClassifyAt(tree, tree.terminal(i))});
  }
  return out;
}

struct SentenceOutcome {
  bool in_range = false;
  std::vector<ThatUsage> usages;
  std::vector<ConstructionRecord> constructions;
};

SentenceOutcome ProcessSentence(const SentenceRecord& r) {
  SentenceOutcome out;
  corpus::ParseTree root = r.Tree();
  IndexedTree tree(root);
  out.in_range = PassesLengthFilter(r);
  if (!out.in_range) return out;
  out.usages = Classify(r, tree);
  out.constructions = Detect(r, tree);
  return out;
}

}  // namespace

std::string_view RoleName(ThatRole role) {
  return kRoleNames[static_cast<int>(role)];
}

std::optional<ThatRole> RoleFromName(std::string_view name) {
  for (int i = 0; i < kNumThatRoles; ++i) {
    if (kRoleNames[i] == name) return static_cast<ThatRole>(i);
  }
  return std::nullopt;
}

std::string_view LabelName(Label label) {
  return label == Label::kExplicit ? "EXPLICIT" : "IMPLICIT";
}

std::optional<Label> LabelFromName(std::string_view name) {
  if (name == "EXPLICIT") return Label::kExplicit;
  if (name == "IMPLICIT") return Label::kImplicit;
  return std::nullopt;
}

std::string CheckConstructionInvariants(const ConstructionRecord& c,
                                        int sentence_length) {
  if (c.label == Label::kExplicit) {
    if (!c.sconj_index) return "EXPLICIT record without sconj_index";
    if (*c.sconj_index != c.main_verb_index + 1) return "sconj not adjacent to verb";
    if (c.sc_onset_index != *c.sconj_index + 1) return "onset not adjacent to sconj";
  } else {
    if (c.sconj_index) return "IMPLICIT record with sconj_index";
    if (c.sc_onset_index != c.main_verb_index + 1) return "onset not adjacent to verb";
  }
  if (!(c.main_verb_index < c.sc_onset_index &&
        c.sc_onset_index <= c.sc_end_index && c.sc_end_index < sentence_length)) {
    return "span order violated";
  }
  if (c.sc_subject_index && (*c.sc_subject_index < c.sc_onset_index ||
                             *c.sc_subject_index > c.sc_end_index)) {
    return "subject outside SC span";
  }
  return {};
}

bool PassesLengthFilter(const corpus::SentenceRecord& record) {
  int words = corpus::WordCount(record.tokens);
  return words >= kMinWords && words <= kMaxWords;
}

std::vector<ThatUsage> ClassifyThatUsages(const SentenceRecord& record) {
  corpus::ParseTree root = record.Tree();
  return Classify(record, IndexedTree(root));
}

std::vector<ConstructionRecord> DetectConstructions(const SentenceRecord& record) {
  corpus::ParseTree root = record.Tree();
  return Detect(record, IndexedTree(root));
}

ExtractionResult ExtractCorpus(std::span<const SentenceRecord> corpus, int jobs) {
  std::vector<SentenceOutcome> outcomes(corpus.size());
  ParallelFor(corpus.size(), jobs,
              [&](std::size_t i) { outcomes[i] = ProcessSentence(corpus[i]); });

  ExtractionResult result;
  ExtractionCounts& counts = result.counts;
  counts.sentences_read = static_cast<int>(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    SentenceOutcome& o = outcomes[i];
    if (!o.in_range) continue;
    ++counts.sentences_in_range;
    int words = corpus::WordCount(corpus[i].tokens);
    for (const ThatUsage& u : o.usages) {
      ++counts.usages_by_role[static_cast<int>(u.role)];
    }
    for (const ConstructionRecord& c : o.constructions) {
      int l = static_cast<int>(c.label);
      ++counts.constructions_by_label[l];
      counts.construction_sentence_words[l] += words;
    }
    if (!o.usages.empty() && o.constructions.empty()) {
      ++counts.other_that_sentences;
      counts.other_that_sentence_words += words;
    }
    std::move(o.constructions.begin(), o.constructions.end(),
              std::back_inserter(result.constructions));
  }
  return result;
}

std::string ToJsonLine(const ConstructionRecord& c) {
  nlohmann::ordered_json obj;
  obj["sentence_id"] = c.sentence_id;
  obj["label"] = LabelName(c.label);
  obj["main_verb_index"] = c.main_verb_index;
  obj["main_verb_lemma"] = c.main_verb_lemma;
  obj["sconj_index"] = c.sconj_index ? nlohmann::ordered_json(*c.sconj_index) : nullptr;
  obj["sc_onset_index"] = c.sc_onset_index;
  obj["sc_end_index"] = c.sc_end_index;
  obj["sc_subject_index"] =
      c.sc_subject_index ? nlohmann::ordered_json(*c.sc_subject_index) : nullptr;
  return obj.dump();
}

ConstructionRecord ConstructionFromJson(std::string_view line) {
  nlohmann::json obj = nlohmann::json::parse(line);
  ConstructionRecord c;
  c.sentence_id = obj.at("sentence_id").get<std::string>();
  auto label = LabelFromName(obj.at("label").get<std::string>());
  if (!label) throw DataError("unknown label " + obj.at("label").dump());
  c.label = *label;
  c.main_verb_index = obj.at("main_verb_index").get<int>();
  c.main_verb_lemma = obj.at("main_verb_lemma").get<std::string>();
  if (!obj.at("sconj_index").is_null()) c.sconj_index = obj["sconj_index"].get<int>();
  c.sc_onset_index = obj.at("sc_onset_index").get<int>();
  c.sc_end_index = obj.at("sc_end_index").get<int>();
  if (!obj.at("sc_subject_index").is_null()) {
    c.sc_subject_index = obj["sc_subject_index"].get<int>();
  }
  return c;
}

void WriteConstructions(std::ostream& out,
                        std::span<const ConstructionRecord> records) {
  for (const ConstructionRecord& c : records) out << ToJsonLine(c) << '\n';
}

std::vector<ConstructionRecord> ReadConstructions(std::istream& in) {
  std::vector<ConstructionRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(ConstructionFromJson(line));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("constructions line " + std::to_string(line_no) + ": " +
                      e.what());
    } catch (const DataError& e) {
      throw DataError("constructions line " + std::to_string(line_no) + ": " +
                      e.what());
    }
  }
  return out;
}

}  // namespace uidthat::extraction
