#include "uidthat/corpus/parse_tree.h"

#include <cctype>

#include "uidthat/common/errors.h"

namespace uidthat::corpus {
namespace {

class TreeReader {
 public:
  explicit TreeReader(std::string_view text) : text_(text) {}

  ParseTree ReadTop() {
    SkipSpace();
    if (pos_ >= text_.size()) throw ParseError("empty tree string", pos_);
    ParseTree tree = ReadNode();
    SkipSpace();
    if (pos_ != text_.size()) {
      if (text_[pos_] == ')') throw ParseError("unbalanced ')'", pos_);
      throw ParseError("trailing text after tree", pos_);
    }
    return tree;
  }

 private:
  void SkipSpace() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  std::string_view ReadToken() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }

  // Premature end of input is reported at the last character read.
  std::size_t EndOffset() const {
    return text_.empty() ? 0 : text_.size() - 1;
  }

  void Expect(char c) {
    if (pos_ >= text_.size()) {
      throw ParseError(std::string("unbalanced: expected '") + c + "'",
                       EndOffset());
    }
    if (text_[pos_] != c) {
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
    ++pos_;
  }

  ParseTree ReadNode() {
    std::size_t open = pos_;
    Expect('(');
    SkipSpace();
    ParseTree node;
    node.label = std::string(ReadToken());
    SkipSpace();
    if (pos_ >= text_.size()) {
      throw ParseError("unbalanced: expected ')'", EndOffset());
    }
    if (text_[pos_] == ')') {
      throw ParseError("empty constituent", open);
    }
    if (text_[pos_] != '(') {
      std::string_view word = ReadToken();
      SkipSpace();
      if (node.label.empty()) throw ParseError("terminal without label", open);
      node.leaf = Leaf{next_leaf_++, std::string(word)};
      Expect(')');
      return node;
    }
    while (pos_ < text_.size() && text_[pos_] == '(') {
      node.children.push_back(ReadNode());
      SkipSpace();
    }
    if (pos_ < text_.size() && text_[pos_] != ')') {
      throw ParseError("text mixed with constituents", pos_);
    }
    Expect(')');
    return node;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int next_leaf_ = 0;
};

void CollectTerminals(const ParseTree& node,
                      std::vector<const ParseTree*>* out) {
  if (node.IsTerminal()) {
    out->push_back(&node);
    return;
  }
  for (const ParseTree& child : node.children) CollectTerminals(child, out);
}

void Serialize(const ParseTree& node, std::string* out) {
  out->push_back('(');
  out->append(node.label);
  if (node.IsTerminal()) {
    out->push_back(' ');
    out->append(node.leaf->word);
  } else {
    for (const ParseTree& child : node.children) {
      out->push_back(' ');
      Serialize(child, out);
    }
  }
  out->push_back(')');
}

}  // namespace

std::vector<const ParseTree*> ParseTree::Terminals() const {
  std::vector<const ParseTree*> out;
  CollectTerminals(*this, &out);
  return out;
}

std::vector<std::string> ParseTree::LeafWords() const {
  std::vector<std::string> words;
  for (const ParseTree* t : Terminals()) words.push_back(t->leaf->word);
  return words;
}

int ParseTree::LeafCount() const {
  if (IsTerminal()) return 1;
  int n = 0;
  for (const ParseTree& child : children) n += child.LeafCount();
  return n;
}

int ParseTree::FirstLeafIndex() const {
  const ParseTree* node = this;
  while (!node->IsTerminal()) node = &node->children.front();
  return node->leaf->index;
}

int ParseTree::LastLeafIndex() const {
  const ParseTree* node = this;
  while (!node->IsTerminal()) node = &node->children.back();
  return node->leaf->index;
}

ParseTree ParseBracketedTree(std::string_view text) {
  return TreeReader(text).ReadTop();
}

std::string ToBracketedString(const ParseTree& tree) {
  std::string out;
  Serialize(tree, &out);
  return out;
}

}  // namespace uidthat::corpus
