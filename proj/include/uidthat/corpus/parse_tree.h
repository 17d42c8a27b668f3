#ifndef UIDTHAT_CORPUS_PARSE_TREE_H_
#define UIDTHAT_CORPUS_PARSE_TREE_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace uidthat::corpus {

struct Leaf {
  int index = 0;
  std::string word;

  bool operator==(const Leaf&) const = default;
};

// A constituency tree node. Preterminals such as (NN city) are the terminal
// nodes: they carry the leaf and have no children. Every other node has at
// least one child and no leaf.
struct ParseTree {
  std::string label;
  std::vector<ParseTree> children;
  std::optional<Leaf> leaf;

  bool IsTerminal() const { return leaf.has_value(); }

  // Terminal nodes in left-to-right order.
  std::vector<const ParseTree*> Terminals() const;
  std::vector<std::string> LeafWords() const;
  int LeafCount() const;

  // Index of the first and last leaf dominated by this node.
  int FirstLeafIndex() const;
  int LastLeafIndex() const;

  bool operator==(const ParseTree&) const = default;
};

// Reads a Penn-style bracketed tree, e.g. "(S (NP (PRP I)) (VP (VBP agree)))".
// Leaves are numbered 0..n-1 in reading order. Throws ParseError carrying the
// byte offset of the first problem (unbalanced brackets, empty constituents,
// stray text). Input that ends before all brackets close is reported at its
// last character.
ParseTree ParseBracketedTree(std::string_view text);

// Single-line serialization; ParseBracketedTree(ToBracketedString(t)) == t.
std::string ToBracketedString(const ParseTree& tree);

}  // namespace uidthat::corpus

#endif  // UIDTHAT_CORPUS_PARSE_TREE_H_
