#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lsr/inventory.h"

namespace lsr {

// One CoNLL-U token row. Columns other than form/lemma/upos are carried
// through verbatim.
struct Token {
  int index = 0;  // 1-based position in the sentence
  std::string form;
  std::string lemma;
  std::string upos;
  std::string xpos = "_";
  std::string feats = "_";
  std::string head = "_";
  std::string deprel = "_";
  std::string deps = "_";
  std::string misc = "_";

  friend bool operator==(const Token&, const Token&) = default;
};

// A single-word expression or strong MWE.
struct LexicalUnit {
  std::vector<int> tokens;  // 1-based, strictly increasing
  Lexcat lexcat = Lexcat::X;
  UnitSense sense;
  std::string lexlemma;  // LEXLEMMA column; empty means "derive from lemmas"

  int first() const { return tokens.front(); }
  int last() const { return tokens.back(); }
  bool is_multiword() const { return tokens.size() > 1; }
  bool is_gappy() const { return last() - first() + 1 != static_cast<int>(tokens.size()); }

  friend bool operator==(const LexicalUnit&, const LexicalUnit&) = default;
};

// Weak grouping of whole lexical units.
struct WeakGroup {
  std::vector<std::size_t> units;  // indices into Sentence::units
  std::string category;            // WCAT; empty if none
  std::string lemma;               // WLEMMA; empty means "derive"

  friend bool operator==(const WeakGroup&, const WeakGroup&) = default;
};

// Row whose ID is not a plain integer (ellipsis "8.1", range "3-4"), kept
// verbatim and re-emitted after token `after_token` (0 = before the first).
struct ExtraRow {
  int after_token = 0;
  std::string line;

  friend bool operator==(const ExtraRow&, const ExtraRow&) = default;
};

struct Sentence {
  std::string sent_id;
  std::string text;
  std::vector<std::string> comments;  // verbatim, in order
  std::map<std::string, std::string> metadata;  // other `# key = value` comments
  std::vector<Token> tokens;
  std::vector<ExtraRow> extra_rows;
  std::vector<LexicalUnit> units;  // ordered by first token
  std::vector<WeakGroup> weak_groups;

  // unit index per token (0-based token position); -1 if uncovered.
  std::vector<int> unit_of_token() const;
  // Tokens of a weak group, ascending.
  std::vector<int> weak_group_tokens(const WeakGroup& g) const;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

// Snacs singletons are stored as role == function pairs; unassigned labels
// stay single.
UnitSense canonical_sense(const UnitSense& s, const Inventory& inv = Inventory::builtin());

// Units and weak groups match (token sets, lexcats, canonical senses).
// Lemma and category strings are ignored.
bool same_annotation(const Sentence& a, const Sentence& b,
                     const Inventory& inv = Inventory::builtin());

// Sorts units by first token and remaps weak group references.
void normalize_unit_order(Sentence& s);

struct Violation {
  std::string rule;
  std::vector<int> tokens;
  std::string message;
};

// Structural and lexcat/supersense checks. Empty iff valid.
std::vector<Violation> validate_sentence(const Sentence& s,
                                         const Inventory& inv = Inventory::builtin());

struct ConllulexOptions {
  // Read the 9 lexical-semantic columns. When false they are ignored and
  // sentences come back with no units (input for tagging).
  bool annotations = true;
  // Reject sentences that fail validate_sentence.
  bool validate = true;
};

std::vector<Sentence> parse_conllulex(std::istream& in,
                                      const ConllulexOptions& options = {},
                                      const Inventory& inv = Inventory::builtin());
std::vector<Sentence> parse_conllulex(std::string_view text,
                                      const ConllulexOptions& options = {},
                                      const Inventory& inv = Inventory::builtin());
std::vector<Sentence> read_conllulex_file(const std::string& path,
                                          const ConllulexOptions& options = {},
                                          const Inventory& inv = Inventory::builtin());

void write_conllulex(std::ostream& out, std::span<const Sentence> sentences);
std::string write_conllulex(std::span<const Sentence> sentences);

}  // namespace lsr
