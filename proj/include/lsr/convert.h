#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lsr/corpus.h"

namespace lsr {

// ---------------------------------------------------------------------------
// PARSEME (.cupt)

// PARSEME verbal MWE categories. The STREUSLE projection only produces the
// first six; the rest are accepted when reading shared-task files.
const std::vector<std::string>& parseme_categories();
bool is_parseme_category(std::string_view category);

// PARSEME category of a verbal MWE lexcat (V.VPC.full -> VPC.full).
std::optional<std::string> parseme_category(Lexcat lc);

struct Vmwe {
  int id = 0;  // number used in the MWE column
  std::string category;
  std::vector<int> tokens;  // 1-based, ascending

  friend bool operator==(const Vmwe&, const Vmwe&) = default;
};

struct CuptRow {
  std::array<std::string, 10> conllu;
  // 11th column of non-word rows; for words only "*" or an underspecified "_"
  std::string mwe = "*";

  bool is_word() const;  // integer ID
  friend bool operator==(const CuptRow&, const CuptRow&) = default;
};

struct ParsemeSentence {
  std::string sent_id;
  std::vector<std::string> comments;
  std::vector<CuptRow> rows;  // words plus range/empty-node rows, in file order
  std::vector<Vmwe> vmwes;

  std::size_t word_count() const;
  friend bool operator==(const ParsemeSentence&, const ParsemeSentence&) = default;
};

std::vector<ParsemeSentence> parse_cupt(std::istream& in);
std::vector<ParsemeSentence> parse_cupt(std::string_view text);
std::vector<ParsemeSentence> read_cupt_file(const std::string& path);

// Regenerates the MWE column from `vmwes`. Words outside every VMWE keep an
// underspecified `_` if they had one and get `*` otherwise.
void write_cupt(std::ostream& out, std::span<const ParsemeSentence> sentences);
std::string write_cupt(std::span<const ParsemeSentence> sentences);

// Keeps the multiword units with a verbal MWE lexcat; VMWEs are numbered
// from 1 by first token.
ParsemeSentence to_parseme(const Sentence& s);

// Word rows as an unannotated Sentence, for tagging shared-task input.
Sentence sentence_of(const ParsemeSentence& p);
// Replaces the VMWEs of `target` with those of `s`, which must have the
// same words. Comments and rows are kept.
void project_into(ParsemeSentence& target, const Sentence& s);

// ---------------------------------------------------------------------------
// DiMSUM (.tsv)

struct DimsumToken {
  int index = 0;
  std::string form;
  std::string lemma;
  std::string pos;
  std::string flag = "O";  // O o B b I i
  int parent = 0;          // previous token of the MWE, 0 if none
  std::string strength;    // unused; kept for round trips
  std::string label;       // supersense or empty

  friend bool operator==(const DimsumToken&, const DimsumToken&) = default;
};

struct DimsumSentence {
  std::string sent_id;
  std::vector<DimsumToken> tokens;

  // Strong units as token lists (single tokens included), by first token.
  std::vector<std::vector<int>> units() const;
  friend bool operator==(const DimsumSentence&, const DimsumSentence&) = default;
};

std::vector<DimsumSentence> parse_dimsum(std::istream& in);
std::vector<DimsumSentence> parse_dimsum(std::string_view text);
std::vector<DimsumSentence> read_dimsum_file(const std::string& path);
void write_dimsum(std::ostream& out, std::span<const DimsumSentence> sentences);
std::string write_dimsum(std::span<const DimsumSentence> sentences);

// Strong units with noun/verb supersenses only; weak groups, lexcats and
// SNACS labels are dropped. Labels are written in lowercase.
DimsumSentence to_dimsum(const Sentence& s);

// Tokens as an unannotated Sentence (lemma and POS columns kept).
Sentence sentence_of(const DimsumSentence& d);
// Replaces flags, parents and labels of `target` with the projection of
// `s`; the other columns are kept.
void project_into(DimsumSentence& target, const Sentence& s);

}  // namespace lsr
