#pragma once

#include <bitset>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lsr/corpus.h"
#include "lsr/tagcodec.h"

namespace lsr {

using LexcatSet = std::bitset<kLexcatCount>;

LexcatSet lexcat_set(std::initializer_list<Lexcat> lexcats);
bool contains(const LexcatSet& set, Lexcat lc);

struct LexcatRule {
  std::string upos;
  std::optional<std::string> lemma;  // compared case-insensitively
  LexcatSet lexcats;
  std::size_t line = 0;
};

enum class MissingUposPolicy { error, allow_all };

// UPOS (+ optional lemma) -> permitted lexcats of a unit's first token.
// File format, one rule per line: `UPOS [lemma=<string>] -> LEXCAT[,LEXCAT...]`.
class LexcatConstraintTable {
 public:
  static LexcatConstraintTable parse(std::string_view text);
  static LexcatConstraintTable load(const std::string& path);
  static const LexcatConstraintTable& builtin();

  // Lemma rules win over the plain UPOS rule. A UPOS with no plain rule is
  // "missing"; `policy` decides between throwing and allowing everything.
  LexcatSet allowed(std::string_view upos, std::string_view lemma,
                    MissingUposPolicy policy = MissingUposPolicy::error) const;

  bool has_upos(std::string_view upos) const;
  const std::vector<LexcatRule>& rules() const { return rules_; }

 private:
  std::vector<LexcatRule> rules_;
};

LexcatSet allowed_lexcats(std::string_view upos, std::string_view lemma, const LexcatConstraintTable& table,
                          MissingUposPolicy policy = MissingUposPolicy::error);

// Flag transition table lifted to the tags of a tag set.
struct TransitionMask {
  std::size_t tags = 0;
  std::vector<std::uint8_t> trans;  // tags x tags, row = previous
  std::vector<std::uint8_t> start;
  std::vector<std::uint8_t> end;

  bool allowed(std::size_t prev, std::size_t next) const { return trans[prev * tags + next] != 0; }

  static std::shared_ptr<const TransitionMask> for_tagset(const TagSet& tagset);
};

struct LatticeMasks {
  std::size_t length = 0;
  std::size_t tags = 0;
  std::vector<std::uint8_t> allow;  // length x tags
  std::shared_ptr<const TransitionMask> structure;
  std::vector<std::size_t> relaxed_positions;  // where the lexcat mask was dropped
  std::vector<std::string> warnings;

  bool allowed(std::size_t t, std::size_t k) const { return allow[t * tags + k] != 0; }
  bool transition(std::size_t prev, std::size_t next) const { return structure->allowed(prev, next); }
  bool start(std::size_t k) const { return structure->start[k] != 0; }
  bool end(std::size_t k) const { return structure->end[k] != 0; }

  // Transition constraints only; every tag allowed at every position.
  static LatticeMasks structural(const TagSet& tagset, std::size_t length);
  static LatticeMasks structural(std::shared_ptr<const TransitionMask> structure, std::size_t length);
};

struct MaskOptions {
  MissingUposPolicy missing_upos = MissingUposPolicy::error;
};

// A position keeps tag k when k's lexcat is permitted for the token or k has
// no lexcat (bare strong continuations). If no O-flag tag survives at a position,
// its lexcat mask is lifted so that a feasible path always exists.
LatticeMasks build_masks(std::span<const Token> tokens, const TagSet& tagset, const LexcatConstraintTable& table,
                         const MaskOptions& options = {},
                         std::shared_ptr<const TransitionMask> structure = nullptr);

}  // namespace lsr
