#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lsr/corpus.h"

namespace lsr {

// Positional flags of the BbIiOo_~ scheme. Lowercase = inside a gap.
enum class MweFlag : std::uint8_t { O, o, B, b, I_, i_, I_weak, i_weak };

inline constexpr std::size_t kFlagCount = 8;

std::string_view flag_name(MweFlag f);
std::optional<MweFlag> parse_flag(std::string_view s);
bool is_gap_flag(MweFlag f);
// False only for I_ and i_, which never carry lexcat or supersense.
bool carries_label(MweFlag f);

inline constexpr char kTagPartSeparator = '-';
inline constexpr char kSensePairDelimiter = '|';

struct LexTag {
  MweFlag flag = MweFlag::O;
  std::optional<Lexcat> lexcat;
  UnitSense sense;

  friend bool operator==(const LexTag&, const LexTag&) = default;
};

// FLAG[-LEXCAT[-SS[|SS2]]]
std::string format_tag(const LexTag& tag);
LexTag parse_tag(std::string_view text, const Inventory& inv = Inventory::builtin());

// nullopt stands for the sentence boundary (start as prev, end as next).
bool is_valid_transition(std::optional<MweFlag> prev, std::optional<MweFlag> next);

// Position of the first illegal flag (size() for an illegal ending), or
// nullopt when the sequence is valid. Empty sequences are valid.
std::optional<std::size_t> first_invalid_position(std::span<const MweFlag> flags);
bool is_valid_sequence(std::span<const MweFlag> flags);
bool is_valid_sequence(std::span<const LexTag> tags);

std::vector<MweFlag> flags_of(std::span<const LexTag> tags);

// Link between consecutive members of an MWE grouping (1-based tokens).
struct MweLink {
  int from = 0;
  int to = 0;
  bool strong = true;
  friend bool operator==(const MweLink&, const MweLink&) = default;
};

// Links implied by a valid flag sequence; throws DecodeError otherwise.
std::vector<MweLink> mwe_links(std::span<const MweFlag> flags);

// Tags for each token of a valid sentence. Weak groups the scheme cannot
// express (interleaved with a strong gap, or gappy inside another gap) are
// left out; their indices are appended to `dropped_weak_groups` if given.
std::vector<LexTag> encode(const Sentence& s,
                           std::vector<std::size_t>* dropped_weak_groups = nullptr);

struct DecodedStructure {
  std::vector<LexicalUnit> units;
  std::vector<WeakGroup> weak_groups;
};

DecodedStructure decode(std::span<const LexTag> tags);

// Replaces the units and weak groups of `s` with a decoded structure.
void apply_structure(Sentence& s, DecodedStructure structure);

// Distinct tags observed in a corpus, ordered by formatted string.
class TagSet {
 public:
  TagSet() = default;
  explicit TagSet(std::vector<LexTag> tags);

  static TagSet from_sequences(std::span<const std::vector<LexTag>> sequences);
  static TagSet from_strings(std::span<const std::string> tags,
                             const Inventory& inv = Inventory::builtin());

  std::size_t size() const { return tags_.size(); }
  bool empty() const { return tags_.empty(); }
  const LexTag& tag(std::size_t i) const { return tags_[i]; }
  const std::string& name(std::size_t i) const { return names_[i]; }
  MweFlag flag(std::size_t i) const { return tags_[i].flag; }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<std::size_t> index_of(const LexTag& tag) const;
  std::optional<std::size_t> index_of(std::string_view formatted) const;

  // Nearest in-set tag for an unseen one: same flag + lexcat (sense dropped
  // if needed), else the first tag with the same flag.
  std::optional<std::size_t> backoff(const LexTag& tag) const;

  friend bool operator==(const TagSet& a, const TagSet& b) { return a.names_ == b.names_; }

 private:
  std::vector<LexTag> tags_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace lsr
