#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace lsr {

// Lexical categories of strong lexical units.
enum class Lexcat : std::uint8_t {
  N,
  PRON_POSS,
  POSS,
  P,
  PP,
  INF_P,
  V,
  V_VID,
  V_VPC_full,
  V_VPC_semi,
  V_LVC_full,
  V_LVC_cause,
  V_IAV,
  NUM,
  PRON,
  ADJ,
  ADV,
  DET,
  INF,
  AUX,
  DISC,
  CCONJ,
  SCONJ,
  INTJ,
  SYM,
  PUNCT,
  X,
};

inline constexpr std::size_t kLexcatCount = 27;

const std::array<Lexcat, kLexcatCount>& all_lexcats();
std::string_view lexcat_name(Lexcat lc);
std::optional<Lexcat> parse_lexcat(std::string_view name);

enum class SupersenseClass : std::uint8_t { noun, verb, snacs };

std::string_view class_name(SupersenseClass cls);

// Class of supersense a lexcat takes, or nullopt for lexcats that never
// carry one.
std::optional<SupersenseClass> required_class(Lexcat lc);

// The six verbal MWE subtypes (V.VID ... V.IAV).
bool is_verbal_mwe_lexcat(Lexcat lc);

// Lexcats that are only legal on multi-token units.
bool requires_multiword(Lexcat lc);

// Possessive lexcats tolerate a missing supersense.
bool supersense_optional(Lexcat lc);

struct Supersense {
  SupersenseClass cls = SupersenseClass::noun;
  std::string label;

  friend bool operator==(const Supersense&, const Supersense&) = default;
  friend auto operator<=>(const Supersense&, const Supersense&) = default;
};

// Scene role and function of an adposition or possessive.
struct SupersensePair {
  Supersense role;
  Supersense function;

  friend bool operator==(const SupersensePair&, const SupersensePair&) = default;
  friend auto operator<=>(const SupersensePair&, const SupersensePair&) = default;
};

using UnitSense = std::variant<std::monostate, Supersense, SupersensePair>;

inline bool has_sense(const UnitSense& s) {
  return !std::holds_alternative<std::monostate>(s);
}

// Role label of a sense (the single label for non-pairs); empty if none.
std::string_view role_label(const UnitSense& s);
// Function label (equal to the role for non-pairs); empty if none.
std::string_view function_label(const UnitSense& s);
// Class of the sense, nullopt when absent.
std::optional<SupersenseClass> sense_class(const UnitSense& s);

// "role|function" with the pair collapsed when role == function.
std::string format_sense(const UnitSense& s, char pair_delimiter = '|');

// Closed supersense label sets, read from a plain-text resource.
//
// Line format: `<class>[,<class>...] <label> [unassigned|unscored]`.
// Lookup is case-insensitive and returns the inventory spelling.
class Inventory {
 public:
  struct Entry {
    std::string label;
    std::vector<SupersenseClass> classes;
    bool unassigned = false;
    bool unscored = false;
  };

  static Inventory parse(std::string_view text);
  static Inventory load(const std::string& path);
  // The bundled default inventory.
  static const Inventory& builtin();

  std::optional<Supersense> find(std::string_view label,
                                 SupersenseClass cls) const;
  // Resolves against every class; fails when the label is unknown or
  // belongs to several classes.
  std::optional<Supersense> find_any(std::string_view label) const;

  bool contains(const Supersense& ss) const;
  bool is_unassigned(std::string_view label) const;
  bool is_unscored(std::string_view label) const;

  std::vector<Supersense> labels(SupersenseClass cls) const;
  std::size_t size() const { return entries_.size(); }

 private:
  const Entry* lookup(std::string_view label) const;

  std::vector<Entry> entries_;
  std::map<std::string, std::size_t, std::less<>> by_folded_label_;
};

std::string ascii_lower(std::string_view s);

}  // namespace lsr
