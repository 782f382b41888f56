#include "lsr/inventory.h"

#include <fstream>
#include <sstream>

#include "lsr/error.h"
#include "lsr/resources.h"
#include "lsr/text.h"

namespace lsr {

namespace {

struct LexcatInfo {
  Lexcat lexcat;
  std::string_view name;
  std::optional<SupersenseClass> cls;
};

constexpr std::array<LexcatInfo, kLexcatCount> kLexcats = {{
    {Lexcat::N, "N", SupersenseClass::noun},
    {Lexcat::PRON_POSS, "PRON.POSS", SupersenseClass::snacs},
    {Lexcat::POSS, "POSS", SupersenseClass::snacs},
    {Lexcat::P, "P", SupersenseClass::snacs},
    {Lexcat::PP, "PP", SupersenseClass::snacs},
    {Lexcat::INF_P, "INF.P", SupersenseClass::snacs},
    {Lexcat::V, "V", SupersenseClass::verb},
    {Lexcat::V_VID, "V.VID", SupersenseClass::verb},
    {Lexcat::V_VPC_full, "V.VPC.full", SupersenseClass::verb},
    {Lexcat::V_VPC_semi, "V.VPC.semi", SupersenseClass::verb},
    {Lexcat::V_LVC_full, "V.LVC.full", SupersenseClass::verb},
    {Lexcat::V_LVC_cause, "V.LVC.cause", SupersenseClass::verb},
    {Lexcat::V_IAV, "V.IAV", SupersenseClass::verb},
    {Lexcat::NUM, "NUM", std::nullopt},
    {Lexcat::PRON, "PRON", std::nullopt},
    {Lexcat::ADJ, "ADJ", std::nullopt},
    {Lexcat::ADV, "ADV", std::nullopt},
    {Lexcat::DET, "DET", std::nullopt},
    {Lexcat::INF, "INF", std::nullopt},
    {Lexcat::AUX, "AUX", std::nullopt},
    {Lexcat::DISC, "DISC", std::nullopt},
    {Lexcat::CCONJ, "CCONJ", std::nullopt},
    {Lexcat::SCONJ, "SCONJ", std::nullopt},
    {Lexcat::INTJ, "INTJ", std::nullopt},
    {Lexcat::SYM, "SYM", std::nullopt},
    {Lexcat::PUNCT, "PUNCT", std::nullopt},
    {Lexcat::X, "X", std::nullopt},
}};

const LexcatInfo& info(Lexcat lc) { return kLexcats[static_cast<std::size_t>(lc)]; }

std::optional<SupersenseClass> parse_class(std::string_view s) {
  if (s == "noun") return SupersenseClass::noun;
  if (s == "verb") return SupersenseClass::verb;
  if (s == "snacs") return SupersenseClass::snacs;
  return std::nullopt;
}

}  // namespace

const std::array<Lexcat, kLexcatCount>& all_lexcats() {
  static const std::array<Lexcat, kLexcatCount> all = [] {
    std::array<Lexcat, kLexcatCount> a{};
    for (std::size_t i = 0; i < kLexcatCount; ++i) a[i] = kLexcats[i].lexcat;
    return a;
  }();
  return all;
}

std::string_view lexcat_name(Lexcat lc) { return info(lc).name; }

std::optional<Lexcat> parse_lexcat(std::string_view name) {
  for (const auto& e : kLexcats)
    if (e.name == name) return e.lexcat;
  return std::nullopt;
}

std::string_view class_name(SupersenseClass cls) {
  switch (cls) {
    case SupersenseClass::noun: return "noun";
    case SupersenseClass::verb: return "verb";
    case SupersenseClass::snacs: return "snacs";
  }
  return "?";
}

std::optional<SupersenseClass> required_class(Lexcat lc) { return info(lc).cls; }

bool is_verbal_mwe_lexcat(Lexcat lc) {
  return lc >= Lexcat::V_VID && lc <= Lexcat::V_IAV;
}

bool requires_multiword(Lexcat lc) {
  return is_verbal_mwe_lexcat(lc) || lc == Lexcat::PP;
}

bool supersense_optional(Lexcat lc) {
  return lc == Lexcat::POSS || lc == Lexcat::PRON_POSS;
}

std::string_view role_label(const UnitSense& s) {
  if (auto* one = std::get_if<Supersense>(&s)) return one->label;
  if (auto* pair = std::get_if<SupersensePair>(&s)) return pair->role.label;
  return {};
}

std::string_view function_label(const UnitSense& s) {
  if (auto* one = std::get_if<Supersense>(&s)) return one->label;
  if (auto* pair = std::get_if<SupersensePair>(&s)) return pair->function.label;
  return {};
}

std::optional<SupersenseClass> sense_class(const UnitSense& s) {
  if (auto* one = std::get_if<Supersense>(&s)) return one->cls;
  if (auto* pair = std::get_if<SupersensePair>(&s)) return pair->role.cls;
  return std::nullopt;
}

std::string format_sense(const UnitSense& s, char pair_delimiter) {
  if (auto* one = std::get_if<Supersense>(&s)) return one->label;
  if (auto* pair = std::get_if<SupersensePair>(&s)) {
    if (pair->role.label == pair->function.label) return pair->role.label;
    return pair->role.label + pair_delimiter + pair->function.label;
  }
  return {};
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

Inventory Inventory::parse(std::string_view text) {
  Inventory inv;
  std::size_t line_no = 0;
  for (auto line : split_view(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string_view> fields;
    for (auto f : split_view(line, ' '))
      if (!f.empty()) fields.push_back(f);
    if (fields.size() < 2 || fields.size() > 3)
      throw ParseError("", line_no, "inventory-line", "expected `<class> <label> [flag]`");
    Entry e;
    e.label = std::string(fields[1]);
    for (auto c : split_view(fields[0], ',')) {
      auto cls = parse_class(c);
      if (!cls) throw ParseError("", line_no, "inventory-class", "unknown class '" + std::string(c) + "'");
      e.classes.push_back(*cls);
    }
    if (fields.size() == 3) {
      if (fields[2] == "unassigned") e.unassigned = true;
      else if (fields[2] == "unscored") e.unscored = true;
      else throw ParseError("", line_no, "inventory-flag", "unknown flag '" + std::string(fields[2]) + "'");
    }
    auto folded = ascii_lower(e.label);
    if (inv.by_folded_label_.count(folded))
      throw ParseError("", line_no, "inventory-duplicate", "duplicate label '" + e.label + "'");
    inv.by_folded_label_.emplace(std::move(folded), inv.entries_.size());
    inv.entries_.push_back(std::move(e));
  }
  return inv;
}

Inventory Inventory::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open supersense inventory: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const Inventory& Inventory::builtin() {
  static const Inventory inv = parse(resources::supersense_inventory());
  return inv;
}

const Inventory::Entry* Inventory::lookup(std::string_view label) const {
  auto it = by_folded_label_.find(ascii_lower(label));
  return it == by_folded_label_.end() ? nullptr : &entries_[it->second];
}

std::optional<Supersense> Inventory::find(std::string_view label, SupersenseClass cls) const {
  const Entry* e = lookup(label);
  if (!e) return std::nullopt;
  for (auto c : e->classes)
    if (c == cls) return Supersense{cls, e->label};
  return std::nullopt;
}

std::optional<Supersense> Inventory::find_any(std::string_view label) const {
  const Entry* e = lookup(label);
  if (!e || e->classes.size() != 1) return std::nullopt;
  return Supersense{e->classes.front(), e->label};
}

bool Inventory::contains(const Supersense& ss) const {
  auto found = find(ss.label, ss.cls);
  return found && found->label == ss.label;
}

bool Inventory::is_unassigned(std::string_view label) const {
  const Entry* e = lookup(label);
  return e && e->unassigned;
}

bool Inventory::is_unscored(std::string_view label) const {
  const Entry* e = lookup(label);
  return e && e->unscored;
}

std::vector<Supersense> Inventory::labels(SupersenseClass cls) const {
  std::vector<Supersense> out;
  for (const auto& e : entries_)
    for (auto c : e.classes)
      if (c == cls) out.push_back({cls, e.label});
  return out;
}

}  // namespace lsr
