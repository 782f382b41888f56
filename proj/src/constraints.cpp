#include "lsr/constraints.h"

#include <fstream>
#include <sstream>

#include "lsr/error.h"
#include "lsr/resources.h"
#include "lsr/text.h"

namespace lsr {

LexcatSet lexcat_set(std::initializer_list<Lexcat> lexcats) {
  LexcatSet s;
  for (auto lc : lexcats) s.set(static_cast<std::size_t>(lc));
  return s;
}

bool contains(const LexcatSet& set, Lexcat lc) { return set.test(static_cast<std::size_t>(lc)); }

LexcatConstraintTable LexcatConstraintTable::parse(std::string_view text) {
  LexcatConstraintTable table;
  std::size_t line_no = 0;
  for (auto raw : split_view(text, '\n')) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto arrow = line.find("->");
    if (arrow == std::string_view::npos)
      throw ParseError("", line_no, "constraint-syntax", "expected `UPOS [lemma=x] -> LEXCAT,...`");
    LexcatRule rule;
    rule.line = line_no;
    std::vector<std::string_view> lhs;
    for (auto f : split_view(trim(line.substr(0, arrow)), ' '))
      if (!f.empty()) lhs.push_back(f);
    if (lhs.empty() || lhs.size() > 2)
      throw ParseError("", line_no, "constraint-syntax", "left side must be `UPOS` or `UPOS lemma=<string>`");
    rule.upos = std::string(lhs[0]);
    if (lhs.size() == 2) {
      if (!starts_with(lhs[1], "lemma=") || lhs[1].size() == 6)
        throw ParseError("", line_no, "constraint-syntax", "unknown predicate '" + std::string(lhs[1]) + "'");
      rule.lemma = ascii_lower(lhs[1].substr(6));
    }
    for (auto name : split_view(trim(line.substr(arrow + 2)), ',')) {
      auto lc = parse_lexcat(trim(name));
      if (!lc) throw ParseError("", line_no, "constraint-lexcat", "unknown lexcat '" + std::string(trim(name)) + "'");
      rule.lexcats.set(static_cast<std::size_t>(*lc));
    }
    for (const auto& r : table.rules_)
      if (r.upos == rule.upos && r.lemma == rule.lemma)
        throw ParseError("", line_no, "constraint-duplicate", "duplicate rule for " + rule.upos);
    table.rules_.push_back(std::move(rule));
  }
  // A lemma rule refines its UPOS rule: it must share at least one lexcat.
  for (const auto& r : table.rules_) {
    if (!r.lemma) continue;
    for (const auto& base : table.rules_)
      if (!base.lemma && base.upos == r.upos && (base.lexcats & r.lexcats).none())
        throw ParseError("", r.line, "constraint-contradiction",
                         "rule for " + r.upos + " lemma=" + *r.lemma + " shares no lexcat with the plain " + r.upos + " rule");
  }
  return table;
}

LexcatConstraintTable LexcatConstraintTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open constraint table: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const LexcatConstraintTable& LexcatConstraintTable::builtin() {
  static const LexcatConstraintTable table = parse(resources::lexcat_constraints());
  return table;
}

bool LexcatConstraintTable::has_upos(std::string_view upos) const {
  for (const auto& r : rules_)
    if (!r.lemma && r.upos == upos) return true;
  return false;
}

LexcatSet LexcatConstraintTable::allowed(std::string_view upos, std::string_view lemma, MissingUposPolicy policy) const {
  const auto folded = ascii_lower(lemma);
  const LexcatRule* plain = nullptr;
  for (const auto& r : rules_) {
    if (r.upos != upos) continue;
    if (r.lemma) {
      if (*r.lemma == folded) return r.lexcats;
    } else {
      plain = &r;
    }
  }
  if (plain) return plain->lexcats;
  if (policy == MissingUposPolicy::allow_all) return LexcatSet().set();
  throw Error("no lexcat constraint for UPOS '" + std::string(upos) + "'");
}

LexcatSet allowed_lexcats(std::string_view upos, std::string_view lemma, const LexcatConstraintTable& table,
                          MissingUposPolicy policy) {
  return table.allowed(upos, lemma, policy);
}

std::shared_ptr<const TransitionMask> TransitionMask::for_tagset(const TagSet& tagset) {
  auto m = std::make_shared<TransitionMask>();
  const auto k = tagset.size();
  m->tags = k;
  m->trans.assign(k * k, 0);
  m->start.assign(k, 0);
  m->end.assign(k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    m->start[i] = is_valid_transition(std::nullopt, tagset.flag(i));
    m->end[i] = is_valid_transition(tagset.flag(i), std::nullopt);
    for (std::size_t j = 0; j < k; ++j) m->trans[i * k + j] = is_valid_transition(tagset.flag(i), tagset.flag(j));
  }
  return m;
}

LatticeMasks LatticeMasks::structural(std::shared_ptr<const TransitionMask> structure, std::size_t length) {
  LatticeMasks m;
  m.length = length;
  m.tags = structure->tags;
  m.allow.assign(length * m.tags, 1);
  m.structure = std::move(structure);
  return m;
}

LatticeMasks LatticeMasks::structural(const TagSet& tagset, std::size_t length) {
  return structural(TransitionMask::for_tagset(tagset), length);
}

LatticeMasks build_masks(std::span<const Token> tokens, const TagSet& tagset, const LexcatConstraintTable& table,
                         const MaskOptions& options, std::shared_ptr<const TransitionMask> structure) {
  if (tagset.empty()) throw Error("cannot build masks for an empty tag set");
  if (!structure) structure = TransitionMask::for_tagset(tagset);
  auto m = LatticeMasks::structural(std::move(structure), tokens.size());
  const auto k = tagset.size();
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const auto permitted = table.allowed(tokens[t].upos, tokens[t].lemma, options.missing_upos);
    bool has_outside = false;
    for (std::size_t i = 0; i < k; ++i) {
      const auto& tag = tagset.tag(i);
      const bool keep = !tag.lexcat || contains(permitted, *tag.lexcat);
      m.allow[t * k + i] = keep;
      if (keep && tag.flag == MweFlag::O) has_outside = true;
    }
    if (!has_outside) {
      std::fill(m.allow.begin() + static_cast<std::ptrdiff_t>(t * k), m.allow.begin() + static_cast<std::ptrdiff_t>((t + 1) * k), 1);
      m.relaxed_positions.push_back(t);
      m.warnings.push_back("token " + std::to_string(t + 1) + " (" + tokens[t].form + "/" + tokens[t].upos +
                           "): no permitted O tag in the tag set; lexcat mask lifted");
    }
  }
  return m;
}

}  // namespace lsr
