#include "lsr/corpus.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "lsr/error.h"
#include "lsr/tagcodec.h"
#include "lsr/text.h"

namespace lsr {

std::vector<int> Sentence::unit_of_token() const {
  std::vector<int> owner(tokens.size(), -1);
  for (std::size_t u = 0; u < units.size(); ++u)
    for (int t : units[u].tokens)
      if (t >= 1 && t <= static_cast<int>(tokens.size())) owner[t - 1] = static_cast<int>(u);
  return owner;
}

std::vector<int> Sentence::weak_group_tokens(const WeakGroup& g) const {
  std::vector<int> out;
  for (auto u : g.units)
    if (u < units.size()) out.insert(out.end(), units[u].tokens.begin(), units[u].tokens.end());
  std::sort(out.begin(), out.end());
  return out;
}

UnitSense canonical_sense(const UnitSense& s, const Inventory& inv) {
  if (auto* one = std::get_if<Supersense>(&s)) {
    if (one->cls == SupersenseClass::snacs && !inv.is_unassigned(one->label))
      return SupersensePair{*one, *one};
  }
  return s;
}

namespace {

using UnitKey = std::tuple<std::vector<int>, Lexcat, UnitSense>;

std::vector<UnitKey> unit_keys(const Sentence& s, const Inventory& inv) {
  std::vector<UnitKey> keys;
  for (const auto& u : s.units) keys.emplace_back(u.tokens, u.lexcat, canonical_sense(u.sense, inv));
  std::sort(keys.begin(), keys.end());
  return keys;
}

std::vector<std::vector<int>> weak_keys(const Sentence& s) {
  std::vector<std::vector<int>> keys;
  for (const auto& g : s.weak_groups) keys.push_back(s.weak_group_tokens(g));
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace

bool same_annotation(const Sentence& a, const Sentence& b, const Inventory& inv) {
  return unit_keys(a, inv) == unit_keys(b, inv) && weak_keys(a) == weak_keys(b);
}

void normalize_unit_order(Sentence& s) {
  std::vector<std::size_t> order(s.units.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) {
    return s.units[x].tokens.front() < s.units[y].tokens.front();
  });
  std::vector<std::size_t> new_index(order.size());
  std::vector<LexicalUnit> units;
  units.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    new_index[order[i]] = i;
    units.push_back(std::move(s.units[order[i]]));
  }
  s.units = std::move(units);
  for (auto& g : s.weak_groups) {
    for (auto& u : g.units) u = new_index[u];
    std::sort(g.units.begin(), g.units.end());
  }
  std::stable_sort(s.weak_groups.begin(), s.weak_groups.end(),
                   [](const WeakGroup& x, const WeakGroup& y) { return x.units.front() < y.units.front(); });
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void add(std::vector<Violation>& out, std::string rule, std::vector<int> tokens, std::string message) {
  out.push_back({std::move(rule), std::move(tokens), std::move(message)});
}

std::string join_ints(const std::vector<int>& xs) {
  std::string s = "{";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(xs[i]);
  }
  return s + "}";
}

void check_sense(const LexicalUnit& u, const Inventory& inv, std::vector<Violation>& out) {
  const auto required = required_class(u.lexcat);
  const std::string where = std::string(lexcat_name(u.lexcat)) + " unit " + join_ints(u.tokens);
  if (!has_sense(u.sense)) {
    if (required && !supersense_optional(u.lexcat))
      add(out, "supersense-missing", u.tokens, where + " requires a " + std::string(class_name(*required)) + " supersense");
    return;
  }
  if (!required) {
    add(out, "supersense-forbidden", u.tokens, where + " cannot carry a supersense");
    return;
  }
  auto check_one = [&](const Supersense& ss) {
    if (ss.cls != *required)
      add(out, "supersense-class", u.tokens, where + " has " + std::string(class_name(ss.cls)) + " supersense " + ss.label);
    else if (!inv.contains(ss))
      add(out, "supersense-unknown", u.tokens, where + " has unknown supersense " + ss.label);
  };
  if (auto* one = std::get_if<Supersense>(&u.sense)) {
    check_one(*one);
  } else {
    const auto& pair = std::get<SupersensePair>(u.sense);
    if (*required != SupersenseClass::snacs) {
      add(out, "supersense-pair", u.tokens, where + " cannot carry a role/function pair");
      return;
    }
    check_one(pair.role);
    check_one(pair.function);
  }
}

}  // namespace

std::vector<Violation> validate_sentence(const Sentence& s, const Inventory& inv) {
  std::vector<Violation> out;
  const int n = static_cast<int>(s.tokens.size());

  for (int i = 0; i < n; ++i) {
    if (s.tokens[i].index != i + 1)
      add(out, "token-index", {i + 1}, "token at position " + std::to_string(i + 1) + " has index " + std::to_string(s.tokens[i].index));
    if (s.tokens[i].form.empty()) add(out, "empty-form", {i + 1}, "token " + std::to_string(i + 1) + " has an empty form");
  }

  std::vector<int> owner(n, -1);
  std::vector<bool> unit_ok(s.units.size(), true);
  for (std::size_t ui = 0; ui < s.units.size(); ++ui) {
    const auto& u = s.units[ui];
    if (u.tokens.empty()) {
      add(out, "unit-empty", {}, "unit " + std::to_string(ui) + " has no tokens");
      unit_ok[ui] = false;
      continue;
    }
    for (std::size_t k = 1; k < u.tokens.size(); ++k)
      if (u.tokens[k] <= u.tokens[k - 1]) {
        add(out, "unit-order", u.tokens, "unit " + join_ints(u.tokens) + " is not strictly increasing");
        unit_ok[ui] = false;
        break;
      }
    for (int t : u.tokens) {
      if (t < 1 || t > n) {
        add(out, "unit-range", u.tokens, "unit " + join_ints(u.tokens) + " refers to token " + std::to_string(t) + " outside 1.." + std::to_string(n));
        unit_ok[ui] = false;
        continue;
      }
      if (owner[t - 1] >= 0)
        add(out, "unit-overlap", {t}, "token " + std::to_string(t) + " belongs to units " + join_ints(s.units[owner[t - 1]].tokens) + " and " + join_ints(u.tokens));
      else
        owner[t - 1] = static_cast<int>(ui);
    }
    if (u.tokens.size() == 1 && requires_multiword(u.lexcat))
      add(out, "lexcat-arity", u.tokens, std::string(lexcat_name(u.lexcat)) + " is only legal on multiword units");
    if (u.tokens.size() > 1 && u.lexcat == Lexcat::V)
      add(out, "lexcat-arity", u.tokens, "multiword verbal unit " + join_ints(u.tokens) + " must use a V.* subtype");
    check_sense(u, inv, out);
  }
  for (int t = 1; t <= n; ++t)
    if (owner[t - 1] < 0) add(out, "coverage", {t}, "token " + std::to_string(t) + " belongs to no lexical unit");

  // Gap structure: units inside a gap are wholly inside it and gapless.
  for (std::size_t a = 0; a < s.units.size(); ++a) {
    if (!unit_ok[a] || !s.units[a].is_gappy()) continue;
    const auto& outer = s.units[a];
    for (std::size_t b = 0; b < s.units.size(); ++b) {
      if (b == a || !unit_ok[b]) continue;
      const auto& inner = s.units[b];
      std::size_t inside = 0;
      for (int t : inner.tokens)
        if (t > outer.first() && t < outer.last()) ++inside;
      if (inside == 0) continue;
      if (inside < inner.tokens.size())
        add(out, "gap-straddle", inner.tokens, "unit " + join_ints(inner.tokens) + " is partly inside the gap of " + join_ints(outer.tokens));
      else if (inner.is_gappy())
        add(out, "nested-gap", inner.tokens, "gappy unit " + join_ints(inner.tokens) + " lies inside the gap of " + join_ints(outer.tokens));
    }
  }

  std::vector<int> group_of_unit(s.units.size(), -1);
  for (std::size_t gi = 0; gi < s.weak_groups.size(); ++gi) {
    const auto& g = s.weak_groups[gi];
    if (g.units.size() < 2) add(out, "weak-group-size", {}, "weak group " + std::to_string(gi) + " has fewer than two units");
    for (auto u : g.units) {
      if (u >= s.units.size()) {
        add(out, "weak-group-ref", {}, "weak group " + std::to_string(gi) + " refers to missing unit " + std::to_string(u));
        continue;
      }
      if (group_of_unit[u] >= 0)
        add(out, "weak-group-overlap", s.units[u].tokens, "unit " + join_ints(s.units[u].tokens) + " belongs to more than one weak group");
      else
        group_of_unit[u] = static_cast<int>(gi);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// CONLLULEX reading

namespace {

constexpr std::size_t kConllulexColumns = 19;

enum Col : std::size_t {
  kId, kForm, kLemma, kUpos, kXpos, kFeats, kHead, kDeprel, kDeps, kMisc,
  kSmwe, kLexcat, kLexlemma, kSs, kSs2, kWmwe, kWcat, kWlemma, kLextag,
};

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

Lexcat lexcat_from_upos(std::string_view upos) {
  if (upos == "NOUN" || upos == "PROPN") return Lexcat::N;
  if (upos == "VERB") return Lexcat::V;
  if (upos == "ADP") return Lexcat::P;
  if (upos == "PART") return Lexcat::ADV;
  if (auto lc = parse_lexcat(upos); lc && !requires_multiword(*lc) && !required_class(*lc)) return *lc;
  return Lexcat::X;
}

struct RowRef {
  int token;
  int position;
  std::size_t line;
};

struct SentenceBuilder {
  SentenceBuilder(const ConllulexOptions& o, const Inventory& i) : options(o), inv(i) {}

  const ConllulexOptions& options;
  const Inventory& inv;
  Sentence s;
  std::size_t first_line = 0;
  bool any_row = false;

  struct MweRows {
    std::vector<RowRef> rows;
    std::vector<std::string> first_fields;  // annotation fields of position 1
    std::size_t first_line = 0;
  };
  std::map<int, MweRows> strong;
  std::map<int, MweRows> weak;
  std::vector<std::pair<int, std::string>> lextags;  // token, column value
  std::vector<std::tuple<int, std::vector<std::string>, std::size_t>> singles;

  [[noreturn]] void fail(std::size_t line, const std::string& rule, const std::string& detail) const {
    throw ParseError(s.sent_id, line, rule, detail);
  }

  void comment(std::string_view line, std::size_t line_no) {
    if (!any_row && s.comments.empty()) first_line = line_no;
    if (any_row) fail(line_no, "comment-position", "comment line inside token rows");
    s.comments.emplace_back(line);
    auto body = line.substr(1);
    if (!body.empty() && body.front() == ' ') body.remove_prefix(1);
    auto eq = body.find(" = ");
    if (eq == std::string_view::npos) return;
    std::string key(body.substr(0, eq));
    std::string value(body.substr(eq + 3));
    if (key == "sent_id") s.sent_id = value;
    else if (key == "text") s.text = value;
    else s.metadata[key] = value;
  }

  UnitSense parse_sense(Lexcat lc, std::string_view ss, std::string_view ss2, std::size_t line_no) const {
    if (ss == "_") {
      if (ss2 != "_") fail(line_no, "supersense-columns", "SS2 given without SS");
      return {};
    }
    auto cls = required_class(lc);
    if (!cls) fail(line_no, "supersense-forbidden", "lexcat " + std::string(lexcat_name(lc)) + " cannot carry supersense " + std::string(ss));
    auto role = inv.find(ss, *cls);
    if (!role) fail(line_no, "unknown-supersense", "'" + std::string(ss) + "' is not a " + std::string(class_name(*cls)) + " supersense");
    if (ss2 == "_") return canonical_sense(*role, inv);
    if (*cls != SupersenseClass::snacs) fail(line_no, "supersense-pair", "SS2 is only used with SNACS lexcats");
    auto function = inv.find(ss2, *cls);
    if (!function) fail(line_no, "unknown-supersense", "'" + std::string(ss2) + "' is not a snacs supersense");
    return SupersensePair{*role, *function};
  }

  static std::pair<int, int> group_position(std::string_view v, const SentenceBuilder& b, std::size_t line_no) {
    auto colon = v.find(':');
    int g = 0, p = 0;
    if (colon == std::string_view::npos ||
        std::from_chars(v.data(), v.data() + colon, g).ec != std::errc{} ||
        std::from_chars(v.data() + colon + 1, v.data() + v.size(), p).ec != std::errc{} || g < 1 || p < 1)
      b.fail(line_no, "mwe-column", "expected `group:position`, got '" + std::string(v) + "'");
    return {g, p};
  }

  void row(std::string_view line, std::size_t line_no) {
    if (!any_row && s.comments.empty()) first_line = line_no;
    any_row = true;
    auto cols = split_view(line, '\t');
    const bool full = cols.size() == kConllulexColumns;
    if (options.annotations ? !full : !(full || cols.size() == 10))
      fail(line_no, "column-count", "expected " + std::to_string(kConllulexColumns) + " columns, got " + std::to_string(cols.size()));
    if (!all_digits(cols[kId])) {
      s.extra_rows.push_back({static_cast<int>(s.tokens.size()), std::string(line)});
      return;
    }
    Token tok;
    tok.index = std::stoi(std::string(cols[kId]));
    if (tok.index != static_cast<int>(s.tokens.size()) + 1)
      fail(line_no, "token-index", "token id " + std::to_string(tok.index) + " out of sequence");
    tok.form = cols[kForm];
    tok.lemma = cols[kLemma];
    tok.upos = cols[kUpos];
    tok.xpos = cols[kXpos];
    tok.feats = cols[kFeats];
    tok.head = cols[kHead];
    tok.deprel = cols[kDeprel];
    tok.deps = cols[kDeps];
    tok.misc = cols[kMisc];
    if (tok.form.empty()) fail(line_no, "empty-form", "token " + std::to_string(tok.index) + " has an empty form");
    s.tokens.push_back(tok);
    if (!options.annotations) return;

    std::vector<std::string> ann(cols.begin() + kSmwe, cols.end());
    if (cols[kSmwe] == "_") {
      singles.emplace_back(tok.index, ann, line_no);
    } else {
      auto [g, p] = group_position(cols[kSmwe], *this, line_no);
      auto& m = strong[g];
      m.rows.push_back({tok.index, p, line_no});
      if (p == 1) {
        m.first_fields = ann;
        m.first_line = line_no;
      } else if (cols[kLexcat] != "_" || cols[kLexlemma] != "_" || cols[kSs] != "_" || cols[kSs2] != "_") {
        fail(line_no, "mwe-continuation", "non-initial token of a strong MWE must leave LEXCAT/LEXLEMMA/SS/SS2 empty");
      }
    }
    if (cols[kWmwe] != "_") {
      auto [g, p] = group_position(cols[kWmwe], *this, line_no);
      auto& m = weak[g];
      m.rows.push_back({tok.index, p, line_no});
      if (p == 1) {
        m.first_fields = ann;
        m.first_line = line_no;
      }
    } else if (cols[kWcat] != "_" || cols[kWlemma] != "_") {
      fail(line_no, "weak-columns", "WCAT/WLEMMA given for a token outside any weak MWE");
    }
    lextags.emplace_back(tok.index, std::string(cols[kLextag]));
  }

  LexicalUnit make_unit(std::vector<int> tokens, const std::vector<std::string>& ann, std::size_t line_no) const {
    LexicalUnit u;
    u.tokens = std::move(tokens);
    const auto& lexcat = ann[kLexcat - kSmwe];
    if (lexcat == "_") {
      if (u.tokens.size() > 1) fail(line_no, "lexcat-missing", "strong MWE has no lexcat on its first token");
      u.lexcat = lexcat_from_upos(s.tokens[u.tokens.front() - 1].upos);
    } else {
      auto lc = parse_lexcat(lexcat);
      if (!lc) fail(line_no, "unknown-lexcat", "unknown lexcat '" + lexcat + "'");
      u.lexcat = *lc;
    }
    u.sense = parse_sense(u.lexcat, ann[kSs - kSmwe], ann[kSs2 - kSmwe], line_no);
    const auto& lexlemma = ann[kLexlemma - kSmwe];
    if (lexlemma != "_") u.lexlemma = lexlemma;
    return u;
  }

  Sentence finish(std::size_t end_line) {
    if (!any_row) fail(first_line, "empty-sentence", "sentence block without token rows");
    if (!options.annotations) return std::move(s);

    for (auto& [tok, ann, line_no] : singles) s.units.push_back(make_unit({tok}, ann, line_no));
    for (auto& [g, m] : strong) {
      std::sort(m.rows.begin(), m.rows.end(), [](auto& x, auto& y) { return x.token < y.token; });
      std::vector<int> toks;
      for (std::size_t k = 0; k < m.rows.size(); ++k) {
        if (m.rows[k].position != static_cast<int>(k) + 1)
          fail(m.rows[k].line, "mwe-position", "strong MWE " + std::to_string(g) + " positions are not 1..n in token order");
        toks.push_back(m.rows[k].token);
      }
      if (toks.size() < 2) fail(m.rows.front().line, "mwe-size", "strong MWE " + std::to_string(g) + " has a single token");
      s.units.push_back(make_unit(std::move(toks), m.first_fields, m.first_line));
    }
    normalize_unit_order(s);

    const auto owner = s.unit_of_token();
    for (auto& [g, m] : weak) {
      std::sort(m.rows.begin(), m.rows.end(), [](auto& x, auto& y) { return x.token < y.token; });
      std::vector<int> toks;
      for (std::size_t k = 0; k < m.rows.size(); ++k) {
        if (m.rows[k].position != static_cast<int>(k) + 1)
          fail(m.rows[k].line, "mwe-position", "weak MWE " + std::to_string(g) + " positions are not 1..n in token order");
        toks.push_back(m.rows[k].token);
      }
      WeakGroup wg;
      std::set<std::size_t> members;
      for (int t : toks) members.insert(static_cast<std::size_t>(owner[t - 1]));
      wg.units.assign(members.begin(), members.end());
      if (s.weak_group_tokens(wg) != toks)
        fail(m.rows.front().line, "weak-group-partial-unit", "weak MWE " + std::to_string(g) + " does not consist of whole lexical units");
      if (wg.units.size() < 2)
        fail(m.rows.front().line, "weak-group-size", "weak MWE " + std::to_string(g) + " covers a single lexical unit");
      const auto& f = m.first_fields;
      if (f[kWcat - kSmwe] != "_") wg.category = f[kWcat - kSmwe];
      if (f[kWlemma - kSmwe] != "_") wg.lemma = f[kWlemma - kSmwe];
      s.weak_groups.push_back(std::move(wg));
    }
    normalize_unit_order(s);

    if (options.validate) {
      auto violations = validate_sentence(s, inv);
      if (!violations.empty())
        fail(first_line, violations.front().rule, violations.front().message);
    }

    // LEXTAG must agree with the structure columns when present.
    if (std::any_of(lextags.begin(), lextags.end(), [](auto& p) { return p.second != "_"; })) {
      std::vector<std::size_t> dropped;
      const auto tags = encode(s, &dropped);
      std::vector<std::string> expected(tags.size());
      for (std::size_t i = 0; i < tags.size(); ++i) expected[i] = format_tag(tags[i]);
      for (const auto& g : s.weak_groups) {
        if (g.category.empty()) continue;
        expected[s.weak_group_tokens(g).front() - 1] += "+" + g.category;
      }
      for (auto& [tok, value] : lextags) {
        if (value == "_") continue;
        if (value != expected[tok - 1]) {
          // Tolerate a case-variant supersense spelling.
          if (ascii_lower(value) == ascii_lower(expected[tok - 1])) continue;
          fail(end_line, "lextag-mismatch", "token " + std::to_string(tok) + " LEXTAG '" + value + "' disagrees with the annotation ('" + expected[tok - 1] + "')");
        }
      }
    }
    return std::move(s);
  }
};

}  // namespace

std::vector<Sentence> parse_conllulex(std::istream& in, const ConllulexOptions& options, const Inventory& inv) {
  std::vector<Sentence> out;
  std::optional<SentenceBuilder> current;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (current) out.push_back(current->finish(line_no));
      current.reset();
      continue;
    }
    if (!current) current.emplace(options, inv);
    if (line.front() == '#') current->comment(line, line_no);
    else current->row(line, line_no);
  }
  if (current) out.push_back(current->finish(line_no));
  return out;
}

std::vector<Sentence> parse_conllulex(std::string_view text, const ConllulexOptions& options, const Inventory& inv) {
  std::istringstream in{std::string(text)};
  return parse_conllulex(in, options, inv);
}

std::vector<Sentence> read_conllulex_file(const std::string& path, const ConllulexOptions& options, const Inventory& inv) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return parse_conllulex(in, options, inv);
}

// ---------------------------------------------------------------------------
// CONLLULEX writing

namespace {

std::string joined_lemmas(const Sentence& s, const std::vector<int>& toks) {
  std::string out;
  for (int t : toks) {
    if (!out.empty()) out += ' ';
    out += s.tokens[t - 1].lemma;
  }
  return out;
}

std::string or_blank(const std::string& s) { return s.empty() ? "_" : s; }

void write_sentence(std::ostream& out, const Sentence& s) {
  if (!s.comments.empty()) {
    for (const auto& c : s.comments) out << c << '\n';
  } else {
    if (!s.sent_id.empty()) out << "# sent_id = " << s.sent_id << '\n';
    if (!s.text.empty()) out << "# text = " << s.text << '\n';
  }

  const std::size_t n = s.tokens.size();
  std::vector<std::array<std::string, 9>> ann(n);
  for (auto& a : ann) a.fill("_");

  if (!s.units.empty()) {
    // Strong and weak MWEs share one numbering, ordered by first token with
    // strong before weak on ties.
    std::vector<std::tuple<int, int, std::size_t>> mwes;
    for (std::size_t u = 0; u < s.units.size(); ++u)
      if (s.units[u].is_multiword()) mwes.emplace_back(s.units[u].first(), 0, u);
    for (std::size_t g = 0; g < s.weak_groups.size(); ++g)
      mwes.emplace_back(s.weak_group_tokens(s.weak_groups[g]).front(), 1, g);
    std::sort(mwes.begin(), mwes.end());

    for (std::size_t k = 0; k < mwes.size(); ++k) {
      const auto num = std::to_string(k + 1);
      const auto [first, weak, idx] = mwes[k];
      if (!weak) {
        const auto& u = s.units[idx];
        for (std::size_t p = 0; p < u.tokens.size(); ++p) ann[u.tokens[p] - 1][0] = num + ":" + std::to_string(p + 1);
      } else {
        const auto& g = s.weak_groups[idx];
        const auto toks = s.weak_group_tokens(g);
        for (std::size_t p = 0; p < toks.size(); ++p) ann[toks[p] - 1][5] = num + ":" + std::to_string(p + 1);
        ann[toks.front() - 1][6] = or_blank(g.category);
        ann[toks.front() - 1][7] = g.lemma.empty() ? joined_lemmas(s, toks) : g.lemma;
      }
    }
    for (const auto& u : s.units) {
      auto& a = ann[u.first() - 1];
      a[1] = std::string(lexcat_name(u.lexcat));
      a[2] = u.lexlemma.empty() ? joined_lemmas(s, u.tokens) : u.lexlemma;
      if (auto* one = std::get_if<Supersense>(&u.sense)) {
        a[3] = one->label;
      } else if (auto* pair = std::get_if<SupersensePair>(&u.sense)) {
        a[3] = pair->role.label;
        a[4] = pair->function.label;
      }
    }
    const auto tags = encode(s);
    for (std::size_t i = 0; i < n; ++i) ann[i][8] = format_tag(tags[i]);
    for (const auto& g : s.weak_groups)
      if (!g.category.empty()) ann[s.weak_group_tokens(g).front() - 1][8] += "+" + g.category;
  }

  auto emit_extra = [&](int after) {
    for (const auto& r : s.extra_rows)
      if (r.after_token == after) out << r.line << '\n';
  };
  emit_extra(0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = s.tokens[i];
    out << t.index << '\t' << t.form << '\t' << t.lemma << '\t' << t.upos << '\t' << t.xpos << '\t' << t.feats << '\t'
        << t.head << '\t' << t.deprel << '\t' << t.deps << '\t' << t.misc;
    for (const auto& f : ann[i]) out << '\t' << f;
    out << '\n';
    emit_extra(static_cast<int>(i) + 1);
  }
  out << '\n';
}

}  // namespace

void write_conllulex(std::ostream& out, std::span<const Sentence> sentences) {
  for (const auto& s : sentences) write_sentence(out, s);
}

std::string write_conllulex(std::span<const Sentence> sentences) {
  std::ostringstream out;
  write_conllulex(out, sentences);
  return out.str();
}

}  // namespace lsr
