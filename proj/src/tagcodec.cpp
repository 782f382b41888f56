#include "lsr/tagcodec.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "lsr/error.h"

namespace lsr {

namespace {

constexpr std::array<std::string_view, kFlagCount> kFlagNames = {"O", "o", "B", "b", "I_", "i_", "I~", "i~"};

bool is_strong_continuation(MweFlag f) { return f == MweFlag::I_ || f == MweFlag::i_; }
bool is_upper_continuation(MweFlag f) { return f == MweFlag::I_ || f == MweFlag::I_weak; }
bool is_lower_continuation(MweFlag f) { return f == MweFlag::i_ || f == MweFlag::i_weak; }

}  // namespace

std::string_view flag_name(MweFlag f) { return kFlagNames[static_cast<std::size_t>(f)]; }

std::optional<MweFlag> parse_flag(std::string_view s) {
  for (std::size_t i = 0; i < kFlagCount; ++i)
    if (kFlagNames[i] == s) return static_cast<MweFlag>(i);
  return std::nullopt;
}

bool is_gap_flag(MweFlag f) {
  return f == MweFlag::o || f == MweFlag::b || f == MweFlag::i_ || f == MweFlag::i_weak;
}

bool carries_label(MweFlag f) { return !is_strong_continuation(f); }

std::string format_tag(const LexTag& tag) {
  std::string out(flag_name(tag.flag));
  if (tag.lexcat) {
    out += kTagPartSeparator;
    out += lexcat_name(*tag.lexcat);
    if (has_sense(tag.sense)) {
      out += kTagPartSeparator;
      out += format_sense(tag.sense, kSensePairDelimiter);
    }
  }
  return out;
}

LexTag parse_tag(std::string_view text, const Inventory& inv) {
  auto bad = [&](const std::string& why) -> ParseError {
    return ParseError("", 0, "tag-syntax", "'" + std::string(text) + "': " + why);
  };
  LexTag tag;
  auto p1 = text.find(kTagPartSeparator);
  auto flag = parse_flag(text.substr(0, p1));
  if (!flag) throw bad("unknown MWE flag");
  tag.flag = *flag;
  if (p1 == std::string_view::npos) return tag;
  if (!carries_label(tag.flag)) throw bad("strong continuation tags carry no label");

  auto rest = text.substr(p1 + 1);
  auto p2 = rest.find(kTagPartSeparator);
  auto lexcat = parse_lexcat(rest.substr(0, p2));
  if (!lexcat) throw bad("unknown lexcat");
  tag.lexcat = *lexcat;
  if (p2 == std::string_view::npos) return tag;

  auto sense = rest.substr(p2 + 1);
  auto cls = required_class(*lexcat);
  if (!cls) throw bad("lexcat takes no supersense");
  auto bar = sense.find(kSensePairDelimiter);
  auto role = inv.find(sense.substr(0, bar), *cls);
  if (!role) throw bad("unknown supersense");
  if (bar == std::string_view::npos) {
    tag.sense = canonical_sense(*role, inv);
    return tag;
  }
  if (*cls != SupersenseClass::snacs) throw bad("only snacs supersenses form pairs");
  auto function = inv.find(sense.substr(bar + 1), *cls);
  if (!function) throw bad("unknown supersense");
  tag.sense = SupersensePair{*role, *function};
  return tag;
}

bool is_valid_transition(std::optional<MweFlag> prev, std::optional<MweFlag> next) {
  using F = MweFlag;
  if (!prev) return !next || *next == F::O || *next == F::B;
  switch (*prev) {
    case F::O:
      return !next || *next == F::O || *next == F::B;
    case F::B:
      return next && (*next == F::I_ || *next == F::I_weak || *next == F::o || *next == F::b);
    case F::I_:
    case F::I_weak:
      return !next || !is_lower_continuation(*next);
    case F::o:
      return next && (*next == F::o || *next == F::b || is_upper_continuation(*next));
    case F::b:
      return next && is_lower_continuation(*next);
    case F::i_:
    case F::i_weak:
      return next && *next != F::O && *next != F::B;
  }
  return false;
}

std::optional<std::size_t> first_invalid_position(std::span<const MweFlag> flags) {
  std::optional<MweFlag> prev;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (!is_valid_transition(prev, flags[i])) return i;
    prev = flags[i];
  }
  if (!flags.empty() && !is_valid_transition(prev, std::nullopt)) return flags.size();
  return std::nullopt;
}

bool is_valid_sequence(std::span<const MweFlag> flags) { return !first_invalid_position(flags); }

bool is_valid_sequence(std::span<const LexTag> tags) {
  auto flags = flags_of(tags);
  return is_valid_sequence(std::span<const MweFlag>(flags));
}

std::vector<MweFlag> flags_of(std::span<const LexTag> tags) {
  std::vector<MweFlag> out;
  out.reserve(tags.size());
  for (const auto& t : tags) out.push_back(t.flag);
  return out;
}

std::vector<MweLink> mwe_links(std::span<const MweFlag> flags) {
  if (auto bad = first_invalid_position(flags))
    throw DecodeError(*bad, *bad == flags.size() ? "sequence cannot end here"
                                                 : "flag " + std::string(flag_name(flags[*bad])) + " cannot follow " +
                                                       (*bad ? std::string(flag_name(flags[*bad - 1])) : "the start"));
  std::vector<MweLink> links;
  int last_upper = 0, last_lower = 0;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    const int tok = static_cast<int>(i) + 1;
    const auto f = flags[i];
    if (is_upper_continuation(f)) {
      links.push_back({last_upper, tok, f == MweFlag::I_});
      last_upper = tok;
    } else if (f == MweFlag::B) {
      last_upper = tok;
    } else if (is_lower_continuation(f)) {
      links.push_back({last_lower, tok, f == MweFlag::i_});
      last_lower = tok;
    } else if (f == MweFlag::b) {
      last_lower = tok;
    }
  }
  return links;
}

// ---------------------------------------------------------------------------
// Encoding

std::vector<LexTag> encode(const Sentence& s, std::vector<std::size_t>* dropped_weak_groups) {
  const int n = static_cast<int>(s.tokens.size());
  struct Parent {
    int token = 0;
    bool strong = true;
  };
  std::vector<std::optional<Parent>> parent(n + 1);
  std::vector<bool> in_gap(n + 1, false);

  for (const auto& u : s.units) {
    for (std::size_t k = 1; k < u.tokens.size(); ++k) {
      const int i = u.tokens[k - 1], j = u.tokens[k];
      parent[j] = Parent{i, true};
      for (int h = i + 1; h < j; ++h) in_gap[h] = true;
    }
  }

  std::vector<std::size_t> order(s.weak_groups.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<int>> group_tokens(s.weak_groups.size());
  for (std::size_t g = 0; g < s.weak_groups.size(); ++g) group_tokens[g] = s.weak_group_tokens(s.weak_groups[g]);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return group_tokens[a].front() < group_tokens[b].front(); });

  for (auto g : order) {
    const auto& toks = group_tokens[g];
    const auto inside = std::count_if(toks.begin(), toks.end(), [&](int t) { return in_gap[t]; });
    bool skip = inside > 0 && inside < static_cast<std::ptrdiff_t>(toks.size());
    for (std::size_t k = 1; k < toks.size() && !skip; ++k)
      if (toks[k] > toks[k - 1] + 1 && in_gap[toks[k - 1]]) skip = true;
    if (skip) {
      if (dropped_weak_groups) dropped_weak_groups->push_back(g);
      continue;
    }
    for (std::size_t k = 1; k < toks.size(); ++k) {
      const int i = toks[k - 1], j = toks[k];
      if (!parent[j]) parent[j] = Parent{i, false};
      else if (parent[j]->token != i) throw InternalError("weak group links conflict with a strong unit");
      for (int h = i + 1; h < j; ++h) in_gap[h] = true;
    }
  }

  std::vector<bool> is_parent(n + 1, false);
  for (int j = 1; j <= n; ++j)
    if (parent[j]) is_parent[parent[j]->token] = true;

  const auto owner = s.unit_of_token();
  std::vector<LexTag> tags(n);
  for (int t = 1; t <= n; ++t) {
    auto& tag = tags[t - 1];
    const bool gap = in_gap[t];
    if (!parent[t]) tag.flag = is_parent[t] ? (gap ? MweFlag::b : MweFlag::B) : (gap ? MweFlag::o : MweFlag::O);
    else if (parent[t]->strong) tag.flag = gap ? MweFlag::i_ : MweFlag::I_;
    else tag.flag = gap ? MweFlag::i_weak : MweFlag::I_weak;

    const int u = owner[t - 1];
    if (u >= 0 && s.units[u].first() == t) {
      tag.lexcat = s.units[u].lexcat;
      tag.sense = canonical_sense(s.units[u].sense);
    }
  }
  if (auto bad = first_invalid_position(std::span<const MweFlag>(flags_of(tags))))
    throw InternalError("encoding produced an invalid sequence at position " + std::to_string(*bad) +
                        (s.sent_id.empty() ? "" : " in " + s.sent_id));
  return tags;
}

// ---------------------------------------------------------------------------
// Decoding

namespace {

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void join(int a, int b) {
    a = find(a), b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

DecodedStructure decode(std::span<const LexTag> tags) {
  const auto flags = flags_of(tags);
  const auto links = mwe_links(flags);
  const int n = static_cast<int>(tags.size());

  DisjointSets strong(n + 1), all(n + 1);
  for (const auto& l : links) {
    if (l.strong) strong.join(l.from, l.to);
    all.join(l.from, l.to);
  }

  DecodedStructure out;
  std::map<int, std::size_t> unit_of_root;
  for (int t = 1; t <= n; ++t) {
    const int root = strong.find(t);
    auto [it, fresh] = unit_of_root.emplace(root, out.units.size());
    const auto& tag = tags[t - 1];
    if (fresh) {
      LexicalUnit u;
      u.lexcat = tag.lexcat.value_or(Lexcat::X);
      u.sense = tag.sense;
      out.units.push_back(std::move(u));
    } else if (tag.lexcat || has_sense(tag.sense)) {
      throw DecodeError(static_cast<std::size_t>(t - 1), "strong continuation carries a label");
    }
    out.units[it->second].tokens.push_back(t);
  }

  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t u = 0; u < out.units.size(); ++u) members[all.find(out.units[u].first())].push_back(u);
  for (auto& [root, units] : members)
    if (units.size() > 1) out.weak_groups.push_back(WeakGroup{std::move(units), {}, {}});
  return out;
}

void apply_structure(Sentence& s, DecodedStructure structure) {
  s.units = std::move(structure.units);
  s.weak_groups = std::move(structure.weak_groups);
  normalize_unit_order(s);
}

// ---------------------------------------------------------------------------
// Tag sets

TagSet::TagSet(std::vector<LexTag> tags) {
  std::map<std::string, LexTag> sorted;
  for (auto& t : tags) sorted.emplace(format_tag(t), std::move(t));
  for (auto& [name, tag] : sorted) {
    index_.emplace(name, tags_.size());
    names_.push_back(name);
    tags_.push_back(std::move(tag));
  }
}

TagSet TagSet::from_sequences(std::span<const std::vector<LexTag>> sequences) {
  std::vector<LexTag> all;
  for (const auto& seq : sequences) all.insert(all.end(), seq.begin(), seq.end());
  return TagSet(std::move(all));
}

TagSet TagSet::from_strings(std::span<const std::string> tags, const Inventory& inv) {
  std::vector<LexTag> parsed;
  parsed.reserve(tags.size());
  for (const auto& t : tags) parsed.push_back(parse_tag(t, inv));
  return TagSet(std::move(parsed));
}

std::optional<std::size_t> TagSet::index_of(const LexTag& tag) const { return index_of(format_tag(tag)); }

std::optional<std::size_t> TagSet::index_of(std::string_view formatted) const {
  auto it = index_.find(std::string(formatted));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> TagSet::backoff(const LexTag& tag) const {
  if (auto exact = index_of(tag)) return exact;
  if (tag.lexcat)
    if (auto bare = index_of(LexTag{tag.flag, tag.lexcat, {}})) return bare;
  for (std::size_t i = 0; i < tags_.size(); ++i)
    if (tags_[i].flag == tag.flag && tags_[i].lexcat == tag.lexcat) return i;
  for (std::size_t i = 0; i < tags_.size(); ++i)
    if (tags_[i].flag == tag.flag) return i;
  return std::nullopt;
}

}  // namespace lsr
