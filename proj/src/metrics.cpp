#include "lsr/metrics.h"

#include <algorithm>
#include <charconv>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "lsr/error.h"
#include "lsr/text.h"

namespace lsr {

// ---------------------------------------------------------------------------
// Counts

namespace {

double ratio(double numer, double denom, double other_side) {
  if (denom == 0.0) return other_side == 0.0 ? 1.0 : 0.0;
  return numer / denom;
}

}  // namespace

double Prf::precision() const { return ratio(matched_pred, predicted, gold); }
double Prf::recall() const { return ratio(matched_gold, gold, predicted); }

double Prf::f1() const {
  double p = precision(), r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

Prf& Prf::operator+=(const Prf& o) {
  matched_pred += o.matched_pred;
  predicted += o.predicted;
  matched_gold += o.matched_gold;
  gold += o.gold;
  return *this;
}

Prf average(const Prf& a, const Prf& b) {
  return {(a.matched_pred + b.matched_pred) / 2.0, (a.predicted + b.predicted) / 2.0,
          (a.matched_gold + b.matched_gold) / 2.0, (a.gold + b.gold) / 2.0};
}

Prf set_prf(std::size_t matched, std::size_t predicted, std::size_t gold) {
  auto m = static_cast<double>(matched);
  return {m, static_cast<double>(predicted), m, static_cast<double>(gold)};
}

namespace {

template <typename T>
Prf compare_sets(const std::set<T>& gold, const std::set<T>& pred) {
  std::size_t matched = 0;
  for (const auto& x : pred) matched += gold.count(x);
  return set_prf(matched, pred.size(), gold.size());
}

template <typename T>
void check_same_size(std::span<const T> gold, std::span<const T> pred) {
  if (gold.size() != pred.size())
    throw Error("gold has " + std::to_string(gold.size()) + " sentences, prediction has " +
                std::to_string(pred.size()));
}

}  // namespace

// ---------------------------------------------------------------------------
// Tag accuracy

LexTag project_tag(const LexTag& tag, TagMode mode) {
  LexTag out = tag;
  if (mode == TagMode::drop_lexcat || mode == TagMode::drop_both) out.lexcat.reset();
  if (mode == TagMode::drop_supersense || mode == TagMode::drop_both) out.sense = std::monostate{};
  return out;
}

Accuracy tag_accuracy(std::span<const LexTag> gold, std::span<const LexTag> pred, TagMode mode) {
  if (gold.size() != pred.size())
    throw Error("tag sequences differ in length: " + std::to_string(gold.size()) + " vs " +
                std::to_string(pred.size()));
  Accuracy acc;
  acc.total = static_cast<double>(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i)
    if (project_tag(gold[i], mode) == project_tag(pred[i], mode)) acc.correct += 1.0;
  return acc;
}

Accuracy tag_accuracy(std::span<const Sentence> gold, std::span<const Sentence> pred, TagMode mode) {
  check_same_size(gold, pred);
  Accuracy acc;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    auto g = encode(gold[i]);
    auto p = encode(pred[i]);
    acc += tag_accuracy(g, p, mode);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Labeled units

namespace {

bool in_class(std::string_view label, UnitClass cls) {
  switch (cls) {
    case UnitClass::all: return true;
    case UnitClass::noun: return starts_with(label, "n.");
    case UnitClass::verb: return starts_with(label, "v.");
    case UnitClass::snacs: return starts_with(label, "p.");
  }
  return false;
}

constexpr std::string_view kUnassignable = "??";

struct UnitLabel {
  std::string role;
  std::string function;
};

using UnitMap = std::map<std::vector<int>, UnitLabel>;

UnitMap select_units(const Sentence& s, UnitClass cls, bool keep_unassignable) {
  UnitMap out;
  for (const auto& u : s.units) {
    std::string role(role_label(u.sense));
    bool keep = in_class(role, cls) || (keep_unassignable && role == kUnassignable);
    if (keep) out[u.tokens] = {role, std::string(function_label(u.sense))};
  }
  return out;
}

template <typename Key>
Prf compare_units(const UnitMap& gold, const UnitMap& pred, Key key) {
  std::set<decltype(key(gold.begin()->first, gold.begin()->second))> g, p;
  for (const auto& [span, label] : gold) g.insert(key(span, label));
  for (const auto& [span, label] : pred) p.insert(key(span, label));
  return compare_sets(g, p);
}

}  // namespace

Prf unit_labeled_prf(const Sentence& gold, const Sentence& pred, UnitClass cls, LabelMode mode) {
  auto g = select_units(gold, cls, cls != UnitClass::all);
  auto p = select_units(pred, cls, cls != UnitClass::all);
  auto span_only = [](const std::vector<int>& span, const UnitLabel&) { return span; };

  if (cls == UnitClass::all && mode == LabelMode::id) return compare_units(g, p, span_only);

  // Either side may mark a span unassignable; dropping it from both keeps
  // the scores symmetric.
  std::set<std::vector<int>> unassignable;
  for (const auto* m : {&g, &p})
    for (const auto& [span, label] : *m)
      if (label.role == kUnassignable) unassignable.insert(span);
  for (const auto& span : unassignable) {
    g.erase(span);
    p.erase(span);
  }

  switch (mode) {
    case LabelMode::id: return compare_units(g, p, span_only);
    case LabelMode::full:
      return compare_units(g, p, [](const std::vector<int>& span, const UnitLabel& l) {
        return std::make_tuple(span, l.role, l.function);
      });
    case LabelMode::role:
      return compare_units(g, p, [](const std::vector<int>& span, const UnitLabel& l) {
        return std::make_pair(span, l.role);
      });
    case LabelMode::function:
      return compare_units(g, p, [](const std::vector<int>& span, const UnitLabel& l) {
        return std::make_pair(span, l.function);
      });
  }
  return {};
}

Prf unit_labeled_prf(std::span<const Sentence> gold, std::span<const Sentence> pred, UnitClass cls, LabelMode mode) {
  check_same_size(gold, pred);
  Prf total;
  for (std::size_t i = 0; i < gold.size(); ++i) total += unit_labeled_prf(gold[i], pred[i], cls, mode);
  return total;
}

// ---------------------------------------------------------------------------
// Links

namespace {

using Link = std::pair<int, int>;

// Group id per token (1-based tokens; index 0 unused).
std::vector<int> components(std::span<const Link> links, std::size_t tokens) {
  std::vector<int> root(tokens + 1);
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](int x) {
    while (root[x] != x) x = root[x] = root[root[x]];
    return x;
  };
  for (auto [a, b] : links) {
    int ra = find(a), rb = find(b);
    if (ra != rb) root[std::max(ra, rb)] = std::min(ra, rb);
  }
  for (std::size_t t = 0; t <= tokens; ++t) root[t] = find(static_cast<int>(t));
  return root;
}

Prf link_prf(std::span<const Link> gold, std::span<const Link> pred, std::size_t tokens) {
  auto gold_group = components(gold, tokens);
  auto pred_group = components(pred, tokens);
  Prf c;
  for (auto [a, b] : pred)
    if (gold_group[a] == gold_group[b]) c.matched_pred += 1.0;
  for (auto [a, b] : gold)
    if (pred_group[a] == pred_group[b]) c.matched_gold += 1.0;
  c.predicted = static_cast<double>(pred.size());
  c.gold = static_cast<double>(gold.size());
  return c;
}

std::vector<Link> links_of(const Sentence& s, bool include_weak) {
  auto tags = encode(s);
  std::vector<Link> out;
  for (const auto& l : mwe_links(flags_of(tags)))
    if (l.strong || include_weak) out.emplace_back(l.from, l.to);
  return out;
}

std::vector<Link> chain_links(std::span<const std::vector<int>> groups) {
  std::vector<Link> out;
  for (const auto& g : groups) {
    auto sorted = g;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 1; k < sorted.size(); ++k) out.emplace_back(sorted[k - 1], sorted[k]);
  }
  return out;
}

void check_tokens(std::span<const Link> links, std::size_t tokens) {
  for (auto [a, b] : links)
    if (a < 1 || b < 1 || static_cast<std::size_t>(std::max(a, b)) > tokens)
      throw Error("group token out of range: " + std::to_string(std::max(a, b)));
}

}  // namespace

Prf group_link_prf(std::span<const std::vector<int>> gold_groups, std::span<const std::vector<int>> pred_groups,
                   std::size_t tokens) {
  auto g = chain_links(gold_groups);
  auto p = chain_links(pred_groups);
  check_tokens(g, tokens);
  check_tokens(p, tokens);
  return link_prf(g, p, tokens);
}

Prf mwe_link_prf(const Sentence& gold, const Sentence& pred, WeakHandling weak) {
  if (gold.tokens.size() != pred.tokens.size())
    throw Error("sentence " + gold.sent_id + ": token counts differ");
  auto n = gold.tokens.size();
  auto score = [&](bool include_weak) { return link_prf(links_of(gold, include_weak), links_of(pred, include_weak), n); };
  switch (weak) {
    case WeakHandling::strong_only: return score(false);
    case WeakHandling::strong_plus_weak: return score(true);
    case WeakHandling::average: return average(score(true), score(false));
  }
  return {};
}

Prf mwe_link_prf(std::span<const Sentence> gold, std::span<const Sentence> pred, WeakHandling weak) {
  check_same_size(gold, pred);
  if (weak == WeakHandling::average)
    return average(mwe_link_prf(gold, pred, WeakHandling::strong_plus_weak),
                   mwe_link_prf(gold, pred, WeakHandling::strong_only));
  Prf total;
  for (std::size_t i = 0; i < gold.size(); ++i) total += mwe_link_prf(gold[i], pred[i], weak);
  return total;
}

// ---------------------------------------------------------------------------
// PARSEME

double max_weight_matching(std::span<const double> weights, std::size_t rows, std::size_t cols) {
  if (weights.size() != rows * cols) throw Error("weight matrix has the wrong size");
  std::size_t n = std::max(rows, cols);
  if (n == 0) return 0.0;
  double top = 0.0;
  for (double w : weights) top = std::max(top, w);
  // Minimum-cost assignment on the padded square matrix, cost = top - weight.
  auto cost = [&](std::size_t i, std::size_t j) {
    double w = (i < rows && j < cols) ? weights[i * cols + j] : 0.0;
    return top - w;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);  // match[j] = row assigned to column j (1-based)
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      std::size_t i0 = match[j0], j1 = 0;
      double delta = inf;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double total = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    std::size_t i = match[j] - 1;
    if (i < rows && j - 1 < cols) total += weights[i * cols + (j - 1)];
  }
  return total;
}

Prf parseme_prf(std::span<const std::vector<int>> gold, std::span<const std::vector<int>> pred, ParsemeMode mode) {
  auto normalized = [](std::span<const std::vector<int>> sets) {
    std::vector<std::vector<int>> out(sets.begin(), sets.end());
    for (auto& s : out) {
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  auto g = normalized(gold);
  auto p = normalized(pred);

  if (mode == ParsemeMode::mwe_based) {
    std::vector<std::vector<int>> common;
    std::set_intersection(g.begin(), g.end(), p.begin(), p.end(), std::back_inserter(common));
    return set_prf(common.size(), p.size(), g.size());
  }

  std::vector<double> weights(g.size() * p.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < p.size(); ++j) {
      std::vector<int> shared;
      std::set_intersection(g[i].begin(), g[i].end(), p[j].begin(), p[j].end(), std::back_inserter(shared));
      weights[i * p.size() + j] = static_cast<double>(shared.size());
    }
  }
  double matched = max_weight_matching(weights, g.size(), p.size());
  auto tokens = [](const std::vector<std::vector<int>>& sets) {
    double n = 0.0;
    for (const auto& s : sets) n += static_cast<double>(s.size());
    return n;
  };
  return {matched, tokens(p), matched, tokens(g)};
}

Prf parseme_prf(std::span<const ParsemeSentence> gold, std::span<const ParsemeSentence> pred, ParsemeMode mode) {
  check_same_size(gold, pred);
  auto sets = [](const ParsemeSentence& s) {
    std::vector<std::vector<int>> out;
    for (const auto& v : s.vmwes) out.push_back(v.tokens);
    return out;
  };
  Prf total;
  for (std::size_t i = 0; i < gold.size(); ++i) total += parseme_prf(sets(gold[i]), sets(pred[i]), mode);
  return total;
}

// ---------------------------------------------------------------------------
// DiMSUM

DimsumScores dimsum_prf(const DimsumSentence& gold, const DimsumSentence& pred) {
  if (gold.tokens.size() != pred.tokens.size())
    throw Error("sentence " + gold.sent_id + ": token counts differ");
  auto links = [](const DimsumSentence& s) {
    std::vector<Link> out;
    for (const auto& t : s.tokens)
      if (t.parent > 0) out.emplace_back(t.parent, t.index);
    return out;
  };
  auto labels = [](const DimsumSentence& s) {
    std::set<std::pair<int, std::string>> out;
    for (const auto& t : s.tokens)
      if (!t.label.empty()) out.emplace(t.index, ascii_lower(t.label));
    return out;
  };

  DimsumScores out;
  out.mwe = link_prf(links(gold), links(pred), gold.tokens.size());
  out.supersense = compare_sets(labels(gold), labels(pred));
  out.combined = out.mwe + out.supersense;
  out.accuracy.total = static_cast<double>(gold.tokens.size());
  for (std::size_t i = 0; i < gold.tokens.size(); ++i) {
    const auto& g = gold.tokens[i];
    const auto& p = pred.tokens[i];
    if (g.flag == p.flag && ascii_lower(g.label) == ascii_lower(p.label)) out.accuracy.correct += 1.0;
  }
  return out;
}

DimsumScores dimsum_prf(std::span<const DimsumSentence> gold, std::span<const DimsumSentence> pred) {
  check_same_size(gold, pred);
  DimsumScores total;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    auto s = dimsum_prf(gold[i], pred[i]);
    total.mwe += s.mwe;
    total.supersense += s.supersense;
    total.combined += s.combined;
    total.accuracy += s.accuracy;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Reports

const MetricRow* MetricReport::find(std::string_view id) const {
  for (const auto& r : rows)
    if (r.id == id) return &r;
  return nullptr;
}

const Prf& MetricReport::prf(std::string_view id) const {
  const auto* r = find(id);
  if (!r || !std::holds_alternative<Prf>(r->value)) throw Error("no PRF metric '" + std::string(id) + "'");
  return std::get<Prf>(r->value);
}

const Accuracy& MetricReport::accuracy(std::string_view id) const {
  const auto* r = find(id);
  if (!r || !std::holds_alternative<Accuracy>(r->value)) throw Error("no accuracy metric '" + std::string(id) + "'");
  return std::get<Accuracy>(r->value);
}

namespace {

// Shortest round-trip form: 5381, 433.5.
std::string number(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

std::string percent(double x) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(1) << 100.0 * x;
  return s.str();
}

}  // namespace

void MetricReport::write_table(std::ostream& out) const {
  std::size_t width = 6;
  for (const auto& r : rows) width = std::max(width, r.id.size());
  auto cell = [&](const std::string& s, int w) { out << std::setw(w) << s; };
  out << std::left << std::setw(static_cast<int>(width)) << "metric" << std::right;
  cell("P", 8);
  cell("R", 8);
  cell("F/Acc", 8);
  cell("P counts", 18);
  cell("R counts", 18);
  out << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(static_cast<int>(width)) << r.id << std::right;
    if (const auto* prf = std::get_if<Prf>(&r.value)) {
      cell(percent(prf->precision()), 8);
      cell(percent(prf->recall()), 8);
      cell(percent(prf->f1()), 8);
      cell(number(prf->matched_pred) + "/" + number(prf->predicted), 18);
      cell(number(prf->matched_gold) + "/" + number(prf->gold), 18);
    } else {
      const auto& acc = std::get<Accuracy>(r.value);
      cell("", 8);
      cell("", 8);
      cell(percent(acc.value()), 8);
      cell(number(acc.correct) + "/" + number(acc.total), 18);
      cell("", 18);
    }
    out << '\n';
  }
}

void MetricReport::write_tsv(std::ostream& out) const {
  out << "id\tkind\tmatched_pred\tpredicted\tmatched_gold\tgold\tP\tR\tF\n";
  for (const auto& r : rows) {
    if (const auto* prf = std::get_if<Prf>(&r.value)) {
      out << r.id << "\tprf\t" << number(prf->matched_pred) << '\t' << number(prf->predicted) << '\t'
          << number(prf->matched_gold) << '\t' << number(prf->gold) << '\t' << number(prf->precision()) << '\t'
          << number(prf->recall()) << '\t' << number(prf->f1()) << '\n';
    } else {
      const auto& acc = std::get<Accuracy>(r.value);
      auto a = number(acc.value());
      out << r.id << "\taccuracy\t" << number(acc.correct) << '\t' << number(acc.total) << '\t' << number(acc.correct)
          << '\t' << number(acc.total) << '\t' << a << '\t' << a << '\t' << a << '\n';
    }
  }
}

namespace {

[[noreturn]] void misaligned(std::size_t i, const std::string& detail) {
  throw Error("sentence " + std::to_string(i + 1) + " is not aligned: " + detail);
}

template <typename S, typename Length>
void check_aligned_impl(std::span<const S> gold, std::span<const S> pred, Length length) {
  check_same_size(gold, pred);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!gold[i].sent_id.empty() && !pred[i].sent_id.empty() && gold[i].sent_id != pred[i].sent_id)
      misaligned(i, "gold id " + gold[i].sent_id + ", predicted id " + pred[i].sent_id);
    if (length(gold[i]) != length(pred[i]))
      misaligned(i, std::to_string(length(gold[i])) + " gold tokens, " + std::to_string(length(pred[i])) +
                        " predicted tokens");
  }
}

}  // namespace

void check_aligned(std::span<const Sentence> gold, std::span<const Sentence> pred) {
  check_aligned_impl(gold, pred, [](const Sentence& s) { return s.tokens.size(); });
}

void check_aligned(std::span<const ParsemeSentence> gold, std::span<const ParsemeSentence> pred) {
  check_aligned_impl(gold, pred, [](const ParsemeSentence& s) { return s.word_count(); });
}

void check_aligned(std::span<const DimsumSentence> gold, std::span<const DimsumSentence> pred) {
  check_aligned_impl(gold, pred, [](const DimsumSentence& s) { return s.tokens.size(); });
}

MetricReport streusle_report(std::span<const Sentence> gold, std::span<const Sentence> pred) {
  check_aligned(gold, pred);
  MetricReport r;
  r.rows.push_back({"tags.full", tag_accuracy(gold, pred, TagMode::full)});
  r.rows.push_back({"tags.no_lexcat", tag_accuracy(gold, pred, TagMode::drop_lexcat)});
  r.rows.push_back({"tags.no_ss", tag_accuracy(gold, pred, TagMode::drop_supersense)});
  r.rows.push_back({"tags.no_lexcat_ss", tag_accuracy(gold, pred, TagMode::drop_both)});
  r.rows.push_back({"mwe.link_avg", mwe_link_prf(gold, pred, WeakHandling::average)});
  r.rows.push_back({"mwe.link_strong", mwe_link_prf(gold, pred, WeakHandling::strong_only)});
  r.rows.push_back({"mwe.link_all", mwe_link_prf(gold, pred, WeakHandling::strong_plus_weak)});
  r.rows.push_back({"all.id", unit_labeled_prf(gold, pred, UnitClass::all, LabelMode::id)});
  r.rows.push_back({"all.labeled", unit_labeled_prf(gold, pred, UnitClass::all, LabelMode::full)});
  const std::pair<const char*, UnitClass> classes[] = {
      {"noun", UnitClass::noun}, {"verb", UnitClass::verb}, {"snacs", UnitClass::snacs}};
  for (auto [name, cls] : classes) {
    std::string prefix = name;
    r.rows.push_back({prefix + ".id", unit_labeled_prf(gold, pred, cls, LabelMode::id)});
    r.rows.push_back({prefix + ".labeled", unit_labeled_prf(gold, pred, cls, LabelMode::full)});
    if (cls == UnitClass::snacs) {
      r.rows.push_back({prefix + ".role", unit_labeled_prf(gold, pred, cls, LabelMode::role)});
      r.rows.push_back({prefix + ".fxn", unit_labeled_prf(gold, pred, cls, LabelMode::function)});
    }
  }
  return r;
}

MetricReport parseme_report(std::span<const ParsemeSentence> gold, std::span<const ParsemeSentence> pred) {
  check_aligned(gold, pred);
  MetricReport r;
  r.rows.push_back({"parseme.mwe", parseme_prf(gold, pred, ParsemeMode::mwe_based)});
  r.rows.push_back({"parseme.token", parseme_prf(gold, pred, ParsemeMode::token_based)});
  return r;
}

MetricReport dimsum_report(std::span<const DimsumSentence> gold, std::span<const DimsumSentence> pred) {
  check_aligned(gold, pred);
  auto s = dimsum_prf(gold, pred);
  MetricReport r;
  r.rows.push_back({"dimsum.mwe", s.mwe});
  r.rows.push_back({"dimsum.supersense", s.supersense});
  r.rows.push_back({"dimsum.combined", s.combined});
  r.rows.push_back({"dimsum.accuracy", s.accuracy});
  return r;
}

}  // namespace lsr
