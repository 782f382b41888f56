#include "lsr/convert.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "lsr/error.h"
#include "lsr/tagcodec.h"
#include "lsr/text.h"

namespace lsr {

namespace {

std::optional<int> parse_positive(std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v < 0) return std::nullopt;
  return v;
}

bool is_integer_id(std::string_view s) { return !s.empty() && parse_positive(s).has_value(); }

}  // namespace

// ---------------------------------------------------------------------------
// PARSEME

const std::vector<std::string>& parseme_categories() {
  static const std::vector<std::string> kCategories = {
      "VID", "VPC.full", "VPC.semi", "LVC.full", "LVC.cause", "IAV", "MVC", "IRV", "LS.ICV",
  };
  return kCategories;
}

bool is_parseme_category(std::string_view category) {
  const auto& all = parseme_categories();
  return std::find(all.begin(), all.end(), category) != all.end();
}

std::optional<std::string> parseme_category(Lexcat lc) {
  if (!is_verbal_mwe_lexcat(lc)) return std::nullopt;
  auto name = lexcat_name(lc);
  return std::string(name.substr(2));  // "V."
}

bool CuptRow::is_word() const { return is_integer_id(conllu[0]); }

std::size_t ParsemeSentence::word_count() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const CuptRow& r) { return r.is_word(); }));
}

namespace {

struct CuptBuilder {
  ParsemeSentence s;
  std::size_t first_line = 0;
  std::map<int, std::size_t> vmwe_index;  // id -> position in s.vmwes

  [[noreturn]] void fail(std::size_t line, const std::string& rule, const std::string& detail) const {
    throw ParseError(s.sent_id, line, rule, detail);
  }

  void comment(const std::string& line) {
    s.comments.push_back(line);
    auto body = trim(std::string_view(line).substr(1));
    auto eq = body.find('=');
    if (eq == std::string_view::npos) return;
    auto key = trim(body.substr(0, eq));
    auto value = trim(body.substr(eq + 1));
    if (key == "sent_id") {
      s.sent_id = std::string(value);
    } else if (key == "source_sent_id" && s.sent_id.empty()) {
      auto sp = value.find_last_of(' ');
      s.sent_id = std::string(sp == std::string_view::npos ? value : value.substr(sp + 1));
    }
  }

  void row(std::string_view line, std::size_t line_no) {
    auto cols = split_view(line, '\t');
    if (cols.size() != 11) fail(line_no, "column-count", "expected 11 columns, found " + std::to_string(cols.size()));
    CuptRow r;
    for (std::size_t i = 0; i < 10; ++i) r.conllu[i] = std::string(cols[i]);
    r.mwe = std::string(cols[10]);
    if (r.is_word()) {
      int index = static_cast<int>(s.word_count()) + 1;
      if (*parse_positive(cols[0]) != index)
        fail(line_no, "token-index", "expected token " + std::to_string(index) + ", found " + r.conllu[0]);
      if (r.conllu[1].empty()) fail(line_no, "empty-form", "token " + r.conllu[0] + " has an empty form");
      mwe_codes(r.mwe, index, line_no);
      if (r.mwe != "_") r.mwe = "*";  // codes live in `vmwes`
    }
    s.rows.push_back(std::move(r));
  }

  void mwe_codes(std::string_view cell, int token, std::size_t line_no) {
    if (cell == "*" || cell == "_") return;
    for (auto code : split_view(cell, ';')) {
      auto colon = code.find(':');
      auto id_text = code.substr(0, colon);
      auto id = parse_positive(id_text);
      if (!id || *id == 0) fail(line_no, "mwe-column", "bad MWE code '" + std::string(code) + "'");
      auto [it, fresh] = vmwe_index.try_emplace(*id, s.vmwes.size());
      if (fresh) s.vmwes.push_back(Vmwe{*id, {}, {}});
      auto& v = s.vmwes[it->second];
      if (colon != std::string_view::npos) {
        auto cat = code.substr(colon + 1);
        if (!is_parseme_category(cat)) fail(line_no, "mwe-category", "unknown category '" + std::string(cat) + "'");
        if (!v.category.empty() && v.category != cat)
          fail(line_no, "mwe-category", "conflicting categories for MWE " + std::to_string(*id));
        v.category = std::string(cat);
      }
      if (!v.tokens.empty() && v.tokens.back() == token)
        fail(line_no, "mwe-column", "MWE " + std::to_string(*id) + " repeated on one token");
      v.tokens.push_back(token);
    }
  }

  ParsemeSentence finish(std::size_t line_no) {
    if (s.word_count() == 0) fail(line_no, "empty-sentence", "sentence has no tokens");
    for (const auto& v : s.vmwes)
      if (v.category.empty()) fail(first_line, "mwe-category", "MWE " + std::to_string(v.id) + " has no category");
    std::sort(s.vmwes.begin(), s.vmwes.end(), [](const Vmwe& a, const Vmwe& b) { return a.id < b.id; });
    return std::move(s);
  }
};

}  // namespace

std::vector<ParsemeSentence> parse_cupt(std::istream& in) {
  std::vector<ParsemeSentence> out;
  std::optional<CuptBuilder> current;
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
    if (!current) {
      current.emplace();
      current->first_line = line_no;
    }
    if (line.front() == '#') {
      if (!current->s.rows.empty())
        current->fail(line_no, "comment-position", "comment after the first token row");
      current->comment(line);
    } else {
      current->row(line, line_no);
    }
  }
  if (current) out.push_back(current->finish(line_no));
  return out;
}

std::vector<ParsemeSentence> parse_cupt(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_cupt(in);
}

std::vector<ParsemeSentence> read_cupt_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return parse_cupt(in);
}

void write_cupt(std::ostream& out, std::span<const ParsemeSentence> sentences) {
  for (const auto& s : sentences) {
    std::map<int, std::vector<const Vmwe*>> by_token;
    auto vmwes = s.vmwes;
    std::sort(vmwes.begin(), vmwes.end(), [](const Vmwe& a, const Vmwe& b) { return a.id < b.id; });
    for (const auto& v : vmwes)
      for (int t : v.tokens) by_token[t].push_back(&v);

    for (const auto& c : s.comments) out << c << '\n';
    int index = 0;
    for (const auto& r : s.rows) {
      for (const auto& col : r.conllu) out << col << '\t';
      if (!r.is_word()) {
        out << r.mwe << '\n';
        continue;
      }
      ++index;
      auto it = by_token.find(index);
      if (it == by_token.end()) {
        out << (r.mwe == "_" ? "_" : "*") << '\n';
        continue;
      }
      bool first_code = true;
      for (const Vmwe* v : it->second) {
        if (!first_code) out << ';';
        first_code = false;
        out << v->id;
        if (v->tokens.front() == index) out << ':' << v->category;
      }
      out << '\n';
    }
    out << '\n';
  }
}

std::string write_cupt(std::span<const ParsemeSentence> sentences) {
  std::ostringstream out;
  write_cupt(out, sentences);
  return out.str();
}

ParsemeSentence to_parseme(const Sentence& s) {
  ParsemeSentence p;
  p.sent_id = s.sent_id;
  p.comments.push_back("# sent_id = " + s.sent_id);
  if (!s.text.empty()) p.comments.push_back("# text = " + s.text);

  auto emit_extra = [&](int after) {
    for (const auto& e : s.extra_rows) {
      if (e.after_token != after) continue;
      auto cols = split_view(e.line, '\t');
      CuptRow r;
      for (std::size_t i = 0; i < 10; ++i) r.conllu[i] = i < cols.size() ? std::string(cols[i]) : "_";
      p.rows.push_back(std::move(r));
    }
  };
  emit_extra(0);
  for (const auto& t : s.tokens) {
    CuptRow r;
    r.conllu = {std::to_string(t.index), t.form, t.lemma, t.upos, t.xpos, t.feats, t.head, t.deprel, t.deps, t.misc};
    p.rows.push_back(std::move(r));
    emit_extra(t.index);
  }

  for (const auto& u : s.units) {
    auto cat = parseme_category(u.lexcat);
    if (!cat || !u.is_multiword()) continue;
    p.vmwes.push_back(Vmwe{static_cast<int>(p.vmwes.size()) + 1, *cat, u.tokens});
  }
  return p;
}

Sentence sentence_of(const ParsemeSentence& p) {
  Sentence s;
  s.sent_id = p.sent_id;
  for (const auto& r : p.rows) {
    if (!r.is_word()) continue;
    Token t;
    t.index = static_cast<int>(s.tokens.size()) + 1;
    t.form = r.conllu[1];
    t.lemma = r.conllu[2];
    t.upos = r.conllu[3];
    t.xpos = r.conllu[4];
    t.feats = r.conllu[5];
    t.head = r.conllu[6];
    t.deprel = r.conllu[7];
    t.deps = r.conllu[8];
    t.misc = r.conllu[9];
    s.text += (s.tokens.empty() ? "" : " ") + t.form;
    s.tokens.push_back(std::move(t));
  }
  return s;
}

void project_into(ParsemeSentence& target, const Sentence& s) {
  if (s.tokens.size() != target.word_count())
    throw Error("sentence " + target.sent_id + ": token counts differ");
  target.vmwes = to_parseme(s).vmwes;
}

// ---------------------------------------------------------------------------
// DiMSUM

std::vector<std::vector<int>> DimsumSentence::units() const {
  std::vector<int> root(tokens.size());
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](int x) {
    while (root[x] != x) x = root[x] = root[root[x]];
    return x;
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    int p = tokens[i].parent;
    if (p >= 1 && p <= static_cast<int>(tokens.size())) {
      int a = find(p - 1), b = find(static_cast<int>(i));
      root[std::max(a, b)] = std::min(a, b);
    }
  }
  std::map<int, std::vector<int>> groups;
  for (std::size_t i = 0; i < tokens.size(); ++i) groups[find(static_cast<int>(i))].push_back(static_cast<int>(i) + 1);
  std::vector<std::vector<int>> out;
  for (auto& [r, members] : groups) out.push_back(std::move(members));
  return out;
}

namespace {

bool is_dimsum_flag(std::string_view f) {
  return f == "O" || f == "o" || f == "B" || f == "b" || f == "I" || f == "i";
}

}  // namespace

std::vector<DimsumSentence> parse_dimsum(std::istream& in) {
  std::vector<DimsumSentence> out;
  std::optional<DimsumSentence> current;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& rule, const std::string& detail) -> void {
    throw ParseError(current ? current->sent_id : std::string(), line_no, rule, detail);
  };
  auto finish = [&] {
    if (current) out.push_back(std::move(*current));
    current.reset();
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      finish();
      continue;
    }
    auto cols = split_view(line, '\t');
    if (cols.size() != 9) fail("column-count", "expected 9 columns, found " + std::to_string(cols.size()));
    if (!current) {
      current.emplace();
      current->sent_id = std::string(cols[8]);
    } else if (cols[8] != current->sent_id) {
      fail("sentence-id", "token sentence id '" + std::string(cols[8]) + "' differs from '" + current->sent_id + "'");
    }
    DimsumToken t;
    int expected = static_cast<int>(current->tokens.size()) + 1;
    auto index = parse_positive(cols[0]);
    if (!index || *index != expected)
      fail("token-index", "expected token " + std::to_string(expected) + ", found '" + std::string(cols[0]) + "'");
    t.index = *index;
    t.form = std::string(cols[1]);
    if (t.form.empty()) fail("empty-form", "token " + std::to_string(t.index) + " has an empty form");
    t.lemma = std::string(cols[2]);
    t.pos = std::string(cols[3]);
    if (!is_dimsum_flag(cols[4])) fail("mwe-flag", "bad MWE flag '" + std::string(cols[4]) + "'");
    t.flag = std::string(cols[4]);
    auto parent = cols[5].empty() ? std::optional<int>(0) : parse_positive(cols[5]);
    if (!parent || *parent >= t.index) fail("mwe-parent", "bad parent offset '" + std::string(cols[5]) + "'");
    bool continuation = t.flag == "I" || t.flag == "i";
    if (continuation != (*parent != 0))
      fail("mwe-parent", "flag " + t.flag + " with parent offset " + std::to_string(*parent));
    t.parent = *parent;
    t.strength = std::string(cols[6]);
    t.label = std::string(cols[7]);
    current->tokens.push_back(std::move(t));
  }
  finish();
  return out;
}

std::vector<DimsumSentence> parse_dimsum(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_dimsum(in);
}

std::vector<DimsumSentence> read_dimsum_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return parse_dimsum(in);
}

void write_dimsum(std::ostream& out, std::span<const DimsumSentence> sentences) {
  for (const auto& s : sentences) {
    for (const auto& t : s.tokens) {
      out << t.index << '\t' << t.form << '\t' << t.lemma << '\t' << t.pos << '\t' << t.flag << '\t' << t.parent
          << '\t' << t.strength << '\t' << t.label << '\t' << s.sent_id << '\n';
    }
    out << '\n';
  }
}

std::string write_dimsum(std::span<const DimsumSentence> sentences) {
  std::ostringstream out;
  write_dimsum(out, sentences);
  return out.str();
}

DimsumSentence to_dimsum(const Sentence& s) {
  Sentence strong = s;
  strong.weak_groups.clear();
  auto tags = encode(strong);

  DimsumSentence d;
  d.sent_id = s.sent_id;
  for (const auto& t : s.tokens) {
    DimsumToken dt;
    dt.index = t.index;
    dt.form = t.form;
    dt.lemma = t.lemma;
    dt.pos = t.upos;
    d.tokens.push_back(std::move(dt));
  }
  for (std::size_t i = 0; i < tags.size(); ++i) {
    auto name = flag_name(tags[i].flag);
    d.tokens[i].flag = std::string(name.substr(0, 1));
  }
  for (const auto& u : s.units) {
    for (std::size_t k = 1; k < u.tokens.size(); ++k) d.tokens[u.tokens[k] - 1].parent = u.tokens[k - 1];
    // `??` and other special labels have no DiMSUM counterpart
    auto label = ascii_lower(role_label(u.sense));
    if (starts_with(label, "n.") || starts_with(label, "v.")) d.tokens[u.first() - 1].label = label;
  }
  return d;
}

Sentence sentence_of(const DimsumSentence& d) {
  Sentence s;
  s.sent_id = d.sent_id;
  for (const auto& dt : d.tokens) {
    Token t;
    t.index = dt.index;
    t.form = dt.form;
    t.lemma = dt.lemma;
    t.upos = dt.pos;
    s.text += (s.tokens.empty() ? "" : " ") + t.form;
    s.tokens.push_back(std::move(t));
  }
  return s;
}

void project_into(DimsumSentence& target, const Sentence& s) {
  if (s.tokens.size() != target.tokens.size())
    throw Error("sentence " + target.sent_id + ": token counts differ");
  auto projected = to_dimsum(s);
  for (std::size_t i = 0; i < target.tokens.size(); ++i) {
    auto& t = target.tokens[i];
    t.flag = projected.tokens[i].flag;
    t.parent = projected.tokens[i].parent;
    t.label = projected.tokens[i].label;
  }
}

}  // namespace lsr
