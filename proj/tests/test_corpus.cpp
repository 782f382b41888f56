#include <fstream>
#include <sstream>

#include "doctest.h"
#include "lsr/corpus.h"
#include "lsr/error.h"
#include "lsr/tagcodec.h"
#include "support/generators.h"

using namespace lsr;
using lsr::testing::Row;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string rule_of(const std::string& text, ConllulexOptions opt = {}) {
  try {
    parse_conllulex(text, opt);
  } catch (const ParseError& e) {
    return e.rule();
  }
  return "";
}

bool has_rule(const std::vector<Violation>& vs, const std::string& rule) {
  for (const auto& v : vs)
    if (v.rule == rule) return true;
  return false;
}

LexicalUnit unit(std::vector<int> toks, Lexcat lc, UnitSense sense = {}) { return {std::move(toks), lc, std::move(sense), ""}; }

Sentence bare_sentence(int n) {
  Sentence s;
  s.sent_id = "t";
  for (int i = 1; i <= n; ++i) s.tokens.push_back({i, "w" + std::to_string(i), "w", "X"});
  return s;
}

}  // namespace

TEST_CASE("took-in sample sentence parses into the expected units") {
  auto sents = read_conllulex_file(lsr::testing::sample_path("took_in.conllulex"));
  REQUIRE(sents.size() == 1);
  const auto& s = sents[0];
  CHECK(s.sent_id == "reviews-086839-0003");
  CHECK(s.tokens.size() == 12);
  REQUIRE(s.units.size() == 10);
  CHECK(s.units[1].tokens == std::vector<int>{2, 5});
  CHECK(s.units[1].lexcat == Lexcat::V_VPC_full);
  CHECK(s.units[1].lexlemma == "take in");
  CHECK(std::get<Supersense>(s.units[1].sense).label == "v.motion");
  CHECK(s.units[2].lexcat == Lexcat::PRON_POSS);
  CHECK_FALSE(has_sense(s.units[2].sense));
  const auto& purpose = std::get<SupersensePair>(s.units[4].sense);
  CHECK(purpose.role.label == "p.Purpose");
  CHECK(purpose.function.label == "p.Purpose");
  CHECK(s.units.back().tokens == std::vector<int>{11, 12});
  CHECK(s.weak_groups.empty());
  CHECK(validate_sentence(s).empty());
}

TEST_CASE("sample files round-trip byte for byte") {
  for (auto name : {"took_in.conllulex", "sample.conllulex"}) {
    const auto text = slurp(lsr::testing::sample_path(name));
    auto sents = parse_conllulex(text);
    CHECK(write_conllulex(sents) == text);
  }
}

TEST_CASE("weak group and pair sense in the sample") {
  auto sents = read_conllulex_file(lsr::testing::sample_path("sample.conllulex"));
  REQUIRE(sents.size() == 5);
  const auto& weak = sents[1];
  REQUIRE(weak.weak_groups.size() == 1);
  CHECK(weak.weak_group_tokens(weak.weak_groups[0]) == std::vector<int>{2, 3});
  CHECK(weak.weak_groups[0].lemma == "highly recommend");
  const auto& pair = std::get<SupersensePair>(sents[3].units[2].sense);
  CHECK(pair.role.label == "p.Recipient");
  CHECK(pair.function.label == "p.Goal");
}

TEST_CASE("ellipsis and range rows are kept in place") {
  std::string text =
      "# sent_id = e\n"
      "1-2\twon't\t_\t_\t_\t_\t_\t_\t_\t_\t_\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "1\two\twill\tAUX\t_\t_\t0\troot\t_\t_\t_\tAUX\twill\t_\t_\t_\t_\t_\tO-AUX\n"
      "2\tn't\tnot\tPART\t_\t_\t1\tadvmod\t_\t_\t_\tADV\tnot\t_\t_\t_\t_\t_\tO-ADV\n"
      "2.1\tgo\tgo\tVERB\t_\t_\t_\t_\t0:root\tCopyOf=1\t_\t_\t_\t_\t_\t_\t_\t_\t_\n\n";
  auto sents = parse_conllulex(text);
  REQUIRE(sents.size() == 1);
  CHECK(sents[0].tokens.size() == 2);
  REQUIRE(sents[0].extra_rows.size() == 2);
  CHECK(sents[0].extra_rows[0].after_token == 0);
  CHECK(sents[0].extra_rows[1].after_token == 2);
  CHECK(write_conllulex(sents) == text);
}

TEST_CASE("comments and metadata") {
  std::string text = "# newdoc id = doc-1\n# sent_id = s1\n# text = Hi\n# streusle_sent_id = x\n" +
                     lsr::testing::conllulex_block("", {{"1", "Hi", "INTJ", "_", "INTJ", "_", "_", "_", "O-INTJ"}})
                         .substr(std::string("# sent_id = \n").size());
  auto s = parse_conllulex(text).at(0);
  CHECK(s.sent_id == "s1");
  CHECK(s.text == "Hi");
  CHECK(s.metadata.at("newdoc id") == "doc-1");
  CHECK(s.metadata.at("streusle_sent_id") == "x");
  CHECK(s.comments.size() == 4);
}

TEST_CASE("unannotated input") {
  std::string text = "# sent_id = u\n1\tHi\thi\tINTJ\t_\t_\t0\troot\t_\t_\n\n";
  CHECK(rule_of(text) == "column-count");
  auto s = parse_conllulex(text, {.annotations = false}).at(0);
  CHECK(s.units.empty());
  CHECK(s.tokens.at(0).form == "Hi");
}

TEST_CASE("missing lexcat is derived from UPOS for single tokens") {
  auto s = parse_conllulex(lsr::testing::conllulex_block("d", {{"1", "ok", "INTJ"}, {"2", "go", "VERB", "_", "_"}}),
                           {.annotations = true, .validate = false})
               .at(0);
  CHECK(s.units[0].lexcat == Lexcat::INTJ);
  CHECK(s.units[1].lexcat == Lexcat::V);
}

TEST_CASE("parse errors carry rule, sentence and line") {
  using lsr::testing::conllulex_block;
  CHECK(rule_of(conllulex_block("a", {{"2", "x", "NOUN", "_", "N", "n.ACT"}})) == "token-index");
  CHECK(rule_of(conllulex_block("a", {{"1", "x", "NOUN", "_", "N", "n.Bogus"}})) == "unknown-supersense");
  CHECK(rule_of(conllulex_block("a", {{"1", "x", "NOUN", "_", "BOGUS"}})) == "unknown-lexcat");
  CHECK(rule_of(conllulex_block("a", {{"1", "x", "DET", "_", "DET", "n.ACT"}})) == "supersense-forbidden");
  CHECK(rule_of(conllulex_block("a", {{"1", "x", "NOUN", "_", "N", "n.ACT", "n.ACT"}})) == "supersense-pair");
  CHECK(rule_of(conllulex_block("a", {{"1", "x", "NOUN", "_", "N", "n.ACT", "_", "_", "B-N-n.ACT"}})) == "lextag-mismatch");
  CHECK(rule_of(conllulex_block("a", {{"1", "x", "NOUN", "1:1", "N", "n.ACT"}})) == "mwe-size");
  CHECK(rule_of(conllulex_block("a", {{"1", "x", "NOUN", "1:x", "N", "n.ACT"}})) == "mwe-column");
  CHECK(rule_of(conllulex_block("a", {{"1", "x", "NOUN", "_", "N", "_"}})) == "supersense-missing");
  CHECK(rule_of(conllulex_block("a", {{"1", "x", "VERB", "_", "V.LVC.full", "v.social"}})) == "lexcat-arity");
  CHECK(rule_of(conllulex_block("a", {{"1", "x", "NOUN", "1:1", "N", "n.ACT"}, {"2", "y", "NOUN", "1:2", "N"}})) ==
        "mwe-continuation");
  CHECK(rule_of(conllulex_block("a", {{"1", "x", "NOUN", "_", "N", "n.ACT", "_", "1:2"}, {"2", "y", "NOUN", "_", "N", "n.ACT", "_", "1:1"}})) ==
        "mwe-position");
  CHECK(rule_of(conllulex_block("a", {{"1", "x", "NOUN", "_", "N", "n.ACT", "_", "1:1"}})) == "weak-group-size");
  CHECK(rule_of("# sent_id = c\n\n") == "empty-sentence");

  try {
    parse_conllulex("# sent_id = one\n1\ta\n\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.sentence_id() == "one");
    CHECK(e.line() == 2);
  }
}

TEST_CASE("weak groups must consist of whole units") {
  using lsr::testing::conllulex_block;
  auto text = conllulex_block("w", {{"1", "a", "NOUN", "1:1", "N", "n.ACT", "_", "2:1"},
                                    {"2", "b", "NOUN", "1:2", "_", "_", "_", "_"},
                                    {"3", "c", "NOUN", "_", "N", "n.ACT", "_", "2:2"}});
  CHECK(rule_of(text) == "weak-group-partial-unit");
}

TEST_CASE("validation rules") {
  auto s = bare_sentence(5);
  SUBCASE("coverage") {
    s.units = {unit({1}, Lexcat::X), unit({2, 3}, Lexcat::N, Supersense{SupersenseClass::noun, "n.ACT"})};
    auto v = validate_sentence(s);
    CHECK(has_rule(v, "coverage"));
  }
  SUBCASE("overlap, order and range") {
    s.units = {unit({1, 2}, Lexcat::V_VID, Supersense{SupersenseClass::verb, "v.social"}), unit({2}, Lexcat::X),
               unit({4, 3}, Lexcat::X), unit({5, 6}, Lexcat::X)};
    auto v = validate_sentence(s);
    CHECK(has_rule(v, "unit-overlap"));
    CHECK(has_rule(v, "unit-order"));
    CHECK(has_rule(v, "unit-range"));
  }
  SUBCASE("gap rules") {
    s.units = {unit({1, 5}, Lexcat::V_VID, Supersense{SupersenseClass::verb, "v.social"}), unit({2, 4}, Lexcat::DET),
               unit({3}, Lexcat::X)};
    CHECK(has_rule(validate_sentence(s), "nested-gap"));
    s.units = {unit({1, 3}, Lexcat::V_VID, Supersense{SupersenseClass::verb, "v.social"}), unit({2, 4}, Lexcat::DET),
               unit({5}, Lexcat::X)};
    CHECK(has_rule(validate_sentence(s), "gap-straddle"));
  }
  SUBCASE("lexcat and supersense rules") {
    s.units = {unit({1, 2}, Lexcat::V), unit({3}, Lexcat::PP), unit({4}, Lexcat::N, Supersense{SupersenseClass::verb, "v.social"}),
               unit({5}, Lexcat::N, SupersensePair{{SupersenseClass::noun, "n.ACT"}, {SupersenseClass::noun, "n.ACT"}})};
    auto v = validate_sentence(s);
    CHECK(has_rule(v, "lexcat-arity"));
    CHECK(has_rule(v, "supersense-missing"));
    CHECK(has_rule(v, "supersense-class"));
    CHECK(has_rule(v, "supersense-pair"));
  }
  SUBCASE("weak group rules") {
    s.units = {unit({1}, Lexcat::X), unit({2}, Lexcat::X), unit({3}, Lexcat::X), unit({4}, Lexcat::X), unit({5}, Lexcat::X)};
    s.weak_groups = {{{0}, "", ""}, {{1, 2}, "", ""}, {{2, 3}, "", ""}, {{4, 9}, "", ""}};
    auto v = validate_sentence(s);
    CHECK(has_rule(v, "weak-group-size"));
    CHECK(has_rule(v, "weak-group-overlap"));
    CHECK(has_rule(v, "weak-group-ref"));
  }
  SUBCASE("possessives may omit the supersense") {
    s.units = {unit({1}, Lexcat::PRON_POSS), unit({2}, Lexcat::POSS), unit({3}, Lexcat::X), unit({4}, Lexcat::X),
               unit({5}, Lexcat::X)};
    CHECK(validate_sentence(s).empty());
  }
}

TEST_CASE("writer numbers strong and weak MWEs by first token") {
  auto s = bare_sentence(5);
  const Supersense act{SupersenseClass::noun, "n.ACT"};
  // Weak group of units {1} and {4,5} around the strong unit {2,3}.
  s.units = {unit({1}, Lexcat::ADV), unit({2, 3}, Lexcat::N, act), unit({4, 5}, Lexcat::N, act)};
  s.weak_groups = {{{0, 2}, "", ""}};
  REQUIRE(validate_sentence(s).empty());
  const std::vector<Sentence> one{s};
  auto text = write_conllulex(one);
  auto back = parse_conllulex(text).at(0);
  CHECK(same_annotation(back, s));
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> smwe, wmwe;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, '\t');) cols.push_back(c);
    smwe.push_back(cols[10]);
    wmwe.push_back(cols[15]);
  }
  CHECK(wmwe == std::vector<std::string>{"1:1", "_", "_", "1:2", "1:3"});
  CHECK(smwe == std::vector<std::string>{"_", "2:1", "2:2", "3:1", "3:2"});
}

TEST_CASE("random corpora survive write and re-read") {
  lsr::testing::Rng rng(7);
  auto corpus = lsr::testing::random_corpus(rng, 300, 1, 25);
  for (const auto& s : corpus) REQUIRE(validate_sentence(s).empty());
  auto back = parse_conllulex(write_conllulex(corpus));
  REQUIRE(back.size() == corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CHECK(same_annotation(corpus[i], back[i]));
    CHECK(corpus[i].tokens == back[i].tokens);
  }
}
