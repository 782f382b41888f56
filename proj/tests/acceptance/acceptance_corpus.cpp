// Acceptance criteria that need the released corpora.
//
//   LSR_STREUSLE_DIR   STREUSLE 4.3 checkout (streusle.ud_{train,dev,test}.conllulex,
//                      directly or under train/ dev/ test/)
//   LSR_PARSEME_TEST   PARSEME 1.1 English test.cupt
//   LSR_DIMSUM_TEST    DiMSUM test file (9-column format)
//
// Optional, for the non-blocking projection stretch of criterion 8:
//   LSR_VECTORS_TRAIN, LSR_VECTORS_DEV, LSR_VECTORS_TEST
// Criterion 8 trains with the library defaults unless LSR_ACCEPT_EPOCHS or
// LSR_ACCEPT_LR are set.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "acceptance/common.h"
#include "lsr/constraints.h"
#include "lsr/convert.h"
#include "lsr/crf.h"
#include "lsr/error.h"
#include "lsr/inventory.h"
#include "lsr/metrics.h"
#include "lsr/tagcodec.h"
#include "lsr/text.h"

using namespace lsr;
using namespace lsr::acceptance;
namespace fs = std::filesystem;

namespace {

// Gold counts of the test splits.
constexpr double kGoldTags = 5381;
constexpr double kGoldNounUnits = 986;
constexpr double kGoldVerbUnits = 697;
constexpr double kGoldSnacsUnits = 485;
constexpr double kGoldMweLinks = 433.5;
constexpr double kParsemeMweBased = 501;
constexpr double kParsemeTokenBased = 1087;
constexpr double kDimsumMwe = 1115;
constexpr double kDimsumSupersense = 4745;
constexpr double kDimsumCombined = 5860;

constexpr std::size_t kAllTags = 601;
constexpr std::size_t kTrainTags = 572;
constexpr std::size_t kUnseenDevTags = 12;

constexpr std::size_t kOverfitSentences = 50;
constexpr double kOverfitAccuracy = 0.99;
constexpr std::size_t kMetricSentences = 200;

constexpr double kProjectionTarget = 0.775;
constexpr double kProjectionWindow = 0.03;

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

// One sentence block of a CONLLULEX file as raw text, plus its LEXTAG cells.
struct Block {
  std::string text;
  std::vector<std::string> lextags;
};

std::vector<Block> read_blocks(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<Block> out;
  Block cur;
  std::string line;
  auto flush = [&] {
    if (!cur.text.empty()) out.push_back(std::move(cur));
    cur = Block{};
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    cur.text += line + '\n';
    if (line.front() == '#') continue;
    auto cols = split_view(line, '\t');
    // Word rows only: multiword-token ranges and empty nodes carry no tag.
    if (cols.size() == 19 && cols[0].find_first_of("-.") == std::string_view::npos)
      cur.lextags.emplace_back(cols[18]);
  }
  flush();
  return out;
}

struct Split {
  std::string path;
  std::vector<Block> blocks;
  std::vector<Sentence> sentences;  // blocks that parse
  std::vector<std::string> parse_errors;
};

std::optional<std::string> split_path(const std::string& dir, const std::string& split) {
  const std::string name = "streusle.ud_" + split + ".conllulex";
  for (auto p : {fs::path(dir) / split / name, fs::path(dir) / name})
    if (fs::exists(p)) return p.string();
  return std::nullopt;
}

Split load_split(const std::string& path) {
  Split s;
  s.path = path;
  s.blocks = read_blocks(path);
  for (const auto& b : s.blocks) {
    try {
      auto parsed = parse_conllulex(std::string_view(b.text));
      for (auto& x : parsed) s.sentences.push_back(std::move(x));
    } catch (const Error& e) {
      s.parse_errors.push_back(e.what());
    }
  }
  return s;
}

std::set<std::string> formatted_tags(std::span<const Sentence> corpus) {
  std::set<std::string> out;
  for (const auto& s : corpus)
    for (const auto& t : encode(s)) out.insert(format_tag(t));
  return out;
}

std::string count_check(const std::string& what, double got, double want, bool* pass) {
  std::ostringstream d;
  d << what << ' ' << got;
  if (got != want) {
    *pass = false;
    d << " (want " << want << ")";
  }
  return d.str();
}

// ---------------------------------------------------------------------------

void gold_denominators(Checklist& list, const Split* test) {
  const std::string name = "gold denominators";
  std::vector<std::string> missing;
  if (!test) missing.push_back("LSR_STREUSLE_DIR");
  auto parseme = env("LSR_PARSEME_TEST");
  auto dimsum = env("LSR_DIMSUM_TEST");
  if (!parseme) missing.push_back("LSR_PARSEME_TEST");
  if (!dimsum) missing.push_back("LSR_DIMSUM_TEST");
  std::ostringstream d;
  bool pass = true;

  if (test) {
    if (!test->parse_errors.empty()) {
      pass = false;
      d << "STREUSLE test: " << test->parse_errors.size() << " sentences fail to parse; ";
    }
    auto r = streusle_report(test->sentences, test->sentences);
    d << "STREUSLE test " << count_check("tags", r.accuracy("tags.full").total, kGoldTags, &pass) << ", "
      << count_check("noun", r.prf("noun.labeled").gold, kGoldNounUnits, &pass) << ", "
      << count_check("verb", r.prf("verb.labeled").gold, kGoldVerbUnits, &pass) << ", "
      << count_check("snacs", r.prf("snacs.labeled").gold, kGoldSnacsUnits, &pass) << ", "
      << count_check("links", r.prf("mwe.link_avg").gold, kGoldMweLinks, &pass) << "; ";
  }
  if (parseme) {
    auto p = read_cupt_file(*parseme);
    auto r = parseme_report(p, p);
    d << "PARSEME " << count_check("mwe-based", r.prf("parseme.mwe").gold, kParsemeMweBased, &pass) << ", "
      << count_check("token-based", r.prf("parseme.token").gold, kParsemeTokenBased, &pass) << "; ";
  }
  if (dimsum) {
    auto p = read_dimsum_file(*dimsum);
    auto r = dimsum_report(p, p);
    d << "DiMSUM " << count_check("mwe", r.prf("dimsum.mwe").gold, kDimsumMwe, &pass) << ", "
      << count_check("supersense", r.prf("dimsum.supersense").gold, kDimsumSupersense, &pass) << ", "
      << count_check("combined", r.prf("dimsum.combined").gold, kDimsumCombined, &pass) << "; ";
  }
  auto detail = d.str();
  if (detail.size() >= 2) detail.resize(detail.size() - 2);  // trailing "; "
  if (!missing.empty()) {
    std::string vars;
    for (const auto& m : missing) vars += (vars.empty() ? "" : ", ") + m;
    list.blocked("1", name, vars + " not set" + (detail.empty() ? "" : "; partial: " + detail));
    return;
  }
  list.record("1", name, pass, detail);
}

void tag_inventory(Checklist& list, const Split& train, const Split& dev, const Split& test) {
  std::vector<Sentence> all;
  for (const Split* s : {&train, &dev, &test}) all.insert(all.end(), s->sentences.begin(), s->sentences.end());
  auto all_tags = formatted_tags(all);
  auto train_tags = formatted_tags(train.sentences);
  auto dev_tags = formatted_tags(dev.sentences);
  std::size_t unseen = 0;
  for (const auto& t : dev_tags) unseen += train_tags.count(t) == 0;

  bool pass = train.parse_errors.empty() && dev.parse_errors.empty() && test.parse_errors.empty();
  std::ostringstream d;
  d << count_check("all splits", static_cast<double>(all_tags.size()), kAllTags, &pass) << ", "
    << count_check("train", static_cast<double>(train_tags.size()), kTrainTags, &pass) << ", "
    << count_check("unseen dev", static_cast<double>(unseen), kUnseenDevTags, &pass);
  list.record("2", "tag inventory counts", pass, d.str());
}

void codec_soundness(Checklist& list, std::span<const Split* const> splits) {
  std::size_t total = 0, ok = 0;
  std::string first_failure;
  for (const Split* split : splits) {
    for (const auto& block : split->blocks) {
      ++total;
      std::string why;
      // The corpus's own LEXTAG column, checked without the codec.
      std::vector<LexTag> column;
      try {
        for (const auto& cell : block.lextags) column.push_back(parse_tag(cell));
        if (!is_valid_sequence(std::span<const LexTag>(column))) why = "LEXTAG column fails the transition table";
      } catch (const Error& e) {
        why = std::string("unparsable LEXTAG: ") + e.what();
      }
      if (why.empty()) {
        try {
          // validate=false: the reader would otherwise compare LEXTAG itself.
          ConllulexOptions opts;
          opts.validate = false;
          auto s = parse_conllulex(std::string_view(block.text), opts).at(0);
          std::vector<std::size_t> dropped;
          auto tags = encode(s, &dropped);
          Sentence expected = s;
          for (auto it = dropped.rbegin(); it != dropped.rend(); ++it)
            expected.weak_groups.erase(expected.weak_groups.begin() + static_cast<std::ptrdiff_t>(*it));
          Sentence back = s;
          apply_structure(back, decode(tags));
          if (tags != column) why = "encode disagrees with the LEXTAG column";
          else if (!same_annotation(back, expected)) why = "decode(encode(s)) != s";
          else if (encode(back) != tags) why = "encode(decode(tags)) != tags";
        } catch (const Error& e) {
          why = e.what();
        }
      }
      if (why.empty()) ++ok;
      else if (first_failure.empty()) first_failure = why;
    }
  }
  std::ostringstream d;
  d << ok << "/" << total << " sentences round-trip with a valid LEXTAG sequence";
  if (!first_failure.empty()) d << "; first failure: " << first_failure;
  list.record("3", "codec soundness", total > 0 && ok == total, d.str());
}

void constraint_soundness(Checklist& list, std::span<const Split* const> splits) {
  std::vector<std::vector<LexTag>> seqs;
  for (const Split* split : splits)
    for (const auto& s : split->sentences) seqs.push_back(encode(s));
  auto tagset = TagSet::from_sequences(seqs);
  const auto& table = LexcatConstraintTable::builtin();

  std::size_t total = 0, ok = 0, relaxed = 0;
  std::string first_failure;
  std::size_t i = 0;
  for (const Split* split : splits) {
    for (const auto& s : split->sentences) {
      const auto& gold = seqs[i++];
      ++total;
      std::string why;
      try {
        auto masks = build_masks(s.tokens, tagset, table, {MissingUposPolicy::error});
        relaxed += masks.relaxed_positions.size();
        std::optional<std::size_t> prev;
        for (std::size_t t = 0; t < gold.size() && why.empty(); ++t) {
          auto k = *tagset.index_of(gold[t]);
          if (!masks.allowed(t, k))
            why = s.sent_id + " token " + std::to_string(t + 1) + " (" + s.tokens[t].upos + ") loses " +
                  format_tag(gold[t]);
          else if (prev ? !masks.transition(*prev, k) : !masks.start(k))
            why = s.sent_id + " transition into token " + std::to_string(t + 1);
          prev = k;
        }
        if (why.empty() && !masks.end(*prev)) why = s.sent_id + " end transition";
      } catch (const Error& e) {
        why = s.sent_id + ": " + e.what();
      }
      if (why.empty()) ++ok;
      else if (first_failure.empty()) first_failure = why;
    }
  }
  std::ostringstream d;
  d << "gold path survives the gold-POS masks in " << ok << "/" << total << " sentences (" << relaxed
    << " positions relaxed)";
  if (!first_failure.empty()) d << "; first failure: " << first_failure;
  list.record("4", "constraint soundness", total > 0 && ok == total, d.str());
}

void corpus_overfit(Checklist& list, const Split& train) {
  std::vector<Sentence> first(train.sentences.begin(),
                              train.sentences.begin() + static_cast<std::ptrdiff_t>(
                                                            std::min(kOverfitSentences, train.sentences.size())));
  const double acc = overfit_accuracy(first);
  list.record("6-corpus", "CRF overfit on STREUSLE train", first.size() == kOverfitSentences && acc >= kOverfitAccuracy,
              "token accuracy " + percent(acc) + " on the first " + std::to_string(first.size()) +
                  " training sentences (>= " + percent(kOverfitAccuracy) + ")");
}

void corpus_metrics(Checklist& list, const Split& train) {
  std::vector<Sentence> first(train.sentences.begin(),
                              train.sentences.begin() + static_cast<std::ptrdiff_t>(
                                                            std::min(kMetricSentences, train.sentences.size())));
  testing::Rng rng(7107);
  auto o = metric_properties(first, rng);
  list.record("7-corpus", "metric self-evaluation and symmetry on STREUSLE", o.pass && first.size() == kMetricSentences,
              o.detail);
}

// Most frequent training tag per lowercased form; the overall most frequent
// tag for unknown forms. Ties go to the smaller tag string.
class MostFrequentTag {
 public:
  explicit MostFrequentTag(std::span<const Sentence> corpus) {
    std::map<std::string, std::map<std::string, std::size_t>> by_form;
    std::map<std::string, std::size_t> overall;
    for (const auto& s : corpus) {
      auto tags = encode(s);
      for (std::size_t i = 0; i < tags.size(); ++i) {
        auto name = format_tag(tags[i]);
        ++by_form[ascii_lower(s.tokens[i].form)][name];
        ++overall[name];
      }
    }
    for (const auto& [form, counts] : by_form) best_[form] = argmax(counts);
    fallback_ = argmax(overall);
  }

  std::vector<LexTag> tag(const Sentence& s) const {
    std::vector<LexTag> out;
    for (const auto& t : s.tokens) {
      auto it = best_.find(ascii_lower(t.form));
      out.push_back(parse_tag(it == best_.end() ? fallback_ : it->second));
    }
    return out;
  }

 private:
  static std::string argmax(const std::map<std::string, std::size_t>& counts) {
    std::string best;
    std::size_t n = 0;
    for (const auto& [name, c] : counts)
      if (c > n) best = name, n = c;
    return best;
  }

  std::map<std::string, std::string> best_;
  std::string fallback_;
};

TrainConfig accept_config() {
  TrainConfig cfg;
  if (auto e = env("LSR_ACCEPT_EPOCHS")) cfg.max_epochs = std::stoul(*e);
  if (auto e = env("LSR_ACCEPT_LR")) cfg.learning_rate = std::stod(*e);
  return cfg;
}

void model_quality(Checklist& list, const Split& train, const Split& dev, const Split& test) {
  std::vector<std::vector<LexTag>> seqs;
  for (const auto& s : train.sentences) seqs.push_back(encode(s));
  auto tagset = TagSet::from_sequences(seqs);
  const auto cfg = accept_config();

  CrfModel model(tagset, FeatureEmissions{});
  std::vector<TrainExample> train_set, dev_set;
  for (const auto& s : train.sentences) train_set.push_back(make_example(model, s));
  for (const auto& s : dev.sentences) dev_set.push_back(make_example(model, s));
  auto result = lsr::train(model, train_set, dev_set, cfg, [](const EpochReport& r) {
    std::cerr << "epoch " << r.epoch << " dev accuracy " << r.dev_accuracy << '\n';
  });

  // Constrained decoding with gold POS and lemmas.
  const auto& table = LexcatConstraintTable::builtin();
  Accuracy crf_acc, base_acc;
  MostFrequentTag baseline(train.sentences);
  std::size_t invalid = 0, mask_violations = 0, roundtrip_failures = 0;
  for (std::size_t i = 0; i < dev.sentences.size(); ++i) {
    const auto& s = dev.sentences[i];
    auto masks = build_masks(s.tokens, tagset, table, {MissingUposPolicy::allow_all}, model.structure());
    auto pred = model.tag(dev_set[i].input, &masks);
    crf_acc += tag_accuracy(dev_set[i].gold, pred, TagMode::full);
    base_acc += tag_accuracy(dev_set[i].gold, baseline.tag(s), TagMode::full);

    if (!is_valid_sequence(std::span<const LexTag>(pred))) {
      ++invalid;
      continue;
    }
    for (std::size_t t = 0; t < pred.size(); ++t)
      if (!masks.allowed(t, *tagset.index_of(pred[t]))) ++mask_violations;
    Sentence out = s;
    apply_structure(out, decode(pred));
    if (encode(out) != pred) ++roundtrip_failures;
  }
  const bool structural = invalid == 0 && mask_violations == 0 && roundtrip_failures == 0;
  std::ostringstream d;
  d << "dev full-tag accuracy CRF " << percent(crf_acc.value()) << " vs most-frequent-tag " << percent(base_acc.value())
    << " (best epoch " << result.best_epoch << " of " << result.epochs.size() << "); outputs: " << invalid
    << " invalid sequences, " << mask_violations << " mask violations, " << roundtrip_failures
    << " codec round-trip failures";
  list.record("8", "model quality vs baseline", crf_acc.value() > base_acc.value() && structural, d.str());

  // Stretch, not counted.
  auto vt = env("LSR_VECTORS_TRAIN"), vd = env("LSR_VECTORS_DEV"), vs = env("LSR_VECTORS_TEST");
  if (!vt || !vd || !vs) {
    std::cout << "NOTE  8-stretch  projection model: not run (set LSR_VECTORS_TRAIN/DEV/TEST)\n";
    return;
  }
  auto train_vec = read_dense_vectors_file(*vt);
  auto dev_vec = read_dense_vectors_file(*vd);
  auto test_vec = read_dense_vectors_file(*vs);
  CrfModel proj(tagset, ProjectionEmissions{static_cast<std::size_t>(train_vec.at(0).cols())});
  std::vector<TrainExample> ptrain, pdev;
  for (std::size_t i = 0; i < train.sentences.size(); ++i)
    ptrain.push_back(make_example(proj, train.sentences[i], &train_vec.at(i)));
  for (std::size_t i = 0; i < dev.sentences.size(); ++i)
    pdev.push_back(make_example(proj, dev.sentences[i], &dev_vec.at(i)));
  lsr::train(proj, ptrain, pdev, cfg);
  Accuracy acc;
  for (std::size_t i = 0; i < test.sentences.size(); ++i) {
    auto ex = make_example(proj, test.sentences[i], &test_vec.at(i));
    auto masks = build_masks(test.sentences[i].tokens, tagset, table, {MissingUposPolicy::allow_all}, proj.structure());
    acc += tag_accuracy(ex.gold, proj.tag(ex.input, &masks), TagMode::full);
  }
  const bool near = std::abs(acc.value() - kProjectionTarget) <= kProjectionWindow;
  std::cout << "NOTE  8-stretch  projection model: test full-tag accuracy " << percent(acc.value()) << ", "
            << (near ? "within" : "outside") << " " << percent(kProjectionWindow) << " of "
            << percent(kProjectionTarget) << " (non-blocking)\n";
}

}  // namespace

int main() {
  Checklist list;
  try {
    auto dir = env("LSR_STREUSLE_DIR");
    std::optional<Split> train, dev, test;
    std::string missing;
    if (dir) {
      for (auto [name, slot] : {std::pair{"train", &train}, {"dev", &dev}, {"test", &test}}) {
        if (auto p = split_path(*dir, name)) *slot = load_split(*p);
        else missing += std::string(missing.empty() ? "" : ", ") + "streusle.ud_" + name + ".conllulex";
      }
    }
    const std::string reason = !dir ? "LSR_STREUSLE_DIR not set" : missing + " not found under " + *dir;
    const bool all = train && dev && test;

    gold_denominators(list, test ? &*test : nullptr);
    if (all) {
      const Split* splits[] = {&*train, &*dev, &*test};
      tag_inventory(list, *train, *dev, *test);
      codec_soundness(list, splits);
      constraint_soundness(list, splits);
      corpus_overfit(list, *train);
      corpus_metrics(list, *train);
      model_quality(list, *train, *dev, *test);
    } else {
      list.blocked("2", "tag inventory counts", reason);
      list.blocked("3", "codec soundness", reason);
      list.blocked("4", "constraint soundness", reason);
      list.blocked("6-corpus", "CRF overfit on STREUSLE train", reason);
      list.blocked("7-corpus", "metric self-evaluation and symmetry on STREUSLE", reason);
      list.blocked("8", "model quality vs baseline", reason);
    }
  } catch (const std::exception& e) {
    std::cout << "FAIL  -  acceptance run aborted: " << e.what() << std::endl;
    return 1;
  }
  return list.exit_code();
}
