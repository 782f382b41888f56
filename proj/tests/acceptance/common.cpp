#include "acceptance/common.h"

#include <iomanip>
#include <iostream>
#include <sstream>

#include "lsr/convert.h"
#include "lsr/crf.h"
#include "lsr/metrics.h"

namespace lsr::acceptance {

void Checklist::record(const std::string& criterion, const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++failures_;
  std::cout << (pass ? "PASS" : "FAIL") << "  " << criterion << "  " << name << ": " << detail << std::endl;
}

void Checklist::blocked(const std::string& criterion, const std::string& name, const std::string& reason) {
  record(criterion, name, false, "blocked, " + reason);
}

std::string percent(double x) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << 100.0 * x << '%';
  return s.str();
}

namespace {

bool perfect(const MetricReport& r, std::string* bad) {
  for (const auto& row : r.rows) {
    bool ok = true;
    if (const auto* p = std::get_if<Prf>(&row.value))
      ok = p->precision() == 1.0 && p->recall() == 1.0 && p->f1() == 1.0;
    else
      ok = std::get<Accuracy>(row.value).value() == 1.0;
    if (!ok) {
      *bad = row.id;
      return false;
    }
  }
  return true;
}

bool swap_exact(const MetricReport& ab, const MetricReport& ba, std::string* bad) {
  if (ab.rows.size() != ba.rows.size()) {
    *bad = "row count";
    return false;
  }
  for (std::size_t i = 0; i < ab.rows.size(); ++i) {
    const auto& x = ab.rows[i];
    const auto& y = ba.rows[i];
    bool ok = x.id == y.id;
    if (ok) {
      if (const auto* p = std::get_if<Prf>(&x.value)) {
        const auto& q = std::get<Prf>(y.value);
        ok = p->swapped() == q && p->precision() == q.recall() && p->recall() == q.precision();
      } else {
        ok = std::get<Accuracy>(x.value) == std::get<Accuracy>(y.value);
      }
    }
    if (!ok) {
      *bad = x.id;
      return false;
    }
  }
  return true;
}

}  // namespace

Outcome metric_properties(std::span<const Sentence> corpus, testing::Rng& rng) {
  std::vector<ParsemeSentence> pg;
  std::vector<DimsumSentence> dg;
  for (const auto& s : corpus) {
    pg.push_back(to_parseme(s));
    dg.push_back(to_dimsum(s));
  }
  std::string bad;
  std::size_t rows = 0;
  if (!perfect(streusle_report(corpus, corpus), &bad) || !perfect(parseme_report(pg, pg), &bad) ||
      !perfect(dimsum_report(dg, dg), &bad))
    return {false, "gold-vs-gold not perfect on " + bad};

  const double rates[] = {0.1, 0.3, 0.6, 1.0};
  for (double rate : rates) {
    std::vector<Sentence> pred;
    std::vector<ParsemeSentence> pp;
    std::vector<DimsumSentence> dp;
    for (const auto& s : corpus) {
      pred.push_back(testing::corrupt_sentence(rng, s, rate));
      pp.push_back(to_parseme(pred.back()));
      dp.push_back(to_dimsum(pred.back()));
    }
    auto a = streusle_report(corpus, pred);
    auto b = parseme_report(pg, pp);
    auto c = dimsum_report(dg, dp);
    rows += a.rows.size() + b.rows.size() + c.rows.size();
    if (!swap_exact(a, streusle_report(pred, corpus), &bad) || !swap_exact(b, parseme_report(pp, pg), &bad) ||
        !swap_exact(c, dimsum_report(dp, dg), &bad)) {
      std::ostringstream d;
      d << "swap broken on " << bad << " at corruption rate " << rate;
      return {false, d.str()};
    }
  }
  std::ostringstream d;
  d << corpus.size() << " sentences: gold-vs-gold perfect on all rows; swap exact on " << rows
    << " rows over 4 corruption rates";
  return {true, d.str()};
}

double overfit_accuracy(std::span<const Sentence> corpus) {
  std::vector<std::vector<LexTag>> seqs;
  for (const auto& s : corpus) seqs.push_back(encode(s));
  CrfModel m(TagSet::from_sequences(seqs), FeatureEmissions{{}, std::size_t{1} << 20});
  std::vector<TrainExample> ex;
  for (const auto& s : corpus) ex.push_back(make_example(m, s));
  TrainConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.batch_size = 8;
  cfg.max_epochs = 60;
  cfg.patience = 60;
  train(m, ex, ex, cfg);
  return tag_accuracy(m, ex);
}

}  // namespace lsr::acceptance
