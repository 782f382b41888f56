#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lsr/convert.h"
#include "lsr/corpus.h"
#include "lsr/tagcodec.h"

namespace lsr {

// Precision/recall counts. Precision and recall keep separate numerators
// because link-based scoring credits predicted and gold items
// independently; set-overlap metrics use the same value for both.
// Counts may be fractional (averaged link counts).
struct Prf {
  double matched_pred = 0.0;  // predicted items judged correct
  double predicted = 0.0;
  double matched_gold = 0.0;  // gold items recovered
  double gold = 0.0;

  // A zero denominator gives 1 when the other side is also empty, else 0.
  double precision() const;
  double recall() const;
  double f1() const;

  Prf swapped() const { return {matched_gold, gold, matched_pred, predicted}; }
  Prf& operator+=(const Prf& o);
  friend Prf operator+(Prf a, const Prf& b) { return a += b; }
  friend bool operator==(const Prf&, const Prf&) = default;
};

// Component-wise mean of two count sets.
Prf average(const Prf& a, const Prf& b);

// Set comparison: matched = |gold ∩ pred|.
Prf set_prf(std::size_t matched, std::size_t predicted, std::size_t gold);

struct Accuracy {
  double correct = 0.0;
  double total = 0.0;

  double value() const { return total == 0.0 ? 1.0 : correct / total; }
  Accuracy& operator+=(const Accuracy& o) {
    correct += o.correct;
    total += o.total;
    return *this;
  }
  friend bool operator==(const Accuracy&, const Accuracy&) = default;
};

// ---------------------------------------------------------------------------
// STREUSLE metrics

enum class TagMode { full, drop_lexcat, drop_supersense, drop_both };

LexTag project_tag(const LexTag& tag, TagMode mode);

Accuracy tag_accuracy(std::span<const LexTag> gold, std::span<const LexTag> pred, TagMode mode);
Accuracy tag_accuracy(std::span<const Sentence> gold, std::span<const Sentence> pred, TagMode mode);

// Units are selected by the prefix of their supersense label (n., v., p.),
// so special labels such as `$ never count as SNACS.
enum class UnitClass { all, noun, verb, snacs };
enum class LabelMode { id, full, role, function };

// Spans labelled `??` on either side are discarded from both sides for
// every score except the identification score of UnitClass::all.
Prf unit_labeled_prf(const Sentence& gold, const Sentence& pred, UnitClass cls, LabelMode mode);
Prf unit_labeled_prf(std::span<const Sentence> gold, std::span<const Sentence> pred, UnitClass cls, LabelMode mode);

enum class WeakHandling { strong_only, strong_plus_weak, average };

// Links join consecutive members of a grouping. A predicted link counts as
// correct when both ends share a gold group, and vice versa for recall.
Prf mwe_link_prf(const Sentence& gold, const Sentence& pred, WeakHandling weak);
Prf mwe_link_prf(std::span<const Sentence> gold, std::span<const Sentence> pred, WeakHandling weak);

// Link scoring over token groups (1-based token lists).
Prf group_link_prf(std::span<const std::vector<int>> gold_groups, std::span<const std::vector<int>> pred_groups,
                   std::size_t tokens);

// ---------------------------------------------------------------------------
// PARSEME metrics

enum class ParsemeMode { mwe_based, token_based };

// Identification scores over token sets; categories are ignored.
Prf parseme_prf(std::span<const std::vector<int>> gold, std::span<const std::vector<int>> pred, ParsemeMode mode);
Prf parseme_prf(std::span<const ParsemeSentence> gold, std::span<const ParsemeSentence> pred, ParsemeMode mode);

// Maximum total weight of a one-to-one assignment between rows and
// columns of a non-negative weight matrix (rows x cols, row-major).
double max_weight_matching(std::span<const double> weights, std::size_t rows, std::size_t cols);

// ---------------------------------------------------------------------------
// DiMSUM metrics

struct DimsumScores {
  Prf mwe;
  Prf supersense;
  Prf combined;  // mwe + supersense counts
  Accuracy accuracy;  // token tags (flag, lowercased label)
};

DimsumScores dimsum_prf(const DimsumSentence& gold, const DimsumSentence& pred);
DimsumScores dimsum_prf(std::span<const DimsumSentence> gold, std::span<const DimsumSentence> pred);

// ---------------------------------------------------------------------------
// Reports

struct MetricRow {
  std::string id;
  std::variant<Prf, Accuracy> value;
};

struct MetricReport {
  std::vector<MetricRow> rows;

  const MetricRow* find(std::string_view id) const;
  const Prf& prf(std::string_view id) const;  // throws when absent
  const Accuracy& accuracy(std::string_view id) const;

  // Aligned table for people.
  void write_table(std::ostream& out) const;
  // Tab-separated: id kind matched_pred predicted matched_gold gold P R F.
  void write_tsv(std::ostream& out) const;
};

// Throws Error when the sentence lists are not aligned (count, ids, lengths).
void check_aligned(std::span<const Sentence> gold, std::span<const Sentence> pred);
void check_aligned(std::span<const ParsemeSentence> gold, std::span<const ParsemeSentence> pred);
void check_aligned(std::span<const DimsumSentence> gold, std::span<const DimsumSentence> pred);

MetricReport streusle_report(std::span<const Sentence> gold, std::span<const Sentence> pred);
MetricReport parseme_report(std::span<const ParsemeSentence> gold, std::span<const ParsemeSentence> pred);
MetricReport dimsum_report(std::span<const DimsumSentence> gold, std::span<const DimsumSentence> pred);

}  // namespace lsr
