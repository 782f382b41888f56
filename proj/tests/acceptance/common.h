#pragma once

#include <span>
#include <string>
#include <vector>

#include "lsr/corpus.h"
#include "support/generators.h"

namespace lsr::acceptance {

// Prints one PASS/FAIL line per criterion and remembers the outcome.
class Checklist {
 public:
  void record(const std::string& criterion, const std::string& name, bool pass, const std::string& detail);
  void blocked(const std::string& criterion, const std::string& name, const std::string& reason);
  int exit_code() const { return failures_ == 0 ? 0 : 1; }

 private:
  int failures_ = 0;
};

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Gold-vs-gold is perfect and swapping gold and prediction exchanges P and
// R exactly, for every row of the three reports, over corruptions of
// `corpus` at several rates.
Outcome metric_properties(std::span<const Sentence> corpus, testing::Rng& rng);

// Trains the feature CRF on `corpus` and returns its tag accuracy there.
double overfit_accuracy(std::span<const Sentence> corpus);

std::string percent(double x);

}  // namespace lsr::acceptance
