// Acceptance criteria that need no corpus: decoder oracle, CRF correctness
// and metric properties on generated data.

#include <cmath>
#include <sstream>

#include "acceptance/common.h"
#include "lsr/crf.h"
#include "lsr/decoder.h"
#include "support/oracles.h"

using namespace lsr;
using namespace lsr::acceptance;

namespace {

constexpr int kLattices = 1000;
constexpr std::size_t kMaxTokens = 6;
constexpr std::size_t kMaxTags = 12;

constexpr int kGradientModels = 24;
constexpr double kGradientTolerance = 1e-4;
constexpr double kMassTolerance = 1e-8;
constexpr std::size_t kOverfitSentences = 50;
constexpr double kOverfitAccuracy = 0.99;

constexpr std::size_t kMetricSentences = 200;

void decoder_oracle(Checklist& list) {
  testing::Rng rng(5005);
  int agree = 0;
  for (int trial = 0; trial < kLattices; ++trial) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, kMaxTokens)(rng);
    // 12^6 paths is the brute-force limit; six-token lattices use at most 10 tags.
    const auto k = std::uniform_int_distribution<std::size_t>(2, n >= 6 ? 10 : kMaxTags)(rng);
    auto l = testing::random_lattice(rng, n, k);
    auto v = viterbi(l);
    auto b = brute_force(l);
    if (v.score == b.score && v.path == b.path && path_feasible(l, v.path)) ++agree;
  }
  std::ostringstream d;
  d << "viterbi == brute_force (exact score, same path) on " << agree << "/" << kLattices << " lattices of <= "
    << kMaxTokens << " tokens x <= " << kMaxTags << " tags";
  list.record("5", "decoder oracle", agree == kLattices, d.str());
}

void crf_correctness(Checklist& list) {
  testing::Rng rng(6006);
  auto ts = TagSet::from_strings(std::vector<std::string>{"O-N", "O-DET", "B-N", "I_", "I~-N", "o-DET", "b-N", "i_"});

  double worst_gradient = 0.0;
  double worst_mass = 0.0;
  for (int trial = 0; trial < kGradientModels; ++trial) {
    const bool projection = trial % 2 == 1;
    CrfModel m = projection ? CrfModel(ts, ProjectionEmissions{3}) : CrfModel(ts, FeatureEmissions{{}, 64});
    testing::randomize(m, rng, 0.7);
    auto s = testing::random_sentence(rng, std::uniform_int_distribution<std::size_t>(2, 4)(rng));
    Eigen::MatrixXd vec = Eigen::MatrixXd::Random(static_cast<Eigen::Index>(s.tokens.size()), 3);
    auto in = m.prepare(s, projection ? &vec : nullptr);
    auto lattice = m.lattice(in);
    auto gold = testing::random_feasible_path(lattice, rng);
    worst_gradient = std::max(worst_gradient, testing::gradient_error(m, in, gold));
    worst_mass = std::max(worst_mass, std::abs(testing::enumerated_probability_mass(lattice) - 1.0));
  }

  testing::Rng corpus_rng(6007);
  auto corpus = testing::random_corpus(corpus_rng, kOverfitSentences, 3, 12);
  const double overfit = overfit_accuracy(corpus);

  const bool pass = worst_gradient <= kGradientTolerance && worst_mass <= kMassTolerance && overfit >= kOverfitAccuracy;
  std::ostringstream d;
  d << "max relative gradient error " << worst_gradient << " (<= " << kGradientTolerance << ", " << kGradientModels
    << " models); max |sum p(path) - 1| " << worst_mass << " (<= " << kMassTolerance << "); overfit accuracy "
    << percent(overfit) << " on " << kOverfitSentences << " generated sentences (>= " << percent(kOverfitAccuracy)
    << ")";
  list.record("6", "CRF correctness", pass, d.str());
}

void metric_symmetry(Checklist& list) {
  testing::Rng rng(7007);
  auto corpus = testing::random_corpus(rng, kMetricSentences, 1, 25);
  auto o = metric_properties(corpus, rng);
  list.record("7", "metric self-evaluation and symmetry", o.pass, o.detail);
}

}  // namespace

int main() {
  Checklist list;
  decoder_oracle(list);
  crf_correctness(list);
  metric_symmetry(list);
  return list.exit_code();
}
