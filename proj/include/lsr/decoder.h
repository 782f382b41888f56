#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "lsr/constraints.h"

namespace lsr {

// Scores of one sentence: emissions (length x tags), transitions
// (tags x tags, row = previous tag), start and end vectors. Masked entries
// are excluded from every path.
struct ScoreLattice {
  Eigen::MatrixXd emissions;
  Eigen::MatrixXd transitions;
  Eigen::VectorXd start;
  Eigen::VectorXd end;
  LatticeMasks masks;

  std::size_t length() const { return static_cast<std::size_t>(emissions.rows()); }
  std::size_t tags() const { return static_cast<std::size_t>(emissions.cols()); }

  // Throws Error when the dimensions of scores and masks disagree.
  void check() const;
};

// Score given to infeasible states; far below any feasible path score.
inline constexpr double kMaskedScore = -1e30;

struct DecodeResult {
  std::vector<std::size_t> path;
  double score = 0.0;
};

// Sum of start, emission, transition and end scores along `path`, in
// left-to-right order.
double path_score(const ScoreLattice& lattice, const std::vector<std::size_t>& path);

bool path_feasible(const ScoreLattice& lattice, const std::vector<std::size_t>& path);

// Best feasible path; among equal scores the lexicographically smallest
// index sequence. Throws DecodeError when no path is feasible.
DecodeResult viterbi(const ScoreLattice& lattice);

// Exhaustive search with the same tie-break, for testing.
DecodeResult brute_force(const ScoreLattice& lattice, double max_paths = 1e7);

}  // namespace lsr
