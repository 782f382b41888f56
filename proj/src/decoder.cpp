#include "lsr/decoder.h"

#include <cmath>

#include "lsr/error.h"

namespace lsr {

void ScoreLattice::check() const {
  const auto n = length(), k = tags();
  if (static_cast<std::size_t>(transitions.rows()) != k || static_cast<std::size_t>(transitions.cols()) != k ||
      static_cast<std::size_t>(start.size()) != k || static_cast<std::size_t>(end.size()) != k)
    throw Error("score lattice: transition/start/end sizes do not match the tag count");
  if (masks.length != n || masks.tags != k || !masks.structure || masks.structure->tags != k)
    throw Error("score lattice: mask dimensions do not match the scores");
}

double path_score(const ScoreLattice& l, const std::vector<std::size_t>& path) {
  if (path.empty()) return 0.0;
  double s = l.start(path[0]);
  for (std::size_t t = 0; t < path.size(); ++t) {
    if (t) s += l.transitions(path[t - 1], path[t]);
    s += l.emissions(t, path[t]);
  }
  return s + l.end(path.back());
}

bool path_feasible(const ScoreLattice& l, const std::vector<std::size_t>& path) {
  if (path.size() != l.length()) return false;
  if (path.empty()) return true;
  if (!l.masks.start(path.front()) || !l.masks.end(path.back())) return false;
  for (std::size_t t = 0; t < path.size(); ++t) {
    if (!l.masks.allowed(t, path[t])) return false;
    if (t && !l.masks.transition(path[t - 1], path[t])) return false;
  }
  return true;
}

DecodeResult viterbi(const ScoreLattice& l) {
  l.check();
  const std::size_t n = l.length(), k = l.tags();
  if (n == 0) return {};

  // best(t, i): best score of a feasible suffix starting at position t in tag
  // i. Running right to left and following forward pointers from the left
  // end gives the lexicographically smallest optimal path.
  Eigen::MatrixXd best(n, k);
  std::vector<std::size_t> next(n * k, 0);
  for (std::size_t i = 0; i < k; ++i)
    best(n - 1, i) = l.masks.allowed(n - 1, i) && l.masks.end(i) ? l.emissions(n - 1, i) + l.end(i) : kMaskedScore;
  for (std::size_t t = n - 1; t-- > 0;) {
    for (std::size_t i = 0; i < k; ++i) {
      best(t, i) = kMaskedScore;
      if (!l.masks.allowed(t, i)) continue;
      double top = kMaskedScore;
      std::size_t arg = 0;
      bool found = false;
      for (std::size_t j = 0; j < k; ++j) {
        if (best(t + 1, j) == kMaskedScore || !l.masks.transition(i, j)) continue;
        const double v = l.transitions(i, j) + best(t + 1, j);
        if (!found || v > top) top = v, arg = j, found = true;
      }
      if (found) {
        best(t, i) = l.emissions(t, i) + top;
        next[t * k + i] = arg;
      }
    }
  }
  double top = kMaskedScore;
  std::size_t arg = 0;
  bool found = false;
  for (std::size_t i = 0; i < k; ++i) {
    if (best(0, i) == kMaskedScore || !l.masks.start(i)) continue;
    const double v = l.start(i) + best(0, i);
    if (!found || v > top) top = v, arg = i, found = true;
  }
  if (!found) throw DecodeError(0, "no feasible tag path under the masks");

  DecodeResult r;
  r.path.resize(n);
  r.path[0] = arg;
  for (std::size_t t = 1; t < n; ++t) r.path[t] = next[(t - 1) * k + r.path[t - 1]];
  r.score = path_score(l, r.path);
  return r;
}

DecodeResult brute_force(const ScoreLattice& l, double max_paths) {
  l.check();
  const std::size_t n = l.length(), k = l.tags();
  if (n == 0) return {};
  if (std::pow(static_cast<double>(k), static_cast<double>(n)) > max_paths)
    throw Error("brute_force: " + std::to_string(k) + "^" + std::to_string(n) + " paths exceed the enumeration guard");

  DecodeResult best;
  bool found = false;
  std::vector<std::size_t> path(n, 0);
  // Odometer over index sequences in lexicographic order.
  while (true) {
    if (path_feasible(l, path)) {
      const double s = path_score(l, path);
      if (!found || s > best.score) best = {path, s}, found = true;
    }
    std::size_t pos = n;
    while (pos > 0 && path[pos - 1] + 1 == k) path[--pos] = 0;
    if (pos == 0) break;
    ++path[pos - 1];
  }
  if (!found) throw DecodeError(0, "no feasible tag path under the masks");
  return best;
}

}  // namespace lsr
