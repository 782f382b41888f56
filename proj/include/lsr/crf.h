#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lsr/constraints.h"
#include "lsr/decoder.h"
#include "lsr/tagcodec.h"

namespace lsr {

// ---------------------------------------------------------------------------
// Emission providers

struct FeatureTemplates {
  bool bias = true;
  bool form = true;
  bool lower = true;
  bool affixes = true;  // 2-4 character prefixes and suffixes of the lowercased form
  bool shape = true;
  int form_window = 2;  // lowercased forms at offsets +-1..form_window
  // Off by default: POS and lemma only drive constrained decoding.
  bool lemma = false;
  bool upos = false;
  int upos_window = 0;

  friend bool operator==(const FeatureTemplates&, const FeatureTemplates&) = default;
};

// Sparse indicator features, hashed with the tag into `hash_dim` signed
// weights. Each feature owns a run of consecutive weights, one per tag,
// starting at a hashed offset.
struct FeatureEmissions {
  FeatureTemplates templates;
  std::size_t hash_dim = std::size_t{1} << 22;

  friend bool operator==(const FeatureEmissions&, const FeatureEmissions&) = default;
};

// Linear projection of externally supplied per-token vectors: W (dim x tags)
// plus a bias per tag.
struct ProjectionEmissions {
  std::size_t dim = 0;

  friend bool operator==(const ProjectionEmissions&, const ProjectionEmissions&) = default;
};

using EmissionConfig = std::variant<FeatureEmissions, ProjectionEmissions>;

// Feature strings for token `t` (0-based) under `templates`.
std::vector<std::string> extract_features(std::span<const Token> tokens, std::size_t t,
                                          const FeatureTemplates& templates);

// Word shape: character classes (X, x, d, other kept) with runs collapsed.
std::string word_shape(std::string_view form);

// Stable 64-bit FNV-1a.
std::uint64_t stable_hash(std::string_view s);

// ---------------------------------------------------------------------------
// Dense vectors file: header `dim=<d>`, then per sentence one line per
// token `index TAB v1 v2 ... vd`; sentences separated by blank lines.

using DenseVectors = std::vector<Eigen::MatrixXd>;  // one (tokens x dim) matrix per sentence

DenseVectors read_dense_vectors(std::istream& in);
DenseVectors read_dense_vectors_file(const std::string& path);
void write_dense_vectors(std::ostream& out, const DenseVectors& vectors);

// ---------------------------------------------------------------------------
// Forward-backward

struct Marginals {
  double log_partition = 0.0;
  Eigen::MatrixXd node;   // length x tags
  Eigen::MatrixXd edge;   // tags x tags, summed over positions
  Eigen::VectorXd start;  // marginal of the first tag
  Eigen::VectorXd end;    // marginal of the last tag
};

// Log of the summed exp-scores of all feasible paths of the lattice.
// Lattices from CrfModel use structural masks only.
double log_partition(const ScoreLattice& lattice);
Marginals forward_backward(const ScoreLattice& lattice);

// ---------------------------------------------------------------------------
// Model

struct Adam {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::uint64_t steps = 0;

  void reset(std::size_t n);
  void step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grad);
};

// Model input for one sentence: feature offsets/signs per token or a dense
// vector block.
struct CrfInput {
  std::size_t length = 0;
  std::vector<std::uint32_t> offsets;  // features of token t: [begin[t], begin[t+1])
  std::vector<std::int8_t> signs;
  std::vector<std::uint32_t> begin;
  Eigen::MatrixXd vectors;  // projection models only
};

class CrfModel {
 public:
  CrfModel() = default;
  CrfModel(TagSet tagset, EmissionConfig emission);

  const TagSet& tagset() const { return tagset_; }
  const EmissionConfig& emission() const { return emission_; }
  const std::shared_ptr<const TransitionMask>& structure() const { return structure_; }

  // Flat parameters: transitions (tags x tags, row-major), start, end,
  // then emission weights. Structurally forbidden transition/start/end
  // entries are held at zero and never used.
  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }
  std::size_t emission_offset() const { return 2 * tags() + tags() * tags(); }
  std::size_t tags() const { return tagset_.size(); }

  // `vectors` is required for projection models and ignored otherwise.
  CrfInput prepare(const Sentence& s, const Eigen::MatrixXd* vectors = nullptr) const;

  Eigen::MatrixXd emission_scores(const CrfInput& in) const;
  ScoreLattice lattice(const CrfInput& in) const;  // structural masks
  ScoreLattice lattice(const CrfInput& in, LatticeMasks masks) const;

  // Negative log-likelihood of `gold`; adds d(nll)/d(params) into `grad`
  // when given.
  double nll(const CrfInput& in, std::span<const std::size_t> gold, Eigen::VectorXd* grad = nullptr) const;

  // Mask of parameters that training may change.
  const std::vector<std::uint8_t>& trainable() const { return trainable_; }

  std::vector<std::size_t> decode(const CrfInput& in, const LatticeMasks* masks = nullptr) const;
  std::vector<LexTag> tag(const CrfInput& in, const LatticeMasks* masks = nullptr) const;

  // Free-form key/value pairs stored in the model file header (training
  // configuration echo, corpus paths).
  std::map<std::string, std::string>& metadata() { return metadata_; }
  const std::map<std::string, std::string>& metadata() const { return metadata_; }

  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static CrfModel load(std::istream& in);
  static CrfModel load_file(const std::string& path);

  friend bool operator==(const CrfModel& a, const CrfModel& b) {
    return a.tagset_ == b.tagset_ && a.emission_ == b.emission_ && a.params_ == b.params_;
  }

 private:
  void add_emission_gradient(const CrfInput& in, const Eigen::MatrixXd& d_emission, Eigen::VectorXd& grad) const;

  TagSet tagset_;
  EmissionConfig emission_ = FeatureEmissions{};
  std::shared_ptr<const TransitionMask> structure_;
  Eigen::VectorXd params_;
  std::vector<std::uint8_t> trainable_;
  std::map<std::string, std::string> metadata_;
};

// Gold indices for a tag sequence; tags outside the tag set are replaced by
// their backoff (and reported through `unseen`). Throws when even the flag
// is unknown.
std::vector<std::size_t> gold_indices(const TagSet& tagset, std::span<const LexTag> tags,
                                      std::size_t* unseen = nullptr);

// ---------------------------------------------------------------------------
// Training

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 75;
  double clip_norm = 5.0;
  std::size_t patience = 25;
  double l2 = 0.0;
  std::uint64_t seed = 1;
};

struct TrainExample {
  CrfInput input;
  std::vector<LexTag> gold;           // for accuracy
  std::vector<std::size_t> gold_index;  // for the likelihood
};

TrainExample make_example(const CrfModel& model, const Sentence& s, const Eigen::MatrixXd* vectors = nullptr);

struct EpochReport {
  std::size_t epoch = 0;  // 1-based
  double train_nll = 0.0;  // summed over the epoch's batches, before each update
  double dev_nll = 0.0;
  double dev_accuracy = 0.0;  // full-tag, structural decoding
  bool improved = false;
};

struct TrainResult {
  std::vector<EpochReport> epochs;
  std::size_t best_epoch = 0;  // 0 when no epoch ran
  double best_dev_accuracy = 0.0;
};

// Full-tag accuracy of structural decoding against gold strings.
double tag_accuracy(const CrfModel& model, std::span<const TrainExample> examples);
double corpus_nll(const CrfModel& model, std::span<const TrainExample> examples);

// Trains `model` in place (Adam, summed batch gradients, global-norm clip,
// early stopping on dev accuracy); the best epoch's parameters are kept.
// With an empty dev set every epoch counts as an improvement.
TrainResult train(CrfModel& model, std::span<const TrainExample> train_set, std::span<const TrainExample> dev_set,
                  const TrainConfig& config,
                  const std::function<void(const EpochReport&)>& on_epoch = {});

}  // namespace lsr
