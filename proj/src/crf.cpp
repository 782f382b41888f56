#include "lsr/crf.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "lsr/error.h"
#include "lsr/text.h"

namespace lsr {

static_assert(std::endian::native == std::endian::little, "model files store little-endian doubles");

// ---------------------------------------------------------------------------
// Features

std::uint64_t stable_hash(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  // Final avalanche so that nearby strings spread over the offset range.
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdull;
  h ^= h >> 33;
  return h;
}

std::string word_shape(std::string_view form) {
  std::string out;
  for (unsigned char c : form) {
    char cls;
    if (c >= 'A' && c <= 'Z') cls = 'X';
    else if (c >= 'a' && c <= 'z') cls = 'x';
    else if (c >= '0' && c <= '9') cls = 'd';
    else if (c >= 0x80) cls = 'u';
    else cls = static_cast<char>(c);
    if (out.empty() || out.back() != cls) out += cls;
  }
  return out;
}

std::vector<std::string> extract_features(std::span<const Token> tokens, std::size_t t, const FeatureTemplates& tpl) {
  std::vector<std::string> f;
  const auto& tok = tokens[t];
  const auto lower = ascii_lower(tok.form);
  if (tpl.bias) f.emplace_back("bias");
  if (tpl.form) f.push_back("w=" + tok.form);
  if (tpl.lower) f.push_back("lw=" + lower);
  if (tpl.affixes) {
    for (std::size_t k = 2; k <= 4 && k <= lower.size(); ++k) {
      f.push_back("p" + std::to_string(k) + "=" + lower.substr(0, k));
      f.push_back("s" + std::to_string(k) + "=" + lower.substr(lower.size() - k));
    }
  }
  if (tpl.shape) f.push_back("sh=" + word_shape(tok.form));
  auto at = [&](long i) -> const Token* {
    return i >= 0 && i < static_cast<long>(tokens.size()) ? &tokens[static_cast<std::size_t>(i)] : nullptr;
  };
  const long ti = static_cast<long>(t);
  for (int d = 1; d <= tpl.form_window; ++d) {
    for (int sgn : {-1, 1}) {
      const auto* o = at(ti + sgn * d);
      f.push_back("lw" + std::string(sgn < 0 ? "-" : "+") + std::to_string(d) + "=" +
                  (o ? ascii_lower(o->form) : (sgn < 0 ? "<s>" : "</s>")));
    }
  }
  if (tpl.lemma) f.push_back("lem=" + tok.lemma);
  if (tpl.upos) f.push_back("u=" + tok.upos);
  for (int d = 1; d <= tpl.upos_window; ++d) {
    for (int sgn : {-1, 1}) {
      const auto* o = at(ti + sgn * d);
      f.push_back("u" + std::string(sgn < 0 ? "-" : "+") + std::to_string(d) + "=" +
                  (o ? o->upos : (sgn < 0 ? "<s>" : "</s>")));
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Dense vectors

DenseVectors read_dense_vectors(std::istream& in) {
  DenseVectors out;
  std::string line;
  std::size_t line_no = 0, dim = 0;
  bool header = false;
  std::vector<std::vector<double>> rows;
  auto flush = [&] {
    if (rows.empty()) return;
    Eigen::MatrixXd m(rows.size(), dim);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < dim; ++c) m(r, c) = rows[r][c];
    out.push_back(std::move(m));
    rows.clear();
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header) {
      if (trim(line).empty()) continue;
      if (!starts_with(line, "dim=")) throw ParseError("", line_no, "vectors-header", "expected `dim=<d>`");
      try {
        dim = std::stoul(line.substr(4));
      } catch (const std::exception&) {
        throw ParseError("", line_no, "vectors-header", "bad dimension '" + line.substr(4) + "'");
      }
      if (dim == 0) throw ParseError("", line_no, "vectors-header", "dimension must be positive");
      header = true;
      continue;
    }
    if (trim(line).empty()) {
      flush();
      continue;
    }
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("", line_no, "vectors-row", "expected `index TAB values`");
    std::size_t index = 0;
    try {
      index = std::stoul(line.substr(0, tab));
    } catch (const std::exception&) {
      throw ParseError("", line_no, "vectors-row", "bad token index");
    }
    if (index != rows.size() + 1)
      throw ParseError("", line_no, "vectors-index", "token index " + std::to_string(index) + " out of sequence");
    std::vector<double> values;
    std::istringstream vs(line.substr(tab + 1));
    double x;
    while (vs >> x) values.push_back(x);
    if (!vs.eof()) throw ParseError("", line_no, "vectors-row", "non-numeric value");
    if (values.size() != dim)
      throw ParseError("", line_no, "vectors-dim",
                       "expected " + std::to_string(dim) + " values, got " + std::to_string(values.size()));
    rows.push_back(std::move(values));
  }
  flush();
  if (!header) throw ParseError("", line_no, "vectors-header", "missing `dim=<d>` header");
  return out;
}

DenseVectors read_dense_vectors_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_dense_vectors(in);
}

void write_dense_vectors(std::ostream& out, const DenseVectors& vectors) {
  const auto dim = vectors.empty() ? 0 : vectors.front().cols();
  out << "dim=" << dim << '\n';
  out.precision(17);
  for (const auto& m : vectors) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      out << r + 1 << '\t';
      for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? " " : "") << m(r, c);
      out << '\n';
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Forward-backward in scaled probability space

namespace {

struct Forward {
  Eigen::MatrixXd trans_exp;  // exp(T - shift), zero where forbidden
  double trans_shift = 0.0;
  Eigen::MatrixXd alpha;      // normalized per row
  Eigen::MatrixXd psi;        // exp(emission - m_t), zero where masked/unreachable
  Eigen::VectorXd scale;      // c_t
  Eigen::VectorXd end_exp;
  double end_scale = 0.0;
  double log_partition = 0.0;
};

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Forward run_forward(const ScoreLattice& l) {
  l.check();
  const auto n = static_cast<Eigen::Index>(l.length());
  const auto k = static_cast<Eigen::Index>(l.tags());
  Forward f;
  f.trans_exp = Eigen::MatrixXd::Zero(k, k);
  double shift = kNegInf;
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      if (l.masks.transition(i, j)) shift = std::max(shift, l.transitions(i, j));
  f.trans_shift = std::isfinite(shift) ? shift : 0.0;
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      if (l.masks.transition(i, j)) f.trans_exp(i, j) = std::exp(l.transitions(i, j) - f.trans_shift);

  f.alpha = Eigen::MatrixXd::Zero(n, k);
  f.psi = Eigen::MatrixXd::Zero(n, k);
  f.scale = Eigen::VectorXd::Zero(n);
  if (n == 0) return f;

  auto fail = [](Eigen::Index t) {
    throw DecodeError(static_cast<std::size_t>(t), "no feasible path carries probability mass");
  };
  double log_z = 0.0;
  Eigen::RowVectorXd reach(k);
  for (Eigen::Index t = 0; t < n; ++t) {
    if (t == 0) {
      for (Eigen::Index i = 0; i < k; ++i) reach(i) = l.masks.start(i) ? 1.0 : 0.0;
    } else {
      reach.noalias() = f.alpha.row(t - 1) * f.trans_exp;
    }
    double m = kNegInf;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (reach(i) <= 0.0 || !l.masks.allowed(t, i)) continue;
      const double s = l.emissions(t, i) + (t == 0 ? l.start(i) : 0.0);
      m = std::max(m, s);
    }
    if (!std::isfinite(m)) fail(t);
    for (Eigen::Index i = 0; i < k; ++i) {
      if (reach(i) <= 0.0 || !l.masks.allowed(t, i)) continue;
      f.psi(t, i) = std::exp(l.emissions(t, i) + (t == 0 ? l.start(i) : 0.0) - m);
    }
    Eigen::RowVectorXd u = reach.cwiseProduct(f.psi.row(t));
    const double c = u.sum();
    if (!(c > 0.0) || !std::isfinite(c)) fail(t);
    f.scale(t) = c;
    f.alpha.row(t) = u / c;
    log_z += std::log(c) + m;
  }
  log_z += static_cast<double>(n - 1) * f.trans_shift;

  f.end_exp = Eigen::VectorXd::Zero(k);
  double me = kNegInf;
  for (Eigen::Index i = 0; i < k; ++i)
    if (l.masks.end(i) && f.alpha(n - 1, i) > 0.0) me = std::max(me, l.end(i));
  if (!std::isfinite(me)) fail(n);
  for (Eigen::Index i = 0; i < k; ++i)
    if (l.masks.end(i)) f.end_exp(i) = std::exp(l.end(i) - me);
  f.end_scale = f.alpha.row(n - 1).dot(f.end_exp.transpose());
  if (!(f.end_scale > 0.0)) fail(n);
  f.log_partition = log_z + std::log(f.end_scale) + me;
  return f;
}

}  // namespace

double log_partition(const ScoreLattice& lattice) {
  if (lattice.length() == 0) return 0.0;
  return run_forward(lattice).log_partition;
}

Marginals forward_backward(const ScoreLattice& l) {
  const auto n = static_cast<Eigen::Index>(l.length());
  const auto k = static_cast<Eigen::Index>(l.tags());
  Marginals out;
  out.node = Eigen::MatrixXd::Zero(n, k);
  out.edge = Eigen::MatrixXd::Zero(k, k);
  out.start = Eigen::VectorXd::Zero(k);
  out.end = Eigen::VectorXd::Zero(k);
  if (n == 0) return out;

  auto f = run_forward(l);
  out.log_partition = f.log_partition;

  // q(t) = psi_t * beta_t / c_t feeds both the backward recursion and the
  // edge marginals.
  Eigen::MatrixXd beta(n, k), q(n, k);
  beta.row(n - 1) = f.end_exp.transpose() / f.end_scale;
  for (Eigen::Index t = n - 1; t > 0; --t) {
    q.row(t) = f.psi.row(t).cwiseProduct(beta.row(t)) / f.scale(t);
    beta.row(t - 1).noalias() = q.row(t) * f.trans_exp.transpose();
  }
  out.node = f.alpha.cwiseProduct(beta);
  if (n > 1) {
    out.edge.noalias() = f.alpha.topRows(n - 1).transpose() * q.bottomRows(n - 1);
    out.edge = out.edge.cwiseProduct(f.trans_exp);
  }
  out.start = out.node.row(0).transpose();
  out.end = out.node.row(n - 1).transpose();
  return out;
}

// ---------------------------------------------------------------------------
// Adam

void Adam::reset(std::size_t n) {
  m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  steps = 0;
}

void Adam::step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grad) {
  if (m.size() != params.size()) reset(static_cast<std::size_t>(params.size()));
  ++steps;
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v + (1.0 - beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(steps));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(steps));
  params.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

// ---------------------------------------------------------------------------
// Model

CrfModel::CrfModel(TagSet tagset, EmissionConfig emission)
    : tagset_(std::move(tagset)), emission_(std::move(emission)) {
  if (tagset_.empty()) throw Error("CRF model needs a non-empty tag set");
  structure_ = TransitionMask::for_tagset(tagset_);
  const std::size_t k = tags();
  std::size_t emission_params = 0;
  if (auto* fe = std::get_if<FeatureEmissions>(&emission_)) {
    if (fe->hash_dim < k) throw Error("feature hash dimension is smaller than the tag set");
    if (fe->hash_dim > std::numeric_limits<std::uint32_t>::max()) throw Error("feature hash dimension too large");
    emission_params = fe->hash_dim;
  } else {
    const auto& pe = std::get<ProjectionEmissions>(emission_);
    if (pe.dim == 0) throw Error("projection dimension must be positive");
    emission_params = pe.dim * k + k;
  }
  params_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(emission_offset() + emission_params));
  trainable_.assign(static_cast<std::size_t>(params_.size()), 1);
  for (std::size_t i = 0; i < k * k; ++i) trainable_[i] = structure_->trans[i];
  for (std::size_t i = 0; i < k; ++i) {
    trainable_[k * k + i] = structure_->start[i];
    trainable_[k * k + k + i] = structure_->end[i];
  }
}

CrfInput CrfModel::prepare(const Sentence& s, const Eigen::MatrixXd* vectors) const {
  CrfInput in;
  in.length = s.tokens.size();
  if (auto* fe = std::get_if<FeatureEmissions>(&emission_)) {
    const std::uint64_t range = fe->hash_dim - tags() + 1;
    in.begin.push_back(0);
    for (std::size_t t = 0; t < in.length; ++t) {
      for (const auto& feat : extract_features(s.tokens, t, fe->templates)) {
        const auto h = stable_hash(feat);
        in.offsets.push_back(static_cast<std::uint32_t>(h % range));
        in.signs.push_back((h >> 63) ? -1 : 1);
      }
      in.begin.push_back(static_cast<std::uint32_t>(in.offsets.size()));
    }
  } else {
    const auto& pe = std::get<ProjectionEmissions>(emission_);
    if (!vectors) throw Error("projection model needs dense vectors for sentence " + s.sent_id);
    if (static_cast<std::size_t>(vectors->rows()) != in.length || static_cast<std::size_t>(vectors->cols()) != pe.dim)
      throw Error("dense vectors for sentence " + s.sent_id + " are " + std::to_string(vectors->rows()) + "x" +
                  std::to_string(vectors->cols()) + ", expected " + std::to_string(in.length) + "x" +
                  std::to_string(pe.dim));
    in.vectors = *vectors;
  }
  return in;
}

Eigen::MatrixXd CrfModel::emission_scores(const CrfInput& in) const {
  const auto n = static_cast<Eigen::Index>(in.length);
  const auto k = static_cast<Eigen::Index>(tags());
  const double* w = params_.data() + emission_offset();
  if (std::holds_alternative<FeatureEmissions>(emission_)) {
    // Row-major so each feature adds one contiguous run.
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> e =
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Zero(n, k);
    for (Eigen::Index t = 0; t < n; ++t)
      for (auto f = in.begin[t]; f < in.begin[t + 1]; ++f)
        e.row(t) += static_cast<double>(in.signs[f]) * Eigen::Map<const Eigen::RowVectorXd>(w + in.offsets[f], k);
    return e;
  }
  const auto d = static_cast<Eigen::Index>(std::get<ProjectionEmissions>(emission_).dim);
  Eigen::Map<const Eigen::MatrixXd> proj(w, d, k);
  Eigen::Map<const Eigen::RowVectorXd> bias(w + d * k, k);
  Eigen::MatrixXd e = in.vectors * proj;
  e.rowwise() += bias;
  return e;
}

ScoreLattice CrfModel::lattice(const CrfInput& in) const {
  return lattice(in, LatticeMasks::structural(structure_, in.length));
}

ScoreLattice CrfModel::lattice(const CrfInput& in, LatticeMasks masks) const {
  const auto k = static_cast<Eigen::Index>(tags());
  ScoreLattice l;
  l.emissions = emission_scores(in);
  l.transitions = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      params_.data(), k, k);
  l.start = params_.segment(k * k, k);
  l.end = params_.segment(k * k + k, k);
  if (!masks.structure) masks.structure = structure_;
  l.masks = std::move(masks);
  return l;
}

void CrfModel::add_emission_gradient(const CrfInput& in, const Eigen::MatrixXd& de, Eigen::VectorXd& grad) const {
  const auto k = static_cast<Eigen::Index>(tags());
  double* g = grad.data() + emission_offset();
  if (std::holds_alternative<FeatureEmissions>(emission_)) {
    for (Eigen::Index t = 0; t < static_cast<Eigen::Index>(in.length); ++t)
      for (auto f = in.begin[t]; f < in.begin[t + 1]; ++f)
        Eigen::Map<Eigen::RowVectorXd>(g + in.offsets[f], k) += static_cast<double>(in.signs[f]) * de.row(t);
    return;
  }
  const auto d = static_cast<Eigen::Index>(std::get<ProjectionEmissions>(emission_).dim);
  Eigen::Map<Eigen::MatrixXd> proj(g, d, k);
  Eigen::Map<Eigen::RowVectorXd> bias(g + d * k, k);
  proj.noalias() += in.vectors.transpose() * de;
  bias += de.colwise().sum();
}

double CrfModel::nll(const CrfInput& in, std::span<const std::size_t> gold, Eigen::VectorXd* grad) const {
  if (gold.size() != in.length) throw Error("gold sequence length does not match the input");
  if (in.length == 0) return 0.0;
  const auto l = lattice(in);
  std::vector<std::size_t> path(gold.begin(), gold.end());
  if (!path_feasible(l, path)) throw Error("gold tag sequence is not a valid path");
  const double gold_score = path_score(l, path);
  if (!grad) return log_partition(l) - gold_score;

  const auto mg = forward_backward(l);
  const auto k = static_cast<Eigen::Index>(tags());
  if (grad->size() != params_.size()) throw Error("gradient buffer has the wrong size");
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> gt(grad->data(), k, k);
  gt += mg.edge;
  grad->segment(k * k, k) += mg.start;
  grad->segment(k * k + k, k) += mg.end;
  Eigen::MatrixXd de = mg.node;
  for (std::size_t t = 0; t < path.size(); ++t) {
    de(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(path[t])) -= 1.0;
    if (t) gt(static_cast<Eigen::Index>(path[t - 1]), static_cast<Eigen::Index>(path[t])) -= 1.0;
  }
  (*grad)(k * k + static_cast<Eigen::Index>(path.front())) -= 1.0;
  (*grad)(k * k + k + static_cast<Eigen::Index>(path.back())) -= 1.0;
  add_emission_gradient(in, de, *grad);
  return mg.log_partition - gold_score;
}

std::vector<std::size_t> CrfModel::decode(const CrfInput& in, const LatticeMasks* masks) const {
  if (in.length == 0) return {};
  return viterbi(masks ? lattice(in, *masks) : lattice(in)).path;
}

std::vector<LexTag> CrfModel::tag(const CrfInput& in, const LatticeMasks* masks) const {
  std::vector<LexTag> out;
  for (auto i : decode(in, masks)) out.push_back(tagset_.tag(i));
  return out;
}

// Model file: "LSRCRF" | u32 version | u64 header length | JSON header |
// u64 parameter count | parameters as little-endian doubles.
namespace {

constexpr char kMagic[6] = {'L', 'S', 'R', 'C', 'R', 'F'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& out, const T& x) {
  out.write(reinterpret_cast<const char*>(&x), sizeof x);
}

template <class T>
T get(std::istream& in) {
  T x{};
  in.read(reinterpret_cast<char*>(&x), sizeof x);
  if (!in) throw Error("model file is truncated");
  return x;
}

nlohmann::json templates_json(const FeatureTemplates& t) {
  return {{"bias", t.bias},       {"form", t.form}, {"lower", t.lower},         {"affixes", t.affixes},
          {"shape", t.shape},     {"form_window", t.form_window}, {"lemma", t.lemma}, {"upos", t.upos},
          {"upos_window", t.upos_window}};
}

FeatureTemplates templates_from(const nlohmann::json& j) {
  FeatureTemplates t;
  t.bias = j.at("bias");
  t.form = j.at("form");
  t.lower = j.at("lower");
  t.affixes = j.at("affixes");
  t.shape = j.at("shape");
  t.form_window = j.at("form_window");
  t.lemma = j.at("lemma");
  t.upos = j.at("upos");
  t.upos_window = j.at("upos_window");
  return t;
}

}  // namespace

void CrfModel::save(std::ostream& out) const {
  nlohmann::json header;
  header["tags"] = tagset_.names();
  if (auto* fe = std::get_if<FeatureEmissions>(&emission_)) {
    header["emission"] = {{"kind", "features"}, {"hash_dim", fe->hash_dim}, {"templates", templates_json(fe->templates)}};
  } else {
    header["emission"] = {{"kind", "projection"}, {"dim", std::get<ProjectionEmissions>(emission_).dim}};
  }
  header["metadata"] = metadata_;
  const auto text = header.dump();
  out.write(kMagic, sizeof kMagic);
  put(out, kVersion);
  put(out, static_cast<std::uint64_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  put(out, static_cast<std::uint64_t>(params_.size()));
  out.write(reinterpret_cast<const char*>(params_.data()), static_cast<std::streamsize>(params_.size() * sizeof(double)));
  if (!out) throw Error("failed to write model");
}

void CrfModel::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  save(out);
}

CrfModel CrfModel::load(std::istream& in) {
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || !std::equal(magic, magic + sizeof magic, kMagic)) throw Error("not a model file");
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion) throw Error("unsupported model version " + std::to_string(version));
  const auto header_size = get<std::uint64_t>(in);
  if (header_size > (std::uint64_t{1} << 30)) throw Error("model header too large");
  std::string text(header_size, '\0');
  in.read(text.data(), static_cast<std::streamsize>(header_size));
  if (!in) throw Error("model file is truncated");

  CrfModel model;
  try {
    const auto header = nlohmann::json::parse(text);
    const auto names = header.at("tags").get<std::vector<std::string>>();
    const auto& em = header.at("emission");
    EmissionConfig emission;
    if (em.at("kind") == "features") {
      emission = FeatureEmissions{templates_from(em.at("templates")), em.at("hash_dim").get<std::size_t>()};
    } else if (em.at("kind") == "projection") {
      emission = ProjectionEmissions{em.at("dim").get<std::size_t>()};
    } else {
      throw Error("unknown emission kind");
    }
    model = CrfModel(TagSet::from_strings(names), emission);
    if (header.contains("metadata")) model.metadata_ = header.at("metadata").get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad model header: ") + e.what());
  }
  const auto count = get<std::uint64_t>(in);
  if (count != static_cast<std::uint64_t>(model.params_.size()))
    throw Error("model parameter count " + std::to_string(count) + " does not match its header");
  in.read(reinterpret_cast<char*>(model.params_.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw Error("model file is truncated");
  return model;
}

CrfModel CrfModel::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return load(in);
}

std::vector<std::size_t> gold_indices(const TagSet& tagset, std::span<const LexTag> tags, std::size_t* unseen) {
  std::vector<std::size_t> out;
  out.reserve(tags.size());
  for (std::size_t t = 0; t < tags.size(); ++t) {
    if (auto i = tagset.index_of(tags[t])) {
      out.push_back(*i);
      continue;
    }
    auto b = tagset.backoff(tags[t]);
    if (!b) throw Error("tag " + format_tag(tags[t]) + " has no counterpart in the tag set");
    if (unseen) ++*unseen;
    out.push_back(*b);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training

TrainExample make_example(const CrfModel& model, const Sentence& s, const Eigen::MatrixXd* vectors) {
  TrainExample ex;
  ex.input = model.prepare(s, vectors);
  ex.gold = encode(s);
  ex.gold_index = gold_indices(model.tagset(), ex.gold);
  return ex;
}

double tag_accuracy(const CrfModel& model, std::span<const TrainExample> examples) {
  std::size_t correct = 0, total = 0;
  for (const auto& ex : examples) {
    const auto pred = model.decode(ex.input);
    for (std::size_t t = 0; t < pred.size(); ++t) {
      correct += model.tagset().name(pred[t]) == format_tag(ex.gold[t]);
      ++total;
    }
  }
  return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

double corpus_nll(const CrfModel& model, std::span<const TrainExample> examples) {
  double sum = 0.0;
  for (const auto& ex : examples) sum += model.nll(ex.input, ex.gold_index);
  return sum;
}

TrainResult train(CrfModel& model, std::span<const TrainExample> train_set, std::span<const TrainExample> dev_set,
                  const TrainConfig& config, const std::function<void(const EpochReport&)>& on_epoch) {
  if (train_set.empty()) throw Error("training corpus is empty");
  if (config.batch_size == 0 || !(config.learning_rate > 0.0) || !(config.clip_norm > 0.0) || config.l2 < 0.0)
    throw Error("invalid training configuration");

  auto& params = model.params();
  const auto size = params.size();
  Eigen::VectorXd trainable(size);
  for (Eigen::Index i = 0; i < size; ++i) trainable(i) = model.trainable()[static_cast<std::size_t>(i)];

  Adam adam;
  adam.lr = config.learning_rate;
  adam.reset(static_cast<std::size_t>(size));
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  Eigen::VectorXd best = params;
  std::size_t since_best = 0;
  Eigen::VectorXd grad(size);

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    EpochReport report;
    report.epoch = epoch;
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      grad.setZero();
      const auto e = std::min(order.size(), b + config.batch_size);
      for (std::size_t i = b; i < e; ++i) {
        const auto& ex = train_set[order[i]];
        report.train_nll += model.nll(ex.input, ex.gold_index, &grad);
      }
      if (config.l2 > 0.0) grad += config.l2 * params;
      grad = grad.cwiseProduct(trainable);
      const double norm = grad.norm();
      if (norm > config.clip_norm) grad *= config.clip_norm / norm;
      adam.step(params, grad);
    }
    if (!dev_set.empty()) {
      report.dev_accuracy = tag_accuracy(model, dev_set);
      report.dev_nll = corpus_nll(model, dev_set);
    }
    report.improved = dev_set.empty() || result.best_epoch == 0 || report.dev_accuracy > result.best_dev_accuracy;
    if (report.improved) {
      result.best_epoch = epoch;
      result.best_dev_accuracy = report.dev_accuracy;
      best = params;
      since_best = 0;
    } else {
      ++since_best;
    }
    result.epochs.push_back(report);
    if (on_epoch) on_epoch(report);
    if (since_best >= config.patience) break;
  }
  params = best;
  return result;
}

}  // namespace lsr
