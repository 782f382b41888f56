#include "cli.h"

#include <unistd.h>

#include <CLI11.hpp>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "lsr/constraints.h"
#include "lsr/convert.h"
#include "lsr/corpus.h"
#include "lsr/crf.h"
#include "lsr/error.h"
#include "lsr/metrics.h"
#include "lsr/tagcodec.h"
#include "lsr/text.h"

namespace lsr::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string one_line(std::string s) {
  for (auto& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

// ---------------------------------------------------------------------------
// Output: stdout, or a file replaced atomically.

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + tmp.string());
    f << content;
    f.close();
    if (!f) {
      fs::remove(tmp);
      throw Error("cannot write " + tmp.string());
    }
  }
  fs::rename(tmp, target);
}

// ---------------------------------------------------------------------------
// Formats

enum class Format { conllulex, cupt, dimsum, tags };

const std::map<std::string, Format> kFormats = {
    {"conllulex", Format::conllulex}, {"cupt", Format::cupt}, {"dimsum", Format::dimsum}, {"tags", Format::tags}};

Format format_of(const std::string& requested, const std::string& path) {
  if (!requested.empty()) return kFormats.at(requested);
  auto ext = std::filesystem::path(path).extension().string();
  if (ext == ".cupt") return Format::cupt;
  if (ext == ".dimsum" || ext == ".tsv") return Format::dimsum;
  if (ext == ".tags") return Format::tags;
  return Format::conllulex;
}

// Tags file: `# sent_id = ID`, then `index TAB form TAB tag` per token;
// blank line after each sentence.
struct TaggedSentence {
  std::string sent_id;
  std::vector<std::string> forms;
  std::vector<LexTag> tags;
};

std::string write_tags(const std::vector<TaggedSentence>& sentences) {
  std::ostringstream out;
  for (const auto& s : sentences) {
    out << "# sent_id = " << s.sent_id << '\n';
    for (std::size_t i = 0; i < s.tags.size(); ++i) out << i + 1 << '\t' << s.forms[i] << '\t' << format_tag(s.tags[i]) << '\n';
    out << '\n';
  }
  return out.str();
}

std::vector<TaggedSentence> read_tags(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<TaggedSentence> out;
  std::optional<TaggedSentence> current;
  std::string line;
  std::size_t line_no = 0;
  auto finish = [&] {
    if (current && !current->tags.empty()) out.push_back(std::move(*current));
    current.reset();
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      finish();
      continue;
    }
    if (!current) current.emplace();
    if (line.front() == '#') {
      auto body = trim(std::string_view(line).substr(1));
      if (starts_with(body, "sent_id")) {
        auto eq = body.find('=');
        if (eq != std::string_view::npos) current->sent_id = std::string(trim(body.substr(eq + 1)));
      }
      continue;
    }
    auto cols = split_view(line, '\t');
    if (cols.size() != 3)
      throw ParseError(current->sent_id, line_no, "column-count", "expected 3 columns, found " + std::to_string(cols.size()));
    if (cols[0] != std::to_string(current->tags.size() + 1))
      throw ParseError(current->sent_id, line_no, "token-index", "unexpected token index '" + std::string(cols[0]) + "'");
    try {
      current->tags.push_back(parse_tag(cols[2]));
    } catch (const ParseError& e) {
      throw ParseError(current->sent_id, line_no, e.rule(), std::string(cols[2]));
    }
    current->forms.emplace_back(cols[1]);
  }
  finish();
  return out;
}

// ---------------------------------------------------------------------------
// POS / lemma column selection

struct ColumnSelector {
  std::string column = "upos";  // upos | xpos | lemma | form | misc
  std::string key;              // for misc
};

ColumnSelector parse_selector(const std::string& text) {
  ColumnSelector s;
  if (starts_with(text, "misc:")) {
    s.column = "misc";
    s.key = text.substr(5);
    if (s.key.empty()) throw UsageError("empty MISC key in '" + text + "'");
    return s;
  }
  if (text != "upos" && text != "xpos" && text != "lemma" && text != "form")
    throw UsageError("unknown column '" + text + "' (upos, xpos, lemma, form or misc:KEY)");
  s.column = text;
  return s;
}

std::string select(const Token& t, const ColumnSelector& s) {
  if (s.column == "upos") return t.upos;
  if (s.column == "xpos") return t.xpos;
  if (s.column == "lemma") return t.lemma;
  if (s.column == "form") return t.form;
  for (auto field : split_view(t.misc, '|')) {
    auto eq = field.find('=');
    if (eq != std::string_view::npos && field.substr(0, eq) == s.key) return std::string(field.substr(eq + 1));
  }
  return "_";
}

Sentence with_columns(const Sentence& s, const ColumnSelector& pos, const ColumnSelector& lemma) {
  Sentence view = s;
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    view.tokens[i].upos = select(s.tokens[i], pos);
    view.tokens[i].lemma = select(s.tokens[i], lemma);
  }
  return view;
}

// Runs `f(i)` for i in [0, n) on up to `jobs` threads; the first exception
// (by index) is rethrown.
template <typename F>
void parallel_for(std::size_t n, std::size_t jobs, F f) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Subcommands

struct Options {
  std::string input;
  std::string output;
  std::string format;

  // decode
  std::string tokens;

  // train
  std::string train_path, dev_path, log_path, vectors_train, vectors_dev;
  TrainConfig train;
  int hash_bits = 22;
  FeatureTemplates templates;

  // tag
  std::string model_path, constraints = "builtin", pos_column = "upos", lemma_column = "lemma", vectors,
                          missing_upos = "error";
  std::size_t jobs = 1;

  // eval / convert
  std::string task, gold, pred, target;
  bool tsv = false;
};

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  auto fmt = format_of(o.format, o.input);
  std::size_t sentences = 0, violations = 0;
  std::ostringstream report;
  if (fmt == Format::conllulex) {
    ConllulexOptions opts;
    opts.validate = false;
    std::vector<Sentence> corpus;
    try {
      corpus = read_conllulex_file(o.input, opts);
    } catch (const ParseError& e) {
      // Structural damage stops the reader; report it like a violation.
      out << e.sentence_id() << '\t' << e.rule() << "\t-\t" << one_line(e.what()) << '\n';
      err << "lsr: data error: " << one_line(e.what()) << '\n';
      return kDataError;
    }
    sentences = corpus.size();
    for (const auto& s : corpus) {
      for (const auto& v : validate_sentence(s)) {
        ++violations;
        report << s.sent_id << '\t' << v.rule << '\t';
        for (std::size_t i = 0; i < v.tokens.size(); ++i) report << (i ? "," : "") << v.tokens[i];
        report << '\t' << one_line(v.message) << '\n';
      }
    }
  } else if (fmt == Format::cupt) {
    sentences = read_cupt_file(o.input).size();
  } else if (fmt == Format::dimsum) {
    sentences = read_dimsum_file(o.input).size();
  } else {
    auto tagged = read_tags(o.input);
    sentences = tagged.size();
    for (const auto& s : tagged) {
      auto flags = flags_of(s.tags);
      if (auto pos = first_invalid_position(flags)) {
        ++violations;
        report << s.sent_id << "\ttag-sequence\t" << *pos + 1 << "\tinvalid tag sequence\n";
      }
    }
  }
  out << report.str();
  if (violations > 0) {
    err << "lsr: data error: " << violations << " violation(s) in " << o.input << '\n';
    return kDataError;
  }
  out << "ok\t" << sentences << " sentences\n";
  return kOk;
}

int cmd_encode(const Options& o, std::ostream& out, std::ostream& err) {
  auto corpus = read_conllulex_file(o.input);
  std::vector<TaggedSentence> tagged;
  for (const auto& s : corpus) {
    std::vector<std::size_t> dropped;
    TaggedSentence t{s.sent_id, {}, encode(s, &dropped)};
    for (const auto& tok : s.tokens) t.forms.push_back(tok.form);
    if (!dropped.empty())
      err << "lsr: warning: " << s.sent_id << ": " << dropped.size() << " weak group(s) cannot be encoded\n";
    tagged.push_back(std::move(t));
  }
  write_output(o.output, write_tags(tagged), out);
  return kOk;
}

int cmd_decode(const Options& o, std::ostream& out, std::ostream&) {
  auto tagged = read_tags(o.input);
  std::vector<Sentence> corpus;
  if (!o.tokens.empty()) {
    ConllulexOptions opts;
    opts.annotations = false;
    corpus = read_conllulex_file(o.tokens, opts);
    if (corpus.size() != tagged.size())
      throw Error("tags file has " + std::to_string(tagged.size()) + " sentences, token file " +
                  std::to_string(corpus.size()));
  } else {
    for (const auto& t : tagged) {
      Sentence s;
      s.sent_id = t.sent_id;
      for (std::size_t i = 0; i < t.forms.size(); ++i) {
        Token tok;
        tok.index = static_cast<int>(i) + 1;
        tok.form = tok.lemma = t.forms[i];
        tok.upos = "_";
        s.text += (i ? " " : "") + t.forms[i];
        s.tokens.push_back(std::move(tok));
      }
      corpus.push_back(std::move(s));
    }
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].tokens.size() != tagged[i].tags.size())
      throw Error("sentence " + corpus[i].sent_id + ": token count differs from its tags");
    apply_structure(corpus[i], decode(tagged[i].tags));
  }
  write_output(o.output, write_conllulex(corpus), out);
  return kOk;
}

std::string number(double x) {
  std::ostringstream s;
  s << std::setprecision(6) << x;
  return s.str();
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  auto train_corpus = read_conllulex_file(o.train_path);
  auto dev_corpus = read_conllulex_file(o.dev_path);
  if (train_corpus.empty()) throw Error("training corpus " + o.train_path + " is empty");

  std::vector<std::vector<LexTag>> sequences;
  for (const auto& s : train_corpus) sequences.push_back(encode(s));
  auto tagset = TagSet::from_sequences(sequences);

  EmissionConfig emission;
  DenseVectors train_vectors, dev_vectors;
  if (!o.vectors_train.empty()) {
    if (o.vectors_dev.empty() && !dev_corpus.empty()) throw UsageError("--vectors-train needs --vectors-dev");
    train_vectors = read_dense_vectors_file(o.vectors_train);
    if (!o.vectors_dev.empty()) dev_vectors = read_dense_vectors_file(o.vectors_dev);
    if (train_vectors.size() != train_corpus.size() || dev_vectors.size() != dev_corpus.size())
      throw Error("vector files do not match the corpora sentence counts");
    emission = ProjectionEmissions{static_cast<std::size_t>(train_vectors.front().cols())};
  } else {
    if (o.hash_bits < 8 || o.hash_bits > 30) throw UsageError("--hash-bits must be in [8, 30]");
    emission = FeatureEmissions{o.templates, std::size_t{1} << o.hash_bits};
  }

  CrfModel model(tagset, emission);
  auto& meta = model.metadata();
  meta["train"] = o.train_path;
  meta["dev"] = o.dev_path;
  meta["learning_rate"] = number(o.train.learning_rate);
  meta["batch_size"] = std::to_string(o.train.batch_size);
  meta["max_epochs"] = std::to_string(o.train.max_epochs);
  meta["patience"] = std::to_string(o.train.patience);
  meta["clip_norm"] = number(o.train.clip_norm);
  meta["l2"] = number(o.train.l2);
  meta["seed"] = std::to_string(o.train.seed);

  auto examples = [&](const std::vector<Sentence>& corpus, const DenseVectors& vectors) {
    std::vector<TrainExample> out;
    for (std::size_t i = 0; i < corpus.size(); ++i)
      out.push_back(make_example(model, corpus[i], vectors.empty() ? nullptr : &vectors[i]));
    return out;
  };
  auto train_set = examples(train_corpus, train_vectors);
  auto dev_set = examples(dev_corpus, dev_vectors);

  std::size_t unseen = 0, dev_tokens = 0;
  for (const auto& ex : dev_set) {
    gold_indices(tagset, ex.gold, &unseen);
    dev_tokens += ex.gold.size();
  }
  err << "lsr: " << tagset.size() << " tags, " << train_set.size() << " training sentences, " << dev_set.size()
      << " dev sentences (" << unseen << " of " << dev_tokens << " dev tokens have unseen tags)\n";

  std::ofstream log;
  if (!o.log_path.empty()) {
    log.open(o.log_path, std::ios::app);
    if (!log) throw Error("cannot open log " + o.log_path);
  }
  auto on_epoch = [&](const EpochReport& r) {
    std::ostringstream rec;
    rec << "epoch=" << r.epoch << "\ttrain_nll=" << number(r.train_nll) << "\tdev_nll=" << number(r.dev_nll)
        << "\tdev_accuracy=" << number(r.dev_accuracy) << "\timproved=" << (r.improved ? 1 : 0) << '\n';
    err << rec.str();
    if (log) log << rec.str() << std::flush;
  };
  auto result = train(model, train_set, dev_set, o.train, on_epoch);
  meta["best_epoch"] = std::to_string(result.best_epoch);
  meta["best_dev_accuracy"] = number(result.best_dev_accuracy);

  std::ostringstream bytes;
  model.save(bytes);
  write_output(o.output, bytes.str(), out);
  if (!o.output.empty() && o.output != "-")
    out << "best_epoch=" << result.best_epoch << "\tdev_accuracy=" << number(result.best_dev_accuracy) << '\n';
  return kOk;
}

int cmd_tag(const Options& o, std::ostream& out, std::ostream& err) {
  auto model = CrfModel::load_file(o.model_path);
  auto fmt = format_of(o.format, o.input);
  if (fmt == Format::tags) throw UsageError("tag reads conllulex, cupt or dimsum input");

  std::vector<Sentence> corpus;
  std::vector<ParsemeSentence> cupt;
  std::vector<DimsumSentence> dimsum;
  if (fmt == Format::conllulex) {
    ConllulexOptions opts;
    opts.annotations = false;
    corpus = read_conllulex_file(o.input, opts);
  } else if (fmt == Format::cupt) {
    cupt = read_cupt_file(o.input);
    for (const auto& p : cupt) corpus.push_back(sentence_of(p));
  } else {
    dimsum = read_dimsum_file(o.input);
    for (const auto& d : dimsum) corpus.push_back(sentence_of(d));
  }

  DenseVectors vectors;
  if (std::holds_alternative<ProjectionEmissions>(model.emission())) {
    if (o.vectors.empty()) throw UsageError("this model needs --vectors");
    vectors = read_dense_vectors_file(o.vectors);
    if (vectors.size() != corpus.size()) throw Error("vector file does not match the input sentence count");
  }

  std::optional<LexcatConstraintTable> table;
  if (o.constraints == "builtin") table = LexcatConstraintTable::builtin();
  else if (o.constraints != "none") table = LexcatConstraintTable::load(o.constraints);
  MaskOptions mask_options;
  mask_options.missing_upos = o.missing_upos == "allow-all" ? MissingUposPolicy::allow_all : MissingUposPolicy::error;
  auto pos = parse_selector(o.pos_column);
  auto lemma = parse_selector(o.lemma_column);

  std::vector<std::vector<std::string>> warnings(corpus.size());
  parallel_for(corpus.size(), o.jobs, [&](std::size_t i) {
    auto view = with_columns(corpus[i], pos, lemma);
    auto input = model.prepare(view, vectors.empty() ? nullptr : &vectors[i]);
    auto masks = table ? build_masks(view.tokens, model.tagset(), *table, mask_options, model.structure())
                       : LatticeMasks::structural(model.structure(), view.tokens.size());
    warnings[i] = masks.warnings;
    apply_structure(corpus[i], decode(model.tag(input, &masks)));
  });
  for (std::size_t i = 0; i < corpus.size(); ++i)
    for (const auto& w : warnings[i]) err << "lsr: warning: " << corpus[i].sent_id << ": " << one_line(w) << '\n';

  std::string text;
  if (fmt == Format::conllulex) {
    text = write_conllulex(corpus);
  } else if (fmt == Format::cupt) {
    for (std::size_t i = 0; i < corpus.size(); ++i) project_into(cupt[i], corpus[i]);
    text = write_cupt(cupt);
  } else {
    for (std::size_t i = 0; i < corpus.size(); ++i) project_into(dimsum[i], corpus[i]);
    text = write_dimsum(dimsum);
  }
  write_output(o.output, text, out);
  return kOk;
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream&) {
  MetricReport report;
  if (o.task == "streusle") {
    report = streusle_report(read_conllulex_file(o.gold), read_conllulex_file(o.pred));
  } else if (o.task == "parseme") {
    report = parseme_report(read_cupt_file(o.gold), read_cupt_file(o.pred));
  } else {
    report = dimsum_report(read_dimsum_file(o.gold), read_dimsum_file(o.pred));
  }
  std::ostringstream text;
  if (o.tsv) report.write_tsv(text);
  else report.write_table(text);
  write_output(o.output, text.str(), out);
  return kOk;
}

int cmd_convert(const Options& o, std::ostream& out, std::ostream&) {
  auto corpus = read_conllulex_file(o.input);
  std::string text;
  if (o.target == "parseme") {
    std::vector<ParsemeSentence> p;
    for (const auto& s : corpus) p.push_back(to_parseme(s));
    text = write_cupt(p);
  } else {
    std::vector<DimsumSentence> d;
    for (const auto& s : corpus) d.push_back(to_dimsum(s));
    text = write_dimsum(d);
  }
  write_output(o.output, text, out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Lexical semantic recognition: MWE and supersense tagging", "lsr"};
  app.require_subcommand(1);
  std::vector<std::string> format_names;
  for (const auto& [name, f] : kFormats) format_names.push_back(name);

  auto* validate = app.add_subcommand("validate", "Check a file; prints one line per violation");
  validate->add_option("input", o.input, "Input file")->required()->check(CLI::ExistingFile);
  validate->add_option("--format", o.format, "Input format (default: from the extension)")
      ->check(CLI::IsMember(format_names));

  auto* enc = app.add_subcommand("encode", "Annotated CONLLULEX to a tags file");
  enc->add_option("input", o.input, "CONLLULEX input")->required()->check(CLI::ExistingFile);
  enc->add_option("-o,--output", o.output, "Output file (default: stdout)");

  auto* dec = app.add_subcommand("decode", "Tags file to CONLLULEX");
  dec->add_option("input", o.input, "Tags file")->required()->check(CLI::ExistingFile);
  dec->add_option("--tokens", o.tokens, "CONLLULEX file supplying the token columns")->check(CLI::ExistingFile);
  dec->add_option("-o,--output", o.output, "Output file (default: stdout)");

  auto* tr = app.add_subcommand("train", "Train a CRF tagger");
  tr->add_option("--train", o.train_path, "Training CONLLULEX")->required()->check(CLI::ExistingFile);
  tr->add_option("--dev", o.dev_path, "Development CONLLULEX (early stopping)")->required()->check(CLI::ExistingFile);
  tr->add_option("-o,--output", o.output, "Model file")->required();
  tr->add_option("--log", o.log_path, "Append one record per epoch to this file");
  tr->add_option("--epochs", o.train.max_epochs, "Maximum epochs")->capture_default_str()->check(CLI::PositiveNumber);
  tr->add_option("--lr", o.train.learning_rate, "Adam learning rate")->capture_default_str()->check(CLI::PositiveNumber);
  tr->add_option("--batch-size", o.train.batch_size, "Sentences per update")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  tr->add_option("--patience", o.train.patience, "Epochs without dev improvement before stopping")
      ->capture_default_str();
  tr->add_option("--clip-norm", o.train.clip_norm, "Global gradient norm limit")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  tr->add_option("--l2", o.train.l2, "L2 penalty")->capture_default_str()->check(CLI::NonNegativeNumber);
  tr->add_option("--seed", o.train.seed, "Shuffling seed")->capture_default_str();
  tr->add_option("--hash-bits", o.hash_bits, "log2 of the hashed feature space")->capture_default_str();
  tr->add_option("--form-window", o.templates.form_window, "Context forms on each side")
      ->capture_default_str()
      ->check(CLI::Range(0, 5));
  tr->add_flag("--lemma-features", o.templates.lemma, "Add lemma features");
  tr->add_flag("--upos-features", o.templates.upos, "Add UPOS features");
  tr->add_option("--upos-window", o.templates.upos_window, "Context UPOS on each side")->check(CLI::Range(0, 5));
  tr->add_option("--vectors-train", o.vectors_train, "Token vectors for --train (projection model)")
      ->check(CLI::ExistingFile);
  tr->add_option("--vectors-dev", o.vectors_dev, "Token vectors for --dev")->check(CLI::ExistingFile);

  auto* tg = app.add_subcommand("tag", "Tag sentences with a trained model");
  tg->add_option("input", o.input, "Input (conllulex, cupt or dimsum)")->required()->check(CLI::ExistingFile);
  tg->add_option("-m,--model", o.model_path, "Model file")->required()->check(CLI::ExistingFile);
  tg->add_option("-o,--output", o.output, "Output file (default: stdout), same format as the input");
  tg->add_option("--format", o.format, "Input format (default: from the extension)")
      ->check(CLI::IsMember(std::vector<std::string>{"conllulex", "cupt", "dimsum"}));
  tg->add_option("--constraints", o.constraints, "Lexcat constraints: builtin, none or a table file")
      ->capture_default_str();
  tg->add_option("--pos-column", o.pos_column, "POS source: upos, xpos or misc:KEY")->capture_default_str();
  tg->add_option("--lemma-column", o.lemma_column, "Lemma source: lemma, form or misc:KEY")->capture_default_str();
  tg->add_option("--missing-upos", o.missing_upos, "POS without a constraint rule")
      ->capture_default_str()
      ->check(CLI::IsMember(std::vector<std::string>{"error", "allow-all"}));
  tg->add_option("--vectors", o.vectors, "Token vectors (projection models)")->check(CLI::ExistingFile);
  tg->add_option("-j,--jobs", o.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  auto* ev = app.add_subcommand("eval", "Score predictions against gold");
  ev->add_option("--task", o.task, "streusle, parseme or dimsum")
      ->required()
      ->check(CLI::IsMember(std::vector<std::string>{"streusle", "parseme", "dimsum"}));
  ev->add_option("gold", o.gold, "Gold file")->required()->check(CLI::ExistingFile);
  ev->add_option("pred", o.pred, "Predicted file")->required()->check(CLI::ExistingFile);
  ev->add_flag("--tsv", o.tsv, "Tab-separated records instead of a table");
  ev->add_option("-o,--output", o.output, "Output file (default: stdout)");

  auto* cv = app.add_subcommand("convert", "Project CONLLULEX to PARSEME or DiMSUM");
  cv->add_option("--to", o.target, "parseme or dimsum")
      ->required()
      ->check(CLI::IsMember(std::vector<std::string>{"parseme", "dimsum"}));
  cv->add_option("input", o.input, "CONLLULEX input")->required()->check(CLI::ExistingFile);
  cv->add_option("-o,--output", o.output, "Output file (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "lsr: usage error: " << one_line(e.what()) << '\n';
    return kUsage;
  }

  try {
    if (*validate) return cmd_validate(o, out, err);
    if (*enc) return cmd_encode(o, out, err);
    if (*dec) return cmd_decode(o, out, err);
    if (*tr) return cmd_train(o, out, err);
    if (*tg) return cmd_tag(o, out, err);
    if (*ev) return cmd_eval(o, out, err);
    if (*cv) return cmd_convert(o, out, err);
  } catch (const UsageError& e) {
    err << "lsr: usage error: " << one_line(e.what()) << '\n';
    return kUsage;
  } catch (const InternalError& e) {
    err << "lsr: internal error: " << one_line(e.what()) << '\n';
    return kInternalError;
  } catch (const Error& e) {
    err << "lsr: data error: " << one_line(e.what()) << '\n';
    return kDataError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "lsr: data error: " << one_line(e.what()) << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "lsr: internal error: " << one_line(e.what()) << '\n';
    return kInternalError;
  }
  return kUsage;
}

}  // namespace lsr::cli
