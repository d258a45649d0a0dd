// SPDX-License-Identifier: Apache-2.0
//
// sentigru command-line tool. Talks to the library only through the C API.
//
// Exit codes: 0 success, 1 usage error, 2 data or model error.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sentigru/sentigru.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags and their config-file keys share one name (without the dashes).
struct RunConfig {
  std::string data;
  std::string stopwords;
  std::string model;
  std::string out;
  std::string text;
  std::uint64_t epochs = 5;
  std::uint64_t batch_size = 64;
  double lr = 1e-3;
  std::uint64_t seed = 42;
  std::uint64_t seq_len = 79;
  std::uint64_t vocab_size = 50000;
  std::uint64_t embed_dim = 50;
  std::vector<std::uint64_t> units = {120, 64, 64};
  double dropout = 0.3;
  double split = 0.8;
  double clip_norm = 0.0;
  bool stratify = false;
  bool deterministic = false;
  std::string precision = "f32";
  std::string delimiter = ",";
  std::string header = "auto";
  std::string stopword_mode = "apply";
  std::uint64_t top_k = 50;
};

template <class T>
T parse_value(const std::string& key, const std::string& value) {
  T out{};
  if (!CLI::detail::lexical_cast(value, out)) {
    throw UsageError("config key '" + key + "': cannot parse '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") {
    return true;
  }
  if (value == "0" || value == "false" || value == "no" || value == "off") {
    return false;
  }
  throw UsageError("config key '" + key + "': expected a boolean");
}

std::vector<std::uint64_t> parse_units(const std::string& value) {
  std::vector<std::uint64_t> units;
  std::stringstream in(value);
  std::string part;
  while (std::getline(in, part, ',')) {
    units.push_back(parse_value<std::uint64_t>("units", part));
  }
  return units;
}

void apply_setting(RunConfig& rc, const std::string& key,
                   const std::string& value) {
  if (key == "data") rc.data = value;
  else if (key == "stopwords") rc.stopwords = value;
  else if (key == "model") rc.model = value;
  else if (key == "out") rc.out = value;
  else if (key == "epochs") rc.epochs = parse_value<std::uint64_t>(key, value);
  else if (key == "batch-size") rc.batch_size = parse_value<std::uint64_t>(key, value);
  else if (key == "lr") rc.lr = parse_value<double>(key, value);
  else if (key == "seed") rc.seed = parse_value<std::uint64_t>(key, value);
  else if (key == "seq-len") rc.seq_len = parse_value<std::uint64_t>(key, value);
  else if (key == "vocab-size") rc.vocab_size = parse_value<std::uint64_t>(key, value);
  else if (key == "embed-dim") rc.embed_dim = parse_value<std::uint64_t>(key, value);
  else if (key == "units") rc.units = parse_units(value);
  else if (key == "dropout") rc.dropout = parse_value<double>(key, value);
  else if (key == "split") rc.split = parse_value<double>(key, value);
  else if (key == "clip-norm") rc.clip_norm = parse_value<double>(key, value);
  else if (key == "stratify") rc.stratify = parse_bool(key, value);
  else if (key == "deterministic") rc.deterministic = parse_bool(key, value);
  else if (key == "precision") rc.precision = value;
  else if (key == "delimiter") rc.delimiter = value;
  else if (key == "header") rc.header = value;
  else if (key == "stopword-mode") rc.stopword_mode = value;
  else if (key == "top-k") rc.top_k = parse_value<std::uint64_t>(key, value);
  else throw UsageError("unknown config key '" + key + "'");
}

// `paper` pins the published hyperparameters; anything else is a flat
// key=value file ('#' comments allowed).
void apply_config(RunConfig& rc, const std::string& source) {
  if (source == "paper") {
    rc.seq_len = 79;
    rc.vocab_size = 50000;
    rc.embed_dim = 50;
    rc.units = {120, 64, 64};
    rc.epochs = 5;
    rc.split = 0.8;
    return;
  }
  std::ifstream in(source);
  if (!in) throw UsageError("cannot read config file '" + source + "'");
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(source + ":" + std::to_string(line_no) +
                       ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    apply_setting(rc, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

std::optional<std::string> find_config(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  return std::nullopt;
}

void check(sg_status status) {
  if (status != SG_OK) {
    throw DataError(std::string(sg_status_name(status)) + ": " + sg_last_error());
  }
}

// Owns a string handed out by the C API.
class CString {
 public:
  CString() = default;
  ~CString() { sg_string_free(ptr_); }
  CString(const CString&) = delete;
  CString& operator=(const CString&) = delete;
  char** out() { return &ptr_; }
  std::string str() const { return ptr_ ? ptr_ : ""; }

 private:
  char* ptr_ = nullptr;
};

template <class H, void (*Free)(H*)>
class Handle {
 public:
  Handle() = default;
  ~Handle() { Free(ptr_); }
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  H** out() { return &ptr_; }
  H* get() const { return ptr_; }

 private:
  H* ptr_ = nullptr;
};

using Corpus = Handle<sg_corpus, sg_corpus_free>;
using Stoplist = Handle<sg_stoplist, sg_stoplist_free>;
using ModelHandle = Handle<sg_model, sg_model_free>;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << content;
  if (!out) throw DataError("failed writing '" + path + "'");
}

void require_path(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
}

void require_existing(const std::string& path, const char* flag) {
  require_path(path, flag);
  if (!std::filesystem::exists(path)) {
    throw DataError(std::string(flag) + " '" + path + "' does not exist");
  }
}

char delimiter_of(const RunConfig& rc) {
  if (rc.delimiter == "tab" || rc.delimiter == "\\t") return '\t';
  if (rc.delimiter.size() != 1) {
    throw UsageError("--delimiter must be a single character or 'tab'");
  }
  return rc.delimiter[0];
}

int header_of(const RunConfig& rc) {
  if (rc.header == "auto") return -1;
  if (rc.header == "yes") return 1;
  if (rc.header == "no") return 0;
  throw UsageError("--header must be auto, yes or no");
}

void load_corpus(const RunConfig& rc, Corpus& corpus) {
  require_existing(rc.data, "--data");
  check(sg_corpus_load(rc.data.c_str(), delimiter_of(rc), header_of(rc),
                       corpus.out()));
}

void load_stoplist(const RunConfig& rc, Stoplist& stoplist) {
  if (rc.stopwords.empty()) {
    check(sg_stoplist_default(stoplist.out()));
  } else {
    require_existing(rc.stopwords, "--stopwords");
    check(sg_stoplist_load(rc.stopwords.c_str(), stoplist.out()));
  }
}

sg_model_config model_config_of(const RunConfig& rc) {
  sg_model_config mc;
  sg_model_config_published(&mc);
  if (rc.units.size() != 3) throw UsageError("--units needs three values");
  mc.vocab_size = rc.vocab_size;
  mc.embed_dim = rc.embed_dim;
  mc.seq_len = rc.seq_len;
  for (int i = 0; i < 3; ++i) mc.gru_units[i] = rc.units[i];
  mc.dropout_rate = rc.dropout;
  if (rc.precision == "f32") {
    mc.precision = SG_PRECISION_F32;
  } else if (rc.precision == "f64") {
    mc.precision = SG_PRECISION_F64;
  } else {
    throw UsageError("--precision must be f32 or f64");
  }
  return mc;
}

sg_train_config train_config_of(const RunConfig& rc) {
  sg_train_config tc;
  sg_train_config_default(&tc);
  tc.epochs = rc.epochs;
  tc.batch_size = rc.batch_size;
  tc.learning_rate = rc.lr;
  tc.seed = rc.seed;
  tc.train_fraction = rc.split;
  tc.stratify = rc.stratify ? 1 : 0;
  tc.clip_norm = rc.clip_norm;
  tc.deterministic = rc.deterministic ? 1 : 0;
  return tc;
}

// model.bin -> model.<suffix>
std::string sibling(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  p.replace_extension();
  return p.string() + "." + suffix;
}

int cmd_summary(const RunConfig& rc) {
  ModelHandle model;
  if (!rc.model.empty()) {
    require_existing(rc.model, "--model");
    check(sg_model_load(rc.model.c_str(), model.out()));
  } else {
    const sg_model_config mc = model_config_of(rc);
    check(sg_model_build(&mc, rc.seed, model.out()));
  }
  CString text;
  check(sg_model_summary_text(model.get(), text.out()));
  std::cout << text.str();
  if (!rc.out.empty()) {
    CString json;
    check(sg_model_summary_json(model.get(), json.out()));
    write_file(rc.out, json.str());
  }
  return kExitOk;
}

void print_top(const std::string& json) {
  const auto doc = nlohmann::json::parse(json);
  std::cout << doc["label_name"].get<std::string>() << " ("
            << doc["total_tokens"].get<std::uint64_t>() << " tokens)\n";
  for (const auto& e : doc["entries"]) {
    std::cout << "  " << std::left << std::setw(20) << e["token"].get<std::string>()
              << std::right << std::setw(8) << e["count"].get<std::uint64_t>()
              << std::setw(10) << std::fixed << std::setprecision(4)
              << e["frequency"].get<double>() << std::defaultfloat << '\n';
  }
}

int cmd_stats(const RunConfig& rc) {
  Corpus corpus;
  Stoplist stoplist;
  load_corpus(rc, corpus);
  load_stoplist(rc, stoplist);
  int apply;
  if (rc.stopword_mode == "apply") {
    apply = 1;
  } else if (rc.stopword_mode == "skip") {
    apply = 0;
  } else {
    throw UsageError("--stopword-mode must be apply or skip");
  }
  if (!rc.out.empty()) std::filesystem::create_directories(rc.out);
  for (int label = -1; label < SG_NUM_LABELS; ++label) {
    if (!rc.out.empty()) {
      CString json;
      check(sg_wordstats_json(corpus.get(), stoplist.get(), apply, label, 0,
                              json.out()));
      const std::string name = nlohmann::json::parse(json.str())["label_name"];
      write_file((std::filesystem::path(rc.out) / (name + ".json")).string(),
                 json.str());
    }
    CString top;
    check(sg_wordstats_json(corpus.get(), stoplist.get(), apply, label,
                            rc.top_k, top.out()));
    print_top(top.str());
  }
  return kExitOk;
}

int cmd_preprocess(const RunConfig& rc) {
  require_path(rc.out, "--out");
  Corpus corpus;
  Stoplist stoplist;
  load_corpus(rc, corpus);
  load_stoplist(rc, stoplist);
  CString json;
  CString vocab;
  check(sg_preprocess_corpus(corpus.get(), stoplist.get(), rc.vocab_size,
                             rc.seq_len, json.out(), vocab.out()));
  write_file(rc.out, json.str());
  write_file(sibling(rc.out, "vocab.tsv"), vocab.str());
  std::cerr << "preprocessed " << sg_corpus_size(corpus.get())
            << " records -> " << rc.out << "\n";
  return kExitOk;
}

void report_epoch(const sg_epoch_record* r, void*) {
  std::fprintf(stderr,
               "epoch %llu: loss %.4f acc %.4f | val_loss %.4f val_acc %.4f "
               "(%.1fs)\n",
               static_cast<unsigned long long>(r->epoch), r->train_loss,
               r->train_accuracy, r->val_loss, r->val_accuracy, r->seconds);
}

int cmd_train(const RunConfig& rc) {
  require_path(rc.out, "--out");
  Corpus corpus;
  Stoplist stoplist;
  load_corpus(rc, corpus);
  load_stoplist(rc, stoplist);
  const sg_model_config mc = model_config_of(rc);
  const sg_train_config tc = train_config_of(rc);
  ModelHandle model;
  CString history;
  CString curves;
  CString eval;
  check(sg_train(corpus.get(), stoplist.get(), &mc, &tc, report_epoch, nullptr,
                 model.out(), history.out(), curves.out(), eval.out()));
  check(sg_model_save(model.get(), rc.out.c_str()));
  write_file(sibling(rc.out, "history.json"), history.str());
  write_file(sibling(rc.out, "curves.json"), curves.str());
  write_file(sibling(rc.out, "eval.json"), eval.str());
  std::cerr << "model written to " << rc.out << "\n";
  return kExitOk;
}

int cmd_evaluate(const RunConfig& rc) {
  require_existing(rc.model, "--model");
  ModelHandle model;
  check(sg_model_load(rc.model.c_str(), model.out()));
  Corpus corpus;
  load_corpus(rc, corpus);
  CString json;
  check(sg_evaluate_json(model.get(), corpus.get(), json.out()));
  if (rc.out.empty()) {
    std::cout << json.str();
  } else {
    write_file(rc.out, json.str());
  }
  return kExitOk;
}

int cmd_predict(const RunConfig& rc) {
  require_existing(rc.model, "--model");
  ModelHandle model;
  check(sg_model_load(rc.model.c_str(), model.out()));
  CString json;
  check(sg_predict_json(model.get(), rc.text.c_str(), json.out()));
  std::cout << json.str();
  return kExitOk;
}

void add_common(CLI::App& cmd, RunConfig& rc) {
  cmd.add_option("--config", "'paper' or a key=value config file");
  cmd.add_option("--precision", rc.precision, "f32 or f64");
  cmd.add_option("--seed", rc.seed, "random seed");
}

void add_data(CLI::App& cmd, RunConfig& rc) {
  cmd.add_option("--data", rc.data, "delimited text,label file");
  cmd.add_option("--delimiter", rc.delimiter, "field delimiter (or 'tab')");
  cmd.add_option("--header", rc.header, "auto, yes or no");
  cmd.add_option("--stopwords", rc.stopwords,
                 "stopword list, one token per line (default: shipped list)");
}

void add_model_shape(CLI::App& cmd, RunConfig& rc) {
  cmd.add_option("--seq-len", rc.seq_len, "sequence length");
  cmd.add_option("--vocab-size", rc.vocab_size, "vocabulary size");
  cmd.add_option("--embed-dim", rc.embed_dim, "embedding width");
  cmd.add_option("--units", rc.units, "three GRU widths")->delimiter(',');
  cmd.add_option("--dropout", rc.dropout, "dropout rate");
}

int run(int argc, char** argv) {
  RunConfig rc;
  if (const auto config = find_config(argc, argv)) apply_config(rc, *config);

  CLI::App app{"sentigru: bidirectional GRU text sentiment classifier"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sg_version()));

  auto* summary = app.add_subcommand("summary", "print the layer table");
  add_common(*summary, rc);
  add_model_shape(*summary, rc);
  summary->add_option("--model", rc.model, "summarise a saved model instead");
  summary->add_option("--out", rc.out, "also write the summary as JSON");

  auto* stats = app.add_subcommand("stats", "per-label word frequencies");
  add_common(*stats, rc);
  add_data(*stats, rc);
  stats->add_option("--out", rc.out, "output directory for JSON documents");
  stats->add_option("--stopword-mode", rc.stopword_mode, "apply or skip");
  stats->add_option("--top-k", rc.top_k, "rows printed per label");

  auto* prep = app.add_subcommand("preprocess", "emit the cleaned, encoded corpus");
  add_common(*prep, rc);
  add_data(*prep, rc);
  add_model_shape(*prep, rc);
  prep->add_option("--out", rc.out, "output JSON path (vocabulary alongside)");

  auto* train = app.add_subcommand("train", "train and save a model");
  add_common(*train, rc);
  add_data(*train, rc);
  add_model_shape(*train, rc);
  train->add_option("--out", rc.out, "model file to write");
  train->add_option("--epochs", rc.epochs, "training epochs");
  train->add_option("--batch-size", rc.batch_size, "mini-batch size");
  train->add_option("--lr", rc.lr, "learning rate");
  train->add_option("--split", rc.split, "training fraction");
  train->add_option("--clip-norm", rc.clip_norm, "global gradient-norm clip");
  train->add_flag("--stratify", rc.stratify, "split per label");
  train->add_flag("--deterministic", rc.deterministic,
                  "omit wall time so outputs are byte-identical");

  auto* eval = app.add_subcommand("evaluate", "score a model on labelled data");
  add_common(*eval, rc);
  add_data(*eval, rc);
  eval->add_option("--model", rc.model, "model file");
  eval->add_option("--out", rc.out, "report path (default: stdout)");

  auto* pred = app.add_subcommand("predict", "classify one text");
  add_common(*pred, rc);
  pred->add_option("--model", rc.model, "model file");
  pred->add_option("--text", rc.text, "text to classify")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    return kExitUsage;
  }

  if (summary->parsed()) return cmd_summary(rc);
  if (stats->parsed()) return cmd_stats(rc);
  if (prep->parsed()) return cmd_preprocess(rc);
  if (train->parsed()) return cmd_train(rc);
  if (eval->parsed()) return cmd_evaluate(rc);
  return cmd_predict(rc);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\nrun with --help for usage\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
