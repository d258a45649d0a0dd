// SPDX-License-Identifier: Apache-2.0
// Exercises the shared library through its C header only.
#include <doctest.h>
#include <sentigru/sentigru.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  sg_string_free(s);
  return out;
}

fs::path write_temp(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p, std::ios::binary) << content;
  return p;
}

std::string small_csv() {
  const char* lines[] = {"i feel so gloomy and tearful today",
                         "what a cheerful delighted morning",
                         "i adore and cherish my family",
                         "furious and outraged at the news",
                         "terrified and panicked in the dark",
                         "astonished and startled by the gift"};
  std::string csv = "text,label\n";
  for (int rep = 0; rep < 5; ++rep)
    for (int k = 0; k < 6; ++k) csv += std::string(lines[k]) + "," + std::to_string(k) + "\n";
  return csv;
}

sg_model_config tiny_config() {
  sg_model_config c;
  sg_model_config_published(&c);
  c.vocab_size = 40;
  c.embed_dim = 6;
  c.seq_len = 8;
  c.gru_units[0] = 6;
  c.gru_units[1] = 4;
  c.gru_units[2] = 4;
  return c;
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(sg_version()).size() > 0);
  CHECK(std::string(sg_status_name(SG_OK)) == "ok");
  CHECK(std::string(sg_status_name(SG_ERR_CHECKSUM)).size() > 0);
  sg_string_free(nullptr);
}

TEST_CASE("null arguments are rejected with a message") {
  sg_model* model = nullptr;
  CHECK(sg_model_build(nullptr, 1, &model) == SG_ERR_INVALID_ARGUMENT);
  CHECK(model == nullptr);
  CHECK(std::string(sg_last_error()).size() > 0);
  sg_corpus* corpus = nullptr;
  CHECK(sg_corpus_load(nullptr, ',', -1, &corpus) == SG_ERR_INVALID_ARGUMENT);
  uint64_t n = 0;
  CHECK(sg_model_param_count(nullptr, &n) == SG_ERR_INVALID_ARGUMENT);
  sg_model_free(nullptr);
  sg_corpus_free(nullptr);
  sg_stoplist_free(nullptr);
}

TEST_CASE("published architecture through the C interface") {
  sg_model_config cfg;
  sg_model_config_published(&cfg);
  CHECK(cfg.vocab_size == 50000);
  CHECK(cfg.seq_len == 79);
  sg_model* model = nullptr;
  REQUIRE(sg_model_build(&cfg, 42, &model) == SG_OK);
  uint64_t n = 0;
  REQUIRE(sg_model_param_count(model, &n) == SG_OK);
  CHECK(n == 2817126);
  char* json = nullptr;
  REQUIRE(sg_model_summary_json(model, &json) == SG_OK);
  const auto j = nlohmann::json::parse(take(json));
  CHECK(j["total_params"] == 2817126);
  char* text = nullptr;
  REQUIRE(sg_model_summary_text(model, &text) == SG_OK);
  CHECK(take(text).find("Total params: 2817126") != std::string::npos);
  sg_model_free(model);

  cfg.gru_units[0] = 0;
  CHECK(sg_model_build(&cfg, 42, &model) == SG_ERR_INVALID_ARGUMENT);
}

TEST_CASE("logits and predictions") {
  const sg_model_config cfg = tiny_config();
  sg_model* model = nullptr;
  REQUIRE(sg_model_build(&cfg, 3, &model) == SG_OK);
  std::vector<uint32_t> ids(2 * 8, 1);
  ids[3] = 7;
  std::vector<double> logits(2 * SG_NUM_LABELS);
  REQUIRE(sg_model_logits(model, ids.data(), 2, 8, logits.data()) == SG_OK);
  for (double v : logits) CHECK(std::isfinite(v));
  CHECK(sg_model_logits(model, ids.data(), 2, 7, logits.data()) == SG_ERR_SHAPE);
  ids[0] = 40;
  CHECK(sg_model_logits(model, ids.data(), 2, 8, logits.data()) == SG_ERR_OUT_OF_RANGE);

  sg_prediction p;
  REQUIRE(sg_predict(model, "I feel great", &p) == SG_OK);
  double sum = 0;
  for (double q : p.probabilities) sum += q;
  CHECK(std::abs(sum - 1.0) < 1e-6);
  CHECK(p.label >= 0);
  CHECK(p.label < SG_NUM_LABELS);
  char* json = nullptr;
  REQUIRE(sg_predict_json(model, "I feel great", &json) == SG_OK);
  const auto j = nlohmann::json::parse(take(json));
  CHECK(j["label"] == p.label);
  CHECK(j["name"] == std::string(p.name));
  sg_model_free(model);
}

TEST_CASE("corpus loading errors") {
  sg_corpus* corpus = nullptr;
  CHECK(sg_corpus_load("/nonexistent/data.csv", ',', -1, &corpus) == SG_ERR_IO);
  const auto bad = write_temp("sentigru_capi_bad.csv", "text,label\nfine,1\nbroken,9\n");
  CHECK(sg_corpus_load(bad.c_str(), ',', -1, &corpus) == SG_ERR_OUT_OF_RANGE);
  CHECK(std::string(sg_last_error()).find("row 3") != std::string::npos);
  fs::remove(bad);
}

TEST_CASE("preprocess, word statistics, train, save and reload") {
  const auto path = write_temp("sentigru_capi_small.csv", small_csv());
  sg_corpus* corpus = nullptr;
  REQUIRE(sg_corpus_load(path.c_str(), ',', -1, &corpus) == SG_OK);
  CHECK(sg_corpus_size(corpus) == 30);
  sg_stoplist* stop = nullptr;
  REQUIRE(sg_stoplist_default(&stop) == SG_OK);
  CHECK(sg_stoplist_size(stop) == 153);

  char* cleaned = nullptr;
  REQUIRE(sg_preprocess_text(stop, "I feel SO lost!", &cleaned) == SG_OK);
  CHECK(take(cleaned) == "feel lost");

  char* stats = nullptr;
  REQUIRE(sg_wordstats_json(corpus, stop, 1, 0, 2, &stats) == SG_OK);
  const auto sj = nlohmann::json::parse(take(stats));
  CHECK(sj["label_name"] == "sadness");
  CHECK(sj["entries"].size() == 2);
  CHECK(sg_wordstats_json(corpus, stop, 1, 7, 0, &stats) == SG_ERR_OUT_OF_RANGE);

  char* encoded = nullptr;
  char* tsv = nullptr;
  REQUIRE(sg_preprocess_corpus(corpus, stop, 40, 8, &encoded, &tsv) == SG_OK);
  CHECK(take(tsv).rfind("<pad>\t0\n<oov>\t1\n", 0) == 0);
  CHECK(nlohmann::json::parse(take(encoded)).is_object());

  const sg_model_config mcfg = tiny_config();
  sg_train_config tcfg;
  sg_train_config_default(&tcfg);
  CHECK(tcfg.epochs == 5);
  CHECK(tcfg.batch_size == 64);
  tcfg.epochs = 2;
  tcfg.batch_size = 8;
  tcfg.deterministic = 1;
  int calls = 0;
  auto on_epoch = [](const sg_epoch_record* r, void* user) {
    auto* n = static_cast<int*>(user);
    ++*n;
    CHECK(r->epoch == static_cast<uint64_t>(*n));
    CHECK(r->seconds == 0.0);
  };
  sg_model* model = nullptr;
  char* history = nullptr;
  char* curves = nullptr;
  char* eval = nullptr;
  REQUIRE(sg_train(corpus, stop, &mcfg, &tcfg, on_epoch, &calls, &model, &history, &curves,
                   &eval) == SG_OK);
  CHECK(calls == 2);
  CHECK(nlohmann::json::parse(take(history)).size() == 2);
  CHECK(nlohmann::json::parse(take(curves))["summary"]["epochs"] == 2);
  CHECK(nlohmann::json::parse(take(eval))["total"] == 6);

  const auto model_path = fs::temp_directory_path() / "sentigru_capi_model.bin";
  REQUIRE(sg_model_save(model, model_path.c_str()) == SG_OK);
  sg_model* back = nullptr;
  REQUIRE(sg_model_load(model_path.c_str(), &back) == SG_OK);
  sg_prediction a, b;
  REQUIRE(sg_predict(model, "so gloomy", &a) == SG_OK);
  REQUIRE(sg_predict(back, "so gloomy", &b) == SG_OK);
  for (int k = 0; k < SG_NUM_LABELS; ++k) CHECK(a.probabilities[k] == b.probabilities[k]);

  char* report = nullptr;
  REQUIRE(sg_evaluate_json(back, corpus, &report) == SG_OK);
  CHECK(nlohmann::json::parse(take(report))["total"] == 30);

  {
    std::fstream f(model_path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-3, std::ios::end);
    char c = 0;
    f.read(&c, 1);
    f.seekp(-3, std::ios::end);
    c ^= 0x10;
    f.write(&c, 1);
  }
  sg_model* corrupt = nullptr;
  CHECK(sg_model_load(model_path.c_str(), &corrupt) == SG_ERR_CHECKSUM);
  CHECK(corrupt == nullptr);

  sg_model_free(back);
  sg_model_free(model);
  sg_stoplist_free(stop);
  sg_corpus_free(corpus);
  fs::remove(model_path);
  fs::remove(path);
}
