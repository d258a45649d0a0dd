// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "core/wordstats.hpp"
#include "support/oracles.hpp"

using namespace sentigru;

namespace {

LabeledCorpus corpus_of(std::vector<LabeledRecord> records) {
  return LabeledCorpus{std::move(records)};
}

LabeledCorpus random_corpus(std::mt19937_64& gen) {
  LabeledCorpus c;
  for (const auto& r : oracle::synthetic_corpus(5 + gen() % 40, gen(), 4)) {
    c.records.push_back({r.text + " the and", r.label});
  }
  return c;
}

}  // namespace

TEST_CASE("single record counts") {
  const auto f = frequency_by_label(corpus_of({{"feel lost", 0}}), StopList::english(),
                                    StopwordMode::kApply);
  const FrequencyTable& sad = f.per_label[0];
  CHECK(sad.label_name() == "sadness");
  CHECK(sad.total_tokens == 2);
  CHECK(sad.counts == std::map<std::string, std::size_t>{{"feel", 1}, {"lost", 1}});
  for (int k = 1; k < kNumLabels; ++k) CHECK(f.per_label[k].total_tokens == 0);
  CHECK(f.combined.label_name() == "all");
  CHECK(f.combined.counts == sad.counts);
}

TEST_CASE("duplicate records double every count") {
  const auto once = frequency_by_label(corpus_of({{"i feel so lost and alone", 0}}),
                                       StopList::english(), StopwordMode::kApply);
  const auto twice = frequency_by_label(
      corpus_of({{"i feel so lost and alone", 0}, {"i feel so lost and alone", 0}}),
      StopList::english(), StopwordMode::kApply);
  CHECK(twice.per_label[0].total_tokens == 2 * once.per_label[0].total_tokens);
  for (const auto& [token, n] : once.per_label[0].counts) {
    CHECK(twice.per_label[0].counts.at(token) == 2 * n);
  }
}

TEST_CASE("stopword mode") {
  const auto corpus = corpus_of({{"I feel the rain and the wind", 2}});
  const StopList& stop = StopList::english();
  const auto applied = frequency_by_label(corpus, stop, StopwordMode::kApply);
  const auto skipped = frequency_by_label(corpus, stop, StopwordMode::kSkip);
  CHECK(skipped.per_label[2].counts.at("the") == 2);
  CHECK_FALSE(applied.per_label[2].counts.contains("the"));
  std::size_t stopped = 0;
  for (const auto& [token, n] : skipped.per_label[2].counts) {
    if (stop.contains(token)) {
      stopped += n;
    } else {
      CHECK(applied.per_label[2].counts.at(token) == n);
    }
  }
  CHECK(skipped.per_label[2].total_tokens - applied.per_label[2].total_tokens == stopped);
}

TEST_CASE("top_k ordering") {
  FrequencyTable t;
  t.add("rain", 3);
  t.add("wind", 5);
  t.add("cloud", 3);
  t.add("sun", 1);
  using Entry = std::pair<std::string, std::size_t>;
  CHECK(top_k(t, 3) == std::vector<Entry>{{"wind", 5}, {"cloud", 3}, {"rain", 3}});
  CHECK(top_k(t, 10).size() == 4);
  CHECK(top_k(t, 0).empty());
  CHECK(top_k(FrequencyTable{}, 5).empty());
}

TEST_CASE("top_k is a prefix of the full ranking") {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = frequency_by_label(random_corpus(gen), StopList::english(),
                                      StopwordMode::kApply);
    const auto full = top_k(f.combined, f.combined.counts.size());
    for (std::size_t k = 0; k <= full.size(); ++k) {
      const auto part = top_k(f.combined, k);
      REQUIRE(part.size() == k);
      CHECK(std::equal(part.begin(), part.end(), full.begin()));
    }
    for (std::size_t i = 1; i < full.size(); ++i) {
      CHECK(full[i - 1].second >= full[i].second);
    }
  }
}

TEST_CASE("combined table is the sum of the label tables") {
  std::mt19937_64 gen(22);
  for (int trial = 0; trial < 50; ++trial) {
    const auto mode = trial % 2 ? StopwordMode::kApply : StopwordMode::kSkip;
    const auto f = frequency_by_label(random_corpus(gen), StopList::english(), mode);
    std::map<std::string, std::size_t> sum;
    std::size_t total = 0;
    for (const auto& table : f.per_label) {
      for (const auto& [token, n] : table.counts) sum[token] += n;
      total += table.total_tokens;
    }
    CHECK(sum == f.combined.counts);
    CHECK(total == f.combined.total_tokens);
  }
}

TEST_CASE("json export and empty corpus") {
  const auto f = frequency_by_label(corpus_of({{"rain rain wind", 1}}), StopList::english(),
                                    StopwordMode::kApply);
  const auto j = to_json(f.per_label[1]);
  CHECK(j["label_name"] == "joy");
  CHECK(j["total_tokens"] == 3);
  REQUIRE(j["entries"].size() == 2);
  CHECK(j["entries"][0]["token"] == "rain");
  CHECK(j["entries"][0]["count"] == 2);
  CHECK(j["entries"][0]["frequency"].get<double>() == doctest::Approx(2.0 / 3.0));
  CHECK(to_json(f.per_label[1], 1)["entries"].size() == 1);

  CHECK_THROWS_AS(frequency_by_label(LabeledCorpus{}, StopList::english(),
                                     StopwordMode::kApply),
                  Error);
}
