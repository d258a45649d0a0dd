// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "core/corpus.hpp"

using namespace sentigru;
using Tokens = std::vector<std::string>;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kInvalidArgument;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

std::string random_bytes(std::mt19937_64& gen, std::size_t max_len) {
  std::string s(gen() % (max_len + 1), '\0');
  for (char& c : s) c = static_cast<char>(gen() & 0xff);
  return s;
}

}  // namespace

TEST_CASE("load_dataset examples") {
  const auto one = parse_dataset("I dont know i feel so lost,0\n");
  REQUIRE(one.size() == 1);
  CHECK(one.records[0].text == "I dont know i feel so lost");
  CHECK(one.records[0].label == 0);

  CHECK(parse_dataset("text,label\n").empty());
  CHECK(parse_dataset("").empty());

  const std::string bad = "text,label\nfine,1\nnope,7\n";
  CHECK(code_of([&] { parse_dataset(bad); }) == ErrorCode::kOutOfRange);
  CHECK(message_of([&] { parse_dataset(bad); }) == "label out of range at row 3");

  CHECK(code_of([&] { parse_dataset("x,1\na,b,2\n"); }) == ErrorCode::kMalformedData);
  CHECK(message_of([&] { parse_dataset("ok,1\nbroken\n"); })
            .find("malformed row at row 2") != std::string::npos);
  CHECK(code_of([&] { load_dataset("/nonexistent/data.csv"); }) == ErrorCode::kIo);
}

TEST_CASE("dataset quoting, headers and delimiters") {
  const auto quoted = parse_dataset(
      "text,label\n\"commas, and \"\"quotes\"\"\",2\r\n\"multi\nline\",5\n");
  REQUIRE(quoted.size() == 2);
  CHECK(quoted.records[0].text == "commas, and \"quotes\"");
  CHECK(quoted.records[1].text == "multi\nline");
  CHECK(quoted.records[1].label == 5);

  const auto reordered = parse_dataset("id,Label,Text\n9,3,angry words\n");
  REQUIRE(reordered.size() == 1);
  CHECK(reordered.records[0].text == "angry words");
  CHECK(reordered.records[0].label == 3);

  DatasetFormat tsv{'\t', HeaderMode::kAbsent};
  const auto tabbed = parse_dataset("hello, world\t1\n", tsv);
  REQUIRE(tabbed.size() == 1);
  CHECK(tabbed.records[0].text == "hello, world");

  // A data-looking first row is not swallowed as a header.
  CHECK(parse_dataset("first,4\nsecond,1\n").size() == 2);
  DatasetFormat forced{',', HeaderMode::kPresent};
  CHECK(parse_dataset("first,4\nsecond,1\n", forced).size() == 1);

  const auto dir = std::filesystem::temp_directory_path();
  const auto path = dir / "sentigru_corpus_test.csv";
  std::ofstream(path) << "text,label\nI feel lost,0\n";
  CHECK(load_dataset(path).size() == 1);
  std::filesystem::remove(path);
}

TEST_CASE("clean_text examples") {
  CHECK(clean_text("Great!!! 10/10 :)") == "great");
  CHECK(clean_text("") == "");
  CHECK(clean_text("I   ve enjoyed") == "i ve enjoyed");
  CHECK(clean_text("don't") == "don t");
  CHECK(clean_text("caf\xc3\xa9 au lait") == "caf au lait");
  CHECK(clean_text("  MiXeD\tCase\n") == "mixed case");
}

TEST_CASE("clean_text output alphabet and idempotence") {
  std::mt19937_64 gen(11);
  for (int i = 0; i < 2000; ++i) {
    const std::string raw = random_bytes(gen, 40);
    const std::string once = clean_text(raw);
    CHECK(clean_text(once) == once);
    for (char c : once) CHECK(((c >= 'a' && c <= 'z') || c == ' '));
    if (!once.empty()) {
      CHECK(once.front() != ' ');
      CHECK(once.back() != ' ');
      CHECK(once.find("  ") == std::string::npos);
    }
  }
}

TEST_CASE("tokenize examples") {
  CHECK(tokenize("i feel lost") == Tokens{"i", "feel", "lost"});
  CHECK(tokenize("").empty());
  CHECK(tokenize(clean_text("feel really helpless and heavy hearted"))[0] == "feel");
  CHECK(tokenize("feel really helpless") == Tokens{"feel", "really", "helpless"});
}

TEST_CASE("shipped stoplist") {
  const StopList& en = StopList::english();
  CHECK(en.size() == 153);
  for (const char* w : {"i", "so", "and", "the", "t", "don"}) CHECK(en.contains(w));
  for (const char* w : {"feel", "dont", "really", "lost"}) CHECK_FALSE(en.contains(w));
  const auto sorted = en.sorted();
  CHECK(std::is_sorted(sorted.begin(), sorted.end()));
  CHECK(kStopListVersion == "en-v1");

  const StopList custom = StopList::parse("# comment\n\nThe\nfoo \n");
  CHECK(custom.size() == 2);
  CHECK(custom.contains("the"));
  CHECK(custom.contains("foo"));
}

TEST_CASE("remove_stopwords examples and properties") {
  const StopList& en = StopList::english();
  const Tokens in = {"i", "feel", "so", "lost"};
  CHECK(remove_stopwords(in, en) == Tokens{"feel", "lost"});
  CHECK(remove_stopwords(Tokens{}, en).empty());
  CHECK(remove_stopwords(Tokens{"i", "me", "the"}, en).empty());

  std::mt19937_64 gen(12);
  const auto pool = en.sorted();
  const Tokens extra = {"feel", "lost", "joy", "rain"};
  for (int i = 0; i < 500; ++i) {
    Tokens tokens;
    for (std::size_t n = gen() % 12; n > 0; --n) {
      tokens.push_back(gen() % 2 ? pool[gen() % pool.size()] : extra[gen() % 4]);
    }
    const Tokens once = remove_stopwords(tokens, en);
    for (const auto& t : once) CHECK_FALSE(en.contains(t));
    CHECK(remove_stopwords(once, en) == once);
    // Order preserved: `once` is a subsequence of `tokens`.
    auto it = tokens.begin();
    for (const auto& t : once) {
      it = std::find(it, tokens.end(), t);
      REQUIRE(it != tokens.end());
      ++it;
    }
  }
}

TEST_CASE("build_vocabulary examples") {
  const std::vector<Tokens> docs = {{"a", "a", "a", "b", "c"}, {"a", "b", "a", "b"}};
  const Vocabulary v = build_vocabulary(docs, 4);
  CHECK(v.size() == 4);
  CHECK(v.id_of("<pad>") == 0);
  CHECK(v.token_of(0) == "<pad>");
  CHECK(v.token_of(1) == "<oov>");
  CHECK(v.id_of("a") == 2);
  CHECK(v.id_of("b") == 3);
  CHECK(v.id_of("c") == Vocabulary::kOovId);
  CHECK_FALSE(v.contains("c"));

  CHECK(build_vocabulary(std::vector<Tokens>{}, 10).size() == 2);

  const std::vector<Tokens> ties = {{"y", "x", "y", "x"}};
  const Vocabulary t = build_vocabulary(ties, 4);
  CHECK(t.id_of("x") == 2);
  CHECK(t.id_of("y") == 3);

  CHECK_THROWS_AS(Vocabulary(2), Error);
  CHECK_THROWS_AS(build_vocabulary(docs, 2), Error);
}

TEST_CASE("vocabulary properties") {
  std::mt19937_64 gen(13);
  const Tokens words = {"sad", "glad", "mad", "bad", "rad", "lad", "pad", "fad"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Tokens> docs(1 + gen() % 5);
    for (auto& d : docs)
      for (std::size_t n = gen() % 10; n > 0; --n) d.push_back(words[gen() % words.size()]);
    const std::size_t max_size = 3 + gen() % 8;
    const Vocabulary v = build_vocabulary(docs, max_size);
    CHECK(v.size() <= max_size);
    CHECK(v == build_vocabulary(docs, max_size));
    std::set<std::uint32_t> ids;
    for (std::uint32_t id = 0; id < v.size(); ++id) {
      CHECK(v.id_of(v.token_of(id)) == id);
      ids.insert(id);
    }
    CHECK(ids.size() == v.size());
    for (const auto& tok : v.corpus_tokens()) {
      CHECK(v.id_of(tok) >= 2);
      CHECK(std::all_of(tok.begin(), tok.end(), [](char c) { return c >= 'a' && c <= 'z'; }));
    }
    CHECK(Vocabulary::from_tsv(v.to_tsv(), max_size) == v);
  }
}

TEST_CASE("vocabulary tsv format") {
  const Vocabulary v = build_vocabulary(std::vector<Tokens>{{"feel", "lost", "feel"}}, 10);
  CHECK(v.to_tsv() == "<pad>\t0\n<oov>\t1\nfeel\t2\nlost\t3\n");
  CHECK_THROWS_AS(Vocabulary::from_tsv("<pad>\t0\n<oov>\t1\nfeel\t3\n", 10), Error);
  CHECK_THROWS_AS(Vocabulary::from_tsv("<pad>\t0\n<oov>\t1\nFeel\t2\n", 10), Error);
  CHECK_THROWS_AS(Vocabulary::from_tokens({"ok", "ok"}, 10), Error);
}

TEST_CASE("encode examples") {
  const Vocabulary v = Vocabulary::from_tokens({"feel", "lost"}, 10);
  using Ids = std::vector<std::uint32_t>;
  CHECK(encode(Tokens{"feel", "lost"}, v, 4) == Ids{0, 0, 2, 3});
  CHECK(encode(Tokens{}, v, 4) == Ids{0, 0, 0, 0});
  // Truncation keeps the most recent tokens.
  CHECK(encode(Tokens{"lost", "feel", "why", "feel", "lost"}, v, 4) == Ids{2, 1, 2, 3});
  CHECK_THROWS_AS(encode(Tokens{}, v, 0), Error);
}

TEST_CASE("encode length and range") {
  std::mt19937_64 gen(14);
  const Vocabulary v = Vocabulary::from_tokens({"a", "b", "c"}, 10);
  const Tokens pool = {"a", "b", "c", "zz", "q"};
  for (int i = 0; i < 500; ++i) {
    Tokens tokens;
    for (std::size_t n = gen() % 20; n > 0; --n) tokens.push_back(pool[gen() % pool.size()]);
    const std::size_t len = 1 + gen() % 12;
    const auto ids = encode(tokens, v, len);
    CHECK(ids.size() == len);
    for (auto id : ids) CHECK(id < v.size());
    if (!tokens.empty()) CHECK(ids.back() == v.id_of(tokens.back()));
  }
}

TEST_CASE("split examples") {
  std::vector<LabeledRecord> ten;
  for (int i = 0; i < 10; ++i) ten.push_back({"r" + std::to_string(i), i % 6});
  const auto s = split<LabeledRecord>(ten, 0.8, 1);
  CHECK(s.train.size() == 8);
  CHECK(s.test.size() == 2);

  std::vector<LabeledRecord> five(ten.begin(), ten.begin() + 5);
  const auto f = split<LabeledRecord>(five, 0.8, 1);
  CHECK(f.train.size() == 4);
  CHECK(f.test.size() == 1);

  const auto again = split<LabeledRecord>(ten, 0.8, 1);
  for (std::size_t i = 0; i < 8; ++i) CHECK(again.train[i].text == s.train[i].text);

  CHECK_THROWS_AS(split<LabeledRecord>(five, 1.0, 1), Error);
  CHECK_THROWS_AS(split<LabeledRecord>(five, 0.0, 1), Error);
  CHECK_THROWS_AS(split<LabeledRecord>(std::span(five.data(), 1), 0.5, 1), Error);
}

TEST_CASE("split partitions") {
  std::mt19937_64 gen(15);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + gen() % 60;
    std::vector<LabeledRecord> records;
    for (std::size_t i = 0; i < n; ++i)
      records.push_back({std::to_string(i), static_cast<int>(gen() % 6)});
    const double frac = 0.05 + 0.9 * (gen() % 1000) / 1000.0;
    const bool stratified = trial % 2 == 1;
    const auto s = split<LabeledRecord>(records, frac, gen(), stratified);
    CHECK(s.train.size() + s.test.size() == n);
    std::multiset<std::string> seen;
    for (const auto& r : s.train) seen.insert(r.text);
    for (const auto& r : s.test) seen.insert(r.text);
    std::multiset<std::string> all;
    for (const auto& r : records) all.insert(r.text);
    CHECK(seen == all);
    if (!stratified) CHECK(s.train.size() == static_cast<std::size_t>(std::llround(frac * n)));
  }
}

TEST_CASE("stratified split keeps label proportions") {
  std::vector<LabeledRecord> records;
  for (int i = 0; i < 60; ++i) records.push_back({std::to_string(i), i % 6});
  const auto s = split<LabeledRecord>(records, 0.8, 3, true);
  std::array<int, 6> test_counts{};
  for (const auto& r : s.test) ++test_counts[r.label];
  for (int c : test_counts) CHECK(c == 2);
}
