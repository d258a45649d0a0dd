// SPDX-License-Identifier: Apache-2.0
//
// Text ingestion and preprocessing: dataset loading, cleaning, tokenization,
// stopword filtering, vocabulary construction, fixed-length encoding and the
// train/test split.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace sentigru {

inline constexpr int kNumLabels = 6;

/// Index i names label code i.
inline constexpr std::array<std::string_view, kNumLabels> kLabelNames = {
    "sadness", "joy", "love", "anger", "fear", "surprise"};

struct LabeledRecord {
  std::string text;
  int label = 0;
};

struct LabeledCorpus {
  std::vector<LabeledRecord> records;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }
};

enum class HeaderMode { kAuto, kPresent, kAbsent };

struct DatasetFormat {
  char delimiter = ',';
  HeaderMode header = HeaderMode::kAuto;
};

/// Reads `text,label` rows (RFC 4180 quoting). With a header row the columns
/// are located by name and may appear in any order; without one the first
/// two columns are text then label. Row numbers in errors are 1-based file
/// lines.
LabeledCorpus load_dataset(const std::filesystem::path& path,
                           const DatasetFormat& format = {});
LabeledCorpus parse_dataset(std::string_view content,
                            const DatasetFormat& format = {});

/// Lowercases ASCII letters, turns every other ASCII character into a word
/// break and drops non-ASCII bytes entirely. The result holds only a-z and
/// single interior spaces. Idempotent.
std::string clean_text(std::string_view raw);

std::vector<std::string> tokenize(std::string_view cleaned);

class StopList {
 public:
  StopList() = default;
  explicit StopList(std::vector<std::string> words);

  /// The shipped English list (data/stopwords_en.txt).
  static const StopList& english();
  static StopList load(const std::filesystem::path& path);
  /// One token per line; blank lines and `#` comments ignored; entries are
  /// normalised through clean_text.
  static StopList parse(std::string_view content);

  bool contains(std::string_view token) const {
    return words_.contains(std::string(token));
  }
  std::size_t size() const noexcept { return words_.size(); }
  /// Sorted, for serialization and display.
  std::vector<std::string> sorted() const;

 private:
  std::unordered_set<std::string> words_;
};

inline constexpr std::string_view kStopListVersion = "en-v1";

std::vector<std::string> remove_stopwords(std::span<const std::string> tokens,
                                          const StopList& stoplist);

/// clean_text, tokenize, remove_stopwords.
std::vector<std::string> preprocess(std::string_view raw,
                                    const StopList& stoplist);

class Vocabulary {
 public:
  static constexpr std::uint32_t kPadId = 0;
  static constexpr std::uint32_t kOovId = 1;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kOovToken = "<oov>";

  explicit Vocabulary(std::size_t max_size = 50000);

  /// Rebuilds a vocabulary from corpus tokens listed in id order starting at
  /// id 2.
  static Vocabulary from_tokens(std::vector<std::string> tokens,
                                std::size_t max_size);

  std::size_t size() const noexcept { return tokens_.size(); }
  std::size_t max_size() const noexcept { return max_size_; }

  std::uint32_t id_of(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token_of(std::uint32_t id) const { return tokens_.at(id); }

  /// Corpus tokens in id order (ids 2..size-1).
  std::span<const std::string> corpus_tokens() const {
    return std::span<const std::string>(tokens_).subspan(2);
  }

  /// `token<TAB>id` lines, reserved ids included.
  std::string to_tsv() const;
  static Vocabulary from_tsv(std::string_view content, std::size_t max_size);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.max_size_ == b.max_size_ && a.tokens_ == b.tokens_;
  }

 private:
  void add(std::string token);

  std::size_t max_size_;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

/// Keeps the max_size - 2 most frequent tokens; ties go to the
/// lexicographically smaller token.
Vocabulary build_vocabulary(std::span<const std::vector<std::string>> documents,
                            std::size_t max_size);

struct EncodedSequence {
  std::vector<std::uint32_t> ids;
  int label = 0;
};

/// Unknown tokens map to the oov id. Long inputs keep their last seq_len
/// tokens; short ones are pre-padded so the final position holds the last
/// real token.
std::vector<std::uint32_t> encode(std::span<const std::string> tokens,
                                  const Vocabulary& vocab,
                                  std::size_t seq_len);

template <class Record>
struct SplitResult {
  std::vector<Record> train;
  std::vector<Record> test;
};

namespace detail {

template <class Item>
void shuffle(std::vector<Item>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

inline std::size_t cut_point(double train_fraction, std::size_t n) {
  return static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(n)));
}

}  // namespace detail

/// Seeded Fisher-Yates shuffle then a cut at round(train_fraction * N).
/// The stratified variant cuts every label group separately and shuffles
/// the merged partitions again.
template <class Record>
SplitResult<Record> split(std::span<const Record> records,
                          double train_fraction, std::uint64_t seed,
                          bool stratified = false) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "train fraction must lie strictly between 0 and 1");
  }
  if (records.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot split a corpus with fewer than 2 records");
  }
  Rng rng(seed);
  SplitResult<Record> result;
  if (!stratified) {
    std::vector<Record> shuffled(records.begin(), records.end());
    detail::shuffle(shuffled, rng);
    const std::size_t cut = detail::cut_point(train_fraction, shuffled.size());
    result.train.assign(shuffled.begin(), shuffled.begin() + cut);
    result.test.assign(shuffled.begin() + cut, shuffled.end());
    return result;
  }
  std::array<std::vector<Record>, kNumLabels> groups;
  for (const Record& r : records) {
    groups.at(static_cast<std::size_t>(r.label)).push_back(r);
  }
  for (auto& group : groups) {
    detail::shuffle(group, rng);
    const std::size_t cut = detail::cut_point(train_fraction, group.size());
    result.train.insert(result.train.end(), group.begin(), group.begin() + cut);
    result.test.insert(result.test.end(), group.begin() + cut, group.end());
  }
  detail::shuffle(result.train, rng);
  detail::shuffle(result.test, rng);
  return result;
}

}  // namespace sentigru
