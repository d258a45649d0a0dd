// SPDX-License-Identifier: Apache-2.0
//
// Word-frequency tables per label, the data behind a word cloud.
#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "core/corpus.hpp"

namespace sentigru {

struct FrequencyTable {
  /// Class code, or -1 for the table over all labels.
  int label = -1;
  std::map<std::string, std::size_t> counts;
  std::size_t total_tokens = 0;

  void add(const std::string& token, std::size_t n = 1) {
    counts[token] += n;
    total_tokens += n;
  }
  std::string label_name() const;
};

enum class StopwordMode { kApply, kSkip };

struct LabelFrequencies {
  std::array<FrequencyTable, kNumLabels> per_label;
  FrequencyTable combined;
};

LabelFrequencies frequency_by_label(const LabeledCorpus& corpus,
                                    const StopList& stoplist,
                                    StopwordMode mode);

/// Descending count, ties in ascending token order.
std::vector<std::pair<std::string, std::size_t>> top_k(
    const FrequencyTable& table, std::size_t k);

/// {label_name, total_tokens, entries: [{token, count, frequency}]}, entries
/// ranked as top_k. `limit` of 0 exports every token.
nlohmann::json to_json(const FrequencyTable& table, std::size_t limit = 0);

}  // namespace sentigru
