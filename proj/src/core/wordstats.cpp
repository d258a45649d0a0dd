// SPDX-License-Identifier: Apache-2.0
#include "core/wordstats.hpp"

#include <algorithm>

namespace sentigru {

std::string FrequencyTable::label_name() const {
  if (label < 0) return "all";
  return std::string(kLabelNames.at(static_cast<std::size_t>(label)));
}

LabelFrequencies frequency_by_label(const LabeledCorpus& corpus,
                                    const StopList& stoplist,
                                    StopwordMode mode) {
  if (corpus.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "word statistics need a nonempty corpus");
  }
  LabelFrequencies out;
  for (int k = 0; k < kNumLabels; ++k) out.per_label[k].label = k;
  for (const auto& record : corpus.records) {
    auto tokens = tokenize(clean_text(record.text));
    if (mode == StopwordMode::kApply) tokens = remove_stopwords(tokens, stoplist);
    FrequencyTable& table =
        out.per_label.at(static_cast<std::size_t>(record.label));
    for (const auto& token : tokens) {
      table.add(token);
      out.combined.add(token);
    }
  }
  return out;
}

std::vector<std::pair<std::string, std::size_t>> top_k(
    const FrequencyTable& table, std::size_t k) {
  std::vector<std::pair<std::string, std::size_t>> ranked(table.counts.begin(),
                                                          table.counts.end());
  const std::size_t keep = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + keep, ranked.end(),
                    [](const auto& a, const auto& b) {
                      if (a.second != b.second) return a.second > b.second;
                      return a.first < b.first;
                    });
  ranked.resize(keep);
  return ranked;
}

nlohmann::json to_json(const FrequencyTable& table, std::size_t limit) {
  const std::size_t k = limit == 0 ? table.counts.size() : limit;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [token, count] : top_k(table, k)) {
    entries.push_back(
        {{"token", token},
         {"count", count},
         {"frequency", static_cast<double>(count) /
                           static_cast<double>(table.total_tokens)}});
  }
  return {{"label_name", table.label_name()},
          {"total_tokens", table.total_tokens},
          {"entries", std::move(entries)}};
}

}  // namespace sentigru
