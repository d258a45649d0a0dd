// SPDX-License-Identifier: Apache-2.0
#include "core/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "stopwords_en.hpp"

namespace sentigru {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct CsvRow {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

// Minimal RFC 4180 reader: quoted fields may contain delimiters, doubled
// quotes and newlines. Blank lines are skipped.
std::vector<CsvRow> parse_csv(std::string_view content, char delimiter) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  std::size_t line = 1;
  row.line = line;

  auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_row = [&] {
    end_field();
    const bool blank = row.fields.size() == 1 && row.fields[0].empty();
    if (!blank) rows.push_back(std::move(row));
    row = CsvRow{};
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && field.empty() && !field_was_quoted) {
      in_quotes = true;
      field_was_quoted = true;
    } else if (c == delimiter) {
      end_field();
    } else if (c == '\r') {
      // CRLF line endings.
    } else if (c == '\n') {
      end_row();
      ++line;
      row.line = line;
    } else {
      field.push_back(c);
    }
  }
  if (in_quotes) {
    throw Error(ErrorCode::kMalformedData,
                "unterminated quoted field starting at row " +
                    std::to_string(row.line));
  }
  if (!field.empty() || !row.fields.empty()) end_row();
  return rows;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

bool parse_int(std::string_view s, long long& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace

LabeledCorpus parse_dataset(std::string_view content,
                            const DatasetFormat& format) {
  std::vector<CsvRow> rows = parse_csv(content, format.delimiter);
  LabeledCorpus corpus;
  if (rows.empty()) return corpus;

  std::size_t text_col = 0;
  std::size_t label_col = 1;
  std::size_t first_data = 0;

  bool has_header = format.header == HeaderMode::kPresent;
  if (format.header == HeaderMode::kAuto) {
    long long ignored;
    const auto& first = rows.front().fields;
    has_header = first.size() < 2 || !parse_int(first[1], ignored);
  }
  if (has_header) {
    const auto& names = rows.front().fields;
    bool found_text = false;
    bool found_label = false;
    for (std::size_t i = 0; i < names.size(); ++i) {
      const std::string name = lower(trim(names[i]));
      if (name == "text" && !found_text) {
        text_col = i;
        found_text = true;
      } else if (name == "label" && !found_label) {
        label_col = i;
        found_label = true;
      }
    }
    if (found_text != found_label) {
      throw Error(ErrorCode::kMalformedData,
                  "header must name both 'text' and 'label' columns");
    }
    first_data = 1;
  }

  const std::size_t needed = std::max(text_col, label_col) + 1;
  for (std::size_t r = first_data; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    const std::string where = " at row " + std::to_string(row.line);
    if (row.fields.size() < needed || (!has_header && row.fields.size() != 2)) {
      throw Error(ErrorCode::kMalformedData,
                  "malformed row" + where + ": expected text and label fields");
    }
    long long label;
    if (!parse_int(row.fields[label_col], label)) {
      throw Error(ErrorCode::kMalformedData,
                  "malformed row" + where + ": label '" +
                      row.fields[label_col] + "' is not an integer");
    }
    if (label < 0 || label >= kNumLabels) {
      throw Error(ErrorCode::kOutOfRange, "label out of range" + where);
    }
    corpus.records.push_back({row.fields[text_col], static_cast<int>(label)});
  }
  return corpus;
}

LabeledCorpus load_dataset(const std::filesystem::path& path,
                           const DatasetFormat& format) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kIo,
                "dataset file '" + path.string() + "' does not exist");
  }
  return parse_dataset(read_file(path), format);
}

std::string clean_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (const char ch : raw) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80) continue;  // non-ASCII bytes vanish without a break
    if (c >= 'A' && c <= 'Z') {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(c - 'A' + 'a'));
    } else if (c >= 'a' && c <= 'z') {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(c));
    } else {
      pending_space = true;
    }
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view cleaned) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < cleaned.size()) {
    const std::size_t start = cleaned.find_first_not_of(' ', pos);
    if (start == std::string_view::npos) break;
    std::size_t end = cleaned.find(' ', start);
    if (end == std::string_view::npos) end = cleaned.size();
    tokens.emplace_back(cleaned.substr(start, end - start));
    pos = end;
  }
  return tokens;
}

StopList::StopList(std::vector<std::string> words)
    : words_(std::make_move_iterator(words.begin()),
             std::make_move_iterator(words.end())) {}

StopList StopList::parse(std::string_view content) {
  std::vector<std::string> words;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view entry = trim(line);
    if (entry.empty() || entry.front() == '#') continue;
    for (auto& token : tokenize(clean_text(entry))) {
      words.push_back(std::move(token));
    }
  }
  return StopList(std::move(words));
}

StopList StopList::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

const StopList& StopList::english() {
  static const StopList list = parse(detail::kEnglishStopwordsText);
  return list;
}

std::vector<std::string> StopList::sorted() const {
  std::vector<std::string> out(words_.begin(), words_.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> remove_stopwords(std::span<const std::string> tokens,
                                          const StopList& stoplist) {
  std::vector<std::string> kept;
  kept.reserve(tokens.size());
  for (const auto& token : tokens) {
    if (!stoplist.contains(token)) kept.push_back(token);
  }
  return kept;
}

std::vector<std::string> preprocess(std::string_view raw,
                                    const StopList& stoplist) {
  const auto tokens = tokenize(clean_text(raw));
  return remove_stopwords(tokens, stoplist);
}

Vocabulary::Vocabulary(std::size_t max_size) : max_size_(max_size) {
  if (max_size < 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "vocabulary max_size must be >= 3, got " +
                    std::to_string(max_size));
  }
  tokens_.emplace_back(kPadToken);
  tokens_.emplace_back(kOovToken);
  ids_.emplace(kPadToken, kPadId);
  ids_.emplace(kOovToken, kOovId);
}

void Vocabulary::add(std::string token) {
  if (tokens_.size() >= max_size_) {
    throw Error(ErrorCode::kInvalidArgument, "vocabulary is full");
  }
  if (token.empty() || !std::all_of(token.begin(), token.end(), [](char c) {
        return c >= 'a' && c <= 'z';
      })) {
    throw Error(ErrorCode::kMalformedData,
                "vocabulary token '" + token + "' is not lowercase alphabetic");
  }
  const auto id = static_cast<std::uint32_t>(tokens_.size());
  if (!ids_.emplace(token, id).second) {
    throw Error(ErrorCode::kMalformedData,
                "duplicate vocabulary token '" + token + "'");
  }
  tokens_.push_back(std::move(token));
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens,
                                   std::size_t max_size) {
  Vocabulary vocab(max_size);
  for (auto& token : tokens) vocab.add(std::move(token));
  return vocab;
}

std::uint32_t Vocabulary::id_of(std::string_view token) const {
  const auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kOovId : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return ids_.contains(std::string(token));
}

std::string Vocabulary::to_tsv() const {
  std::string out;
  for (std::size_t id = 0; id < tokens_.size(); ++id) {
    out += tokens_[id];
    out += '\t';
    out += std::to_string(id);
    out += '\n';
  }
  return out;
}

Vocabulary Vocabulary::from_tsv(std::string_view content,
                                std::size_t max_size) {
  std::map<std::uint32_t, std::string> by_id;
  std::istringstream in{std::string(content)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    long long id;
    if (tab == std::string::npos ||
        !parse_int(std::string_view(line).substr(tab + 1), id) || id < 0) {
      throw Error(ErrorCode::kMalformedData,
                  "malformed vocabulary line " + std::to_string(line_no));
    }
    by_id[static_cast<std::uint32_t>(id)] = line.substr(0, tab);
  }
  std::vector<std::string> tokens;
  std::uint32_t expected = 2;
  for (auto& [id, token] : by_id) {
    if (id < 2) continue;
    if (id != expected) {
      throw Error(ErrorCode::kMalformedData,
                  "vocabulary ids are not dense at id " + std::to_string(id));
    }
    tokens.push_back(std::move(token));
    ++expected;
  }
  return from_tokens(std::move(tokens), max_size);
}

Vocabulary build_vocabulary(std::span<const std::vector<std::string>> documents,
                            std::size_t max_size) {
  Vocabulary vocab(max_size);
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& doc : documents) {
    for (const auto& token : doc) ++counts[token];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(),
                                                          counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  const std::size_t keep = std::min(ranked.size(), max_size - 2);
  std::vector<std::string> tokens;
  tokens.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) tokens.push_back(ranked[i].first);
  return Vocabulary::from_tokens(std::move(tokens), max_size);
}

std::vector<std::uint32_t> encode(std::span<const std::string> tokens,
                                  const Vocabulary& vocab,
                                  std::size_t seq_len) {
  if (seq_len == 0) {
    throw Error(ErrorCode::kInvalidArgument, "seq_len must be >= 1");
  }
  std::vector<std::uint32_t> ids(seq_len, Vocabulary::kPadId);
  const std::size_t used = std::min(tokens.size(), seq_len);
  const std::size_t skip = tokens.size() - used;
  for (std::size_t i = 0; i < used; ++i) {
    ids[seq_len - used + i] = vocab.id_of(tokens[skip + i]);
  }
  return ids;
}

}  // namespace sentigru
