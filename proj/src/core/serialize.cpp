// SPDX-License-Identifier: Apache-2.0
#include "core/serialize.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace sentigru {
namespace {

constexpr std::string_view kConfigTag = "CONF";
constexpr std::string_view kVocabTag = "VOCB";
constexpr std::string_view kStopTag = "STOP";
constexpr std::string_view kTensorTag = "TENS";

std::uint32_t crc_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()),
              static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void raw(std::string_view s) { out_.append(s); }

  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : in_(bytes) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(in_[pos_++]);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string_view bytes(std::size_t n) {
    need(n);
    const auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::string str() { return std::string(bytes(u32())); }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) {
      throw Error(ErrorCode::kFormat, "model file is truncated");
    }
  }

  std::string_view in_;
  std::size_t pos_ = 0;
};

void write_section(Writer& file, std::string_view tag, std::string payload) {
  file.raw(tag);
  file.u64(payload.size());
  file.u32(crc_of(payload));
  file.raw(payload);
}

template <class T>
std::string tensor_payload(const std::string& name, const Tensor<T>& tensor) {
  Writer w;
  w.str(name);
  w.u32(static_cast<std::uint32_t>(tensor.rank()));
  for (std::size_t d : tensor.shape()) w.u64(d);
  for (T v : tensor.values()) {
    if constexpr (sizeof(T) == 4) {
      w.f32(v);
    } else {
      w.f64(v);
    }
  }
  return w.take();
}

struct Section {
  std::string tag;
  std::string_view payload;
};

struct ParsedConfig {
  std::uint32_t element_size = 0;
  ModelConfig model;
  std::size_t vocab_max_size = 0;
};

ParsedConfig parse_config(std::string_view payload) {
  Reader r(payload);
  ParsedConfig c;
  c.element_size = r.u32();
  c.model.vocab_size = r.u64();
  c.model.embed_dim = r.u64();
  c.model.seq_len = r.u64();
  for (auto& units : c.model.gru_units) units = r.u64();
  c.model.num_classes = r.u64();
  c.model.dropout_rate = r.f64();
  c.model.batchnorm_momentum = r.f64();
  c.model.batchnorm_epsilon = r.f64();
  c.vocab_max_size = r.u64();
  if (!r.done()) throw Error(ErrorCode::kFormat, "oversized config section");
  if (c.element_size != 4 && c.element_size != 8) {
    throw Error(ErrorCode::kFormat, "unsupported parameter element size " +
                                        std::to_string(c.element_size));
  }
  return c;
}

std::vector<std::string> parse_strings(std::string_view payload,
                                       std::string* prefix = nullptr) {
  Reader r(payload);
  if (prefix) *prefix = r.str();
  const std::uint64_t count = r.u64();
  std::vector<std::string> out;
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(r.str());
  if (!r.done()) throw Error(ErrorCode::kFormat, "trailing bytes in section");
  return out;
}

template <class T>
Classifier<T> rebuild(const ParsedConfig& config,
                      const std::map<std::string, std::string_view>& tensors,
                      Vocabulary vocab, StopList stoplist) {
  Classifier<T> out{Model<T>(config.model, 0), std::move(vocab),
                    std::move(stoplist)};
  for (auto& [name, target] : out.model.state()) {
    const auto it = tensors.find(name);
    if (it == tensors.end()) {
      throw Error(ErrorCode::kIncompleteModel,
                  "incomplete model: tensor '" + name + "' is missing");
    }
    Reader r(it->second);
    r.str();
    Shape shape(r.u32());
    for (auto& d : shape) d = r.u64();
    if (shape != target->shape()) {
      throw Error(ErrorCode::kFormat, "tensor '" + name + "' has shape " +
                                          shape_string(shape) + ", expected " +
                                          shape_string(target->shape()));
    }
    for (T& v : target->values()) {
      if constexpr (sizeof(T) == 4) {
        v = r.f32();
      } else {
        v = r.f64();
      }
    }
    if (!r.done()) {
      throw Error(ErrorCode::kFormat, "trailing bytes in tensor '" + name + "'");
    }
  }
  return out;
}

}  // namespace

template <class T>
std::string serialize(const Classifier<T>& classifier) {
  const ModelConfig& config = classifier.model.config();
  const auto tensors = classifier.model.state();

  Writer file;
  file.raw(kModelMagic);
  file.u32(kModelFormatVersion);
  file.u32(static_cast<std::uint32_t>(3 + tensors.size()));

  Writer conf;
  conf.u32(sizeof(T));
  conf.u64(config.vocab_size);
  conf.u64(config.embed_dim);
  conf.u64(config.seq_len);
  for (std::size_t units : config.gru_units) conf.u64(units);
  conf.u64(config.num_classes);
  conf.f64(config.dropout_rate);
  conf.f64(config.batchnorm_momentum);
  conf.f64(config.batchnorm_epsilon);
  conf.u64(classifier.vocab.max_size());
  write_section(file, kConfigTag, conf.take());

  Writer vocab;
  const auto tokens = classifier.vocab.corpus_tokens();
  vocab.u64(tokens.size());
  for (const auto& token : tokens) vocab.str(token);
  write_section(file, kVocabTag, vocab.take());

  Writer stop;
  stop.str(kStopListVersion);
  const auto words = classifier.stoplist.sorted();
  stop.u64(words.size());
  for (const auto& word : words) stop.str(word);
  write_section(file, kStopTag, stop.take());

  for (const auto& [name, tensor] : tensors) {
    write_section(file, kTensorTag, tensor_payload(name, *tensor));
  }
  return file.take();
}

AnyClassifier deserialize(std::string_view bytes) {
  Reader file(bytes);
  if (bytes.size() < kModelMagic.size() ||
      file.bytes(kModelMagic.size()) != kModelMagic) {
    throw Error(ErrorCode::kFormat, "not a sentigru model file (bad magic)");
  }
  const std::uint32_t version = file.u32();
  if (version != kModelFormatVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "model format version " + std::to_string(version) +
                    " is not supported (expected " +
                    std::to_string(kModelFormatVersion) + ")");
  }
  const std::uint32_t count = file.u32();
  std::vector<Section> sections;
  for (std::uint32_t i = 0; i < count; ++i) {
    Section s;
    s.tag = std::string(file.bytes(4));
    const std::uint64_t size = file.u64();
    const std::uint32_t crc = file.u32();
    s.payload = file.bytes(size);
    if (crc_of(s.payload) != crc) {
      throw Error(ErrorCode::kChecksum, "checksum mismatch in section " +
                                            std::to_string(i) + " (" + s.tag +
                                            ")");
    }
    sections.push_back(s);
  }
  if (!file.done()) {
    throw Error(ErrorCode::kFormat, "unexpected bytes after last section");
  }

  std::optional<ParsedConfig> config;
  std::optional<std::vector<std::string>> vocab_tokens;
  std::optional<std::vector<std::string>> stopwords;
  std::map<std::string, std::string_view> tensors;
  for (const Section& s : sections) {
    if (s.tag == kConfigTag) {
      config = parse_config(s.payload);
    } else if (s.tag == kVocabTag) {
      vocab_tokens = parse_strings(s.payload);
    } else if (s.tag == kStopTag) {
      std::string version;
      stopwords = parse_strings(s.payload, &version);
    } else if (s.tag == kTensorTag) {
      Reader r(s.payload);
      tensors[r.str()] = s.payload;
    } else {
      throw Error(ErrorCode::kFormat, "unknown section tag '" + s.tag + "'");
    }
  }
  auto missing = [](const char* what) {
    return Error(ErrorCode::kIncompleteModel,
                 std::string("incomplete model: ") + what +
                     " section is missing");
  };
  if (!config) throw missing("configuration");
  if (!vocab_tokens) throw missing("vocabulary");
  if (!stopwords) throw missing("stoplist");

  Vocabulary vocab =
      Vocabulary::from_tokens(std::move(*vocab_tokens), config->vocab_max_size);
  StopList stoplist(std::move(*stopwords));
  if (config->element_size == 4) {
    return rebuild<float>(*config, tensors, std::move(vocab),
                          std::move(stoplist));
  }
  return rebuild<double>(*config, tensors, std::move(vocab),
                         std::move(stoplist));
}

template <class T>
void save(const Classifier<T>& classifier, const std::filesystem::path& path) {
  const std::string bytes = serialize(classifier);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorCode::kIo, "failed writing '" + path.string() + "'");
  }
}

AnyClassifier load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open model '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return deserialize(buffer.str());
}

template std::string serialize<float>(const Classifier<float>&);
template std::string serialize<double>(const Classifier<double>&);
template void save<float>(const Classifier<float>&, const std::filesystem::path&);
template void save<double>(const Classifier<double>&,
                           const std::filesystem::path&);

}  // namespace sentigru
