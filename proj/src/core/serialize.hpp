// SPDX-License-Identifier: Apache-2.0
//
// Single-file model format: a fixed header followed by checksummed
// sections (configuration, vocabulary, stoplist, one per tensor). The byte
// layout is documented in docs/model_format.md.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include "core/model.hpp"

namespace sentigru {

inline constexpr std::uint32_t kModelFormatVersion = 1;
inline constexpr std::string_view kModelMagic{"SGRUMDL\0", 8};

using AnyClassifier = std::variant<Classifier<float>, Classifier<double>>;

template <class T>
std::string serialize(const Classifier<T>& classifier);

/// Throws Error with kFormat (bad magic, truncation), kVersionMismatch,
/// kChecksum or kIncompleteModel (required section missing).
AnyClassifier deserialize(std::string_view bytes);

template <class T>
void save(const Classifier<T>& classifier, const std::filesystem::path& path);

AnyClassifier load(const std::filesystem::path& path);

}  // namespace sentigru
