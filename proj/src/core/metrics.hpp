// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/trainer.hpp"

namespace sentigru {

/// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes);

  std::size_t classes() const { return classes_; }
  std::size_t at(std::size_t truth, std::size_t pred) const {
    return counts_[truth * classes_ + pred];
  }
  void add(std::size_t truth, std::size_t pred) {
    ++counts_[truth * classes_ + pred];
  }
  std::size_t total() const;
  std::size_t trace() const;
  std::size_t row_sum(std::size_t truth) const;
  std::size_t column_sum(std::size_t pred) const;

  friend bool operator==(const ConfusionMatrix&,
                         const ConfusionMatrix&) = default;

 private:
  std::size_t classes_;
  std::vector<std::size_t> counts_;
};

ConfusionMatrix confusion_matrix(std::span<const int> truth,
                                 std::span<const int> pred,
                                 std::size_t classes);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  /// Set when a zero denominator forced the value to 0.
  bool precision_undefined = false;
  bool recall_undefined = false;
};

struct AveragedMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  ConfusionMatrix confusion{1};
  double accuracy = 0.0;
  std::vector<ClassMetrics> per_class;
  AveragedMetrics macro;
  AveragedMetrics micro;
  AveragedMetrics weighted;

  /// Classes whose precision or recall hit a zero denominator.
  std::vector<std::size_t> undefined_classes() const;
};

/// Per-class, macro, micro and support-weighted precision/recall/F1.
/// Zero denominators yield 0 and set the class's undefined flag.
EvalReport classification_metrics(const ConfusionMatrix& cm);

/// Harmonic mean, 0 when both inputs are 0.
double f1_score(double precision, double recall);

nlohmann::json to_json(const EvalReport& report,
                       std::span<const std::string_view> label_names = {});

/// JSON array of EpochRecord objects.
nlohmann::json history_json(std::span<const EpochRecord> history);

/// Per-epoch curves plus a summary of first-to-last validation changes.
nlohmann::json history_report_json(std::span<const EpochRecord> history);
void history_report(std::span<const EpochRecord> history,
                    const std::filesystem::path& path);

/// Writes `content` to `path`, throwing kIo on failure.
void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

}  // namespace sentigru
