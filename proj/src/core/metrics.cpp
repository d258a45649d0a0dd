// SPDX-License-Identifier: Apache-2.0
#include "core/metrics.hpp"

#include <fstream>

namespace sentigru {

ConfusionMatrix::ConfusionMatrix(std::size_t classes)
    : classes_(classes), counts_(classes * classes, 0) {
  if (classes == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "confusion matrix needs at least one class");
  }
}

std::size_t ConfusionMatrix::total() const {
  std::size_t sum = 0;
  for (std::size_t c : counts_) sum += c;
  return sum;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t sum = 0;
  for (std::size_t k = 0; k < classes_; ++k) sum += at(k, k);
  return sum;
}

std::size_t ConfusionMatrix::row_sum(std::size_t truth) const {
  std::size_t sum = 0;
  for (std::size_t j = 0; j < classes_; ++j) sum += at(truth, j);
  return sum;
}

std::size_t ConfusionMatrix::column_sum(std::size_t pred) const {
  std::size_t sum = 0;
  for (std::size_t i = 0; i < classes_; ++i) sum += at(i, pred);
  return sum;
}

ConfusionMatrix confusion_matrix(std::span<const int> truth,
                                 std::span<const int> pred,
                                 std::size_t classes) {
  if (truth.size() != pred.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "truth has " + std::to_string(truth.size()) +
                    " entries but predictions have " +
                    std::to_string(pred.size()));
  }
  ConfusionMatrix cm(classes);
  for (std::size_t n = 0; n < truth.size(); ++n) {
    if (truth[n] < 0 || pred[n] < 0 ||
        static_cast<std::size_t>(truth[n]) >= classes ||
        static_cast<std::size_t>(pred[n]) >= classes) {
      throw Error(ErrorCode::kOutOfRange,
                  "class code out of range at position " + std::to_string(n));
    }
    cm.add(static_cast<std::size_t>(truth[n]), static_cast<std::size_t>(pred[n]));
  }
  return cm;
}

double f1_score(double precision, double recall) {
  if (precision == recall) return precision;
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

std::vector<std::size_t> EvalReport::undefined_classes() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < per_class.size(); ++k) {
    if (per_class[k].precision_undefined || per_class[k].recall_undefined) {
      out.push_back(k);
    }
  }
  return out;
}

EvalReport classification_metrics(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  if (total == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot compute metrics of an empty confusion matrix");
  }
  EvalReport report;
  report.confusion = cm;
  const double n = static_cast<double>(total);
  report.accuracy = static_cast<double>(cm.trace()) / n;

  const std::size_t k_classes = cm.classes();
  report.per_class.resize(k_classes);
  for (std::size_t k = 0; k < k_classes; ++k) {
    ClassMetrics& m = report.per_class[k];
    const std::size_t tp = cm.at(k, k);
    const std::size_t predicted = cm.column_sum(k);  // tp + fp
    const std::size_t actual = cm.row_sum(k);        // tp + fn
    m.support = actual;
    if (predicted == 0) {
      m.precision_undefined = true;
    } else {
      m.precision = static_cast<double>(tp) / static_cast<double>(predicted);
    }
    if (actual == 0) {
      m.recall_undefined = true;
    } else {
      m.recall = static_cast<double>(tp) / static_cast<double>(actual);
    }
    m.f1 = f1_score(m.precision, m.recall);

    report.macro.precision += m.precision;
    report.macro.recall += m.recall;
    report.macro.f1 += m.f1;
    const double weight = static_cast<double>(actual);
    report.weighted.precision += weight * m.precision;
    report.weighted.recall += weight * m.recall;
    report.weighted.f1 += weight * m.f1;
  }
  const double kd = static_cast<double>(k_classes);
  report.macro.precision /= kd;
  report.macro.recall /= kd;
  report.macro.f1 /= kd;
  report.weighted.precision /= n;
  report.weighted.recall /= n;
  report.weighted.f1 /= n;

  // Pooled counts: every error is one false positive and one false negative.
  const double tp = static_cast<double>(cm.trace());
  const double errors = n - tp;
  report.micro.precision = tp / (tp + errors);
  report.micro.recall = tp / (tp + errors);
  report.micro.f1 = f1_score(report.micro.precision, report.micro.recall);
  return report;
}

namespace {

nlohmann::json averaged(const AveragedMetrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

}  // namespace

nlohmann::json to_json(const EvalReport& report,
                       std::span<const std::string_view> label_names) {
  const std::size_t k_classes = report.confusion.classes();
  nlohmann::json matrix = nlohmann::json::array();
  for (std::size_t i = 0; i < k_classes; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < k_classes; ++j) {
      row.push_back(report.confusion.at(i, j));
    }
    matrix.push_back(std::move(row));
  }
  nlohmann::json labels = nlohmann::json::array();
  nlohmann::json precision = nlohmann::json::array();
  nlohmann::json recall = nlohmann::json::array();
  nlohmann::json f1 = nlohmann::json::array();
  nlohmann::json support = nlohmann::json::array();
  nlohmann::json undefined = nlohmann::json::array();
  for (std::size_t k = 0; k < k_classes; ++k) {
    const ClassMetrics& m = report.per_class[k];
    labels.push_back(k < label_names.size() ? std::string(label_names[k])
                                            : std::to_string(k));
    precision.push_back(m.precision);
    recall.push_back(m.recall);
    f1.push_back(m.f1);
    support.push_back(m.support);
    if (m.precision_undefined || m.recall_undefined) {
      nlohmann::json flag = {{"class", k}, {"label", labels.back()}};
      nlohmann::json which = nlohmann::json::array();
      if (m.precision_undefined) which.push_back("precision");
      if (m.recall_undefined) which.push_back("recall");
      flag["zero_denominator"] = std::move(which);
      undefined.push_back(std::move(flag));
    }
  }
  return {
      {"total", report.confusion.total()},
      {"accuracy", report.accuracy},
      {"labels", std::move(labels)},
      {"confusion_matrix", std::move(matrix)},
      {"per_class",
       {{"precision", std::move(precision)},
        {"recall", std::move(recall)},
        {"f1", std::move(f1)},
        {"support", std::move(support)}}},
      {"macro", averaged(report.macro)},
      {"micro", averaged(report.micro)},
      {"weighted", averaged(report.weighted)},
      {"undefined", std::move(undefined)},
  };
}

nlohmann::json history_json(std::span<const EpochRecord> history) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : history) {
    out.push_back({{"epoch", r.epoch},
                   {"train_loss", r.train_loss},
                   {"train_acc", r.train_accuracy},
                   {"val_loss", r.val_loss},
                   {"val_acc", r.val_accuracy},
                   {"seconds", r.seconds}});
  }
  return out;
}

nlohmann::json history_report_json(std::span<const EpochRecord> history) {
  if (history.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "history is empty");
  }
  const EpochRecord& first = history.front();
  const EpochRecord& last = history.back();
  return {
      {"epochs", history_json(history)},
      {"summary",
       {{"epochs", history.size()},
        {"val_acc_first", first.val_accuracy},
        {"val_acc_last", last.val_accuracy},
        {"val_acc_delta", last.val_accuracy - first.val_accuracy},
        {"val_loss_first", first.val_loss},
        {"val_loss_last", last.val_loss},
        {"val_loss_delta", last.val_loss - first.val_loss}}},
  };
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  }
  out << content;
  if (!out) {
    throw Error(ErrorCode::kIo, "failed writing '" + path.string() + "'");
  }
}

void history_report(std::span<const EpochRecord> history,
                    const std::filesystem::path& path) {
  write_text_file(path, history_report_json(history).dump(2) + "\n");
}

}  // namespace sentigru
