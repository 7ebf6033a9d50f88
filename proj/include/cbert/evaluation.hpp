#pragma once

#include <string>
#include <vector>

#include "cbert/model.hpp"
#include "cbert/types.hpp"

namespace cbert {

struct EvalExample {
  std::string sentence_id;
  std::string tagged;  // tagged sentence rendering, when sentences were supplied
  Label gold = Label::Other;
  Label predicted = Label::Other;
  double p_cause_effect = 0.0;
};

// Positive class = CauseEffect. f1_other treats Other as the positive class;
// f1_macro averages the two.
struct MetricsReport {
  long tp = 0, fp = 0, tn = 0, fn = 0;
  double precision = 0.0, recall = 0.0;
  double f1_positive = 0.0, f1_other = 0.0, f1_macro = 0.0;
  double accuracy = 0.0;
  std::vector<EvalExample> true_positives, false_positives, true_negatives, false_negatives;

  long total() const { return tp + fp + tn + fn; }
};

// Argmax with ties resolved to Other.
Label predict_label(const Vector& probs);

MetricsReport evaluate(const Model& model, const std::vector<ExampleRecord>& records);

// Same, with the originating sentences (parallel to `records`) so the example
// lists carry tagged renderings.
MetricsReport evaluate(const Model& model, const std::vector<ExampleRecord>& records,
                       const std::vector<MarkedSentence>& sentences);

std::string render_metrics_text(const MetricsReport& report);
std::string metrics_json_string(const MetricsReport& report);

// Up to k examples per outcome category, with tagged sentences when present.
std::string error_sheet(const MetricsReport& report, int k);

}  // namespace cbert
