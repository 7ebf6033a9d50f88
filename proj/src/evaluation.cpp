#include "cbert/evaluation.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

namespace cbert {

Label predict_label(const Vector& probs) {
  return probs(kCauseEffectIndex) > probs(kOtherIndex) ? Label::CauseEffect : Label::Other;
}

namespace {

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

double f1_from(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

MetricsReport evaluate_impl(const Model& model, const std::vector<ExampleRecord>& records,
                            const std::vector<MarkedSentence>* sentences) {
  if (records.empty()) throw CorpusError("evaluate: empty test set");
  if (sentences && sentences->size() != records.size())
    throw CorpusError("evaluate: sentence list does not parallel the record list");

  MetricsReport rep;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const ExampleRecord& rec = records[i];
    const Vector probs = predict_probs(model, rec);
    EvalExample ex;
    ex.sentence_id = rec.sentence_id;
    ex.gold = rec.label;
    ex.predicted = predict_label(probs);
    ex.p_cause_effect = probs(kCauseEffectIndex);
    if (sentences) {
      const MarkedSentence& s = (*sentences)[i];
      if (s.sentence_id != rec.sentence_id)
        throw CorpusError("evaluate: sentence/record mismatch at position " +
                          std::to_string(i));
      ex.tagged = render_tagged(s);
    }
    const bool gold_pos = ex.gold == Label::CauseEffect;
    const bool pred_pos = ex.predicted == Label::CauseEffect;
    if (gold_pos && pred_pos) {
      ++rep.tp;
      rep.true_positives.push_back(std::move(ex));
    } else if (!gold_pos && pred_pos) {
      ++rep.fp;
      rep.false_positives.push_back(std::move(ex));
    } else if (!gold_pos && !pred_pos) {
      ++rep.tn;
      rep.true_negatives.push_back(std::move(ex));
    } else {
      ++rep.fn;
      rep.false_negatives.push_back(std::move(ex));
    }
  }

  rep.precision = safe_ratio(static_cast<double>(rep.tp), static_cast<double>(rep.tp + rep.fp));
  rep.recall = safe_ratio(static_cast<double>(rep.tp), static_cast<double>(rep.tp + rep.fn));
  rep.f1_positive = f1_from(rep.precision, rep.recall);
  const double p_other =
      safe_ratio(static_cast<double>(rep.tn), static_cast<double>(rep.tn + rep.fn));
  const double r_other =
      safe_ratio(static_cast<double>(rep.tn), static_cast<double>(rep.tn + rep.fp));
  rep.f1_other = f1_from(p_other, r_other);
  rep.f1_macro = 0.5 * (rep.f1_positive + rep.f1_other);
  rep.accuracy =
      safe_ratio(static_cast<double>(rep.tp + rep.tn), static_cast<double>(rep.total()));
  return rep;
}

void render_category(std::ostringstream& os, const char* title,
                     const std::vector<EvalExample>& examples, long count, int k) {
  os << "== " << title << " (" << count << ") ==\n";
  const int n = std::min<int>(k, static_cast<int>(examples.size()));
  for (int i = 0; i < n; ++i) {
    const auto& ex = examples[static_cast<std::size_t>(i)];
    os << "[" << ex.sentence_id << "] ";
    if (!ex.tagged.empty()) os << ex.tagged << " ";
    os << "(gold " << to_string(ex.gold) << ", predicted " << to_string(ex.predicted)
       << ", p_cause_effect=" << ex.p_cause_effect << ")\n";
  }
}

}  // namespace

MetricsReport evaluate(const Model& model, const std::vector<ExampleRecord>& records) {
  return evaluate_impl(model, records, nullptr);
}

MetricsReport evaluate(const Model& model, const std::vector<ExampleRecord>& records,
                       const std::vector<MarkedSentence>& sentences) {
  return evaluate_impl(model, records, &sentences);
}

std::string render_metrics_text(const MetricsReport& r) {
  std::ostringstream os;
  os << "records " << r.total() << "  tp " << r.tp << "  fp " << r.fp << "  tn " << r.tn
     << "  fn " << r.fn << "\n";
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "precision %.4f  recall %.4f  f1(cause-effect) %.4f  f1(other) %.4f  "
                "f1(macro) %.4f  accuracy %.4f\n",
                r.precision, r.recall, r.f1_positive, r.f1_other, r.f1_macro, r.accuracy);
  os << buf;
  return os.str();
}

std::string metrics_json_string(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["tn"] = r.tn;
  j["fn"] = r.fn;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1_positive"] = r.f1_positive;
  j["f1_other"] = r.f1_other;
  j["f1_macro"] = r.f1_macro;
  j["accuracy"] = r.accuracy;
  return j.dump(1);
}

std::string error_sheet(const MetricsReport& report, int k) {
  if (k < 0) k = 0;
  std::ostringstream os;
  render_category(os, "true positives", report.true_positives, report.tp, k);
  render_category(os, "false positives", report.false_positives, report.fp, k);
  render_category(os, "true negatives", report.true_negatives, report.tn, k);
  render_category(os, "false negatives", report.false_negatives, report.fn, k);
  return os.str();
}

}  // namespace cbert
