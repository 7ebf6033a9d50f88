#pragma once

// Shared helpers for the unit tests and the acceptance runner.

#include <cstdint>
#include <string>
#include <vector>

#include "cbert/corpus.hpp"
#include "cbert/model.hpp"
#include "cbert/training.hpp"

namespace testsupport {

// Synthetic sentences, a vocabulary over their train split, and both encodings.
struct TinyCorpus {
  std::vector<cbert::MarkedSentence> sentences;
  cbert::Vocab vocab;
  cbert::DatasetBundle bundle;
};

TinyCorpus make_tiny_corpus(int train_per_class, int test_per_class, std::uint64_t seed,
                            int max_seq_len,
                            cbert::SyntheticFamily family = cbert::SyntheticFamily::A);

cbert::EncoderConfig small_encoder_config(int vocab_size, int max_seq_len);

// Richardson-extrapolated central-difference gradient check over every
// parameter of the model against the analytic backward pass, on one record's
// loss. Extrapolation keeps truncation error out of the comparison without
// pushing the step into roundoff territory.
struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
  long entries_checked = 0;
  long entries_failed = 0;
};

GradCheckResult grad_check_model(cbert::Model& model, const cbert::ExampleRecord& record,
                                 double step = 1e-4, double rel_tolerance = 1e-4);

}  // namespace testsupport
