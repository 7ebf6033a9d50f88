#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cbert/encoder.hpp"
#include "cbert/heads.hpp"
#include "cbert/tokenizer.hpp"

namespace cbert {

inline int class_index(Label label) {
  return label == Label::CauseEffect ? kCauseEffectIndex : kOtherIndex;
}

// Encoder, classification head and the vocabulary they were built against.
struct Model {
  Encoder encoder;
  HeadKind head_kind = HeadKind::CBert;
  HeadParams head;
  Vocab vocab;

  std::vector<ParamView> param_views();
};

// Builds a randomly initialized model. The encoder and head draw from
// independent streams derived from `seed`, so models sharing a seed share
// their encoder initialization across head kinds.
Model make_model(EncoderConfig cfg, HeadKind kind, Vocab vocab, std::uint64_t seed);

struct ModelGrads {
  EncoderParams encoder;
  HeadParams head;
};

ModelGrads allocate_grads(const Model& model);
void set_zero(ModelGrads& grads);
std::vector<ParamView> param_views(ModelGrads& grads, HeadKind kind);

struct ModelActivations {
  EncoderActivations encoder;
  HeadActivations head;
};

// Class probabilities for one record. The record is trimmed to its real
// length before the encoder runs; padded keys would receive exactly zero
// attention weight, so the trim does not change the result. A masked-event
// head rejects records that are not masked-variant.
Vector model_forward(const Model& model, const ExampleRecord& record, Mode mode,
                     std::mt19937_64* dropout_rng, ModelActivations* acts = nullptr,
                     EncoderTrace* trace = nullptr);

inline Vector predict_probs(const Model& model, const ExampleRecord& record) {
  return model_forward(model, record, Mode::Eval, nullptr);
}

inline constexpr double kProbabilityFloor = 1e-12;

// Negative log-likelihood of the true class; probabilities are floored at
// kProbabilityFloor, and `clamp_count` (when non-null) counts the floorings.
double binary_loss(const Vector& probs, Label label, long* clamp_count = nullptr);

// Forward in Train mode, then backward; gradients are scaled by `grad_scale`
// (1/batch_size for mean-reduced batches) and accumulated into `grads`.
// Returns the example's unscaled loss.
double loss_and_grads(Model& model, const ExampleRecord& record, double grad_scale,
                      std::mt19937_64* dropout_rng, ModelGrads& grads,
                      long* clamp_count = nullptr);

}  // namespace cbert
