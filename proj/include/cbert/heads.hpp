#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cbert/nn.hpp"
#include "cbert/encoder.hpp"
#include "cbert/tokenizer.hpp"

namespace cbert {

enum class HeadKind { CBert, EventAware, MaskedEvent };

std::string to_string(HeadKind kind);
HeadKind head_kind_from_string(std::string_view s);

// Shapes depend on the head kind (d = hidden_dim):
//   CBert:       w0 d x d, b0 d;   w1 2 x d, b1 2          (w2/w3 empty)
//   EventAware:  w0,w1,w2 d x d, b0,b1,b2 d; w3 2 x 3d, b3 2
//   MaskedEvent: same shapes as EventAware
// All heads apply their matrices column-style: y = W * x + b.
struct HeadParams {
  Matrix w0, w1, w2, w3;
  Vector b0, b1, b2, b3;
};

HeadParams allocate_head_params(HeadKind kind, int hidden_dim);
void init_head_params(HeadParams& p, std::uint64_t seed);
std::vector<ParamView> param_views(HeadParams& p, HeadKind kind);
void set_zero(HeadParams& p);

// Caches for the analytic backward pass. drop_* are the (inverted) dropout
// masks applied to the input of each matrix multiply.
struct HeadActivations {
  Eigen::Index seq_len = 0;
  TokenSpan e1, e2;
  Vector tanh_h0;             // tanh of the sentence-level state
  Vector drop_h0;
  Vector h0p;                 // w0 * (drop_h0 .* tanh_h0) + b0
  Matrix tanh_e1, tanh_e2;    // tanh of the event rows (event heads only)
  Vector ctx1, ctx2;          // mean over the event rows of tanh
  Vector drop_ctx1, drop_ctx2;
  Vector h1p, h2p;
  Vector concat;              // [h0p; h1p; h2p] (event heads only)
  Vector drop_final;          // mask on the input of the final matrix
  Vector logits;              // 2
  Vector probs;               // 2, softmax(logits)
};

// Index 0 of the probability vector is the cause-effect class.
inline constexpr int kCauseEffectIndex = 0;
inline constexpr int kOtherIndex = 1;

// Computes class probabilities from the encoder output. Event token spans are
// inclusive ranges into `hidden`'s rows; the masked-event head requires both
// to be single positions. Dropout fires only in Train mode with a non-null rng.
Vector head_forward(const HeadParams& p, HeadKind kind, const Matrix& hidden,
                    const TokenSpan& e1, const TokenSpan& e2, double dropout_rate, Mode mode,
                    std::mt19937_64* dropout_rng, HeadActivations* acts = nullptr);

// Accumulates head gradients into `grads` and returns the gradient with
// respect to the encoder output (seq_len x d).
Matrix head_backward(const HeadParams& p, HeadKind kind, const HeadActivations& acts,
                     const Vector& d_logits, HeadParams& grads);

}  // namespace cbert
