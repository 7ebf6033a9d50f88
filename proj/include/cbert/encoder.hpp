#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbert/nn.hpp"

namespace cbert {

struct NumericsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Mode { Train, Eval };

struct EncoderConfig {
  int layers = 2;
  int attention_heads = 2;
  int hidden_dim = 32;
  int ffn_dim = 64;
  int max_seq_len = 64;
  double dropout_rate = 0.1;
  int vocab_size = 0;
  std::uint64_t seed = 0;

  int head_dim() const { return hidden_dim / attention_heads; }
  void validate() const;
};

struct AttentionParams {
  Matrix wq, wk, wv, wo;  // hidden_dim x hidden_dim, applied as X*W
  Vector bq, bk, bv, bo;
};

struct LayerNormParams {
  Vector gain, bias;
};

struct FfnParams {
  Matrix w1;  // hidden_dim x ffn_dim
  Vector b1;
  Matrix w2;  // ffn_dim x hidden_dim
  Vector b2;
};

struct LayerParams {
  AttentionParams attn;
  LayerNormParams ln1;
  FfnParams ffn;
  LayerNormParams ln2;
};

struct EncoderParams {
  Matrix token_embedding;     // vocab_size x hidden_dim
  Matrix position_embedding;  // max_seq_len x hidden_dim
  std::vector<LayerParams> layers;
};

// Zero-filled parameter tensors with the shapes the config dictates.
EncoderParams allocate_encoder_params(const EncoderConfig& cfg);

// Weights and embeddings ~ N(0, 0.02^2), biases 0, layer-norm gains 1.
// Deterministic in `seed`.
void init_encoder_params(EncoderParams& p, std::uint64_t seed);

// Stable names over every tensor, in a fixed order. Works on parameter and
// gradient structs alike (they share the type).
std::vector<ParamView> param_views(EncoderParams& p);

void set_zero(EncoderParams& p);

// Per-layer caches needed to run the analytic backward pass.
struct LayerActivations {
  Matrix input;                  // T x d, layer input
  Matrix q, k, v;                // T x d
  std::vector<Matrix> attn;      // per head, T x T softmax weights
  Matrix concat;                 // T x d, heads concatenated, input to wo
  Matrix attn_dropout;           // T x d mask
  Matrix ln1_xhat;               // T x d
  Vector ln1_inv_std;            // T
  Matrix x1;                     // T x d, after first layer norm
  Matrix ffn_pre;                // T x ffn, before activation
  Matrix ffn_act;                // T x ffn, after activation
  Matrix ffn_dropout;            // T x d mask
  Matrix ln2_xhat;               // T x d
  Vector ln2_inv_std;            // T
};

struct EncoderActivations {
  std::vector<int> token_ids;
  std::vector<int> attention_mask;
  Matrix embed_dropout;  // T x d mask
  Matrix embedded;       // T x d, input to the first layer
  std::vector<LayerActivations> layers;
  Matrix output;         // T x d
};

// Read-only view of internals for property tests.
struct EncoderTrace {
  std::vector<std::vector<Matrix>> attention;  // [layer][head], T x T
  std::vector<Matrix> ln1_normalized;          // per layer, pre-affine rows
  std::vector<Matrix> ln2_normalized;
};

inline constexpr double kLayerNormEpsilon = 1e-12;
inline constexpr double kAttentionMaskScore = -1e30;

class Encoder {
 public:
  Encoder() = default;
  explicit Encoder(const EncoderConfig& cfg);

  const EncoderConfig& config() const { return cfg_; }
  EncoderParams& params() { return params_; }
  const EncoderParams& params() const { return params_; }
  std::vector<ParamView> param_views() { return cbert::param_views(params_); }

  // Runs the stack over the first token_ids.size() positions. An empty
  // attention_mask means every position is real; zeros mask key positions
  // out of attention (their weights underflow to exactly 0). Dropout fires
  // only in Train mode with a non-null rng. `acts` and `trace` are filled
  // when non-null.
  Matrix forward(const std::vector<int>& token_ids, const std::vector<int>& attention_mask,
                 Mode mode, std::mt19937_64* dropout_rng, EncoderActivations* acts = nullptr,
                 EncoderTrace* trace = nullptr) const;

  // Accumulates parameter gradients into `grads` (same shapes as params) and
  // returns nothing else; d_output rows at masked positions must be zero.
  void backward(const EncoderActivations& acts, const Matrix& d_output,
                EncoderParams& grads) const;

 private:
  EncoderConfig cfg_;
  EncoderParams params_;
};

}  // namespace cbert
