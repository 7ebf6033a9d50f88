#include "cbert/model.hpp"

#include <algorithm>
#include <cmath>

#include "cbert/rng.hpp"
#include "cbert/types.hpp"

namespace cbert {

std::vector<ParamView> Model::param_views() {
  auto views = encoder.param_views();
  auto head_views = cbert::param_views(head, head_kind);
  views.insert(views.end(), head_views.begin(), head_views.end());
  return views;
}

Model make_model(EncoderConfig cfg, HeadKind kind, Vocab vocab, std::uint64_t seed) {
  if (vocab.size() != cfg.vocab_size && cfg.vocab_size != 0)
    throw std::invalid_argument("encoder config vocab_size disagrees with the vocabulary");
  cfg.vocab_size = vocab.size();
  cfg.seed = mix_seed(seed, 1);
  Model m;
  m.encoder = Encoder(cfg);
  m.head_kind = kind;
  m.head = allocate_head_params(kind, cfg.hidden_dim);
  init_head_params(m.head, mix_seed(seed, 2));
  m.vocab = std::move(vocab);
  return m;
}

ModelGrads allocate_grads(const Model& model) {
  ModelGrads g;
  g.encoder = allocate_encoder_params(model.encoder.config());
  g.head = allocate_head_params(model.head_kind, model.encoder.config().hidden_dim);
  return g;
}

void set_zero(ModelGrads& grads) {
  set_zero(grads.encoder);
  set_zero(grads.head);
}

std::vector<ParamView> param_views(ModelGrads& grads, HeadKind kind) {
  auto views = param_views(grads.encoder);
  auto head_views = param_views(grads.head, kind);
  views.insert(views.end(), head_views.begin(), head_views.end());
  return views;
}

namespace {

int real_length(const ExampleRecord& record) {
  int real = 0;
  for (std::size_t i = 0; i < record.attention_mask.size(); ++i) {
    if (record.attention_mask[i] == 1) {
      if (static_cast<int>(i) != real)
        throw CorpusError("attention mask is not a prefix of ones");
      ++real;
    }
  }
  if (real < 1) throw CorpusError("record has no real tokens");
  return real;
}

}  // namespace

Vector model_forward(const Model& model, const ExampleRecord& record, Mode mode,
                     std::mt19937_64* dropout_rng, ModelActivations* acts,
                     EncoderTrace* trace) {
  if (model.head_kind == HeadKind::MaskedEvent && record.variant != Variant::Masked)
    throw CorpusError("masked-event head requires masked-variant records (sentence '" +
                      record.sentence_id + "')");
  const int real = real_length(record);
  if (record.e1_range.last >= real || record.e2_range.last >= real)
    throw CorpusError("event token range extends past the real tokens");

  const std::vector<int> ids(record.token_ids.begin(), record.token_ids.begin() + real);
  ModelActivations local;
  ModelActivations& a = acts ? *acts : local;
  const Matrix hidden =
      model.encoder.forward(ids, {}, mode, dropout_rng, &a.encoder, trace);
  return head_forward(model.head, model.head_kind, hidden, record.e1_range, record.e2_range,
                      model.encoder.config().dropout_rate, mode, dropout_rng, &a.head);
}

double binary_loss(const Vector& probs, Label label, long* clamp_count) {
  double p_true = probs(class_index(label));
  if (p_true < kProbabilityFloor) {
    p_true = kProbabilityFloor;
    if (clamp_count) ++*clamp_count;
  }
  return -std::log(p_true);
}

double loss_and_grads(Model& model, const ExampleRecord& record, double grad_scale,
                      std::mt19937_64* dropout_rng, ModelGrads& grads, long* clamp_count) {
  ModelActivations acts;
  const Vector probs = model_forward(model, record, Mode::Train, dropout_rng, &acts);
  const double loss = binary_loss(probs, record.label, clamp_count);

  Vector d_logits = probs;
  d_logits(class_index(record.label)) -= 1.0;
  d_logits *= grad_scale;

  const Matrix d_hidden =
      head_backward(model.head, model.head_kind, acts.head, d_logits, grads.head);
  model.encoder.backward(acts.encoder, d_hidden, grads.encoder);
  return loss;
}

}  // namespace cbert
