#include "support.hpp"

#include <cmath>

#include "cbert/rng.hpp"

namespace testsupport {

using namespace cbert;

TinyCorpus make_tiny_corpus(int train_per_class, int test_per_class, std::uint64_t seed,
                            int max_seq_len, SyntheticFamily family) {
  TinyCorpus out;
  out.sentences = generate_synthetic(train_per_class, mix_seed(seed, 101), family,
                                     Split::Train);
  auto test = generate_synthetic(test_per_class, mix_seed(seed, 202), family, Split::Test);
  out.sentences.insert(out.sentences.end(), test.begin(), test.end());

  std::vector<MarkedSentence> train_only;
  for (const auto& s : out.sentences)
    if (s.split == Split::Train) train_only.push_back(s);
  out.vocab = build_vocab(train_only);
  out.bundle = encode_dataset("tiny", out.sentences, out.vocab, max_seq_len);
  return out;
}

EncoderConfig small_encoder_config(int vocab_size, int max_seq_len) {
  EncoderConfig cfg;
  cfg.layers = 1;
  cfg.attention_heads = 2;
  cfg.hidden_dim = 8;
  cfg.ffn_dim = 16;
  cfg.max_seq_len = max_seq_len;
  cfg.dropout_rate = 0.0;
  cfg.vocab_size = vocab_size;
  cfg.seed = 0;
  return cfg;
}

GradCheckResult grad_check_model(Model& model, const ExampleRecord& record, double step,
                                 double rel_tolerance) {
  ModelGrads grads = allocate_grads(model);
  loss_and_grads(model, record, 1.0, nullptr, grads);

  auto loss_now = [&] {
    const Vector probs = model_forward(model, record, Mode::Train, nullptr);
    return binary_loss(probs, record.label);
  };

  GradCheckResult result;
  const auto params = model.param_views();
  const auto grad_views = param_views(grads, model.head_kind);
  for (std::size_t k = 0; k < params.size(); ++k) {
    const ParamView& p = params[k];
    const ParamView& g = grad_views[k];
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const double saved = p.data[i];
      auto central = [&](double h) {
        p.data[i] = saved + h;
        const double up = loss_now();
        p.data[i] = saved - h;
        const double down = loss_now();
        p.data[i] = saved;
        return (up - down) / (2.0 * h);
      };

      // one Richardson step cancels the h^2 truncation term, which otherwise
      // dominates at high-curvature coordinates
      const double numeric = (4.0 * central(step / 2.0) - central(step)) / 3.0;
      const double analytic = g.data[i];
      const double scale = std::max(std::abs(analytic), std::abs(numeric));
      ++result.entries_checked;

      double rel;
      bool ok;
      if (scale > 1e-7) {
        rel = std::abs(analytic - numeric) / scale;
        ok = rel < rel_tolerance;
      } else {
        rel = 0.0;
        ok = std::abs(analytic - numeric) < 1e-10;
      }
      if (!ok) ++result.entries_failed;
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_param = p.name + "[" + std::to_string(i) + "]";
        result.analytic_at_worst = analytic;
        result.numeric_at_worst = numeric;
      }
    }
  }
  return result;
}

}  // namespace testsupport
