#include "cbert/encoder.hpp"

#include <cmath>

#include "cbert/rng.hpp"

namespace cbert {

void EncoderConfig::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument("encoder config: " + msg);
  };
  require(layers >= 1, "layers must be >= 1");
  require(attention_heads >= 1, "attention_heads must be >= 1");
  require(hidden_dim >= 1, "hidden_dim must be >= 1");
  require(hidden_dim % attention_heads == 0,
          "hidden_dim must be divisible by attention_heads");
  require(ffn_dim >= 1, "ffn_dim must be >= 1");
  require(max_seq_len >= 2, "max_seq_len must be >= 2");
  require(dropout_rate >= 0.0 && dropout_rate < 1.0, "dropout_rate must be in [0, 1)");
  require(vocab_size >= 1, "vocab_size must be >= 1");
}

EncoderParams allocate_encoder_params(const EncoderConfig& cfg) {
  cfg.validate();
  const int d = cfg.hidden_dim;
  EncoderParams p;
  p.token_embedding = Matrix::Zero(cfg.vocab_size, d);
  p.position_embedding = Matrix::Zero(cfg.max_seq_len, d);
  p.layers.resize(cfg.layers);
  for (auto& layer : p.layers) {
    for (Matrix* w : {&layer.attn.wq, &layer.attn.wk, &layer.attn.wv, &layer.attn.wo})
      *w = Matrix::Zero(d, d);
    for (Vector* b : {&layer.attn.bq, &layer.attn.bk, &layer.attn.bv, &layer.attn.bo})
      *b = Vector::Zero(d);
    layer.ln1.gain = Vector::Zero(d);
    layer.ln1.bias = Vector::Zero(d);
    layer.ffn.w1 = Matrix::Zero(d, cfg.ffn_dim);
    layer.ffn.b1 = Vector::Zero(cfg.ffn_dim);
    layer.ffn.w2 = Matrix::Zero(cfg.ffn_dim, d);
    layer.ffn.b2 = Vector::Zero(d);
    layer.ln2.gain = Vector::Zero(d);
    layer.ln2.bias = Vector::Zero(d);
  }
  return p;
}

std::vector<ParamView> param_views(EncoderParams& p) {
  std::vector<ParamView> views;
  auto add = [&](const std::string& name, Matrix& m) {
    views.push_back({name, m.data(), m.rows(), m.cols()});
  };
  auto add_v = [&](const std::string& name, Vector& v) {
    views.push_back({name, v.data(), v.size(), 1});
  };
  add("embed.token", p.token_embedding);
  add("embed.position", p.position_embedding);
  for (std::size_t i = 0; i < p.layers.size(); ++i) {
    const std::string prefix = "layer." + std::to_string(i) + ".";
    auto& l = p.layers[i];
    add(prefix + "attn.q.w", l.attn.wq);
    add_v(prefix + "attn.q.b", l.attn.bq);
    add(prefix + "attn.k.w", l.attn.wk);
    add_v(prefix + "attn.k.b", l.attn.bk);
    add(prefix + "attn.v.w", l.attn.wv);
    add_v(prefix + "attn.v.b", l.attn.bv);
    add(prefix + "attn.o.w", l.attn.wo);
    add_v(prefix + "attn.o.b", l.attn.bo);
    add_v(prefix + "ln1.gain", l.ln1.gain);
    add_v(prefix + "ln1.bias", l.ln1.bias);
    add(prefix + "ffn.w1", l.ffn.w1);
    add_v(prefix + "ffn.b1", l.ffn.b1);
    add(prefix + "ffn.w2", l.ffn.w2);
    add_v(prefix + "ffn.b2", l.ffn.b2);
    add_v(prefix + "ln2.gain", l.ln2.gain);
    add_v(prefix + "ln2.bias", l.ln2.bias);
  }
  return views;
}

void init_encoder_params(EncoderParams& p, std::uint64_t seed) {
  NormalSampler sampler(seed);
  for (auto& view : param_views(p)) {
    const bool is_gain = view.name.size() >= 4 && view.name.ends_with("gain");
    const bool is_weight = view.name.ends_with(".w") || view.name.ends_with("w1") ||
                           view.name.ends_with("w2") || view.name.rfind("embed.", 0) == 0;
    if (is_weight) {
      for (Eigen::Index i = 0; i < view.size(); ++i) view.data[i] = sampler.next(0.0, 0.02);
    } else if (is_gain) {
      for (Eigen::Index i = 0; i < view.size(); ++i) view.data[i] = 1.0;
    } else {
      for (Eigen::Index i = 0; i < view.size(); ++i) view.data[i] = 0.0;
    }
  }
}

void set_zero(EncoderParams& p) {
  for (auto& view : param_views(p))
    for (Eigen::Index i = 0; i < view.size(); ++i) view.data[i] = 0.0;
}

Encoder::Encoder(const EncoderConfig& cfg) : cfg_(cfg) {
  params_ = allocate_encoder_params(cfg_);
  init_encoder_params(params_, cfg_.seed);
}

namespace {

// y = gain .* xhat + bias, row-wise over T x d; biased variance.
Matrix layer_norm(const Matrix& x, const LayerNormParams& ln, Matrix* xhat_out,
                  Vector* inv_std_out) {
  const Eigen::Index t = x.rows(), d = x.cols();
  Matrix xhat(t, d);
  Vector inv_std(t);
  for (Eigen::Index r = 0; r < t; ++r) {
    const double mean = x.row(r).mean();
    const double var = (x.row(r).array() - mean).square().mean();
    inv_std(r) = 1.0 / std::sqrt(var + kLayerNormEpsilon);
    xhat.row(r) = (x.row(r).array() - mean) * inv_std(r);
  }
  Matrix y(t, d);
  for (Eigen::Index r = 0; r < t; ++r)
    y.row(r) = xhat.row(r).cwiseProduct(ln.gain.transpose()) + ln.bias.transpose();
  if (xhat_out) *xhat_out = xhat;
  if (inv_std_out) *inv_std_out = inv_std;
  return y;
}

// dx for y = gain .* xhat + bias; accumulates dgain/dbias.
Matrix layer_norm_backward(const Matrix& dy, const Matrix& xhat, const Vector& inv_std,
                           LayerNormParams& grads, const LayerNormParams& ln) {
  const Eigen::Index t = dy.rows(), d = dy.cols();
  Matrix dx(t, d);
  for (Eigen::Index r = 0; r < t; ++r) {
    grads.gain += dy.row(r).cwiseProduct(xhat.row(r)).transpose();
    grads.bias += dy.row(r).transpose();
    const Eigen::RowVectorXd w = dy.row(r).cwiseProduct(ln.gain.transpose());
    const double mean_w = w.mean();
    const double mean_wx = w.cwiseProduct(xhat.row(r)).mean();
    dx.row(r) = inv_std(r) * (w.array() - mean_w - xhat.row(r).array() * mean_wx);
  }
  return dx;
}

Matrix affine_rows(const Matrix& x, const Matrix& w, const Vector& b) {
  return (x * w).rowwise() + b.transpose();
}

}  // namespace

Matrix Encoder::forward(const std::vector<int>& token_ids,
                        const std::vector<int>& attention_mask, Mode mode,
                        std::mt19937_64* dropout_rng, EncoderActivations* acts,
                        EncoderTrace* trace) const {
  const auto t = static_cast<Eigen::Index>(token_ids.size());
  if (t < 1) throw std::invalid_argument("encoder forward: empty token sequence");
  if (t > cfg_.max_seq_len)
    throw std::invalid_argument("encoder forward: sequence longer than max_seq_len");
  if (!attention_mask.empty() && attention_mask.size() != token_ids.size())
    throw std::invalid_argument("encoder forward: attention mask length mismatch");
  const int d = cfg_.hidden_dim;
  const int heads = cfg_.attention_heads;
  const int dh = cfg_.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  std::mt19937_64* rng = mode == Mode::Train ? dropout_rng : nullptr;

  Matrix x(t, d);
  for (Eigen::Index r = 0; r < t; ++r) {
    const int id = token_ids[static_cast<std::size_t>(r)];
    if (id < 0 || id >= cfg_.vocab_size)
      throw std::invalid_argument("encoder forward: token id out of range");
    x.row(r) = params_.token_embedding.row(id) + params_.position_embedding.row(r);
  }
  const Matrix embed_drop = dropout_mask(t, d, cfg_.dropout_rate, rng);
  x = x.cwiseProduct(embed_drop);
  if (!x.allFinite()) throw NumericsError("non-finite activations after embedding");

  if (acts) {
    acts->token_ids = token_ids;
    acts->attention_mask = attention_mask;
    acts->embed_dropout = embed_drop;
    acts->embedded = x;
    acts->layers.assign(static_cast<std::size_t>(cfg_.layers), {});
  }
  if (trace) {
    trace->attention.assign(static_cast<std::size_t>(cfg_.layers), {});
    trace->ln1_normalized.assign(static_cast<std::size_t>(cfg_.layers), {});
    trace->ln2_normalized.assign(static_cast<std::size_t>(cfg_.layers), {});
  }

  for (int li = 0; li < cfg_.layers; ++li) {
    const LayerParams& lp = params_.layers[static_cast<std::size_t>(li)];
    LayerActivations* la = acts ? &acts->layers[static_cast<std::size_t>(li)] : nullptr;
    if (la) la->input = x;

    const Matrix q = affine_rows(x, lp.attn.wq, lp.attn.bq);
    const Matrix k = affine_rows(x, lp.attn.wk, lp.attn.bk);
    const Matrix v = affine_rows(x, lp.attn.wv, lp.attn.bv);

    Matrix concat(t, d);
    std::vector<Matrix> head_attn(static_cast<std::size_t>(heads));
    for (int h = 0; h < heads; ++h) {
      const auto qh = q.middleCols(h * dh, dh);
      const auto kh = k.middleCols(h * dh, dh);
      const auto vh = v.middleCols(h * dh, dh);
      Matrix scores = qh * kh.transpose() * scale;
      if (!attention_mask.empty()) {
        for (Eigen::Index j = 0; j < t; ++j)
          if (attention_mask[static_cast<std::size_t>(j)] == 0)
            scores.col(j).setConstant(kAttentionMaskScore);
      }
      softmax_rows(scores);
      concat.middleCols(h * dh, dh) = scores * vh;
      head_attn[static_cast<std::size_t>(h)] = std::move(scores);
    }

    Matrix attn_out = affine_rows(concat, lp.attn.wo, lp.attn.bo);
    const Matrix attn_drop = dropout_mask(t, d, cfg_.dropout_rate, rng);
    attn_out = attn_out.cwiseProduct(attn_drop);

    Matrix ln1_xhat;
    Vector ln1_inv_std;
    const Matrix x1 = layer_norm(x + attn_out, lp.ln1, &ln1_xhat, &ln1_inv_std);

    const Matrix ffn_pre = affine_rows(x1, lp.ffn.w1, lp.ffn.b1);
    const Matrix ffn_act = ffn_pre.unaryExpr([](double v) { return gelu(v); });
    Matrix ffn_out = affine_rows(ffn_act, lp.ffn.w2, lp.ffn.b2);
    const Matrix ffn_drop = dropout_mask(t, d, cfg_.dropout_rate, rng);
    ffn_out = ffn_out.cwiseProduct(ffn_drop);

    Matrix ln2_xhat;
    Vector ln2_inv_std;
    Matrix x2 = layer_norm(x1 + ffn_out, lp.ln2, &ln2_xhat, &ln2_inv_std);

    if (!x2.allFinite())
      throw NumericsError("non-finite activations in encoder layer " + std::to_string(li));

    if (la) {
      la->q = q;
      la->k = k;
      la->v = v;
      la->attn = head_attn;
      la->concat = concat;
      la->attn_dropout = attn_drop;
      la->ln1_xhat = ln1_xhat;
      la->ln1_inv_std = ln1_inv_std;
      la->x1 = x1;
      la->ffn_pre = ffn_pre;
      la->ffn_act = ffn_act;
      la->ffn_dropout = ffn_drop;
      la->ln2_xhat = ln2_xhat;
      la->ln2_inv_std = ln2_inv_std;
    }
    if (trace) {
      trace->attention[static_cast<std::size_t>(li)] = head_attn;
      trace->ln1_normalized[static_cast<std::size_t>(li)] = ln1_xhat;
      trace->ln2_normalized[static_cast<std::size_t>(li)] = ln2_xhat;
    }
    x = std::move(x2);
  }

  if (acts) acts->output = x;
  return x;
}

void Encoder::backward(const EncoderActivations& acts, const Matrix& d_output,
                       EncoderParams& grads) const {
  const auto t = static_cast<Eigen::Index>(acts.token_ids.size());
  const int d = cfg_.hidden_dim;
  const int heads = cfg_.attention_heads;
  const int dh = cfg_.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  if (d_output.rows() != t || d_output.cols() != d)
    throw std::invalid_argument("encoder backward: d_output shape mismatch");

  Matrix dx = d_output;
  for (int li = cfg_.layers - 1; li >= 0; --li) {
    const LayerParams& lp = params_.layers[static_cast<std::size_t>(li)];
    LayerParams& lg = grads.layers[static_cast<std::size_t>(li)];
    const LayerActivations& la = acts.layers[static_cast<std::size_t>(li)];

    // x2 = LN2(x1 + ffn_out)
    const Matrix d_r2 = layer_norm_backward(dx, la.ln2_xhat, la.ln2_inv_std, lg.ln2, lp.ln2);
    Matrix d_x1 = d_r2;
    const Matrix d_ffn_out = d_r2.cwiseProduct(la.ffn_dropout);

    // ffn_out = gelu(x1*w1 + b1)*w2 + b2
    lg.ffn.w2 += la.ffn_act.transpose() * d_ffn_out;
    lg.ffn.b2 += d_ffn_out.colwise().sum().transpose();
    const Matrix d_act = d_ffn_out * lp.ffn.w2.transpose();
    const Matrix d_pre =
        d_act.cwiseProduct(la.ffn_pre.unaryExpr([](double v) { return gelu_derivative(v); }));
    lg.ffn.w1 += la.x1.transpose() * d_pre;
    lg.ffn.b1 += d_pre.colwise().sum().transpose();
    d_x1 += d_pre * lp.ffn.w1.transpose();

    // x1 = LN1(x + attn_out)
    const Matrix d_r1 =
        layer_norm_backward(d_x1, la.ln1_xhat, la.ln1_inv_std, lg.ln1, lp.ln1);
    Matrix d_x = d_r1;
    const Matrix d_attn_out = d_r1.cwiseProduct(la.attn_dropout);

    // attn_out = concat * wo + bo
    lg.attn.wo += la.concat.transpose() * d_attn_out;
    lg.attn.bo += d_attn_out.colwise().sum().transpose();
    const Matrix d_concat = d_attn_out * lp.attn.wo.transpose();

    Matrix d_q = Matrix::Zero(t, d), d_k = Matrix::Zero(t, d), d_v = Matrix::Zero(t, d);
    for (int h = 0; h < heads; ++h) {
      const auto qh = la.q.middleCols(h * dh, dh);
      const auto kh = la.k.middleCols(h * dh, dh);
      const auto vh = la.v.middleCols(h * dh, dh);
      const Matrix& a = la.attn[static_cast<std::size_t>(h)];
      const auto d_oh = d_concat.middleCols(h * dh, dh);

      const Matrix d_a = d_oh * vh.transpose();
      d_v.middleCols(h * dh, dh) = a.transpose() * d_oh;

      Matrix d_scores(t, t);
      for (Eigen::Index r = 0; r < t; ++r) {
        const double dot = d_a.row(r).dot(a.row(r));
        d_scores.row(r) = (a.row(r).array() * (d_a.row(r).array() - dot)).matrix();
      }
      d_q.middleCols(h * dh, dh) = d_scores * kh * scale;
      d_k.middleCols(h * dh, dh) = d_scores.transpose() * qh * scale;
    }

    lg.attn.wq += la.input.transpose() * d_q;
    lg.attn.bq += d_q.colwise().sum().transpose();
    lg.attn.wk += la.input.transpose() * d_k;
    lg.attn.bk += d_k.colwise().sum().transpose();
    lg.attn.wv += la.input.transpose() * d_v;
    lg.attn.bv += d_v.colwise().sum().transpose();
    d_x += d_q * lp.attn.wq.transpose() + d_k * lp.attn.wk.transpose() +
           d_v * lp.attn.wv.transpose();

    dx = std::move(d_x);
  }

  const Matrix d_embed = dx.cwiseProduct(acts.embed_dropout);
  for (Eigen::Index r = 0; r < t; ++r) {
    grads.token_embedding.row(acts.token_ids[static_cast<std::size_t>(r)]) += d_embed.row(r);
    grads.position_embedding.row(r) += d_embed.row(r);
  }
}

}  // namespace cbert
