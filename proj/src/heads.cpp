#include "cbert/heads.hpp"

#include <cmath>

#include "cbert/rng.hpp"
#include "cbert/types.hpp"

namespace cbert {

std::string to_string(HeadKind kind) {
  switch (kind) {
    case HeadKind::CBert: return "cbert";
    case HeadKind::EventAware: return "event_aware";
    case HeadKind::MaskedEvent: return "masked_event";
  }
  throw std::invalid_argument("bad head kind");
}

HeadKind head_kind_from_string(std::string_view s) {
  if (s == "cbert") return HeadKind::CBert;
  if (s == "event_aware") return HeadKind::EventAware;
  if (s == "masked_event") return HeadKind::MaskedEvent;
  throw CorpusError("unknown head kind '" + std::string(s) + "'");
}

HeadParams allocate_head_params(HeadKind kind, int hidden_dim) {
  if (hidden_dim < 1) throw std::invalid_argument("hidden_dim must be >= 1");
  const int d = hidden_dim;
  HeadParams p;
  p.w0 = Matrix::Zero(d, d);
  p.b0 = Vector::Zero(d);
  if (kind == HeadKind::CBert) {
    p.w1 = Matrix::Zero(2, d);
    p.b1 = Vector::Zero(2);
  } else {
    p.w1 = Matrix::Zero(d, d);
    p.b1 = Vector::Zero(d);
    p.w2 = Matrix::Zero(d, d);
    p.b2 = Vector::Zero(d);
    p.w3 = Matrix::Zero(2, 3 * d);
    p.b3 = Vector::Zero(2);
  }
  return p;
}

std::vector<ParamView> param_views(HeadParams& p, HeadKind kind) {
  const std::string prefix = "head." + to_string(kind) + ".";
  std::vector<ParamView> views;
  auto add = [&](const char* name, Matrix& m) {
    if (m.size() > 0) views.push_back({prefix + name, m.data(), m.rows(), m.cols()});
  };
  auto add_v = [&](const char* name, Vector& v) {
    if (v.size() > 0) views.push_back({prefix + name, v.data(), v.size(), 1});
  };
  add("w0", p.w0);
  add_v("b0", p.b0);
  add("w1", p.w1);
  add_v("b1", p.b1);
  add("w2", p.w2);
  add_v("b2", p.b2);
  add("w3", p.w3);
  add_v("b3", p.b3);
  return views;
}

void init_head_params(HeadParams& p, std::uint64_t seed) {
  NormalSampler sampler(seed);
  // enumerate with a fixed dummy kind; only shapes matter here
  for (auto& view : param_views(p, HeadKind::CBert)) {
    const bool is_weight = view.name.find(".w") != std::string::npos;
    for (Eigen::Index i = 0; i < view.size(); ++i)
      view.data[i] = is_weight ? sampler.next(0.0, 0.02) : 0.0;
  }
}

void set_zero(HeadParams& p) {
  for (Matrix* m : {&p.w0, &p.w1, &p.w2, &p.w3}) m->setZero();
  for (Vector* v : {&p.b0, &p.b1, &p.b2, &p.b3}) v->setZero();
}

namespace {

Vector dropout_vec(Eigen::Index n, double rate, std::mt19937_64* rng) {
  return dropout_mask(n, 1, rate, rng).col(0);
}

// Mean of tanh over the inclusive row range; also returns the tanh rows.
Vector event_context(const Matrix& hidden, const TokenSpan& span, Matrix* tanh_rows) {
  const Eigen::Index n = span.size();
  Matrix th(n, hidden.cols());
  for (Eigen::Index i = 0; i < n; ++i)
    th.row(i) = hidden.row(span.first + i).array().tanh();
  if (tanh_rows) *tanh_rows = th;
  return th.colwise().sum().transpose() / static_cast<double>(n);
}

void check_span(const TokenSpan& span, Eigen::Index seq_len, const char* name) {
  if (span.first < 0 || span.last < span.first || span.last >= seq_len)
    throw std::invalid_argument(std::string("head forward: bad ") + name + " token range");
}

}  // namespace

Vector head_forward(const HeadParams& p, HeadKind kind, const Matrix& hidden,
                    const TokenSpan& e1, const TokenSpan& e2, double dropout_rate, Mode mode,
                    std::mt19937_64* dropout_rng, HeadActivations* acts) {
  const Eigen::Index t = hidden.rows();
  const Eigen::Index d = hidden.cols();
  check_span(e1, t, "e1");
  check_span(e2, t, "e2");
  if (kind == HeadKind::MaskedEvent && (e1.size() != 1 || e2.size() != 1))
    throw std::invalid_argument(
        "masked-event head requires single-position event token ranges");
  std::mt19937_64* rng = mode == Mode::Train ? dropout_rng : nullptr;

  HeadActivations local;
  HeadActivations& a = acts ? *acts : local;
  a.seq_len = t;
  a.e1 = e1;
  a.e2 = e2;

  a.tanh_h0 = hidden.row(0).array().tanh();
  a.drop_h0 = dropout_vec(d, dropout_rate, rng);
  a.h0p = p.w0 * a.drop_h0.cwiseProduct(a.tanh_h0) + p.b0;

  if (kind == HeadKind::CBert) {
    a.drop_final = dropout_vec(d, dropout_rate, rng);
    a.logits = p.w1 * a.drop_final.cwiseProduct(a.h0p) + p.b1;
  } else {
    a.ctx1 = event_context(hidden, e1, &a.tanh_e1);
    a.ctx2 = event_context(hidden, e2, &a.tanh_e2);
    a.drop_ctx1 = dropout_vec(d, dropout_rate, rng);
    a.drop_ctx2 = dropout_vec(d, dropout_rate, rng);
    a.h1p = p.w1 * a.drop_ctx1.cwiseProduct(a.ctx1) + p.b1;
    a.h2p = p.w2 * a.drop_ctx2.cwiseProduct(a.ctx2) + p.b2;
    a.concat.resize(3 * d);
    a.concat << a.h0p, a.h1p, a.h2p;
    a.drop_final = dropout_vec(3 * d, dropout_rate, rng);
    a.logits = p.w3 * a.drop_final.cwiseProduct(a.concat) + p.b3;
  }
  a.probs = softmax(a.logits);
  if (!a.probs.allFinite()) throw NumericsError("non-finite class probabilities");
  return a.probs;
}

Matrix head_backward(const HeadParams& p, HeadKind kind, const HeadActivations& acts,
                     const Vector& d_logits, HeadParams& grads) {
  const Eigen::Index d = acts.tanh_h0.size();
  Matrix d_hidden = Matrix::Zero(acts.seq_len, d);

  Vector d_h0p;
  if (kind == HeadKind::CBert) {
    grads.w1 += d_logits * acts.drop_final.cwiseProduct(acts.h0p).transpose();
    grads.b1 += d_logits;
    d_h0p = (p.w1.transpose() * d_logits).cwiseProduct(acts.drop_final);
  } else {
    grads.w3 += d_logits * acts.drop_final.cwiseProduct(acts.concat).transpose();
    grads.b3 += d_logits;
    const Vector d_concat = (p.w3.transpose() * d_logits).cwiseProduct(acts.drop_final);
    d_h0p = d_concat.head(d);
    const Vector d_h1p = d_concat.segment(d, d);
    const Vector d_h2p = d_concat.tail(d);

    auto back_event = [&](const Vector& d_hp, const Matrix& w, Matrix& gw, Vector& gb,
                          const Vector& ctx, const Vector& drop, const Matrix& tanh_rows,
                          const TokenSpan& span) {
      gw += d_hp * drop.cwiseProduct(ctx).transpose();
      gb += d_hp;
      const Vector d_ctx = (w.transpose() * d_hp).cwiseProduct(drop);
      const double inv_n = 1.0 / static_cast<double>(span.size());
      for (Eigen::Index i = 0; i < span.size(); ++i) {
        const auto th = tanh_rows.row(i).transpose().array();
        d_hidden.row(span.first + i) +=
            (d_ctx.array() * inv_n * (1.0 - th.square())).matrix().transpose();
      }
    };
    back_event(d_h1p, p.w1, grads.w1, grads.b1, acts.ctx1, acts.drop_ctx1, acts.tanh_e1,
               acts.e1);
    back_event(d_h2p, p.w2, grads.w2, grads.b2, acts.ctx2, acts.drop_ctx2, acts.tanh_e2,
               acts.e2);
  }

  grads.w0 += d_h0p * acts.drop_h0.cwiseProduct(acts.tanh_h0).transpose();
  grads.b0 += d_h0p;
  const Vector d_tanh_h0 = (p.w0.transpose() * d_h0p).cwiseProduct(acts.drop_h0);
  d_hidden.row(0) +=
      (d_tanh_h0.array() * (1.0 - acts.tanh_h0.array().square())).matrix().transpose();
  return d_hidden;
}

}  // namespace cbert
