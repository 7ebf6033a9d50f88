// Acceptance runner: executes the numbered release criteria and prints one
// [PASS]/[FAIL] line per criterion. Criterion numbers may be passed as
// arguments to run a subset; the default is all of them. Exits 0 only when
// every requested criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "cbert/checkpoint.hpp"
#include "cbert/corpus.hpp"
#include "cbert/evaluation.hpp"
#include "cbert/model.hpp"
#include "cbert/training.hpp"
#include "fixtures.hpp"
#include "support.hpp"

using namespace cbert;
using testsupport::make_tiny_corpus;
using testsupport::small_encoder_config;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

// Records the first failed expectation; later ones are ignored.
struct Checker {
  bool ok = true;
  std::string detail;
  void expect(bool cond, const std::string& msg) {
    if (ok && !cond) {
      ok = false;
      detail = msg;
    }
  }
};

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct ClassCounts {
  long total = 0, cause_effect = 0, other = 0;
};

ClassCounts count_records(const std::vector<MarkedSentence>& records, Split split) {
  ClassCounts c;
  for (const auto& r : records) {
    if (r.split != split) continue;
    ++c.total;
    if (r.label == Label::CauseEffect)
      ++c.cause_effect;
    else
      ++c.other;
  }
  return c;
}

ClassCounts count_all(const std::vector<MarkedSentence>& records) {
  ClassCounts c;
  for (const auto& r : records) {
    ++c.total;
    if (r.label == Label::CauseEffect)
      ++c.cause_effect;
    else
      ++c.other;
  }
  return c;
}

bool within_percent(long got, long want, double percent) {
  return std::abs(got - want) <=
         static_cast<long>(std::ceil(std::abs(want) * percent / 100.0));
}

double uniform_pm(std::mt19937_64& rng) {
  return ((rng() >> 11) * (1.0 / 9007199254740992.0)) - 0.5;
}

void fill_random(Matrix& m, std::mt19937_64& rng) {
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = uniform_pm(rng);
}

void fill_random(Vector& v, std::mt19937_64& rng) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = uniform_pm(rng);
}

// ---------------------------------------------------------------------------
// criterion 1: corpus curation at the released scale

Outcome criterion_curation() {
  const auto t0 = std::chrono::steady_clock::now();
  Checker c;
  const auto dir = fixtures::scratch_dir("accept-curation");

  fixtures::write_semeval2010(dir / "sem2010-train.txt", dir / "sem2010-test.txt", 1);
  std::vector<MarkedSentence> train10, test10;
  {
    std::ifstream in(dir / "sem2010-train.txt");
    train10 = parse_semeval2010(in, Split::Train);
  }
  {
    std::ifstream in(dir / "sem2010-test.txt");
    test10 = parse_semeval2010(in, Split::Test);
  }
  const ClassCounts c10train = count_all(train10);
  const ClassCounts c10test = count_all(test10);
  c.expect(c10train.total == 8000,
           fmt("semeval2010 train total %ld != 8000", c10train.total));
  c.expect(c10train.cause_effect == 1003,
           fmt("semeval2010 train cause-effect %ld != 1003", c10train.cause_effect));
  c.expect(c10train.other == 6997,
           fmt("semeval2010 train other %ld != 6997", c10train.other));
  c.expect(c10test.total == 2717, fmt("semeval2010 test total %ld != 2717", c10test.total));
  c.expect(c10test.cause_effect == 134,
           fmt("semeval2010 test cause-effect %ld != 134", c10test.cause_effect));
  c.expect(c10test.cause_effect + c10test.other == c10test.total,
           "semeval2010 test counts are not internally consistent");
  const CorpusStats stats10 = corpus_stats(test10);
  bool has_note = false;
  for (const auto& n : stats10.notes)
    has_note |= n.find("internally inconsistent") != std::string::npos &&
                n.find("134 + 2389") != std::string::npos;
  c.expect(has_note, "stats do not flag the published test-split count discrepancy");

  fixtures::write_semeval2007(dir / "sem2007-train", dir / "sem2007-test", 2);
  const auto train07 = parse_semeval2007(dir / "sem2007-train", Split::Train);
  const auto test07 = parse_semeval2007(dir / "sem2007-test", Split::Test);
  const ClassCounts c07train = count_all(train07);
  const ClassCounts c07test = count_all(test07);
  c.expect(c07train.total == 980, fmt("semeval2007 train total %ld != 980", c07train.total));
  c.expect(c07train.cause_effect == 80,
           fmt("semeval2007 train cause-effect %ld != 80", c07train.cause_effect));
  c.expect(c07train.other == 900, fmt("semeval2007 train other %ld != 900", c07train.other));
  c.expect(c07test.total == 549, fmt("semeval2007 test total %ld != 549", c07test.total));
  c.expect(c07test.cause_effect == 46,
           fmt("semeval2007 test cause-effect %ld != 46", c07test.cause_effect));
  c.expect(c07test.other == 503, fmt("semeval2007 test other %ld != 503", c07test.other));

  const auto plan = fixtures::write_ade(dir / "ade-pos.rel", dir / "ade-neg.txt", 3);
  AdeParseResult ade;
  {
    std::ifstream pos(dir / "ade-pos.rel");
    std::ifstream neg(dir / "ade-neg.txt");
    ade = parse_ade(pos, neg);
  }
  const auto& rep = ade.report;
  c.expect(rep.positive_lines == plan.positive_lines,
           fmt("drug-effect relation lines %ld != %ld", rep.positive_lines,
               plan.positive_lines));
  c.expect(rep.positives_skipped == plan.positives_unresolvable,
           fmt("skipped positives %ld != %ld", rep.positives_skipped,
               plan.positives_unresolvable));
  c.expect(rep.offset_fallbacks ==
               plan.positives_with_stale_offsets + plan.positives_unresolvable,
           fmt("offset fallbacks %ld != %ld", rep.offset_fallbacks,
               plan.positives_with_stale_offsets + plan.positives_unresolvable));
  c.expect(rep.negative_lines == plan.negative_lines,
           fmt("negative lines %ld != %ld", rep.negative_lines, plan.negative_lines));
  c.expect(rep.negatives_annotated == plan.negatives_annotatable,
           fmt("annotated negatives %ld != %ld", rep.negatives_annotated,
               plan.negatives_annotatable));
  c.expect(rep.negatives_excluded == plan.negatives_excluded,
           fmt("excluded negatives %ld != %ld", rep.negatives_excluded,
               plan.negatives_excluded));
  c.expect(static_cast<int>(ade.lexicon.drugs.size()) == plan.drug_names,
           fmt("drug lexicon %zu != %d", ade.lexicon.drugs.size(), plan.drug_names));
  c.expect(static_cast<int>(ade.lexicon.effects.size()) == plan.effect_names,
           fmt("effect lexicon %zu != %d", ade.lexicon.effects.size(), plan.effect_names));

  const ClassCounts ade_train = count_records(ade.records, Split::Train);
  const ClassCounts ade_test = count_records(ade.records, Split::Test);
  c.expect(ade_train.total == 8947, fmt("drug-effect train total %ld != 8947", ade_train.total));
  c.expect(ade_test.total == 2276, fmt("drug-effect test total %ld != 2276", ade_test.total));
  c.expect(within_percent(ade_train.cause_effect, 5379, 1.0),
           fmt("drug-effect train cause-effect %ld outside 1%% of 5379",
               ade_train.cause_effect));
  c.expect(within_percent(ade_train.other, 3568, 1.0),
           fmt("drug-effect train other %ld outside 1%% of 3568", ade_train.other));
  c.expect(within_percent(ade_test.cause_effect, 1341, 1.0),
           fmt("drug-effect test cause-effect %ld outside 1%% of 1341",
               ade_test.cause_effect));
  c.expect(within_percent(ade_test.other, 935, 1.0),
           fmt("drug-effect test other %ld outside 1%% of 935", ade_test.other));

  std::filesystem::remove_all(dir);
  const double secs = seconds_since(t0);
  c.expect(secs < 60.0, fmt("curation took %.1fs, budget is 60s", secs));
  if (c.ok)
    c.detail = fmt("8000/1003 + 2717/134, 980/80 + 549/46, 8947 + 2276 records in %.1fs", secs);
  return {c.ok, c.detail};
}

// ---------------------------------------------------------------------------
// criterion 2: reference-scale accuracy is out of desk-scale reach; the
// import hook and the report-only grid stand in for it

Outcome criterion_scale_hooks() {
  Checker c;
  auto corpus = make_tiny_corpus(5, 3, 112, 24);
  const EncoderConfig enc_cfg = small_encoder_config(corpus.vocab.size(), 24);
  const auto dir = fixtures::scratch_dir("accept-import");

  Model source = make_model(enc_cfg, HeadKind::MaskedEvent, corpus.vocab, 31);
  save_checkpoint(source, {}, dir / "external.ckpt");
  Model target = make_model(enc_cfg, HeadKind::EventAware, corpus.vocab, 77);
  import_encoder_params(target, dir / "external.ckpt");
  auto a = param_views(source.encoder.params());
  auto b = param_views(target.encoder.params());
  c.expect(a.size() == b.size(), "encoder parameter sets differ in layout");
  bool equal = a.size() == b.size();
  for (std::size_t i = 0; equal && i < a.size(); ++i)
    for (Eigen::Index k = 0; equal && k < a[i].size(); ++k)
      equal = a[i].data[k] == b[i].data[k];
  c.expect(equal, "imported encoder tensors do not match their source");
  std::filesystem::remove_all(dir);

  auto fam_a = make_tiny_corpus(4, 2, 113, 24, SyntheticFamily::A);
  auto fam_b = make_tiny_corpus(4, 2, 114, 24, SyntheticFamily::B);
  std::vector<MarkedSentence> train_union;
  for (const auto& s : fam_a.sentences)
    if (s.split == Split::Train) train_union.push_back(s);
  for (const auto& s : fam_b.sentences)
    if (s.split == Split::Train) train_union.push_back(s);
  const Vocab vocab = build_vocab(train_union);

  GridConfig gcfg;
  gcfg.encoder = small_encoder_config(vocab.size(), 24);
  TrainConfig base;
  base.learning_rate = 1e-3;
  base.dropout_rate = 0.0;
  base.batch_size = 4;
  base.max_seq_len = 24;
  base.epochs = 1;
  base.seed = 9;
  gcfg.pretrain = base;
  gcfg.pretrain.head_kind = HeadKind::MaskedEvent;
  gcfg.finetune = base;
  gcfg.end_to_end = base;
  const GridResult grid =
      run_grid({encode_dataset("fam-a", fam_a.sentences, vocab, 24),
                encode_dataset("fam-b", fam_b.sentences, vocab, 24)},
               vocab, gcfg);
  long ok_cells = 0, cells = 0;
  for (const auto* rows : {&grid.cbert_cells, &grid.event_aware_cells, &grid.transfer_cells})
    for (const auto& cell : *rows) {
      ++cells;
      ok_cells += cell.ok ? 1 : 0;
    }
  c.expect(ok_cells == cells, fmt("%ld of %ld grid cells failed", cells - ok_cells, cells));
  auto parsed = nlohmann::json::parse(grid_json_string(grid), nullptr, false);
  c.expect(!parsed.is_discarded(), "grid json does not parse");

  if (c.ok)
    c.detail = fmt("encoder import verified, %ld/%ld grid cells completed report-only",
                   ok_cells, cells);
  return {c.ok, c.detail};
}

// ---------------------------------------------------------------------------
// criterion 3: composed analytic gradients vs finite differences

Outcome criterion_gradients() {
  const auto t0 = std::chrono::steady_clock::now();
  Checker c;
  auto corpus = make_tiny_corpus(3, 1, 7, 24);
  double worst = 0.0;
  std::string worst_param;
  for (const HeadKind kind :
       {HeadKind::CBert, HeadKind::EventAware, HeadKind::MaskedEvent}) {
    Model model = make_model(small_encoder_config(corpus.vocab.size(), 24), kind,
                             corpus.vocab, 3);
    const ExampleRecord& rec = kind == HeadKind::MaskedEvent
                                   ? corpus.bundle.train_masked.front()
                                   : corpus.bundle.train_marked.front();
    const auto res = testsupport::grad_check_model(model, rec);
    c.expect(res.entries_checked > 1000,
             fmt("%s: only %ld entries checked", to_string(kind).c_str(),
                 res.entries_checked));
    c.expect(res.entries_failed == 0,
             fmt("%s: %ld entries beyond tolerance, worst %s rel %.3e",
                 to_string(kind).c_str(), res.entries_failed, res.worst_param.c_str(),
                 res.max_rel_error));
    c.expect(res.max_rel_error < 1e-4,
             fmt("%s: max relative error %.3e >= 1e-4 at %s", to_string(kind).c_str(),
                 res.max_rel_error, res.worst_param.c_str()));
    if (res.max_rel_error > worst) {
      worst = res.max_rel_error;
      worst_param = res.worst_param;
    }
  }
  const double secs = seconds_since(t0);
  c.expect(secs < 60.0, fmt("gradient check took %.1fs, budget is 60s", secs));
  if (c.ok)
    c.detail = fmt("max relative error %.2e (%s) across 3 head variants in %.1fs", worst,
                   worst_param.c_str(), secs);
  return {c.ok, c.detail};
}

// ---------------------------------------------------------------------------
// criterion 4: masked and event-aware heads agree bit for bit on
// single-token events

Outcome criterion_head_equivalence() {
  Checker c;
  std::mt19937_64 rng(4242);
  const int d = 16;
  const int t = 10;
  long draws = 0;
  for (int i = 0; i < 1000 && c.ok; ++i) {
    HeadParams p = allocate_head_params(HeadKind::EventAware, d);
    fill_random(p.w0, rng);
    fill_random(p.w1, rng);
    fill_random(p.w2, rng);
    fill_random(p.w3, rng);
    fill_random(p.b0, rng);
    fill_random(p.b1, rng);
    fill_random(p.b2, rng);
    fill_random(p.b3, rng);
    Matrix hidden(t, d);
    fill_random(hidden, rng);
    const int i1 = 1 + static_cast<int>(rng() % (t - 1));
    int i2 = 1 + static_cast<int>(rng() % (t - 1));
    if (i2 == i1) i2 = (i2 % (t - 1)) + 1;
    const TokenSpan e1{i1, i1};
    const TokenSpan e2{i2, i2};
    const Vector pa =
        head_forward(p, HeadKind::EventAware, hidden, e1, e2, 0.0, Mode::Eval, nullptr);
    const Vector pb =
        head_forward(p, HeadKind::MaskedEvent, hidden, e1, e2, 0.0, Mode::Eval, nullptr);
    c.expect(pa(0) == pb(0) && pa(1) == pb(1),
             fmt("draw %d: probabilities diverge by %.3e", i,
                 std::max(std::abs(pa(0) - pb(0)), std::abs(pa(1) - pb(1)))));
    ++draws;
  }
  if (c.ok) c.detail = fmt("%ld random draws identical", draws);
  return {c.ok, c.detail};
}

// ---------------------------------------------------------------------------
// criterion 5: transfer exactness and the pretraining advantage

Outcome criterion_transfer() {
  Checker c;
  auto corpus = make_tiny_corpus(16, 8, 55, 24);
  const EncoderConfig enc_cfg = small_encoder_config(corpus.vocab.size(), 24);

  TrainConfig pre_cfg;
  pre_cfg.learning_rate = 3e-3;
  pre_cfg.dropout_rate = 0.0;
  pre_cfg.batch_size = 8;
  pre_cfg.max_seq_len = 24;
  pre_cfg.epochs = 25;
  pre_cfg.head_kind = HeadKind::MaskedEvent;

  TrainConfig fin_cfg = pre_cfg;
  fin_cfg.head_kind = HeadKind::EventAware;
  fin_cfg.epochs = 1;

  // exactness on one pretraining run
  {
    TrainConfig cfg = pre_cfg;
    cfg.seed = 1000;
    const Checkpoint ckpt = pretrain_masked(corpus.bundle, corpus.vocab, enc_cfg, cfg);
    Model moved = transfer(ckpt);
    Model source = ckpt.model;
    bool equal = true;
    for (const auto& rec : corpus.bundle.test_masked) {
      const Vector a = predict_probs(source, rec);
      const Vector b = predict_probs(moved, rec);
      equal = equal && a(0) == b(0) && a(1) == b(1);
    }
    c.expect(equal, "transferred model drifts from its checkpoint on masked records");
  }

  // fine-tuning from the transferred encoder beats a fresh start
  int wins = 0;
  const int trials = 10;
  for (int s = 0; s < trials; ++s) {
    TrainConfig pcfg = pre_cfg;
    pcfg.seed = 1000 + static_cast<std::uint64_t>(s);
    const Checkpoint ckpt = pretrain_masked(corpus.bundle, corpus.vocab, enc_cfg, pcfg);
    Model warm = transfer(ckpt);
    Model cold = make_model(warm.encoder.config(), HeadKind::EventAware, corpus.vocab,
                            3000 + static_cast<std::uint64_t>(s));
    TrainConfig fcfg = fin_cfg;
    fcfg.seed = 2000 + static_cast<std::uint64_t>(s);
    const TrainResult warm_run = train(warm, corpus.bundle.train_marked, fcfg);
    const TrainResult cold_run = train(cold, corpus.bundle.train_marked, fcfg);
    if (warm_run.epoch_mean_losses.front() < cold_run.epoch_mean_losses.front()) ++wins;
  }
  c.expect(wins >= 9, fmt("pretraining lowered the first-epoch loss in only %d/%d trials",
                          wins, trials));
  if (c.ok) c.detail = fmt("outputs exact, first-epoch advantage in %d/%d trials", wins, trials);
  return {c.ok, c.detail};
}

// ---------------------------------------------------------------------------
// criterion 6: the trainer drives a small model into a 16-record corpus

Outcome criterion_overfit() {
  const auto t0 = std::chrono::steady_clock::now();
  Checker c;
  const auto sentences = generate_synthetic(8, 0xC6);
  const Vocab vocab = build_vocab(sentences);
  const DatasetBundle bundle = encode_dataset("overfit", sentences, vocab, 32);
  c.expect(bundle.train_marked.size() == 16,
           fmt("expected 16 train records, got %zu", bundle.train_marked.size()));

  EncoderConfig enc_cfg;
  enc_cfg.layers = 2;
  enc_cfg.attention_heads = 4;
  enc_cfg.hidden_dim = 64;
  enc_cfg.ffn_dim = 128;
  enc_cfg.max_seq_len = 32;
  enc_cfg.dropout_rate = 0.0;
  enc_cfg.vocab_size = vocab.size();

  Model model = make_model(enc_cfg, HeadKind::EventAware, vocab, 6);
  TrainConfig cfg;
  cfg.learning_rate = 1e-3;
  cfg.dropout_rate = 0.0;
  cfg.batch_size = 16;
  cfg.max_seq_len = 32;
  cfg.epochs = 500;  // full-batch, so one step per epoch
  cfg.seed = 66;
  const TrainResult run = train(model, bundle.train_marked, cfg);

  long hit_step = -1;
  double hit_loss = 0.0;
  for (std::size_t i = 0; i < run.step_losses.size(); ++i) {
    if (run.step_losses[i] < 0.05) {
      hit_step = static_cast<long>(i) + 1;
      hit_loss = run.step_losses[i];
      break;
    }
  }
  const double final_loss = run.step_losses.back();
  c.expect(hit_step > 0 && hit_step <= 500,
           fmt("loss never fell below 0.05 in %ld steps (final %.4f)", run.steps,
               final_loss));
  const double secs = seconds_since(t0);
  c.expect(secs < 120.0, fmt("overfit run took %.1fs, budget is 120s", secs));
  if (c.ok)
    c.detail = fmt("loss %.4f at step %ld, final %.4f, %.1fs", hit_loss, hit_step,
                   final_loss, secs);
  return {c.ok, c.detail};
}

// ---------------------------------------------------------------------------
// criterion 7: trained models separate a synthetic causality corpus

Outcome criterion_separation() {
  const auto t0 = std::chrono::steady_clock::now();
  Checker c;
  auto sentences = generate_synthetic(200, 0xC7, SyntheticFamily::A, Split::Train);
  const auto test = generate_synthetic(100, 0xC8, SyntheticFamily::A, Split::Test);
  const Vocab vocab = build_vocab(sentences);
  sentences.insert(sentences.end(), test.begin(), test.end());
  const DatasetBundle bundle = encode_dataset("separation", sentences, vocab, 32);
  c.expect(bundle.train_marked.size() == 400,
           fmt("expected 400 train records, got %zu", bundle.train_marked.size()));
  c.expect(bundle.test_marked.size() == 200,
           fmt("expected 200 test records, got %zu", bundle.test_marked.size()));

  EncoderConfig enc_cfg;
  enc_cfg.layers = 2;
  enc_cfg.attention_heads = 4;
  enc_cfg.hidden_dim = 64;
  enc_cfg.ffn_dim = 128;
  enc_cfg.max_seq_len = 32;
  enc_cfg.dropout_rate = 0.1;
  enc_cfg.vocab_size = vocab.size();

  TrainConfig cfg;
  cfg.learning_rate = 1e-3;
  cfg.dropout_rate = 0.1;
  cfg.batch_size = 16;
  cfg.max_seq_len = 32;
  cfg.epochs = 4;
  cfg.seed = 77;

  Model event_model = make_model(enc_cfg, HeadKind::EventAware, vocab, 70);
  cfg.head_kind = HeadKind::EventAware;
  train(event_model, bundle.train_marked, cfg);
  const MetricsReport event_rep = evaluate(event_model, bundle.test_marked);

  Model cbert_model = make_model(enc_cfg, HeadKind::CBert, vocab, 71);
  cfg.head_kind = HeadKind::CBert;
  train(cbert_model, bundle.train_marked, cfg);
  const MetricsReport cbert_rep = evaluate(cbert_model, bundle.test_marked);

  c.expect(event_rep.f1_positive >= 0.95,
           fmt("event-aware F1 %.4f < 0.95", event_rep.f1_positive));
  c.expect(cbert_rep.f1_positive >= 0.90,
           fmt("sentence-level F1 %.4f < 0.90", cbert_rep.f1_positive));
  const double secs = seconds_since(t0);
  c.expect(secs < 300.0, fmt("separation run took %.1fs, budget is 300s", secs));
  if (c.ok)
    c.detail = fmt("event-aware F1 %.4f, sentence-level F1 %.4f in %.1fs",
                   event_rep.f1_positive, cbert_rep.f1_positive, secs);
  return {c.ok, c.detail};
}

// ---------------------------------------------------------------------------
// criterion 8: numeric invariants and evaluation determinism

Outcome criterion_invariants() {
  const auto t0 = std::chrono::steady_clock::now();
  Checker c;

  // softmax: normalized, nonnegative, shift invariant, stable at extremes
  std::mt19937_64 rng(88);
  double worst_sum = 0.0, worst_shift = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int dim = 2 + static_cast<int>(rng() % 15);
    Vector z(dim);
    const double scale = std::pow(10.0, static_cast<double>(i % 5));
    for (int k = 0; k < dim; ++k) z(k) = uniform_pm(rng) * scale;
    if (i == 0) {
      z(0) = 1e4;
      z(1) = -1e4;
    }
    const Vector p = softmax(z);
    worst_sum = std::max(worst_sum, std::abs(p.sum() - 1.0));
    for (int k = 0; k < dim; ++k)
      c.expect(p(k) >= 0.0 && std::isfinite(p(k)), fmt("softmax draw %d not finite", i));
    const Vector zs = (z.array() + 3.25).matrix();
    const Vector shifted = softmax(zs);
    worst_shift = std::max(worst_shift, (p - shifted).cwiseAbs().maxCoeff());
  }
  c.expect(worst_sum <= 1e-12, fmt("softmax sums drift to 1 by %.3e > 1e-12", worst_sum));
  c.expect(worst_shift <= 1e-12,
           fmt("softmax shift invariance off by %.3e > 1e-12", worst_shift));

  // attention rows normalize and masked keys get exactly zero weight
  auto corpus = make_tiny_corpus(3, 2, 888, 24);
  EncoderConfig enc_cfg = small_encoder_config(corpus.vocab.size(), 24);
  enc_cfg.layers = 2;
  enc_cfg.seed = 13;
  Encoder encoder(enc_cfg);
  const ExampleRecord& rec = corpus.bundle.train_marked.front();
  long real = 0;
  for (const int m : rec.attention_mask) real += m;
  c.expect(real < static_cast<long>(rec.attention_mask.size()),
           "fixture record carries no padding");
  EncoderTrace trace;
  encoder.forward(rec.token_ids, rec.attention_mask, Mode::Eval, nullptr, nullptr, &trace);
  double worst_row = 0.0;
  bool masked_zero = true;
  for (const auto& layer : trace.attention)
    for (const auto& attn : layer)
      for (Eigen::Index r = 0; r < attn.rows(); ++r) {
        worst_row = std::max(worst_row, std::abs(attn.row(r).sum() - 1.0));
        for (Eigen::Index k = 0; k < attn.cols(); ++k)
          if (rec.attention_mask[static_cast<std::size_t>(k)] == 0)
            masked_zero = masked_zero && attn(r, k) == 0.0;
      }
  c.expect(worst_row <= 1e-9, fmt("attention row sums off by %.3e > 1e-9", worst_row));
  c.expect(masked_zero, "padded keys received nonzero attention weight");

  // layer norm standardizes every row it emits
  double worst_mean = 0.0, worst_ms = 0.0;
  for (const auto* mats : {&trace.ln1_normalized, &trace.ln2_normalized})
    for (const auto& m : *mats)
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        worst_mean = std::max(worst_mean, std::abs(m.row(r).mean()));
        worst_ms = std::max(
            worst_ms, std::abs(m.row(r).squaredNorm() / static_cast<double>(m.cols()) - 1.0));
      }
  c.expect(worst_mean <= 1e-9, fmt("normalized row mean %.3e > 1e-9", worst_mean));
  c.expect(worst_ms <= 1e-6, fmt("normalized row mean square off by %.3e > 1e-6", worst_ms));

  // evaluation is deterministic, bit for bit
  Model model = make_model(small_encoder_config(corpus.vocab.size(), 24),
                           HeadKind::EventAware, corpus.vocab, 41);
  const auto& records = corpus.bundle.test_marked;
  const MetricsReport r1 = evaluate(model, records);
  const MetricsReport r2 = evaluate(model, records);
  c.expect(r1.tp == r2.tp && r1.fp == r2.fp && r1.tn == r2.tn && r1.fn == r2.fn,
           "confusion counts changed between identical evaluations");
  c.expect(r1.f1_positive == r2.f1_positive && r1.f1_macro == r2.f1_macro &&
               r1.accuracy == r2.accuracy,
           "metric values changed between identical evaluations");
  bool probs_equal = true;
  for (const auto& rec2 : records) {
    const Vector a = predict_probs(model, rec2);
    const Vector b = predict_probs(model, rec2);
    probs_equal = probs_equal && a(0) == b(0) && a(1) == b(1);
  }
  c.expect(probs_equal, "repeated forward passes disagree");

  const double secs = seconds_since(t0);
  c.expect(secs < 180.0, fmt("invariant checks took %.1fs, budget is 180s", secs));
  if (c.ok)
    c.detail = fmt("softmax %.1e, attention rows %.1e, norm rows %.1e, eval bit-stable",
                   worst_sum, worst_row, worst_ms);
  return {c.ok, c.detail};
}

struct Criterion {
  int number;
  const char* label;
  Outcome (*run)();
  const char* info;  // printed before the verdict when non-null
};

const Criterion kCriteria[] = {
    {1, "corpus curation reproduces the released split sizes and class counts",
     criterion_curation, nullptr},
    {2, "reference-scale accuracy is explicitly out of scope at this model size",
     criterion_scale_hooks,
     "full-scale fine-tuning accuracy requires a large pretrained encoder and far more "
     "compute than this build targets; the comparison grid therefore reports scores "
     "without enforcing thresholds, and import_encoder_params lets an externally "
     "pretrained encoder stand in"},
    {3, "analytic gradients agree with central differences through encoder and heads",
     criterion_gradients, nullptr},
    {4, "masked and event-aware heads coincide on single-token events",
     criterion_head_equivalence, nullptr},
    {5, "transfer preserves outputs exactly and pretraining speeds up fine-tuning",
     criterion_transfer, nullptr},
    {6, "training drives a two-layer model below 0.05 loss on 16 records",
     criterion_overfit, nullptr},
    {7, "trained models separate a held-out synthetic causality corpus",
     criterion_separation, nullptr},
    {8, "numeric invariants hold and evaluation is deterministic",
     criterion_invariants, nullptr},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) {
    char* end = nullptr;
    const long n = std::strtol(argv[i], &end, 10);
    if (end == argv[i] || *end != '\0' || n < 1 || n > 8) {
      std::cerr << "usage: " << argv[0] << " [criterion numbers 1..8]\n";
      return 2;
    }
    wanted.push_back(static_cast<int>(n));
  }
  if (wanted.empty())
    for (const auto& cr : kCriteria) wanted.push_back(cr.number);

  bool all_ok = true;
  for (const int n : wanted) {
    const Criterion& cr = kCriteria[n - 1];
    if (cr.info) std::cout << "[INFO] criterion " << n << ": " << cr.info << "\n";
    Outcome out;
    try {
      out = cr.run();
    } catch (const std::exception& e) {
      out.ok = false;
      out.detail = std::string("unexpected exception: ") + e.what();
    }
    if (out.ok)
      std::cout << "[PASS] criterion " << n << ": " << cr.label << " (" << out.detail
                << ")\n";
    else
      std::cout << "[FAIL] criterion " << n << ": " << cr.label << ": " << out.detail
                << "\n";
    all_ok = all_ok && out.ok;
  }
  return all_ok ? 0 : 1;
}
