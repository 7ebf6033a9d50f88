#include "cbert/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "cbert/rng.hpp"

namespace cbert {

namespace {

// Stream tags keeping the independent random streams derived from one seed
// from colliding (model init uses streams 1 and 2).
constexpr std::uint64_t kDropoutStream = 0xD80;
constexpr std::uint64_t kShuffleStreamBase = 0x5F00;

}  // namespace

void TrainConfig::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument("train config: " + msg);
  };
  require(learning_rate >= 0.0, "learning_rate must be >= 0");
  require(adam_epsilon > 0.0, "adam_epsilon must be > 0");
  require(adam_beta1 >= 0.0 && adam_beta1 < 1.0, "adam_beta1 must be in [0, 1)");
  require(adam_beta2 >= 0.0 && adam_beta2 < 1.0, "adam_beta2 must be in [0, 1)");
  require(dropout_rate >= 0.0 && dropout_rate < 1.0, "dropout_rate must be in [0, 1)");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(max_seq_len >= 8, "max_seq_len must be >= 8");
  require(epochs >= 1, "epochs must be >= 1");
}

TrainResult train(Model& model, const std::vector<ExampleRecord>& data,
                  const TrainConfig& cfg, const std::vector<ExampleRecord>* per_epoch_test) {
  cfg.validate();
  if (data.empty()) throw CorpusError("train: empty training set");
  const bool want_masked = model.head_kind == HeadKind::MaskedEvent;
  for (const auto& rec : data) {
    if ((rec.variant == Variant::Masked) != want_masked)
      throw CorpusError("train: record variant does not match the head (sentence '" +
                        rec.sentence_id + "')");
  }

  std::mt19937_64 dropout_rng(mix_seed(cfg.seed, kDropoutStream));
  ModelGrads grads = allocate_grads(model);
  auto params = model.param_views();
  AdamState adam(params);
  const AdamConfig adam_cfg = cfg.adam();

  TrainResult result;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::mt19937_64 shuffle_rng(
        mix_seed(cfg.seed, kShuffleStreamBase + static_cast<std::uint64_t>(epoch)));
    deterministic_shuffle(order, shuffle_rng);

    double epoch_loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const auto n = static_cast<double>(end - start);
      set_zero(grads);
      double batch_loss_sum = 0.0;
      for (std::size_t i = start; i < end; ++i)
        batch_loss_sum += loss_and_grads(model, data[order[i]], 1.0 / n, &dropout_rng, grads,
                                         &result.clamp_warnings);
      const double batch_loss = batch_loss_sum / n;
      if (!std::isfinite(batch_loss))
        throw NumericsError("non-finite training loss at step " +
                            std::to_string(result.steps + 1));
      auto grad_views = param_views(grads, model.head_kind);
      adam.step(params, grad_views, adam_cfg);
      result.step_losses.push_back(batch_loss);
      ++result.steps;
      epoch_loss_sum += batch_loss_sum;
    }
    result.epoch_mean_losses.push_back(epoch_loss_sum /
                                       static_cast<double>(order.size()));
    if (per_epoch_test && !per_epoch_test->empty())
      result.epoch_test_f1.push_back(evaluate(model, *per_epoch_test).f1_positive);
  }
  return result;
}

Model transfer(const Checkpoint& pretrained) {
  if (pretrained.model.head_kind != HeadKind::MaskedEvent)
    throw CorpusError("transfer requires a masked-event checkpoint, got head '" +
                      to_string(pretrained.model.head_kind) + "'");
  Model target = pretrained.model;  // encoder, head tensors and vocab all copy over
  target.head_kind = HeadKind::EventAware;
  return target;
}

Model transfer(const Checkpoint& pretrained, const EncoderConfig& expected_cfg,
               const Vocab& expected_vocab) {
  const EncoderConfig& have = pretrained.model.encoder.config();
  if (have.layers != expected_cfg.layers || have.hidden_dim != expected_cfg.hidden_dim ||
      have.attention_heads != expected_cfg.attention_heads ||
      have.ffn_dim != expected_cfg.ffn_dim || have.max_seq_len != expected_cfg.max_seq_len)
    throw CorpusError("transfer: checkpoint encoder config does not match the target");
  if (pretrained.model.vocab.tokens() != expected_vocab.tokens())
    throw CorpusError("transfer: checkpoint vocabulary does not match the target");
  return transfer(pretrained);
}

DatasetBundle encode_dataset(const std::string& id,
                             const std::vector<MarkedSentence>& records, const Vocab& vocab,
                             int max_seq_len) {
  DatasetBundle bundle;
  bundle.id = id;
  for (const auto& s : records) {
    const MarkedSentence masked = mask_events(s);
    ExampleRecord marked_rec = encode(s, vocab, max_seq_len, Variant::Marked);
    ExampleRecord masked_rec = encode(masked, vocab, max_seq_len, Variant::Masked);
    if (s.split == Split::Train) {
      bundle.train_marked.push_back(std::move(marked_rec));
      bundle.train_masked.push_back(std::move(masked_rec));
    } else {
      bundle.test_marked.push_back(std::move(marked_rec));
      bundle.test_masked.push_back(std::move(masked_rec));
      bundle.test_sentences.push_back(s);
    }
  }
  return bundle;
}

Checkpoint pretrain_masked(const DatasetBundle& data, const Vocab& vocab,
                           EncoderConfig enc_cfg, const TrainConfig& cfg) {
  if (data.train_masked.empty())
    throw CorpusError("pretrain: dataset '" + data.id + "' has no masked train records");
  enc_cfg.vocab_size = vocab.size();
  enc_cfg.dropout_rate = cfg.dropout_rate;
  enc_cfg.max_seq_len = std::max(enc_cfg.max_seq_len, cfg.max_seq_len);
  Model model = make_model(enc_cfg, HeadKind::MaskedEvent, vocab, cfg.seed);
  train(model, data.train_masked, cfg);

  Checkpoint ckpt;
  ckpt.model = std::move(model);
  ckpt.provenance.dataset_ids = {data.id};
  ckpt.provenance.seed = cfg.seed;
  ckpt.provenance.epochs = cfg.epochs;
  return ckpt;
}

TransferRunResult finetune_from(const Checkpoint& pretrained, const DatasetBundle& target,
                                const TrainConfig& cfg) {
  if (target.train_marked.empty() || target.test_marked.empty())
    throw CorpusError("finetune: dataset '" + target.id + "' is missing a split");
  TransferRunResult out;
  out.model = transfer(pretrained);
  out.finetune = train(out.model, target.train_marked, cfg);
  out.metrics = evaluate(out.model, target.test_marked, target.test_sentences);
  return out;
}

TransferRunResult pretrain_finetune(const DatasetBundle& pretrain_data,
                                    const DatasetBundle& target, const Vocab& vocab,
                                    EncoderConfig enc_cfg, const TrainConfig& pretrain_cfg,
                                    const TrainConfig& finetune_cfg) {
  const Checkpoint pretrained = pretrain_masked(pretrain_data, vocab, enc_cfg, pretrain_cfg);
  return finetune_from(pretrained, target, finetune_cfg);
}

namespace {

GridCell run_end_to_end(const DatasetBundle& data, const Vocab& vocab,
                        const GridConfig& cfg, HeadKind kind) {
  GridCell cell;
  cell.finetune_id = data.id;
  try {
    EncoderConfig enc_cfg = cfg.encoder;
    enc_cfg.vocab_size = vocab.size();
    enc_cfg.dropout_rate = cfg.end_to_end.dropout_rate;
    Model model = make_model(enc_cfg, kind, vocab, cfg.end_to_end.seed);
    train(model, data.train_marked, cfg.end_to_end);
    const MetricsReport rep = evaluate(model, data.test_marked, data.test_sentences);
    cell.f1_positive = rep.f1_positive;
    cell.f1_macro = rep.f1_macro;
    cell.ok = true;
  } catch (const std::exception& e) {
    cell.error = e.what();
  }
  return cell;
}

}  // namespace

GridResult run_grid(const std::vector<DatasetBundle>& datasets, const Vocab& vocab,
                    const GridConfig& cfg) {
  if (datasets.empty()) throw CorpusError("grid: no datasets");
  GridResult grid;
  for (const auto& d : datasets) grid.dataset_ids.push_back(d.id);

  for (const auto& d : datasets) {
    grid.cbert_cells.push_back(run_end_to_end(d, vocab, cfg, HeadKind::CBert));
    grid.event_aware_cells.push_back(run_end_to_end(d, vocab, cfg, HeadKind::EventAware));
  }

  for (const auto& pre : datasets) {
    bool have_pretrained = false;
    Checkpoint pretrained;
    std::string pretrain_error;
    try {
      pretrained = pretrain_masked(pre, vocab, cfg.encoder, cfg.pretrain);
      have_pretrained = true;
    } catch (const std::exception& e) {
      pretrain_error = e.what();
    }
    for (const auto& target : datasets) {
      GridCell cell;
      cell.pretrain_id = pre.id;
      cell.finetune_id = target.id;
      if (!have_pretrained) {
        cell.error = "pretraining failed: " + pretrain_error;
      } else {
        try {
          const TransferRunResult run = finetune_from(pretrained, target, cfg.finetune);
          cell.f1_positive = run.metrics.f1_positive;
          cell.f1_macro = run.metrics.f1_macro;
          cell.ok = true;
        } catch (const std::exception& e) {
          cell.error = e.what();
        }
      }
      grid.transfer_cells.push_back(std::move(cell));
    }
  }
  return grid;
}

namespace {

std::string cell_text(const GridCell& cell) {
  if (!cell.ok) return "failed";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * cell.f1_positive);
  return buf;
}

}  // namespace

std::string render_grid_text(const GridResult& grid) {
  const std::size_t n = grid.dataset_ids.size();
  std::ostringstream os;
  os << "F1 (cause-effect, x100), end-to-end training\n";
  os << "model";
  for (const auto& id : grid.dataset_ids) os << "\t" << id;
  os << "\n";
  os << "cbert";
  for (const auto& c : grid.cbert_cells) os << "\t" << cell_text(c);
  os << "\n";
  os << "event_aware";
  for (const auto& c : grid.event_aware_cells) os << "\t" << cell_text(c);
  os << "\n\n";

  os << "F1 (cause-effect, x100) after masked pretraining and event-aware fine-tuning\n";
  os << "pretrain \\ finetune";
  for (const auto& id : grid.dataset_ids) os << "\t" << id;
  os << "\n";
  for (std::size_t r = 0; r < n; ++r) {
    os << grid.dataset_ids[r];
    for (std::size_t c = 0; c < n; ++c) os << "\t" << cell_text(grid.transfer_cells[r * n + c]);
    os << "\n";
  }
  for (const auto& c : grid.transfer_cells)
    if (!c.ok)
      os << "failed cell " << c.pretrain_id << " -> " << c.finetune_id << ": " << c.error
         << "\n";
  for (const auto& rows : {&grid.cbert_cells, &grid.event_aware_cells})
    for (const auto& c : *rows)
      if (!c.ok) os << "failed end-to-end cell " << c.finetune_id << ": " << c.error << "\n";
  return os.str();
}

namespace {

nlohmann::ordered_json cell_json(const GridCell& cell) {
  nlohmann::ordered_json j;
  if (!cell.pretrain_id.empty()) j["pretrain"] = cell.pretrain_id;
  j["finetune"] = cell.finetune_id;
  j["ok"] = cell.ok;
  if (cell.ok) {
    j["f1_positive"] = cell.f1_positive;
    j["f1_macro"] = cell.f1_macro;
  } else {
    j["error"] = cell.error;
  }
  return j;
}

}  // namespace

std::string grid_json_string(const GridResult& grid) {
  nlohmann::ordered_json j;
  j["datasets"] = grid.dataset_ids;
  j["end_to_end"] = nlohmann::ordered_json::object();
  for (const auto& c : grid.cbert_cells) j["end_to_end"]["cbert"].push_back(cell_json(c));
  for (const auto& c : grid.event_aware_cells)
    j["end_to_end"]["event_aware"].push_back(cell_json(c));
  j["transfer"] = nlohmann::ordered_json::array();
  for (const auto& c : grid.transfer_cells) j["transfer"].push_back(cell_json(c));
  return j.dump(1);
}

}  // namespace cbert
