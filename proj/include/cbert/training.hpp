#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cbert/adam.hpp"
#include "cbert/checkpoint.hpp"
#include "cbert/corpus.hpp"
#include "cbert/evaluation.hpp"
#include "cbert/model.hpp"

namespace cbert {

struct TrainConfig {
  double learning_rate = 1e-5;
  double adam_epsilon = 1e-8;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double dropout_rate = 0.4;
  int batch_size = 16;
  int max_seq_len = 384;
  int epochs = 5;
  std::uint64_t seed = 0;
  HeadKind head_kind = HeadKind::EventAware;

  void validate() const;
  AdamConfig adam() const { return {learning_rate, adam_beta1, adam_beta2, adam_epsilon}; }
};

struct TrainResult {
  std::vector<double> step_losses;        // batch-mean loss per optimizer step
  std::vector<double> epoch_mean_losses;  // example-mean loss per epoch
  std::vector<double> epoch_test_f1;      // filled when a test set is supplied
  long clamp_warnings = 0;
  long steps = 0;
};

// Shuffled mini-batch Adam training; updates `model` in place. All randomness
// (shuffling, dropout) derives from cfg.seed. A masked-event head requires
// masked records and the other heads require marked ones. Throws
// NumericsError with the step index if the loss stops being finite.
TrainResult train(Model& model, const std::vector<ExampleRecord>& data,
                  const TrainConfig& cfg,
                  const std::vector<ExampleRecord>* per_epoch_test = nullptr);

// Re-heads a masked-event checkpoint as an event-aware model. Encoder and
// head tensors are copied unchanged (the two heads share shapes), so the new
// model reproduces the source's outputs exactly on masked records.
Model transfer(const Checkpoint& pretrained);

// Same, validating the checkpoint against the encoder config and vocabulary
// the caller intends to fine-tune with.
Model transfer(const Checkpoint& pretrained, const EncoderConfig& expected_cfg,
               const Vocab& expected_vocab);

// One dataset, encoded both ways and split.
struct DatasetBundle {
  std::string id;
  std::vector<ExampleRecord> train_marked, test_marked;
  std::vector<ExampleRecord> train_masked, test_masked;
  std::vector<MarkedSentence> test_sentences;  // parallel to test_marked
};

DatasetBundle encode_dataset(const std::string& id,
                             const std::vector<MarkedSentence>& records, const Vocab& vocab,
                             int max_seq_len);

// Trains a fresh masked-event model on the bundle's masked train split.
Checkpoint pretrain_masked(const DatasetBundle& data, const Vocab& vocab,
                           EncoderConfig enc_cfg, const TrainConfig& cfg);

struct TransferRunResult {
  Model model;
  TrainResult finetune;
  MetricsReport metrics;  // on the target's marked test split
};

// transfer + fine-tune + evaluate on one target dataset.
TransferRunResult finetune_from(const Checkpoint& pretrained, const DatasetBundle& target,
                                const TrainConfig& cfg);

// Full pretrain -> transfer -> fine-tune pipeline; the in-domain case is
// pretrain and target being the same bundle.
TransferRunResult pretrain_finetune(const DatasetBundle& pretrain_data,
                                    const DatasetBundle& target, const Vocab& vocab,
                                    EncoderConfig enc_cfg, const TrainConfig& pretrain_cfg,
                                    const TrainConfig& finetune_cfg);

struct GridCell {
  std::string pretrain_id;  // empty for the end-to-end rows
  std::string finetune_id;
  bool ok = false;
  std::string error;
  double f1_positive = 0.0;
  double f1_macro = 0.0;
};

struct GridResult {
  std::vector<std::string> dataset_ids;
  std::vector<GridCell> cbert_cells;       // end-to-end, one per dataset
  std::vector<GridCell> event_aware_cells; // end-to-end, one per dataset
  std::vector<GridCell> transfer_cells;    // row-major n x n
};

struct GridConfig {
  EncoderConfig encoder;
  TrainConfig pretrain;
  TrainConfig finetune;
  TrainConfig end_to_end;
};

// End-to-end rows for both plain heads plus the full pretrain x finetune
// transfer matrix. Cell failures are recorded per cell, not thrown. The
// pretraining for each matrix row runs once and each cell fine-tunes a copy,
// so a diagonal cell matches the standalone in-domain run with equal seeds.
GridResult run_grid(const std::vector<DatasetBundle>& datasets, const Vocab& vocab,
                    const GridConfig& cfg);

// Text tables: one for the end-to-end comparison, one for the transfer matrix.
std::string render_grid_text(const GridResult& grid);
std::string grid_json_string(const GridResult& grid);

}  // namespace cbert
