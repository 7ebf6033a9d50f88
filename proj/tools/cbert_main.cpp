#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cbert/checkpoint.hpp"
#include "cbert/corpus.hpp"
#include "cbert/evaluation.hpp"
#include "cbert/manifest.hpp"
#include "cbert/model.hpp"
#include "cbert/rng.hpp"
#include "cbert/tokenizer.hpp"
#include "cbert/training.hpp"
#include "cbert/types.hpp"
#include "cbert/version.hpp"

namespace {

using namespace cbert;
namespace fs = std::filesystem;

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

// ---------------------------------------------------------------------------
// Config file

struct ToolConfig {
  EncoderConfig encoder{.layers = 2,
                        .attention_heads = 4,
                        .hidden_dim = 64,
                        .ffn_dim = 256,
                        .max_seq_len = 384,
                        .dropout_rate = 0.4,
                        .vocab_size = 0,
                        .seed = 0};
  TrainConfig train;     // defaults match the published hyperparameter table
  TrainConfig pretrain;  // defaults to the train section when absent
};

void apply_train_section(const nlohmann::json& j, TrainConfig& cfg, const std::string& where) {
  static const std::set<std::string> keys = {
      "learning_rate", "adam_epsilon", "adam_beta1", "adam_beta2", "dropout_rate",
      "batch_size",    "max_seq_len",  "epochs",     "seed"};
  for (const auto& [key, value] : j.items()) {
    if (!keys.count(key))
      throw CorpusError("config: unknown key '" + key + "' in section '" + where + "'");
    if (key == "learning_rate") cfg.learning_rate = value.get<double>();
    else if (key == "adam_epsilon") cfg.adam_epsilon = value.get<double>();
    else if (key == "adam_beta1") cfg.adam_beta1 = value.get<double>();
    else if (key == "adam_beta2") cfg.adam_beta2 = value.get<double>();
    else if (key == "dropout_rate") cfg.dropout_rate = value.get<double>();
    else if (key == "batch_size") cfg.batch_size = value.get<int>();
    else if (key == "max_seq_len") cfg.max_seq_len = value.get<int>();
    else if (key == "epochs") cfg.epochs = value.get<int>();
    else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
  }
}

void apply_encoder_section(const nlohmann::json& j, EncoderConfig& cfg) {
  static const std::set<std::string> keys = {"layers", "attention_heads", "hidden_dim",
                                             "ffn_dim"};
  for (const auto& [key, value] : j.items()) {
    if (!keys.count(key))
      throw CorpusError("config: unknown key '" + key + "' in section 'encoder'");
    if (key == "layers") cfg.layers = value.get<int>();
    else if (key == "attention_heads") cfg.attention_heads = value.get<int>();
    else if (key == "hidden_dim") cfg.hidden_dim = value.get<int>();
    else if (key == "ffn_dim") cfg.ffn_dim = value.get<int>();
  }
}

ToolConfig load_tool_config(const std::string& path) {
  ToolConfig tc;
  bool pretrain_given = false;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw CorpusError("cannot open config " + path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
      throw CorpusError("config " + path + " is not valid JSON: " + e.what());
    }
    for (const auto& [key, value] : j.items()) {
      if (key == "train") apply_train_section(value, tc.train, "train");
      else if (key == "pretrain") { apply_train_section(value, tc.pretrain, "pretrain"); pretrain_given = true; }
      else if (key == "encoder") apply_encoder_section(value, tc.encoder);
      else throw CorpusError("config: unknown section '" + key + "'");
    }
  }
  if (!pretrain_given) tc.pretrain = tc.train;
  tc.pretrain.head_kind = HeadKind::MaskedEvent;
  return tc;
}

// Shared CLI override flags for the training commands.
struct Overrides {
  std::optional<double> learning_rate, dropout_rate;
  std::optional<int> epochs, batch_size, max_seq_len;
  std::optional<int> layers, attention_heads, hidden_dim, ffn_dim;
  std::optional<std::uint64_t> seed;

  void add_flags(CLI::App* cmd, bool with_encoder = true) {
    cmd->add_option("--seed", seed, "Root seed for every random stream");
    cmd->add_option("--epochs", epochs, "Training epochs");
    cmd->add_option("--learning-rate", learning_rate, "Adam learning rate");
    cmd->add_option("--batch-size", batch_size, "Mini-batch size");
    cmd->add_option("--dropout", dropout_rate, "Dropout rate");
    cmd->add_option("--max-seq-len", max_seq_len, "Encoded sequence length");
    if (with_encoder) {
      cmd->add_option("--layers", layers, "Encoder layers");
      cmd->add_option("--attention-heads", attention_heads, "Attention heads");
      cmd->add_option("--hidden-dim", hidden_dim, "Hidden dimension");
      cmd->add_option("--ffn-dim", ffn_dim, "Feed-forward dimension");
    }
  }

  void apply(TrainConfig& cfg) const {
    if (learning_rate) cfg.learning_rate = *learning_rate;
    if (dropout_rate) cfg.dropout_rate = *dropout_rate;
    if (epochs) cfg.epochs = *epochs;
    if (batch_size) cfg.batch_size = *batch_size;
    if (max_seq_len) cfg.max_seq_len = *max_seq_len;
    if (seed) cfg.seed = *seed;
  }

  void apply(EncoderConfig& cfg) const {
    if (layers) cfg.layers = *layers;
    if (attention_heads) cfg.attention_heads = *attention_heads;
    if (hidden_dim) cfg.hidden_dim = *hidden_dim;
    if (ffn_dim) cfg.ffn_dim = *ffn_dim;
  }
};

// ---------------------------------------------------------------------------
// Small shared helpers

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorpusError("cannot open " + path.string() + " for writing");
  out << text;
}

std::vector<MarkedSentence> load_marked(const fs::path& data_dir, const std::string& id) {
  const fs::path train = data_dir / (id + ".train.marked.jsonl");
  const fs::path test = data_dir / (id + ".test.marked.jsonl");
  if (!fs::exists(train))
    throw CorpusError("no curated corpus at " + train.string() + " (run `curate` first)");
  auto records = import_records(train);
  if (fs::exists(test)) {
    auto test_records = import_records(test);
    records.insert(records.end(), std::make_move_iterator(test_records.begin()),
                   std::make_move_iterator(test_records.end()));
  }
  return records;
}

std::vector<MarkedSentence> train_split_of(const std::vector<MarkedSentence>& records) {
  std::vector<MarkedSentence> out;
  for (const auto& s : records)
    if (s.split == Split::Train) out.push_back(s);
  return out;
}

Vocab resolve_vocab(const std::string& vocab_path,
                    const std::vector<MarkedSentence>& all_records) {
  if (!vocab_path.empty()) return load_vocab(vocab_path);
  return build_vocab(train_split_of(all_records));
}

HeadKind head_from_flag(const std::string& flag) {
  if (flag == "cbert") return HeadKind::CBert;
  if (flag == "event") return HeadKind::EventAware;
  if (flag == "masked") return HeadKind::MaskedEvent;
  throw CorpusError("unknown head '" + flag + "'");
}

std::string loss_curve_json(const TrainResult& r) {
  nlohmann::ordered_json j;
  j["step_losses"] = r.step_losses;
  j["epoch_mean_losses"] = r.epoch_mean_losses;
  j["epoch_test_f1"] = r.epoch_test_f1;
  j["steps"] = r.steps;
  j["clamp_warnings"] = r.clamp_warnings;
  return j.dump(1);
}

std::string stats_json_string(const CorpusStats& stats) {
  nlohmann::ordered_json j;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : stats.rows) {
    nlohmann::ordered_json row;
    row["source"] = to_string(r.source);
    row["split"] = to_string(r.split);
    row["total"] = r.total;
    row["cause_effect"] = r.cause_effect;
    row["other"] = r.other;
    row["max_sentence_length_tokens"] = r.max_sentence_length_tokens;
    j["rows"].push_back(row);
  }
  j["notes"] = stats.notes;
  return j.dump(1);
}

std::map<std::string, std::string> describe(const TrainConfig& t, const EncoderConfig& e) {
  std::map<std::string, std::string> m;
  auto num = [](double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  };
  m["learning_rate"] = num(t.learning_rate);
  m["adam_epsilon"] = num(t.adam_epsilon);
  m["adam_beta1"] = num(t.adam_beta1);
  m["adam_beta2"] = num(t.adam_beta2);
  m["dropout_rate"] = num(t.dropout_rate);
  m["batch_size"] = std::to_string(t.batch_size);
  m["max_seq_len"] = std::to_string(t.max_seq_len);
  m["epochs"] = std::to_string(t.epochs);
  m["head"] = to_string(t.head_kind);
  m["encoder.layers"] = std::to_string(e.layers);
  m["encoder.attention_heads"] = std::to_string(e.attention_heads);
  m["encoder.hidden_dim"] = std::to_string(e.hidden_dim);
  m["encoder.ffn_dim"] = std::to_string(e.ffn_dim);
  return m;
}

void emit_manifest(const fs::path& out_dir, const std::string& name, RunManifest m) {
  m.tool_version = kToolVersion;
  write_manifest(m, out_dir / (name + ".manifest.json"));
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

constexpr const char* kDatasetIds[] = {"semeval2007", "semeval2010", "ade", "synthetic-a",
                                       "synthetic-b"};

// ---------------------------------------------------------------------------
// curate

struct CurateArgs {
  std::string dataset, out_dir;
  std::string train_file, test_file;      // semeval2010
  std::string train_dir, test_dir;        // semeval2007
  std::string positive_file, negative_file;  // ade
  int train_per_class = 200, test_per_class = 100;  // synthetic
  std::uint64_t seed = 0;
};

int run_curate(const CurateArgs& a) {
  Stopwatch watch;
  std::vector<MarkedSentence> records;
  std::vector<std::string> inputs;

  if (a.dataset == "semeval2010") {
    if (a.train_file.empty() || a.test_file.empty())
      throw CorpusError("semeval2010 curation needs --train-file and --test-file");
    for (const auto& [path, split] :
         {std::pair{a.train_file, Split::Train}, std::pair{a.test_file, Split::Test}}) {
      std::ifstream in(path);
      if (!in) throw CorpusError("cannot open " + path);
      auto part = parse_semeval2010(in, split);
      records.insert(records.end(), std::make_move_iterator(part.begin()),
                     std::make_move_iterator(part.end()));
      inputs.push_back(path);
    }
  } else if (a.dataset == "semeval2007") {
    if (a.train_dir.empty() || a.test_dir.empty())
      throw CorpusError("semeval2007 curation needs --train-dir and --test-dir");
    for (const auto& [dir, split] :
         {std::pair{a.train_dir, Split::Train}, std::pair{a.test_dir, Split::Test}}) {
      auto part = parse_semeval2007(dir, split);
      records.insert(records.end(), std::make_move_iterator(part.begin()),
                     std::make_move_iterator(part.end()));
      inputs.push_back(dir);
    }
  } else if (a.dataset == "ade") {
    if (a.positive_file.empty() || a.negative_file.empty())
      throw CorpusError("ade curation needs --positive-file and --negative-file");
    std::ifstream pos(a.positive_file), neg(a.negative_file);
    if (!pos) throw CorpusError("cannot open " + a.positive_file);
    if (!neg) throw CorpusError("cannot open " + a.negative_file);
    AdeParseResult result = parse_ade(pos, neg);
    for (const auto& w : result.report.warnings) std::cerr << "warning: " << w << "\n";
    std::cerr << "ade: " << result.report.positive_records << " positive records ("
              << result.report.positives_skipped << " skipped, "
              << result.report.offset_fallbacks << " offset fallbacks), "
              << result.report.negatives_annotated << " negatives annotated ("
              << result.report.negatives_excluded << " excluded)\n";
    records = std::move(result.records);
    inputs = {a.positive_file, a.negative_file};
  } else if (a.dataset == "synthetic-a" || a.dataset == "synthetic-b") {
    const SyntheticFamily family =
        a.dataset == "synthetic-a" ? SyntheticFamily::A : SyntheticFamily::B;
    records = generate_synthetic(a.train_per_class, mix_seed(a.seed, 101), family,
                                 Split::Train);
    auto test = generate_synthetic(a.test_per_class, mix_seed(a.seed, 202), family,
                                   Split::Test);
    records.insert(records.end(), std::make_move_iterator(test.begin()),
                   std::make_move_iterator(test.end()));
  } else {
    throw CorpusError("unknown dataset id '" + a.dataset + "'");
  }

  fs::create_directories(a.out_dir);
  const fs::path out_dir = a.out_dir;
  std::vector<std::string> outputs;
  for (const Split split : {Split::Train, Split::Test}) {
    std::vector<MarkedSentence> marked, masked;
    for (const auto& s : records) {
      if (s.split != split) continue;
      marked.push_back(s);
      masked.push_back(mask_events(s));
    }
    const fs::path marked_path = out_dir / (a.dataset + "." + to_string(split) + ".marked.jsonl");
    const fs::path masked_path = out_dir / (a.dataset + "." + to_string(split) + ".masked.jsonl");
    export_records(marked, marked_path);
    export_records(masked, masked_path);
    outputs.push_back(marked_path.string());
    outputs.push_back(masked_path.string());
  }

  const CorpusStats stats = corpus_stats(records);
  const fs::path stats_txt = out_dir / (a.dataset + ".stats.txt");
  const fs::path stats_json = out_dir / (a.dataset + ".stats.json");
  write_text(stats_txt, render_stats_text(stats));
  write_text(stats_json, stats_json_string(stats));
  outputs.push_back(stats_txt.string());
  outputs.push_back(stats_json.string());
  std::cout << render_stats_text(stats);

  RunManifest manifest;
  manifest.command = "curate";
  manifest.config = {{"dataset", a.dataset},
                     {"train_per_class", std::to_string(a.train_per_class)},
                     {"test_per_class", std::to_string(a.test_per_class)}};
  manifest.inputs = inputs;
  manifest.outputs = outputs;
  manifest.seed = a.seed;
  manifest.wall_clock_seconds = watch.seconds();
  emit_manifest(out_dir, a.dataset + ".curate", std::move(manifest));
  return 0;
}

// ---------------------------------------------------------------------------
// stats

int run_stats(const std::vector<std::string>& input_files, const std::string& data_dir,
              const std::string& dataset, const std::string& out_file) {
  std::vector<MarkedSentence> records;
  if (!input_files.empty()) {
    for (const auto& path : input_files) {
      auto part = import_records(fs::path(path));
      records.insert(records.end(), std::make_move_iterator(part.begin()),
                     std::make_move_iterator(part.end()));
    }
  } else if (!data_dir.empty() && !dataset.empty()) {
    records = load_marked(data_dir, dataset);
  } else {
    throw CorpusError("stats needs either --input files or --data-dir with --dataset");
  }
  const std::string text = render_stats_text(corpus_stats(records));
  std::cout << text;
  if (!out_file.empty()) write_text(out_file, text);
  return 0;
}

// ---------------------------------------------------------------------------
// train / pretrain

struct TrainArgs {
  std::string dataset, data_dir, out_dir, config_path, vocab_path;
  std::string head = "event";
  bool epoch_eval = false;
  Overrides overrides;
};

int run_train_like(const TrainArgs& a, bool pretrain_command) {
  Stopwatch watch;
  ToolConfig tc = load_tool_config(a.config_path);
  TrainConfig cfg = pretrain_command ? tc.pretrain : tc.train;
  a.overrides.apply(cfg);
  a.overrides.apply(tc.encoder);

  HeadKind head;
  if (pretrain_command) {
    head = HeadKind::MaskedEvent;
  } else {
    head = head_from_flag(a.head);
    if (head == HeadKind::MaskedEvent)
      throw CorpusError("`train` fits the cbert/event heads end-to-end; use `pretrain` "
                        "for the masked-event model");
  }
  cfg.head_kind = head;
  cfg.validate();

  const auto records = load_marked(a.data_dir, a.dataset);
  const Vocab vocab = resolve_vocab(a.vocab_path, records);
  tc.encoder.vocab_size = vocab.size();
  tc.encoder.max_seq_len = cfg.max_seq_len;
  tc.encoder.dropout_rate = cfg.dropout_rate;
  tc.encoder.seed = cfg.seed;

  const DatasetBundle bundle = encode_dataset(a.dataset, records, vocab, cfg.max_seq_len);
  const auto& train_records =
      head == HeadKind::MaskedEvent ? bundle.train_masked : bundle.train_marked;
  const auto& test_records =
      head == HeadKind::MaskedEvent ? bundle.test_masked : bundle.test_marked;
  if (train_records.empty())
    throw CorpusError("dataset '" + a.dataset + "' has no train records");

  Model model = make_model(tc.encoder, head, vocab, cfg.seed);
  const TrainResult result =
      train(model, train_records, cfg, a.epoch_eval && !test_records.empty() ? &test_records : nullptr);

  fs::create_directories(a.out_dir);
  const fs::path out_dir = a.out_dir;
  const std::string command = pretrain_command ? "pretrain" : "train";
  std::vector<std::string> outputs;

  Provenance prov;
  prov.dataset_ids = {a.dataset};
  prov.seed = cfg.seed;
  prov.epochs = cfg.epochs;
  const fs::path ckpt_path = out_dir / "checkpoint.json";
  save_checkpoint(model, prov, ckpt_path);
  outputs.push_back(ckpt_path.string());

  const fs::path vocab_path = out_dir / "vocab.txt";
  save_vocab(vocab, vocab_path);
  outputs.push_back(vocab_path.string());

  const fs::path loss_path = out_dir / "loss.json";
  write_text(loss_path, loss_curve_json(result));
  outputs.push_back(loss_path.string());

  std::cout << "final epoch mean loss: " << result.epoch_mean_losses.back() << "\n";
  if (!test_records.empty()) {
    const MetricsReport metrics =
        head == HeadKind::MaskedEvent
            ? evaluate(model, test_records)
            : evaluate(model, test_records, bundle.test_sentences);
    const fs::path metrics_json = out_dir / "metrics.json";
    const fs::path metrics_txt = out_dir / "metrics.txt";
    const fs::path errors_txt = out_dir / "errors.txt";
    write_text(metrics_json, metrics_json_string(metrics));
    write_text(metrics_txt, render_metrics_text(metrics));
    write_text(errors_txt, error_sheet(metrics, 5));
    outputs.push_back(metrics_json.string());
    outputs.push_back(metrics_txt.string());
    outputs.push_back(errors_txt.string());
    std::cout << render_metrics_text(metrics);
  }

  RunManifest manifest;
  manifest.command = command;
  manifest.config = describe(cfg, tc.encoder);
  manifest.config["dataset"] = a.dataset;
  manifest.inputs = {(fs::path(a.data_dir) / (a.dataset + ".train.marked.jsonl")).string()};
  manifest.outputs = outputs;
  manifest.seed = cfg.seed;
  manifest.wall_clock_seconds = watch.seconds();
  emit_manifest(out_dir, command, std::move(manifest));
  return 0;
}

// ---------------------------------------------------------------------------
// finetune

struct FinetuneArgs {
  std::string dataset, data_dir, out_dir, config_path, vocab_path;
  std::string checkpoint_path, pretrain_dataset;
  Overrides overrides;
};

int run_finetune(const FinetuneArgs& a) {
  Stopwatch watch;
  if (a.checkpoint_path.empty() == a.pretrain_dataset.empty())
    throw CorpusError("finetune needs exactly one of --checkpoint or --pretrain-dataset");

  ToolConfig tc = load_tool_config(a.config_path);
  TrainConfig fin_cfg = tc.train;
  a.overrides.apply(fin_cfg);
  a.overrides.apply(tc.encoder);
  fin_cfg.head_kind = HeadKind::EventAware;
  fin_cfg.validate();

  const auto target_records = load_marked(a.data_dir, a.dataset);
  std::vector<std::string> inputs = {
      (fs::path(a.data_dir) / (a.dataset + ".train.marked.jsonl")).string()};

  Checkpoint pretrained;
  std::string source_label;
  if (!a.checkpoint_path.empty()) {
    pretrained = load_checkpoint(a.checkpoint_path);
    source_label = a.checkpoint_path;
    inputs.push_back(a.checkpoint_path);
    if (!a.vocab_path.empty())
      throw CorpusError("--vocab only applies with --pretrain-dataset; a checkpoint "
                        "carries its own vocabulary");
  } else {
    const auto pre_records = load_marked(a.data_dir, a.pretrain_dataset);
    std::vector<MarkedSentence> union_records = pre_records;
    union_records.insert(union_records.end(), target_records.begin(), target_records.end());
    const Vocab vocab = resolve_vocab(a.vocab_path, union_records);

    TrainConfig pre_cfg = tc.pretrain;
    a.overrides.apply(pre_cfg);
    pre_cfg.head_kind = HeadKind::MaskedEvent;
    pre_cfg.validate();
    EncoderConfig enc_cfg = tc.encoder;
    enc_cfg.vocab_size = vocab.size();
    enc_cfg.max_seq_len = pre_cfg.max_seq_len;
    const DatasetBundle pre_bundle =
        encode_dataset(a.pretrain_dataset, pre_records, vocab, pre_cfg.max_seq_len);
    pretrained = pretrain_masked(pre_bundle, vocab, enc_cfg, pre_cfg);
    source_label = "pretrained in-run on " + a.pretrain_dataset;
    inputs.push_back(
        (fs::path(a.data_dir) / (a.pretrain_dataset + ".train.marked.jsonl")).string());
  }

  // records must fit the pretrained encoder's position table
  const int ckpt_max = pretrained.model.encoder.config().max_seq_len;
  const int encode_len = std::min(fin_cfg.max_seq_len, ckpt_max);
  const DatasetBundle target = encode_dataset(a.dataset, target_records,
                                              pretrained.model.vocab, encode_len);

  const TransferRunResult run = finetune_from(pretrained, target, fin_cfg);

  fs::create_directories(a.out_dir);
  const fs::path out_dir = a.out_dir;
  std::vector<std::string> outputs;

  Provenance prov;
  prov.dataset_ids = {a.dataset};
  prov.seed = fin_cfg.seed;
  prov.epochs = fin_cfg.epochs;
  prov.source_checkpoint = source_label;
  const fs::path ckpt_path = out_dir / "checkpoint.json";
  save_checkpoint(run.model, prov, ckpt_path);
  outputs.push_back(ckpt_path.string());

  const fs::path loss_path = out_dir / "loss.json";
  write_text(loss_path, loss_curve_json(run.finetune));
  outputs.push_back(loss_path.string());

  const fs::path metrics_json = out_dir / "metrics.json";
  const fs::path metrics_txt = out_dir / "metrics.txt";
  const fs::path errors_txt = out_dir / "errors.txt";
  write_text(metrics_json, metrics_json_string(run.metrics));
  write_text(metrics_txt, render_metrics_text(run.metrics));
  write_text(errors_txt, error_sheet(run.metrics, 5));
  outputs.push_back(metrics_json.string());
  outputs.push_back(metrics_txt.string());
  outputs.push_back(errors_txt.string());
  std::cout << render_metrics_text(run.metrics);

  RunManifest manifest;
  manifest.command = "finetune";
  manifest.config = describe(fin_cfg, pretrained.model.encoder.config());
  manifest.config["dataset"] = a.dataset;
  manifest.config["source"] = source_label;
  manifest.inputs = inputs;
  manifest.outputs = outputs;
  manifest.seed = fin_cfg.seed;
  manifest.wall_clock_seconds = watch.seconds();
  emit_manifest(out_dir, "finetune", std::move(manifest));
  return 0;
}

// ---------------------------------------------------------------------------
// grid

int run_grid_command(const std::string& datasets_flag, const std::string& data_dir,
                     const std::string& out_dir_flag, const std::string& config_path,
                     const std::string& vocab_path, const Overrides& overrides) {
  Stopwatch watch;
  const auto ids = split_commas(datasets_flag);
  if (ids.size() < 2) throw CorpusError("grid needs at least two --datasets ids");

  ToolConfig tc = load_tool_config(config_path);
  TrainConfig fin_cfg = tc.train;
  TrainConfig pre_cfg = tc.pretrain;
  overrides.apply(fin_cfg);
  overrides.apply(pre_cfg);
  overrides.apply(tc.encoder);
  fin_cfg.head_kind = HeadKind::EventAware;
  pre_cfg.head_kind = HeadKind::MaskedEvent;
  fin_cfg.validate();
  pre_cfg.validate();

  std::vector<std::vector<MarkedSentence>> per_dataset;
  std::vector<MarkedSentence> union_records;
  for (const auto& id : ids) {
    per_dataset.push_back(load_marked(data_dir, id));
    union_records.insert(union_records.end(), per_dataset.back().begin(),
                         per_dataset.back().end());
  }
  const Vocab vocab = resolve_vocab(vocab_path, union_records);

  GridConfig gc;
  gc.encoder = tc.encoder;
  gc.encoder.vocab_size = vocab.size();
  gc.encoder.max_seq_len = fin_cfg.max_seq_len;
  gc.pretrain = pre_cfg;
  gc.finetune = fin_cfg;
  gc.end_to_end = fin_cfg;

  std::vector<DatasetBundle> bundles;
  for (std::size_t i = 0; i < ids.size(); ++i)
    bundles.push_back(encode_dataset(ids[i], per_dataset[i], vocab, fin_cfg.max_seq_len));

  const GridResult grid = run_grid(bundles, vocab, gc);

  fs::create_directories(out_dir_flag);
  const fs::path out_dir = out_dir_flag;
  const fs::path grid_txt = out_dir / "grid.txt";
  const fs::path grid_json = out_dir / "grid.json";
  const fs::path vocab_out = out_dir / "vocab.txt";
  write_text(grid_txt, render_grid_text(grid));
  write_text(grid_json, grid_json_string(grid));
  save_vocab(vocab, vocab_out);
  std::cout << render_grid_text(grid);

  RunManifest manifest;
  manifest.command = "grid";
  manifest.config = describe(fin_cfg, gc.encoder);
  manifest.config["datasets"] = datasets_flag;
  manifest.config["pretrain.epochs"] = std::to_string(pre_cfg.epochs);
  manifest.config["pretrain.learning_rate"] = [&] {
    std::ostringstream os;
    os << pre_cfg.learning_rate;
    return os.str();
  }();
  for (const auto& id : ids)
    manifest.inputs.push_back((fs::path(data_dir) / (id + ".train.marked.jsonl")).string());
  manifest.outputs = {grid_txt.string(), grid_json.string(), vocab_out.string()};
  manifest.seed = fin_cfg.seed;
  manifest.wall_clock_seconds = watch.seconds();
  emit_manifest(out_dir, "grid", std::move(manifest));
  return 0;
}

// ---------------------------------------------------------------------------
// eval / predict

int run_eval(const std::string& checkpoint_path, const std::string& dataset,
             const std::string& data_dir, const std::string& split_flag,
             const std::string& out_dir_flag, int sheet_k) {
  Stopwatch watch;
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  const auto records = load_marked(data_dir, dataset);
  const Split split = split_from_string(split_flag);

  std::vector<MarkedSentence> chosen;
  for (const auto& s : records)
    if (s.split == split) chosen.push_back(s);
  if (chosen.empty())
    throw CorpusError("dataset '" + dataset + "' has no " + split_flag + " records");

  const bool masked = ckpt.model.head_kind == HeadKind::MaskedEvent;
  std::vector<MarkedSentence> sentences;
  std::vector<ExampleRecord> encoded;
  const int max_len = ckpt.model.encoder.config().max_seq_len;
  for (const auto& s : chosen) {
    const MarkedSentence view = masked ? mask_events(s) : s;
    sentences.push_back(view);
    encoded.push_back(encode(view, ckpt.model.vocab, max_len,
                             masked ? Variant::Masked : Variant::Marked));
  }

  const MetricsReport metrics = evaluate(ckpt.model, encoded, sentences);
  std::cout << render_metrics_text(metrics);

  if (!out_dir_flag.empty()) {
    fs::create_directories(out_dir_flag);
    const fs::path out_dir = out_dir_flag;
    write_text(out_dir / "metrics.json", metrics_json_string(metrics));
    write_text(out_dir / "metrics.txt", render_metrics_text(metrics));
    write_text(out_dir / "errors.txt", error_sheet(metrics, sheet_k));

    RunManifest manifest;
    manifest.command = "eval";
    manifest.config = {{"dataset", dataset},
                       {"split", split_flag},
                       {"checkpoint", checkpoint_path},
                       {"head", to_string(ckpt.model.head_kind)}};
    manifest.inputs = {checkpoint_path,
                       (fs::path(data_dir) / (dataset + "." + split_flag + ".marked.jsonl"))
                           .string()};
    manifest.outputs = {(out_dir / "metrics.json").string(),
                        (out_dir / "metrics.txt").string(),
                        (out_dir / "errors.txt").string()};
    manifest.seed = ckpt.provenance.seed;
    manifest.wall_clock_seconds = watch.seconds();
    emit_manifest(out_dir, "eval", std::move(manifest));
  }
  return 0;
}

int run_predict(const std::string& checkpoint_path, const std::string& sentence) {
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  MarkedSentence s = parse_tagged(sentence);
  s.label = Label::Other;  // placeholder; prediction ignores it
  s.source = Source::Synthetic;
  s.split = Split::Test;
  s.sentence_id = "input";

  const bool masked = ckpt.model.head_kind == HeadKind::MaskedEvent;
  if (masked) s = mask_events(s);
  const ExampleRecord record = encode(s, ckpt.model.vocab,
                                      ckpt.model.encoder.config().max_seq_len,
                                      masked ? Variant::Masked : Variant::Marked);
  const Vector probs = predict_probs(ckpt.model, record);
  const Label label = predict_label(probs);
  std::cout << "label: " << to_string(label) << "\n";
  char buf[96];
  std::snprintf(buf, sizeof(buf), "p_cause_effect: %.6f\np_other: %.6f\n",
                probs(kCauseEffectIndex), probs(kOtherIndex));
  std::cout << buf;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"causality detection over event-marked sentences"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  // curate
  CurateArgs curate_args;
  auto* curate = app.add_subcommand("curate", "Parse raw corpus files into record files");
  curate->add_option("--dataset", curate_args.dataset, "Dataset id")
      ->required()
      ->check(CLI::IsMember(std::vector<std::string>(std::begin(kDatasetIds),
                                                     std::end(kDatasetIds))));
  curate->add_option("--out", curate_args.out_dir, "Output directory")->required();
  curate->add_option("--train-file", curate_args.train_file, "semeval2010 train file");
  curate->add_option("--test-file", curate_args.test_file, "semeval2010 test file");
  curate->add_option("--train-dir", curate_args.train_dir, "semeval2007 train directory");
  curate->add_option("--test-dir", curate_args.test_dir, "semeval2007 test directory");
  curate->add_option("--positive-file", curate_args.positive_file, "ade relation file");
  curate->add_option("--negative-file", curate_args.negative_file, "ade negative file");
  curate->add_option("--train-per-class", curate_args.train_per_class,
                     "synthetic train records per class");
  curate->add_option("--test-per-class", curate_args.test_per_class,
                     "synthetic test records per class");
  curate->add_option("--seed", curate_args.seed, "Seed for synthetic generation");
  curate->callback([&] { run_curate(curate_args); });

  // stats
  std::vector<std::string> stats_inputs;
  std::string stats_data_dir, stats_dataset, stats_out;
  auto* stats = app.add_subcommand("stats", "Corpus statistics table");
  stats->add_option("--input", stats_inputs, "Record files (jsonl)");
  stats->add_option("--data-dir", stats_data_dir, "Curated corpus directory");
  stats->add_option("--dataset", stats_dataset, "Dataset id within --data-dir");
  stats->add_option("--out", stats_out, "Also write the table to this file");
  stats->callback([&] { run_stats(stats_inputs, stats_data_dir, stats_dataset, stats_out); });

  // train
  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train a classifier end-to-end");
  train_cmd->add_option("--dataset", train_args.dataset, "Dataset id")->required();
  train_cmd->add_option("--data-dir", train_args.data_dir, "Curated corpus directory")
      ->required();
  train_cmd->add_option("--head", train_args.head, "Head: cbert|event|masked")
      ->check(CLI::IsMember({"cbert", "event", "masked"}));
  train_cmd->add_option("--config", train_args.config_path, "JSON config file");
  train_cmd->add_option("--vocab", train_args.vocab_path, "Existing vocabulary file");
  train_cmd->add_option("--out", train_args.out_dir, "Output directory")->required();
  train_cmd->add_flag("--epoch-eval", train_args.epoch_eval,
                      "Evaluate on the test split after every epoch");
  train_args.overrides.add_flags(train_cmd);
  train_cmd->callback([&] { run_train_like(train_args, false); });

  // pretrain
  TrainArgs pretrain_args;
  auto* pretrain_cmd =
      app.add_subcommand("pretrain", "Train the masked-event model for later transfer");
  pretrain_cmd->add_option("--dataset", pretrain_args.dataset, "Dataset id")->required();
  pretrain_cmd->add_option("--data-dir", pretrain_args.data_dir, "Curated corpus directory")
      ->required();
  pretrain_cmd->add_option("--config", pretrain_args.config_path, "JSON config file");
  pretrain_cmd->add_option("--vocab", pretrain_args.vocab_path, "Existing vocabulary file");
  pretrain_cmd->add_option("--out", pretrain_args.out_dir, "Output directory")->required();
  pretrain_cmd->add_flag("--epoch-eval", pretrain_args.epoch_eval,
                         "Evaluate on the test split after every epoch");
  pretrain_args.overrides.add_flags(pretrain_cmd);
  pretrain_cmd->callback([&] { run_train_like(pretrain_args, true); });

  // finetune
  FinetuneArgs ft_args;
  auto* finetune_cmd =
      app.add_subcommand("finetune", "Transfer a masked-event checkpoint and fine-tune");
  finetune_cmd->add_option("--dataset", ft_args.dataset, "Target dataset id")->required();
  finetune_cmd->add_option("--data-dir", ft_args.data_dir, "Curated corpus directory")
      ->required();
  finetune_cmd->add_option("--checkpoint", ft_args.checkpoint_path,
                           "Masked-event checkpoint to start from");
  finetune_cmd->add_option("--pretrain-dataset", ft_args.pretrain_dataset,
                           "Pretrain on this dataset first");
  finetune_cmd->add_option("--config", ft_args.config_path, "JSON config file");
  finetune_cmd->add_option("--vocab", ft_args.vocab_path,
                           "Existing vocabulary file (with --pretrain-dataset)");
  finetune_cmd->add_option("--out", ft_args.out_dir, "Output directory")->required();
  ft_args.overrides.add_flags(finetune_cmd);
  finetune_cmd->callback([&] { run_finetune(ft_args); });

  // grid
  std::string grid_datasets, grid_data_dir, grid_out, grid_config, grid_vocab;
  Overrides grid_overrides;
  auto* grid_cmd = app.add_subcommand(
      "grid", "End-to-end rows plus the pretrain x finetune transfer matrix");
  grid_cmd->add_option("--datasets", grid_datasets, "Comma-separated dataset ids")
      ->required();
  grid_cmd->add_option("--data-dir", grid_data_dir, "Curated corpus directory")->required();
  grid_cmd->add_option("--config", grid_config, "JSON config file");
  grid_cmd->add_option("--vocab", grid_vocab, "Existing vocabulary file");
  grid_cmd->add_option("--out", grid_out, "Output directory")->required();
  grid_overrides.add_flags(grid_cmd);
  grid_cmd->callback([&] {
    run_grid_command(grid_datasets, grid_data_dir, grid_out, grid_config, grid_vocab,
                     grid_overrides);
  });

  // eval
  std::string eval_ckpt, eval_dataset, eval_data_dir, eval_split = "test", eval_out;
  int eval_sheet_k = 5;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset split");
  eval_cmd->add_option("--checkpoint", eval_ckpt, "Checkpoint file")->required();
  eval_cmd->add_option("--dataset", eval_dataset, "Dataset id")->required();
  eval_cmd->add_option("--data-dir", eval_data_dir, "Curated corpus directory")->required();
  eval_cmd->add_option("--split", eval_split, "train|test")
      ->check(CLI::IsMember({"train", "test"}));
  eval_cmd->add_option("--out", eval_out, "Output directory for report files");
  eval_cmd->add_option("--error-sheet-k", eval_sheet_k, "Examples per outcome category");
  eval_cmd->callback([&] {
    run_eval(eval_ckpt, eval_dataset, eval_data_dir, eval_split, eval_out, eval_sheet_k);
  });

  // predict
  std::string predict_ckpt, predict_sentence;
  auto* predict_cmd =
      app.add_subcommand("predict", "Classify one sentence with inline event tags");
  predict_cmd->add_option("--checkpoint", predict_ckpt, "Checkpoint file")->required();
  predict_cmd->add_option("--sentence", predict_sentence,
                          "Sentence with <e1>..</e1> and <e2>..</e2> tags")
      ->required();
  predict_cmd->callback([&] { run_predict(predict_ckpt, predict_sentence); });

  try {
    CLI11_PARSE(app, argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
