#include "cbert/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "cbert/types.hpp"
#include "cbert/version.hpp"

namespace cbert {

namespace {

constexpr const char* kFormatName = "cbert-checkpoint";
constexpr int kFormatVersion = 1;

nlohmann::ordered_json tensor_json(const ParamView& view) {
  nlohmann::ordered_json j;
  j["name"] = view.name;
  j["rows"] = view.rows;
  j["cols"] = view.cols;
  std::vector<double> row_major;
  row_major.reserve(static_cast<std::size_t>(view.size()));
  for (Eigen::Index r = 0; r < view.rows; ++r)
    for (Eigen::Index c = 0; c < view.cols; ++c)
      row_major.push_back(view.data[c * view.rows + r]);
  j["data"] = row_major;
  return j;
}

void fill_tensor(const ParamView& view, const nlohmann::json& j) {
  if (j.at("rows").get<Eigen::Index>() != view.rows ||
      j.at("cols").get<Eigen::Index>() != view.cols)
    throw CorpusError("checkpoint tensor '" + view.name + "' has unexpected shape");
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != view.size())
    throw CorpusError("checkpoint tensor '" + view.name + "' has unexpected length");
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < view.rows; ++r)
    for (Eigen::Index c = 0; c < view.cols; ++c)
      view.data[c * view.rows + r] = data[i++].get<double>();
}

nlohmann::ordered_json config_json(const EncoderConfig& cfg) {
  nlohmann::ordered_json j;
  j["layers"] = cfg.layers;
  j["attention_heads"] = cfg.attention_heads;
  j["hidden_dim"] = cfg.hidden_dim;
  j["ffn_dim"] = cfg.ffn_dim;
  j["max_seq_len"] = cfg.max_seq_len;
  j["dropout_rate"] = cfg.dropout_rate;
  j["vocab_size"] = cfg.vocab_size;
  j["seed"] = cfg.seed;
  return j;
}

EncoderConfig config_from_json(const nlohmann::json& j) {
  EncoderConfig cfg;
  cfg.layers = j.at("layers").get<int>();
  cfg.attention_heads = j.at("attention_heads").get<int>();
  cfg.hidden_dim = j.at("hidden_dim").get<int>();
  cfg.ffn_dim = j.at("ffn_dim").get<int>();
  cfg.max_seq_len = j.at("max_seq_len").get<int>();
  cfg.dropout_rate = j.at("dropout_rate").get<double>();
  cfg.vocab_size = j.at("vocab_size").get<int>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

nlohmann::json load_and_check(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open checkpoint " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    throw CorpusError("checkpoint " + path.string() + " is not valid JSON: " + e.what());
  }
  if (j.value("format", "") != kFormatName)
    throw CorpusError(path.string() + " is not a checkpoint file");
  if (j.value("version", 0) != kFormatVersion)
    throw CorpusError("unsupported checkpoint version in " + path.string());
  return j;
}

}  // namespace

void save_checkpoint(const Model& model, const Provenance& provenance,
                     const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["format"] = kFormatName;
  j["version"] = kFormatVersion;
  j["encoder_config"] = config_json(model.encoder.config());
  j["head_kind"] = to_string(model.head_kind);
  j["vocab"] = model.vocab.tokens();
  nlohmann::ordered_json prov;
  prov["dataset_ids"] = provenance.dataset_ids;
  prov["seed"] = provenance.seed;
  prov["epochs"] = provenance.epochs;
  prov["source_checkpoint"] = provenance.source_checkpoint;
  prov["tool_version"] =
      provenance.tool_version.empty() ? kToolVersion : provenance.tool_version;
  j["provenance"] = prov;

  auto params = nlohmann::ordered_json::array();
  // param_views needs mutable access; serialization does not modify
  auto& mutable_model = const_cast<Model&>(model);
  for (const auto& view : mutable_model.param_views()) params.push_back(tensor_json(view));
  j["params"] = params;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorpusError("cannot open " + path.string() + " for writing");
  out << j.dump(1) << "\n";
  if (!out) throw CorpusError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const nlohmann::json j = load_and_check(path);

  Checkpoint ckpt;
  const EncoderConfig cfg = config_from_json(j.at("encoder_config"));
  Vocab vocab(j.at("vocab").get<std::vector<std::string>>());
  if (vocab.size() != cfg.vocab_size)
    throw CorpusError("checkpoint vocabulary size disagrees with its encoder config");
  const HeadKind kind = head_kind_from_string(j.at("head_kind").get<std::string>());

  Model& m = ckpt.model;
  m.encoder = Encoder(cfg);
  m.head_kind = kind;
  m.head = allocate_head_params(kind, cfg.hidden_dim);
  m.vocab = std::move(vocab);

  std::map<std::string, const nlohmann::json*> by_name;
  for (const auto& t : j.at("params")) by_name[t.at("name").get<std::string>()] = &t;
  for (const auto& view : m.param_views()) {
    const auto it = by_name.find(view.name);
    if (it == by_name.end())
      throw CorpusError("checkpoint is missing tensor '" + view.name + "'");
    fill_tensor(view, *it->second);
    by_name.erase(it);
  }
  if (!by_name.empty())
    throw CorpusError("checkpoint holds unexpected tensor '" + by_name.begin()->first + "'");

  const auto& prov = j.at("provenance");
  ckpt.provenance.dataset_ids = prov.at("dataset_ids").get<std::vector<std::string>>();
  ckpt.provenance.seed = prov.at("seed").get<std::uint64_t>();
  ckpt.provenance.epochs = prov.at("epochs").get<int>();
  ckpt.provenance.source_checkpoint = prov.at("source_checkpoint").get<std::string>();
  ckpt.provenance.tool_version = prov.at("tool_version").get<std::string>();
  return ckpt;
}

void import_encoder_params(Model& model, const std::filesystem::path& path) {
  Checkpoint source = load_checkpoint(path);
  const EncoderConfig& have = model.encoder.config();
  const EncoderConfig& want = source.model.encoder.config();
  if (have.layers != want.layers || have.attention_heads != want.attention_heads ||
      have.hidden_dim != want.hidden_dim || have.ffn_dim != want.ffn_dim ||
      have.max_seq_len != want.max_seq_len || have.vocab_size != want.vocab_size)
    throw CorpusError("imported encoder config does not match the model");
  if (model.vocab.tokens() != source.model.vocab.tokens())
    throw CorpusError("imported encoder was built against a different vocabulary");
  model.encoder.params() = source.model.encoder.params();
}

}  // namespace cbert
