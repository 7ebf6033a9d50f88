#include "cbert/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace cbert {

const char* const kSpecialTokens[kNumSpecialTokens] = {
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "<e1>", "</e1>", "<e2>", "</e2>", "[BLANK]"};

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.size() < static_cast<std::size_t>(kNumSpecialTokens))
    throw CorpusError("vocabulary is smaller than the special-token block");
  for (int i = 0; i < kNumSpecialTokens; ++i) {
    if (tokens_[i] != kSpecialTokens[i])
      throw CorpusError("vocabulary does not start with the special tokens (position " +
                        std::to_string(i) + " is '" + tokens_[i] + "')");
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty())
      throw CorpusError("empty token at vocabulary position " + std::to_string(i));
    if (!index_.emplace(tokens_[i], static_cast<int>(i)).second)
      throw CorpusError("duplicate vocabulary token '" + tokens_[i] + "'");
  }
}

int Vocab::id(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnkId : it->second;
}

const std::string& Vocab::token(int id) const {
  if (id < 0 || id >= size())
    throw CorpusError("token id " + std::to_string(id) + " out of range");
  return tokens_[static_cast<std::size_t>(id)];
}

namespace {

bool letterish(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (letterish(c)) {
      std::string tok;
      while (i < text.size() && letterish(static_cast<unsigned char>(text[i]))) {
        tok += static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
        ++i;
      }
      out.push_back(std::move(tok));
    } else {
      out.push_back(std::string(1, text[i]));
      ++i;
    }
  }
  return out;
}

Vocab build_vocab(const std::vector<MarkedSentence>& train_records) {
  std::map<std::string, long> freq;
  for (const auto& s : train_records)
    for (auto& tok : tokenize(s.text)) ++freq[tok];
  if (freq.empty())
    throw CorpusError("cannot build a vocabulary: no tokens in the training records");

  std::vector<std::pair<std::string, long>> entries(freq.begin(), freq.end());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  std::vector<std::string> tokens(kSpecialTokens, kSpecialTokens + kNumSpecialTokens);
  for (auto& [tok, n] : entries) {
    // a corpus token spelled like a special token would collide with it
    if (std::find(tokens.begin(), tokens.begin() + kNumSpecialTokens, tok) !=
        tokens.begin() + kNumSpecialTokens)
      continue;
    tokens.push_back(tok);
  }
  return Vocab(std::move(tokens));
}

void save_vocab(const Vocab& vocab, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorpusError("cannot open " + path.string() + " for writing");
  for (const auto& tok : vocab.tokens()) out << tok << "\n";
}

Vocab load_vocab(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  while (!tokens.empty() && tokens.back().empty()) tokens.pop_back();
  return Vocab(std::move(tokens));
}

std::string to_string(Variant v) {
  return v == Variant::Marked ? "marked" : "masked";
}

Variant variant_from_string(std::string_view s) {
  if (s == "marked") return Variant::Marked;
  if (s == "masked") return Variant::Masked;
  throw CorpusError("unknown variant '" + std::string(s) + "'");
}

namespace {

std::string_view trimmed(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

ExampleRecord encode(const MarkedSentence& s, const Vocab& vocab, int max_seq_len,
                     Variant variant) {
  validate(s);
  if (max_seq_len < 8) throw CorpusError("max_seq_len too small to encode any sentence");

  const bool e1_first = s.e1.begin < s.e2.begin;
  const CharSpan& first = e1_first ? s.e1 : s.e2;
  const CharSpan& second = e1_first ? s.e2 : s.e1;
  const std::string_view text = s.text;

  auto ids_of = [&](std::string_view piece) {
    std::vector<int> ids;
    for (const auto& tok : tokenize(piece)) ids.push_back(vocab.id(tok));
    return ids;
  };

  auto event_ids = [&](const CharSpan& span, const char* which) {
    const std::string_view surface = text.substr(span.begin, span.size());
    if (variant == Variant::Masked) {
      if (trimmed(surface) != "blank")
        throw CorpusError(std::string("masked encoding requires the ") + which +
                          " surface to be 'blank', got '" + std::string(surface) + "'");
      return std::vector<int>{kBlankId};
    }
    auto ids = ids_of(surface);
    if (ids.empty())
      throw CorpusError(std::string(which) + " span contains no tokens");
    return ids;
  };

  const std::vector<int> first_ids = event_ids(first, e1_first ? "e1" : "e2");
  const std::vector<int> second_ids = event_ids(second, e1_first ? "e2" : "e1");
  const std::vector<int> pre = ids_of(text.substr(0, first.begin));
  const std::vector<int> mid = ids_of(text.substr(first.end, second.begin - first.end));
  std::vector<int> tail = ids_of(text.substr(second.end));

  const int open_first = e1_first ? kE1OpenId : kE2OpenId;
  const int close_first = e1_first ? kE1CloseId : kE2CloseId;
  const int open_second = e1_first ? kE2OpenId : kE1OpenId;
  const int close_second = e1_first ? kE2CloseId : kE1CloseId;

  ExampleRecord rec;
  rec.label = s.label;
  rec.variant = variant;
  rec.sentence_id = s.sentence_id;
  rec.token_ids.reserve(max_seq_len);

  auto push = [&](int id) { rec.token_ids.push_back(id); };
  auto push_all = [&](const std::vector<int>& ids) {
    rec.token_ids.insert(rec.token_ids.end(), ids.begin(), ids.end());
  };

  push(kClsId);
  push_all(pre);
  push(open_first);
  const TokenSpan first_span{static_cast<int>(rec.token_ids.size()),
                             static_cast<int>(rec.token_ids.size() + first_ids.size()) - 1};
  push_all(first_ids);
  push(close_first);
  push_all(mid);
  push(open_second);
  const TokenSpan second_span{static_cast<int>(rec.token_ids.size()),
                              static_cast<int>(rec.token_ids.size() + second_ids.size()) - 1};
  push_all(second_ids);
  push(close_second);

  if (static_cast<int>(rec.token_ids.size()) + 1 > max_seq_len)
    throw CorpusError("sentence '" + s.sentence_id + "' does not fit in max_seq_len " +
                      std::to_string(max_seq_len) +
                      " even with the trailing context dropped");

  // only the tail is truncatable
  const int tail_budget = max_seq_len - static_cast<int>(rec.token_ids.size()) - 1;
  if (static_cast<int>(tail.size()) > tail_budget) tail.resize(tail_budget);
  push_all(tail);
  push(kSepId);

  const int real = static_cast<int>(rec.token_ids.size());
  rec.token_ids.resize(max_seq_len, kPadId);
  rec.attention_mask.assign(max_seq_len, 0);
  std::fill(rec.attention_mask.begin(), rec.attention_mask.begin() + real, 1);

  rec.e1_range = e1_first ? first_span : second_span;
  rec.e2_range = e1_first ? second_span : first_span;
  validate_record(rec, max_seq_len, vocab.size());
  return rec;
}

std::string decode(const ExampleRecord& record, const Vocab& vocab) {
  std::ostringstream os;
  bool space = false;
  for (std::size_t i = 0; i < record.token_ids.size(); ++i) {
    if (record.attention_mask[i] == 0) break;
    if (space) os << ' ';
    os << vocab.token(record.token_ids[i]);
    space = true;
  }
  return os.str();
}

void validate_record(const ExampleRecord& record, int max_seq_len, int vocab_size) {
  if (static_cast<int>(record.token_ids.size()) != max_seq_len)
    throw CorpusError("record length " + std::to_string(record.token_ids.size()) +
                      " != max_seq_len " + std::to_string(max_seq_len));
  if (record.attention_mask.size() != record.token_ids.size())
    throw CorpusError("attention mask length mismatch");

  int real = 0;
  bool in_pad = false;
  for (std::size_t i = 0; i < record.token_ids.size(); ++i) {
    const int m = record.attention_mask[i];
    if (m != 0 && m != 1) throw CorpusError("attention mask must be 0/1");
    if (m == 1 && in_pad) throw CorpusError("attention mask is not a prefix of ones");
    if (m == 0) in_pad = true;
    if (m == 1) ++real;
    const int id = record.token_ids[i];
    if (id < 0 || id >= vocab_size)
      throw CorpusError("token id " + std::to_string(id) + " out of vocabulary range");
    if (m == 0 && id != kPadId) throw CorpusError("padding positions must hold [PAD]");
  }
  if (real < 4) throw CorpusError("record has too few real tokens");
  if (record.token_ids[0] != kClsId) throw CorpusError("record must start with [CLS]");
  if (record.token_ids[real - 1] != kSepId) throw CorpusError("record must end with [SEP]");

  auto check_span = [&](const TokenSpan& span, const char* name) {
    if (span.first < 1 || span.last < span.first || span.last >= real - 1)
      throw CorpusError(std::string(name) + " token range is out of the real-token region");
    for (int t = span.first; t <= span.last; ++t) {
      const int id = record.token_ids[t];
      if (id == kE1OpenId || id == kE1CloseId || id == kE2OpenId || id == kE2CloseId)
        throw CorpusError(std::string(name) + " token range must not cover event markers");
    }
  };
  check_span(record.e1_range, "e1");
  check_span(record.e2_range, "e2");
  if (!(record.e1_range.last < record.e2_range.first ||
        record.e2_range.last < record.e1_range.first))
    throw CorpusError("event token ranges overlap");

  if (record.variant == Variant::Masked) {
    if (record.e1_range.size() != 1 || record.e2_range.size() != 1)
      throw CorpusError("masked records must have single-token event ranges");
    if (record.token_ids[record.e1_range.first] != kBlankId ||
        record.token_ids[record.e2_range.first] != kBlankId)
      throw CorpusError("masked records must hold [BLANK] at the event positions");
  }
}

}  // namespace cbert
