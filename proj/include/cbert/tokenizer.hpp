#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cbert/types.hpp"

namespace cbert {

// Fixed special-token ids. Every vocabulary starts with these, in this order.
inline constexpr int kPadId = 0;
inline constexpr int kUnkId = 1;
inline constexpr int kClsId = 2;
inline constexpr int kSepId = 3;
inline constexpr int kE1OpenId = 4;
inline constexpr int kE1CloseId = 5;
inline constexpr int kE2OpenId = 6;
inline constexpr int kE2CloseId = 7;
inline constexpr int kBlankId = 8;
inline constexpr int kNumSpecialTokens = 9;

extern const char* const kSpecialTokens[kNumSpecialTokens];

class Vocab {
 public:
  Vocab() = default;
  explicit Vocab(std::vector<std::string> tokens);

  int id(std::string_view token) const;  // kUnkId when unknown
  const std::string& token(int id) const;
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

// Lowercases and splits into alphanumeric runs; every other non-space byte is
// a single-character token. Bytes >= 0x80 count as letters.
std::vector<std::string> tokenize(std::string_view text);

// Builds a vocabulary from the training records: special tokens first, then
// corpus tokens by descending frequency (ties broken lexicographically).
Vocab build_vocab(const std::vector<MarkedSentence>& train_records);

void save_vocab(const Vocab& vocab, const std::filesystem::path& path);
Vocab load_vocab(const std::filesystem::path& path);

enum class Variant { Marked, Masked };
std::string to_string(Variant v);
Variant variant_from_string(std::string_view s);

// Inclusive token-index range [first, last].
struct TokenSpan {
  int first = 0;
  int last = 0;
  int size() const { return last - first + 1; }
  bool operator==(const TokenSpan&) const = default;
};

struct ExampleRecord {
  std::vector<int> token_ids;       // length max_seq_len
  std::vector<int> attention_mask;  // 1 for real tokens, 0 for padding
  TokenSpan e1_range;               // event tokens only, markers excluded
  TokenSpan e2_range;
  Label label = Label::Other;
  Variant variant = Variant::Marked;
  std::string sentence_id;
};

// Encodes one sentence to a fixed-length record:
//   [CLS] pre <m> event </m> mid <m> event </m> tail [SEP] [PAD]...
// Marker identity follows the event (e1 vs e2); order follows text position.
// Masked variant requires each event surface to be exactly "blank" and encodes
// it as a single [BLANK] token. Overlong tails are truncated; a sentence whose
// events cannot fit raises CorpusError.
ExampleRecord encode(const MarkedSentence& s, const Vocab& vocab, int max_seq_len,
                     Variant variant = Variant::Marked);

// Space-joined tokens of the non-padding positions.
std::string decode(const ExampleRecord& record, const Vocab& vocab);

// Structural checks: sizes, mask monotonicity, span sanity. Throws CorpusError.
void validate_record(const ExampleRecord& record, int max_seq_len, int vocab_size);

}  // namespace cbert
