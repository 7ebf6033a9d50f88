#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cbert {

enum class Label { CauseEffect, Other };
enum class Source { Semeval2007, Semeval2010, Ade, Synthetic };
enum class Split { Train, Test };

std::string to_string(Label l);
std::string to_string(Source s);
std::string to_string(Split s);
Label label_from_string(std::string_view s);
Source source_from_string(std::string_view s);
Split split_from_string(std::string_view s);

// Character range over a sentence, end exclusive.
struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool operator==(const CharSpan&) const = default;
};

// One curated example: a sentence with two marked event spans and a binary
// relation label. Text is stored tag-free; inline <e1>/<e2> markers exist
// only at parse and render boundaries.
struct MarkedSentence {
  std::string text;
  CharSpan e1;
  CharSpan e2;
  Label label = Label::Other;
  Source source = Source::Synthetic;
  Split split = Split::Train;
  std::string sentence_id;

  std::string_view e1_text() const {
    return std::string_view(text).substr(e1.begin, e1.size());
  }
  std::string_view e2_text() const {
    return std::string_view(text).substr(e2.begin, e2.size());
  }
  bool operator==(const MarkedSentence&) const = default;
};

struct CorpusError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parse error tied to a position in an input file.
struct ParseError : CorpusError {
  ParseError(const std::string& msg, long line)
      : CorpusError(msg + " (line " + std::to_string(line) + ")"), line_number(line) {}
  long line_number;
};

// Throws CorpusError unless both spans are non-empty, in bounds and disjoint.
void validate(const MarkedSentence& s);

// Re-inserts <e1>/<e2> markers at the stored spans. Inverse of parse_tagged:
// render_tagged(parse_tagged(x)) == x byte for byte.
std::string render_tagged(const MarkedSentence& s);

// Strips inline <e1>...</e1>, <e2>...</e2> markers and records the spans they
// covered. Only text/e1/e2 of the result are filled in. Throws CorpusError on
// missing, duplicated or nested tags.
MarkedSentence parse_tagged(std::string_view tagged);

}  // namespace cbert
