#include "cbert/types.hpp"

#include <array>

namespace cbert {

std::string to_string(Label l) {
  return l == Label::CauseEffect ? "Cause-Effect" : "Other";
}

std::string to_string(Source s) {
  switch (s) {
    case Source::Semeval2007: return "semeval2007";
    case Source::Semeval2010: return "semeval2010";
    case Source::Ade: return "ade";
    case Source::Synthetic: return "synthetic";
  }
  return "unknown";
}

std::string to_string(Split s) {
  return s == Split::Train ? "train" : "test";
}

Label label_from_string(std::string_view s) {
  if (s == "Cause-Effect") return Label::CauseEffect;
  if (s == "Other") return Label::Other;
  throw CorpusError("unknown label: " + std::string(s));
}

Source source_from_string(std::string_view s) {
  if (s == "semeval2007") return Source::Semeval2007;
  if (s == "semeval2010") return Source::Semeval2010;
  if (s == "ade") return Source::Ade;
  if (s == "synthetic") return Source::Synthetic;
  throw CorpusError("unknown source: " + std::string(s));
}

Split split_from_string(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "test") return Split::Test;
  throw CorpusError("unknown split: " + std::string(s));
}

void validate(const MarkedSentence& s) {
  auto check_span = [&](const CharSpan& sp, const char* name) {
    if (sp.begin >= sp.end)
      throw CorpusError("empty " + std::string(name) + " span in sentence " + s.sentence_id);
    if (sp.end > s.text.size())
      throw CorpusError(std::string(name) + " span out of bounds in sentence " + s.sentence_id);
  };
  check_span(s.e1, "e1");
  check_span(s.e2, "e2");
  const bool disjoint = s.e1.end <= s.e2.begin || s.e2.end <= s.e1.begin;
  if (!disjoint)
    throw CorpusError("event spans overlap in sentence " + s.sentence_id);
}

std::string render_tagged(const MarkedSentence& s) {
  struct Tag {
    std::size_t pos;
    const char* text;
  };
  // Insert from the back so earlier offsets stay valid.
  std::array<Tag, 4> tags = {{{s.e1.begin, "<e1>"},
                              {s.e1.end, "</e1>"},
                              {s.e2.begin, "<e2>"},
                              {s.e2.end, "</e2>"}}};
  if (s.e2.begin < s.e1.begin)
    tags = {{{s.e2.begin, "<e2>"},
             {s.e2.end, "</e2>"},
             {s.e1.begin, "<e1>"},
             {s.e1.end, "</e1>"}}};
  std::string out = s.text;
  for (std::size_t i = tags.size(); i-- > 0;)
    out.insert(tags[i].pos, tags[i].text);
  return out;
}

MarkedSentence parse_tagged(std::string_view tagged) {
  struct Marker {
    std::string_view open, close;
  };
  auto find_once = [&](std::string_view needle) {
    const std::size_t pos = tagged.find(needle);
    if (pos == std::string_view::npos)
      throw CorpusError("missing " + std::string(needle) + " tag");
    if (tagged.find(needle, pos + needle.size()) != std::string_view::npos)
      throw CorpusError("duplicate " + std::string(needle) + " tag");
    return pos;
  };

  const std::size_t o1 = find_once("<e1>");
  const std::size_t c1 = find_once("</e1>");
  const std::size_t o2 = find_once("<e2>");
  const std::size_t c2 = find_once("</e2>");
  if (c1 < o1 || c2 < o2)
    throw CorpusError("event close tag precedes its open tag");
  const bool e1_first = o1 < o2;
  const std::size_t first_open = e1_first ? o1 : o2;
  const std::size_t first_close = e1_first ? c1 : c2;
  const std::size_t second_open = e1_first ? o2 : o1;
  const std::size_t second_close = e1_first ? c2 : c1;
  if (!(first_close < second_open))
    throw CorpusError("event tags overlap or nest");

  MarkedSentence out;
  out.text.reserve(tagged.size());
  CharSpan first_span, second_span;
  // first segment | first event | middle | second event | tail
  out.text.append(tagged.substr(0, first_open));
  first_span.begin = out.text.size();
  out.text.append(tagged.substr(first_open + 4, first_close - (first_open + 4)));
  first_span.end = out.text.size();
  out.text.append(tagged.substr(first_close + 5, second_open - (first_close + 5)));
  second_span.begin = out.text.size();
  out.text.append(tagged.substr(second_open + 4, second_close - (second_open + 4)));
  second_span.end = out.text.size();
  out.text.append(tagged.substr(second_close + 5));

  out.e1 = e1_first ? first_span : second_span;
  out.e2 = e1_first ? second_span : first_span;
  return out;
}

}  // namespace cbert
