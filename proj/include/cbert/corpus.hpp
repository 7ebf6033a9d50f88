#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cbert/types.hpp"

namespace cbert {

// ---------------------------------------------------------------------------
// SemEval parsers

// SemEval-2010 Task 8 distribution: blocks of
//   <id>\t"<sentence with inline <e1>/<e2> tags>"
//   <relation>
//   Comment...
// separated by blank lines.
std::vector<MarkedSentence> parse_semeval2010(std::istream& in, Split split);

// SemEval-2007 Task 4 per-relation files. The directory must contain one file
// per relation number 1..7, recognized by "relation-<n>" in its file name.
// Examples from the Cause-Effect relation judged "true" become CauseEffect,
// everything else becomes Other.
std::vector<MarkedSentence> parse_semeval2007(const std::filesystem::path& dir, Split split);

// Folds any directed Cause-Effect relation string into one class.
Label binarize_relation(std::string_view relation);

// ---------------------------------------------------------------------------
// ADE corpus

// Unique lowercase drug and effect surface strings, collected from the
// annotated positive corpus.
struct AdeLexicon {
  std::set<std::string> drugs;
  std::set<std::string> effects;
};

AdeLexicon build_ade_lexicon(const std::vector<MarkedSentence>& positives);

// First two non-overlapping lexicon mentions (case-insensitive, word-bounded,
// longest match first, left to right) become e1 and e2. Returns nothing when
// fewer than two mentions are found.
std::optional<MarkedSentence> annotate_negative(std::string_view sentence,
                                                const AdeLexicon& lexicon);

// Target test-split fractions per class. Defaults keep the curated corpus at
// the published train/test class balance for this dataset.
struct AdeSplitOptions {
  double test_fraction_cause_effect = 1341.0 / 6720.0;
  double test_fraction_other = 935.0 / 4503.0;
};

struct AdeCurationReport {
  long positive_lines = 0;
  long positive_records = 0;
  long offset_fallbacks = 0;   // offsets disagreed with the quoted strings
  long positives_skipped = 0;  // surface not found or spans overlapped
  long negative_lines = 0;
  long negatives_annotated = 0;
  long negatives_excluded = 0;  // fewer than two lexicon mentions
  std::vector<std::string> warnings;
};

struct AdeParseResult {
  std::vector<MarkedSentence> records;
  AdeLexicon lexicon;
  AdeCurationReport report;
};

// positive_file: pipe-delimited drug / adverse-effect relation records
//   PMID|SENTENCE|EFFECT|BEGIN|END|DRUG|BEGIN|END   (offsets end-exclusive)
// negative_file: "<PMID> NEG <sentence>" lines.
// Positives become CauseEffect records (e1 = effect, e2 = drug); negatives are
// lexicon-annotated Other records, one per sentence. Records are assigned to
// train/test by a deterministic per-class hash split on sentence id.
AdeParseResult parse_ade(std::istream& positive_file, std::istream& negative_file,
                         const AdeSplitOptions& split = {});

// ---------------------------------------------------------------------------
// Shared curation operations

// Replaces both event surfaces with the literal token "blank" and updates the
// spans. Idempotent; label, source, split and id are preserved.
MarkedSentence mask_events(const MarkedSentence& s);

struct StatsRow {
  Source source;
  Split split;
  long total = 0;
  long cause_effect = 0;
  long other = 0;
  long max_sentence_length_tokens = 0;
};

struct CorpusStats {
  std::vector<StatsRow> rows;  // sorted by (source, split)
  std::vector<std::string> notes;
};

CorpusStats corpus_stats(const std::vector<MarkedSentence>& records);
std::string render_stats_text(const CorpusStats& stats);

// ---------------------------------------------------------------------------
// Synthetic corpus

enum class SyntheticFamily { A, B };

// Deterministic templated corpus over a nonsense-noun vocabulary, balanced
// between causal and non-causal templates. Families use disjoint template
// sets and vocabularies so they act as two different data distributions.
std::vector<MarkedSentence> generate_synthetic(int n_per_class, std::uint64_t seed,
                                               SyntheticFamily family = SyntheticFamily::A,
                                               Split split = Split::Train);

// ---------------------------------------------------------------------------
// Line-delimited record files (one JSON object per line, UTF-8)

void export_records(const std::vector<MarkedSentence>& records, std::ostream& out);
void export_records(const std::vector<MarkedSentence>& records,
                    const std::filesystem::path& path);
std::vector<MarkedSentence> import_records(std::istream& in);
std::vector<MarkedSentence> import_records(const std::filesystem::path& path);

}  // namespace cbert
