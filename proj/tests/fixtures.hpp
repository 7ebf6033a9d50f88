#pragma once

// Generators for corpus files in the official distribution formats, at the
// published scale, so the parsers can be exercised end-to-end without
// shipping the corpora themselves.

#include <cstdint>
#include <filesystem>
#include <string>

namespace fixtures {

// Fresh empty directory under the system temp dir, unique per process+tag.
std::filesystem::path scratch_dir(const std::string& tag);

// Relation-classification release layout: one block per example
// ("<id>\t\"<tagged sentence>\"" / relation line / Comment line / blank).
// Train: 8000 examples, 1003 of them Cause-Effect (argument order mixed).
// Test: 2717 examples, 134 Cause-Effect.
void write_semeval2010(const std::filesystem::path& train_file,
                       const std::filesystem::path& test_file, std::uint64_t seed);

// Seven per-relation files per split directory, named relation-<n>-....txt,
// blocks of numbered sentence / judgment line / WordNet line / Comment line.
// Train: 140 per relation (Cause-Effect file: 80 true). Test: 80 + 79 + 78x5
// (Cause-Effect file: 46 true).
void write_semeval2007(const std::filesystem::path& train_dir,
                       const std::filesystem::path& test_dir, std::uint64_t seed);

struct AdeFixturePlan {
  long positive_lines = 0;       // relation lines written
  long positives_unresolvable = 0;  // surfaces absent from their sentence
  long positives_with_stale_offsets = 0;  // resolvable only by searching
  long negative_lines = 0;
  long negatives_annotatable = 0;  // carry two or more lexicon mentions
  long negatives_excluded = 0;     // fewer than two mentions
  int drug_names = 0;
  int effect_names = 0;
};

// Drug-effect relation file (8 pipe-delimited fields) and negative-sentence
// file ("<PMID> NEG <sentence>"). 6727 relation lines of which 7 are
// unresolvable, leaving 6720 usable positives; 4800 negative lines of which
// 4503 carry two lexicon mentions.
AdeFixturePlan write_ade(const std::filesystem::path& positive_file,
                         const std::filesystem::path& negative_file, std::uint64_t seed);

}  // namespace fixtures
