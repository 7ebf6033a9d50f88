#include "fixtures.hpp"

#include <unistd.h>

#include <cassert>
#include <fstream>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace fixtures {

namespace {

// True for exactly k of the indices 0..n-1, spread evenly.
bool spread(long i, long k, long n) {
  return ((i + 1) * k) / n > (i * k) / n;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write fixture file " + p.string());
  return out;
}

// ---------------------------------------------------------------------------
// Shared word pools for the relation-classification fixtures.

const char* kAgents[] = {"storm",   "engine",    "virus",   "committee", "painting", "river",
                         "factory", "singer",    "glacier", "battery",   "satellite",
                         "orchestra", "reporter", "volcano", "council",  "chipset"};
const char* kPatients[] = {"bridge",  "harvest", "market",  "library", "cathedral", "pipeline",
                           "vineyard", "reactor", "stadium", "archive", "garden",    "antenna",
                           "canal",   "mill",    "depot",   "quarry"};
const char* kVerbs[] = {"caused",    "produced", "contained", "followed",  "inspected",
                        "described", "supplied", "carried",   "triggered", "absorbed",
                        "generated", "surrounded"};
const char* kTails[] = {"overnight", "last week", "for years", "during the test",
                        "at the northern site", "without warning"};
const char* kModifiers[] = {"winter", "massive", "wooden", "abandoned", "central"};

template <std::size_t N>
const char* pick(std::mt19937_64& rng, const char* (&pool)[N]) {
  return pool[rng() % N];
}

std::string event_surface(std::mt19937_64& rng, const char* noun) {
  if (rng() % 3 == 0) return std::string(pick(rng, kModifiers)) + " " + noun;
  return noun;
}

// One tagged sentence with the first entity before the second.
std::string tagged_sentence(std::mt19937_64& rng) {
  const std::string a = event_surface(rng, pick(rng, kAgents));
  const std::string b = event_surface(rng, pick(rng, kPatients));
  const std::string v = pick(rng, kVerbs);
  const std::string t = pick(rng, kTails);
  switch (rng() % 3) {
    case 0:
      return "The <e1>" + a + "</e1> " + v + " the <e2>" + b + "</e2> " + t + ".";
    case 1:
      return "A <e1>" + a + "</e1> near the coast " + v + " a <e2>" + b + "</e2>.";
    default:
      return "The <e1>" + a + "</e1> that " + v + " the <e2>" + b + "</e2> was famous.";
  }
}

// ---------------------------------------------------------------------------
// ADE name pools.

std::vector<std::string> drug_pool() {
  static const char* pre[] = {"flu",    "dex",   "metho", "cipro", "vanco", "ami",  "keto",
                              "predni", "carba", "levo",  "oxa",   "ranit", "gaba", "sulfa",
                              "theo",   "halo",  "riva",  "zido",  "lamo",  "metro"};
  static const char* suf[] = {"mycin",  "pride", "zole", "statin", "cillin",
                              "profen", "mide",  "pine", "barbital"};
  std::vector<std::string> out;
  for (const char* p : pre)
    for (const char* s : suf) out.push_back(std::string(p) + s);
  return out;
}

std::vector<std::string> effect_pool() {
  static const char* pre[] = {"hyper",   "hypo",   "brady",  "tachy", "neuro",
                              "hepato",  "nephro", "cardio", "dermo", "hemato"};
  static const char* root[] = {"kalemia", "glycemia", "toxicity", "pathy",  "penia",  "trophy",
                               "phagia",  "plegia",   "lysis",    "rrhea",  "stasis", "rrhagia"};
  static const char* adj[] = {"acute",       "chronic",    "severe",    "transient",
                              "persistent",  "recurrent",  "progressive", "reversible",
                              "fulminant",   "refractory"};
  static const char* noun[] = {"rash",        "anemia",      "seizures", "psychosis",
                               "neutropenia", "hypotension", "bradycardia", "hepatitis",
                               "delirium",    "edema",       "jaundice", "tremor"};
  std::vector<std::string> out;
  for (const char* p : pre)
    for (const char* r : root) out.push_back(std::string(p) + r);
  for (const char* a : adj)
    for (const char* n : noun) out.push_back(std::string(a) + " " + n);
  return out;
}

struct PositiveSentence {
  std::string text;
  std::string effect;
  std::string drug;
};

PositiveSentence positive_sentence(int variant, const std::string& e, const std::string& d) {
  switch (variant % 5) {
    case 0:
      return {"We report a case of " + e + " associated with " + d + " therapy.", e, d};
    case 1:
      return {e + " developed in a patient receiving " + d + ".", e, d};
    case 2:
      return {"A 54 year old woman developed " + e + " after treatment with " + d + ".", e, d};
    case 3:
      return {"Treatment with " + d + " was complicated by " + e + ".", e, d};
    default:
      return {e + " occurred during " + d + " administration.", e, d};
  }
}

}  // namespace

std::filesystem::path scratch_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("cbert-fixture-" + tag + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------------------

namespace {

void write_semeval2010_split(const std::filesystem::path& file, long total, long cause_effect,
                             long first_id, std::mt19937_64& rng) {
  static const char* kOtherRelations[] = {
      "Component-Whole(e1,e2)",    "Instrument-Agency(e2,e1)", "Member-Collection(e1,e2)",
      "Entity-Destination(e1,e2)", "Content-Container(e2,e1)", "Message-Topic(e1,e2)",
      "Product-Producer(e2,e1)",   "Entity-Origin(e1,e2)",     "Other"};
  auto out = open_out(file);
  long ce_seen = 0;
  long other_seen = 0;
  for (long i = 0; i < total; ++i) {
    out << (first_id + i) << "\t\"" << tagged_sentence(rng) << "\"\n";
    if (spread(i, cause_effect, total)) {
      out << (ce_seen % 2 == 0 ? "Cause-Effect(e1,e2)" : "Cause-Effect(e2,e1)") << "\n";
      ++ce_seen;
    } else {
      out << kOtherRelations[other_seen % 9] << "\n";
      ++other_seen;
    }
    out << "Comment:\n\n";
  }
  assert(ce_seen == cause_effect);
}

}  // namespace

void write_semeval2010(const std::filesystem::path& train_file,
                       const std::filesystem::path& test_file, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  write_semeval2010_split(train_file, 8000, 1003, 1, rng);
  write_semeval2010_split(test_file, 2717, 134, 8001, rng);
}

// ---------------------------------------------------------------------------

namespace {

const char* kRelations2007[] = {"Cause-Effect",  "Instrument-Agency", "Product-Producer",
                                "Origin-Entity", "Theme-Tool",        "Part-Whole",
                                "Content-Container"};

std::string lower_copy(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

void write_semeval2007_file(const std::filesystem::path& dir, int relation_number, long total,
                            long judged_true, const char* split_tag, std::mt19937_64& rng) {
  const std::string rel = kRelations2007[relation_number - 1];
  const auto file = dir / ("relation-" + std::to_string(relation_number) + "-" +
                           lower_copy(rel) + "-" + split_tag + ".txt");
  auto out = open_out(file);
  char id[24];
  for (long i = 0; i < total; ++i) {
    std::snprintf(id, sizeof id, "%03ld", i + 1);
    const bool truth = spread(i, judged_true, total);
    const char* dir_args = i % 2 == 0 ? "(e1, e2)" : "(e2, e1)";
    out << id << " \"" << tagged_sentence(rng) << "\"\n";
    out << rel << dir_args << " = \"" << (truth ? "true" : "false")
        << "\", Query = \"" << pick(rng, kVerbs) << "\"\n";
    out << "WordNet(e1) = \"n/a\", WordNet(e2) = \"n/a\"\n";
    out << "Comment:\n\n";
  }
}

}  // namespace

void write_semeval2007(const std::filesystem::path& train_dir,
                       const std::filesystem::path& test_dir, std::uint64_t seed) {
  std::mt19937_64 rng(seed + 1);
  std::filesystem::create_directories(train_dir);
  std::filesystem::create_directories(test_dir);
  for (int n = 1; n <= 7; ++n) {
    const long true_train = n == 1 ? 80 : 70;
    write_semeval2007_file(train_dir, n, 140, true_train, "training", rng);
  }
  static const long kTestTotals[7] = {80, 79, 78, 78, 78, 78, 78};
  for (int n = 1; n <= 7; ++n) {
    const long true_test = n == 1 ? 46 : kTestTotals[n - 1] / 2;
    write_semeval2007_file(test_dir, n, kTestTotals[n - 1], true_test, "test", rng);
  }
}

// ---------------------------------------------------------------------------

AdeFixturePlan write_ade(const std::filesystem::path& positive_file,
                         const std::filesystem::path& negative_file, std::uint64_t seed) {
  const auto drugs = drug_pool();
  const auto effects = effect_pool();
  assert(drugs.size() == 180 && effects.size() == 240);
  {
    std::set<std::string> uniq(drugs.begin(), drugs.end());
    uniq.insert(effects.begin(), effects.end());
    assert(uniq.size() == drugs.size() + effects.size());
  }

  AdeFixturePlan plan;
  plan.drug_names = static_cast<int>(drugs.size());
  plan.effect_names = static_cast<int>(effects.size());

  const long kPositiveLines = 6727;
  const long pmid_base = 10000000 + static_cast<long>(seed % 1000);

  auto pos = open_out(positive_file);
  long line_idx = 0;
  long group = 0;
  while (line_idx < kPositiveLines) {
    const bool paired = group % 12 == 7 && line_idx + 1 < kPositiveLines;
    const long pmid = pmid_base + group;

    std::string sentence;
    std::vector<std::pair<std::string, std::string>> pairs;  // (effect, drug) per line
    if (paired) {
      const std::string& ea = effects[line_idx % 240];
      const std::string& eb = effects[(line_idx + 97) % 240];
      const std::string& d = drugs[line_idx % 180];
      sentence = "Both " + ea + " and " + eb + " were attributed to " + d + ".";
      pairs = {{ea, d}, {eb, d}};
    } else {
      const auto built = positive_sentence(static_cast<int>(line_idx % 5),
                                           effects[line_idx % 240], drugs[line_idx % 180]);
      sentence = built.text;
      pairs = {{built.effect, built.drug}};
    }

    for (const auto& [effect, drug] : pairs) {
      const bool unresolvable = line_idx % 960 == 500;
      const bool stale = !unresolvable && line_idx % 20 == 3;

      std::string effect_field = effect;
      long eb = static_cast<long>(sentence.find(effect));
      long ee = eb + static_cast<long>(effect.size());
      long db = static_cast<long>(sentence.find(drug));
      long de = db + static_cast<long>(drug.size());
      assert(eb >= 0 && db >= 0);

      if (unresolvable) {
        effect_field = "phantomreaction";
        ++plan.positives_unresolvable;
      } else if (stale) {
        eb += 137;
        ee += 137;
        db += 137;
        de += 137;
        ++plan.positives_with_stale_offsets;
      }

      pos << pmid << '|' << sentence << '|' << effect_field << '|' << eb << '|' << ee << '|'
          << drug << '|' << db << '|' << de << '\n';
      ++plan.positive_lines;
      ++line_idx;
    }
    ++group;
  }
  assert(plan.positive_lines == kPositiveLines);
  assert(plan.positives_unresolvable == 7);

  const long kNegativeLines = 4800;
  const long kExcluded = 297;
  auto neg = open_out(negative_file);
  for (long i = 0; i < kNegativeLines; ++i) {
    const long pmid = 20000000 + i;
    const std::string& d = drugs[i % 180];
    const std::string& e = effects[i % 240];
    std::string sentence;
    if (spread(i, kExcluded, kNegativeLines)) {
      switch (i % 3) {
        case 0: sentence = "No adverse events were recorded for " + d + "."; break;
        case 1: sentence = "The study followed twelve patients over two years."; break;
        default: sentence = "Routine monitoring continued without incident."; break;
      }
      ++plan.negatives_excluded;
    } else if (i % 10 == 9) {
      sentence = "Therapy combining " + d + " and " + drugs[(i + 53) % 180] +
                 " was well tolerated.";
      ++plan.negatives_annotatable;
    } else {
      switch (i % 3) {
        case 0: sentence = d + " was administered and no " + e + " was observed."; break;
        case 1: sentence = "Patients on " + d + " showed no signs of " + e + "."; break;
        default: sentence = e + " did not recur after " + d + " was withdrawn."; break;
      }
      ++plan.negatives_annotatable;
    }
    neg << pmid << " NEG " << sentence << '\n';
    ++plan.negative_lines;
  }
  assert(plan.negatives_annotatable == 4503);
  assert(plan.negatives_excluded == kExcluded);
  return plan;
}

}  // namespace fixtures
