#pragma once
// Weak gender labels from display names via a given-name lexicon, plus the
// 1:1 class balancing used to assemble training sets.

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "electorate/gender.hpp"
#include "electorate/image.hpp"

namespace electorate::weak {

enum class Label : std::uint8_t { male = 0, female = 1, unknown = 2 };

const char* to_string(Label l) noexcept;

struct WeakLabel {
    std::uint64_t user_id = 0;
    Label label = Label::unknown;
};

// Disjoint sets of normalized lowercase given names. Names appearing in both
// source files are ambiguous and get dropped from both sides at load time;
// they are reported so a curated lexicon can fix them upstream.
struct NameLexicon {
    std::unordered_set<std::string> male_names;
    std::unordered_set<std::string> female_names;
    std::vector<std::string> dropped_ambiguous;
};

// Files: UTF-8, one name per line, '#' starts a comment line.
NameLexicon load_lexicon(const std::filesystem::path& male_file,
                         const std::filesystem::path& female_file);
// Convenience: <dir>/male_names.txt and <dir>/female_names.txt.
NameLexicon load_lexicon_dir(const std::filesystem::path& dir);

// Case folding plus diacritic stripping for Latin-1 / Latin Extended-A, then
// non-letters removed. "María" and "MARIA" normalize identically.
std::string normalize_name_token(const std::string& token);

// First whitespace-delimited token of the display name, normalized and looked
// up. Pure function; empty or unmatched names come back unknown.
Label label(const std::string& display_name, const NameLexicon& lexicon);

using LabeledTensor = std::pair<img::FaceTensor, WeakLabel>;

// Downsamples the majority class without replacement using the seeded
// generator, keeping input order. Unknown-labeled entries never survive.
// Result has exactly min(n_male, n_female) of each class; identical for a
// fixed seed. Throws std::invalid_argument when either class is empty.
std::vector<LabeledTensor> balance(const std::vector<LabeledTensor>& labeled, std::uint64_t seed);

}  // namespace electorate::weak
