#include "electorate/weak_labels.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <stdexcept>

#include "electorate/rng.hpp"

namespace electorate::weak {
namespace {

// Decodes one UTF-8 codepoint at `i`, advancing it. Invalid bytes decode as
// U+FFFD and advance by one so normalization never gets stuck.
std::uint32_t next_codepoint(const std::string& s, std::size_t& i) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    const unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    std::uint32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return 0xFFFD;
    }
    if (i + len > s.size()) {
        ++i;
        return 0xFFFD;
    }
    for (int k = 1; k < len; ++k) {
        const unsigned char bk = byte(i + k);
        if ((bk & 0xC0) != 0x80) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (bk & 0x3F);
    }
    i += len;
    return cp;
}

struct FoldRange {
    std::uint32_t lo, hi;
    const char* base;
};

// Latin-1 supplement and Latin Extended-A folded to ASCII base letters.
constexpr FoldRange kFoldRanges[] = {
    {0x00C0, 0x00C5, "a"}, {0x00C6, 0x00C6, "ae"}, {0x00C7, 0x00C7, "c"},
    {0x00C8, 0x00CB, "e"}, {0x00CC, 0x00CF, "i"},  {0x00D0, 0x00D0, "d"},
    {0x00D1, 0x00D1, "n"}, {0x00D2, 0x00D6, "o"},  {0x00D8, 0x00D8, "o"},
    {0x00D9, 0x00DC, "u"}, {0x00DD, 0x00DD, "y"},  {0x00DE, 0x00DE, "th"},
    {0x00DF, 0x00DF, "ss"},
    {0x00E0, 0x00E5, "a"}, {0x00E6, 0x00E6, "ae"}, {0x00E7, 0x00E7, "c"},
    {0x00E8, 0x00EB, "e"}, {0x00EC, 0x00EF, "i"},  {0x00F0, 0x00F0, "d"},
    {0x00F1, 0x00F1, "n"}, {0x00F2, 0x00F6, "o"},  {0x00F8, 0x00F8, "o"},
    {0x00F9, 0x00FC, "u"}, {0x00FD, 0x00FD, "y"},  {0x00FE, 0x00FE, "th"},
    {0x00FF, 0x00FF, "y"},
    {0x0100, 0x0105, "a"}, {0x0106, 0x010D, "c"},  {0x010E, 0x0111, "d"},
    {0x0112, 0x011B, "e"}, {0x011C, 0x0123, "g"},  {0x0124, 0x0127, "h"},
    {0x0128, 0x0131, "i"}, {0x0132, 0x0133, "ij"}, {0x0134, 0x0135, "j"},
    {0x0136, 0x0138, "k"}, {0x0139, 0x0142, "l"},  {0x0143, 0x014B, "n"},
    {0x014C, 0x0151, "o"}, {0x0152, 0x0153, "oe"}, {0x0154, 0x0159, "r"},
    {0x015A, 0x0161, "s"}, {0x0162, 0x0167, "t"},  {0x0168, 0x0173, "u"},
    {0x0174, 0x0175, "w"}, {0x0176, 0x0178, "y"},  {0x0179, 0x017E, "z"},
    {0x017F, 0x017F, "s"},
};

void append_folded(std::string& out, std::uint32_t cp) {
    if (cp >= 'A' && cp <= 'Z') {
        out.push_back(static_cast<char>(cp - 'A' + 'a'));
        return;
    }
    if (cp >= 'a' && cp <= 'z') {
        out.push_back(static_cast<char>(cp));
        return;
    }
    for (const FoldRange& r : kFoldRanges) {
        if (cp >= r.lo && cp <= r.hi) {
            out += r.base;
            return;
        }
    }
    // Everything else (digits, punctuation, scripts outside the lexicon's
    // alphabet) is stripped.
}

void load_name_file(const std::filesystem::path& path, std::unordered_set<std::string>& out) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("lexicon: cannot open " + path.string());
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string name = normalize_name_token(line);
        if (!name.empty()) out.insert(name);
    }
}

}  // namespace

const char* to_string(Label l) noexcept {
    switch (l) {
        case Label::male: return "male";
        case Label::female: return "female";
        case Label::unknown: return "unknown";
    }
    return "unknown";
}

std::string normalize_name_token(const std::string& token) {
    std::string out;
    out.reserve(token.size());
    std::size_t i = 0;
    while (i < token.size()) append_folded(out, next_codepoint(token, i));
    return out;
}

NameLexicon load_lexicon(const std::filesystem::path& male_file,
                         const std::filesystem::path& female_file) {
    NameLexicon lex;
    load_name_file(male_file, lex.male_names);
    load_name_file(female_file, lex.female_names);

    for (auto it = lex.male_names.begin(); it != lex.male_names.end();) {
        if (lex.female_names.erase(*it) > 0) {
            lex.dropped_ambiguous.push_back(*it);
            it = lex.male_names.erase(it);
        } else {
            ++it;
        }
    }
    std::sort(lex.dropped_ambiguous.begin(), lex.dropped_ambiguous.end());
    return lex;
}

NameLexicon load_lexicon_dir(const std::filesystem::path& dir) {
    return load_lexicon(dir / "male_names.txt", dir / "female_names.txt");
}

Label label(const std::string& display_name, const NameLexicon& lexicon) {
    std::size_t start = 0;
    while (start < display_name.size() &&
           std::isspace(static_cast<unsigned char>(display_name[start])))
        ++start;
    std::size_t end = start;
    while (end < display_name.size() && !std::isspace(static_cast<unsigned char>(display_name[end])))
        ++end;

    const std::string token = normalize_name_token(display_name.substr(start, end - start));
    if (token.empty()) return Label::unknown;
    if (lexicon.male_names.count(token)) return Label::male;
    if (lexicon.female_names.count(token)) return Label::female;
    return Label::unknown;
}

std::vector<LabeledTensor> balance(const std::vector<LabeledTensor>& labeled, std::uint64_t seed) {
    std::vector<std::size_t> male_idx, female_idx;
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        switch (labeled[i].second.label) {
            case Label::male: male_idx.push_back(i); break;
            case Label::female: female_idx.push_back(i); break;
            case Label::unknown: break;
        }
    }
    if (male_idx.empty() || female_idx.empty())
        throw std::invalid_argument("balance: both classes must be non-empty");

    const std::size_t keep = std::min(male_idx.size(), female_idx.size());
    auto& majority = male_idx.size() > female_idx.size() ? male_idx : female_idx;

    std::mt19937_64 gen(seed);
    deterministic_shuffle(majority, gen);
    majority.resize(keep);

    std::vector<std::size_t> selected;
    selected.reserve(2 * keep);
    selected.insert(selected.end(), male_idx.begin(), male_idx.end());
    selected.insert(selected.end(), female_idx.begin(), female_idx.end());
    std::sort(selected.begin(), selected.end());

    std::vector<LabeledTensor> out;
    out.reserve(selected.size());
    for (std::size_t i : selected) out.push_back(labeled[i]);
    return out;
}

}  // namespace electorate::weak
