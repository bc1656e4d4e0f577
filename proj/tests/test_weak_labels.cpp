#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "electorate/weak_labels.hpp"

namespace fs = std::filesystem;
using namespace electorate::weak;
using electorate::img::FaceTensor;

#ifndef ELECTORATE_DATA_DIR
#define ELECTORATE_DATA_DIR "data"
#endif

namespace {

const NameLexicon& shipped_lexicon() {
    static const NameLexicon lex =
        load_lexicon_dir(fs::path(ELECTORATE_DATA_DIR) / "lexicon");
    return lex;
}

fs::path write_lexicon(const std::string& name, const std::string& male,
                       const std::string& female) {
    const fs::path dir = fs::path("weak_test_tmp") / name;
    fs::create_directories(dir);
    std::ofstream(dir / "male_names.txt") << male;
    std::ofstream(dir / "female_names.txt") << female;
    return dir;
}

LabeledTensor entry(std::uint64_t user, Label l) {
    FaceTensor t;
    t.user_id = user;
    t.data[0] = static_cast<double>(user);  // marker to track selections
    return {t, WeakLabel{user, l}};
}

}  // namespace

TEST_CASE("shipped lexicon labels the canonical examples") {
    const auto& lex = shipped_lexicon();
    CHECK(lex.dropped_ambiguous.empty());
    CHECK(label("David Smith", lex) == Label::male);
    CHECK(label("John", lex) == Label::male);
    CHECK(label("Luke Skywalker", lex) == Label::male);
    CHECK(label("Michael B.", lex) == Label::male);
    CHECK(label("Caroline", lex) == Label::female);
    CHECK(label("Elizabeth Warren", lex) == Label::female);
    CHECK(label("Emily", lex) == Label::female);
    CHECK(label("Isabella Rossellini", lex) == Label::female);
    CHECK(label("Maria Lopez", lex) == Label::female);
    CHECK(label("xX_gamer_Xx", lex) == Label::unknown);
    CHECK(label("", lex) == Label::unknown);
}

TEST_CASE("diacritics and case folding") {
    const auto& lex = shipped_lexicon();
    CHECK(label("María López", lex) == Label::female);
    CHECK(label("MARIA", lex) == Label::female);
    CHECK(label("José García", lex) == Label::male);
    CHECK(label("JOSÉ", lex) == Label::male);
    CHECK(label("  david  ", lex) == Label::male);  // leading whitespace skipped
}

TEST_CASE("only the first token is matched") {
    const auto& lex = shipped_lexicon();
    // A female surname after an unknown first token must not match.
    CHECK(label("Mx Maria", lex) == Label::unknown);
    CHECK(label("Dr. David", lex) == Label::unknown);
}

TEST_CASE("normalize_name_token") {
    CHECK(normalize_name_token("David") == "david");
    CHECK(normalize_name_token("María") == "maria");
    CHECK(normalize_name_token("Łukasz") == "lukasz");
    CHECK(normalize_name_token("J0hn!") == "jhn");
    CHECK(normalize_name_token("Ñandú") == "nandu");
    CHECK(normalize_name_token("Œuvre") == "oeuvre");
    CHECK(normalize_name_token("日本語").empty());
    CHECK(normalize_name_token("💥boom") == "boom");
}

TEST_CASE("ambiguous names are dropped from both sides and reported") {
    const auto dir = write_lexicon("ambiguous", "alex\nbob\n", "alex\ncarol\n");
    const auto lex = load_lexicon_dir(dir);
    CHECK(lex.dropped_ambiguous == std::vector<std::string>{"alex"});
    CHECK(label("alex", lex) == Label::unknown);
    CHECK(label("bob", lex) == Label::male);
    CHECK(label("carol", lex) == Label::female);
}

TEST_CASE("comment lines and blank lines are skipped") {
    const auto dir = write_lexicon("comments", "# header\n\nbob\n# trailing\n", "carol # inline\n");
    const auto lex = load_lexicon_dir(dir);
    CHECK(lex.male_names.size() == 1);
    CHECK(label("carol", lex) == Label::female);
}

TEST_CASE("balance downsamples the majority class to the minority count") {
    std::vector<LabeledTensor> data;
    for (std::uint64_t i = 0; i < 10; ++i) data.push_back(entry(i, Label::male));
    for (std::uint64_t i = 10; i < 14; ++i) data.push_back(entry(i, Label::female));

    const auto out = balance(data, 1);
    std::size_t males = 0, females = 0;
    for (const auto& [t, wl] : out) (wl.label == Label::male ? males : females) += 1;
    CHECK(males == 4);
    CHECK(females == 4);
}

TEST_CASE("already balanced input is unchanged") {
    std::vector<LabeledTensor> data;
    for (std::uint64_t i = 0; i < 7; ++i) data.push_back(entry(i, Label::male));
    for (std::uint64_t i = 7; i < 14; ++i) data.push_back(entry(i, Label::female));
    const auto out = balance(data, 9);
    REQUIRE(out.size() == 14);
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i].second.user_id == i);
}

TEST_CASE("unknown labels never enter the balanced output") {
    std::vector<LabeledTensor> data;
    data.push_back(entry(1, Label::male));
    data.push_back(entry(2, Label::unknown));
    data.push_back(entry(3, Label::female));
    data.push_back(entry(4, Label::unknown));
    const auto out = balance(data, 0);
    REQUIRE(out.size() == 2);
    CHECK(out[0].second.user_id == 1);
    CHECK(out[1].second.user_id == 3);
}

TEST_CASE("balance is deterministic per seed and varies across seeds") {
    std::vector<LabeledTensor> data;
    for (std::uint64_t i = 0; i < 1000; ++i) data.push_back(entry(i, Label::male));
    for (std::uint64_t i = 1000; i < 1200; ++i) data.push_back(entry(i, Label::female));

    auto ids_of = [](const std::vector<LabeledTensor>& v) {
        std::vector<std::uint64_t> ids;
        for (const auto& [t, wl] : v) ids.push_back(wl.user_id);
        return ids;
    };
    const auto a = ids_of(balance(data, 123));
    const auto b = ids_of(balance(data, 123));
    const auto c = ids_of(balance(data, 124));
    CHECK(a == b);
    CHECK(a != c);

    // Output preserves input order.
    for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i] > a[i - 1]);
}

TEST_CASE("a class with zero examples is an error") {
    std::vector<LabeledTensor> data;
    data.push_back(entry(1, Label::male));
    data.push_back(entry(2, Label::unknown));
    CHECK_THROWS_AS(balance(data, 0), std::invalid_argument);
}

TEST_CASE("balanced class counts are exactly equal on random inputs") {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<LabeledTensor> data;
        const std::size_t nm = 1 + gen() % 50, nf = 1 + gen() % 50, nu = gen() % 20;
        for (std::size_t i = 0; i < nm; ++i) data.push_back(entry(gen(), Label::male));
        for (std::size_t i = 0; i < nf; ++i) data.push_back(entry(gen(), Label::female));
        for (std::size_t i = 0; i < nu; ++i) data.push_back(entry(gen(), Label::unknown));
        const auto out = balance(data, trial);
        std::size_t males = 0, females = 0;
        for (const auto& [t, wl] : out) (wl.label == Label::male ? males : females) += 1;
        CHECK(males == females);
        CHECK(males == std::min(nm, nf));
    }
}
