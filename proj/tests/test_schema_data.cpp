#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <set>

#include "cf/corpus.hpp"
#include "cf/schema.hpp"

using namespace cf;

namespace {

std::vector<std::string> six_labels() {
    return {"NIL", "Conflict:Attack", "Conflict:Demonstrate", "Movement:Transport",
            "Contact:Meet", "Contact:PhoneWrite"};
}

std::string temp_path(const char* name) {
    return std::string("/tmp/cf_schema_test_") + name;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    out << body;
}

}  // namespace

TEST_CASE("LabelSchema basic accessors") {
    LabelSchema s = LabelSchema::from_labels(six_labels());
    CHECK(s.num_labels() == 6);
    CHECK(s.label(0) == "NIL");
    CHECK(s.label(3) == "Movement:Transport");
    CHECK(s.id_of("Contact:Meet") == 4);
    CHECK(s.id_of("NIL") == 0);
    CHECK(s.id_of("Bogus:Label") == -1);
    CHECK(s.coarse_of(0) == "");
    CHECK(s.coarse_of(1) == "Conflict");
    CHECK(s.coarse_of(5) == "Contact");
}

TEST_CASE("LabelSchema sibling relation") {
    LabelSchema s = LabelSchema::from_labels(six_labels());
    CHECK(s.siblings(1, 2));       // both Conflict
    CHECK(s.siblings(4, 5));       // both Contact
    CHECK_FALSE(s.siblings(1, 3)); // different coarse
    CHECK_FALSE(s.siblings(1, 1)); // same label
    CHECK_FALSE(s.siblings(0, 1)); // NIL never a sibling
    CHECK_FALSE(s.siblings(1, 0));
}

TEST_CASE("LabelSchema coarse types and subtypes keep label order") {
    LabelSchema s = LabelSchema::from_labels(six_labels());
    CHECK(s.coarse_types() == std::vector<std::string>{"Conflict", "Movement", "Contact"});
    CHECK(s.subtypes_of("Conflict") == std::vector<int>{1, 2});
    CHECK(s.subtypes_of("Movement") == std::vector<int>{3});
    CHECK(s.subtypes_of("Contact") == std::vector<int>{4, 5});
    CHECK(s.subtypes_of("Nope").empty());
}

TEST_CASE("LabelSchema rejects malformed label sets") {
    CHECK_THROWS_AS(LabelSchema::from_labels({}), ConfigError);
    CHECK_THROWS_AS(LabelSchema::from_labels({"Conflict:Attack", "NIL"}), ConfigError);
    CHECK_THROWS_AS(LabelSchema::from_labels({"NIL", "NIL"}), ConfigError);
    CHECK_THROWS_AS(LabelSchema::from_labels({"NIL", "NoColon"}), ConfigError);
    CHECK_THROWS_AS(LabelSchema::from_labels({"NIL", "A:B", "A:B"}), ConfigError);
    CHECK_THROWS_AS(LabelSchema::from_labels({"NIL", ":B"}), ConfigError);
    CHECK_THROWS_AS(LabelSchema::from_labels({"NIL", "A:"}), ConfigError);
}

TEST_CASE("Vocabulary reserves UNK and PAD and assigns ids in order") {
    Vocabulary v;
    CHECK(v.size() == 2);
    CHECK(v.token(Vocabulary::kUnk) == "<UNK>");
    CHECK(v.token(Vocabulary::kPad) == "<PAD>");

    CHECK(v.add_or_get("alpha") == 2);
    CHECK(v.add_or_get("beta") == 3);
    CHECK(v.add_or_get("alpha") == 2);
    CHECK(v.size() == 4);

    CHECK(v.lookup("beta") == 3);
    CHECK(v.lookup("gamma") == Vocabulary::kUnk);
}

TEST_CASE("Vocabulary hash is stable and content-sensitive") {
    Vocabulary a, b, c;
    a.add_or_get("x");
    a.add_or_get("y");
    b.add_or_get("x");
    b.add_or_get("y");
    c.add_or_get("y");
    c.add_or_get("x");
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != c.hash());  // order matters
    CHECK(a.hash() != Vocabulary().hash());

    // Concatenation must not alias: {"ab","c"} vs {"a","bc"}.
    Vocabulary d, e;
    d.add_or_get("ab");
    d.add_or_get("c");
    e.add_or_get("a");
    e.add_or_get("bc");
    CHECK(d.hash() != e.hash());
}

TEST_CASE("TSV round trip preserves tokens, labels, and sentence breaks") {
    std::vector<Sentence> corpus;
    corpus.push_back({{{"troops", "NIL", 0}, {"attacked", "Conflict:Attack", 0}}});
    corpus.push_back({{{"they", "NIL", 0}, {"met", "Contact:Meet", 0}, {"twice", "NIL", 0}}});

    const std::string path = temp_path("roundtrip.tsv");
    write_tsv(corpus, path);
    std::vector<Sentence> back = read_tsv(path);

    REQUIRE(back.size() == 2);
    REQUIRE(back[0].tokens.size() == 2);
    REQUIRE(back[1].tokens.size() == 3);
    CHECK(back[0].tokens[1].text == "attacked");
    CHECK(back[0].tokens[1].label == "Conflict:Attack");
    CHECK(back[1].tokens[2].text == "twice");
    CHECK(back[0].tokens[0].line == 1);
    CHECK(back[1].tokens[0].line == 4);  // blank separator on line 3
    std::remove(path.c_str());
}

TEST_CASE("read_tsv strips CR and reports malformed lines") {
    const std::string path = temp_path("crlf.tsv");
    write_file(path, "hello\tNIL\r\nworld\tNIL\r\n");
    std::vector<Sentence> s = read_tsv(path);
    REQUIRE(s.size() == 1);
    CHECK(s[0].tokens[0].text == "hello");
    CHECK(s[0].tokens[0].label == "NIL");

    write_file(path, "no-tab-here\n");
    CHECK_THROWS_WITH_AS(read_tsv(path), doctest::Contains(":1:"), ParseError);

    write_file(path, "ok\tNIL\n\ttab-first\n");
    CHECK_THROWS_WITH_AS(read_tsv(path), doctest::Contains(":2:"), ParseError);

    write_file(path, "tab-last\t\n");
    CHECK_THROWS_AS(read_tsv(path), ParseError);

    write_file(path, "two\ttabs\there\n");
    CHECK_THROWS_AS(read_tsv(path), ParseError);

    CHECK_THROWS_AS(read_tsv("/nonexistent/nope.tsv"), ConfigError);
    std::remove(path.c_str());
}

TEST_CASE("build_instances pads windows and resolves labels") {
    LabelSchema schema = LabelSchema::from_labels(six_labels());
    std::vector<Sentence> corpus;
    corpus.push_back({{{"a", "NIL", 1}, {"b", "Contact:Meet", 2}, {"c", "NIL", 3}}});

    Vocabulary vocab;
    std::vector<Instance> inst =
        build_instances(corpus, schema, vocab, VocabMode::kBuild, 2, "doc");

    REQUIRE(inst.size() == 3);
    const int32_t a = 2, b = 3, c = 4, pad = Vocabulary::kPad;
    CHECK(inst[0].window == std::vector<int32_t>{pad, pad, a, b, c});
    CHECK(inst[1].window == std::vector<int32_t>{pad, a, b, c, pad});
    CHECK(inst[2].window == std::vector<int32_t>{a, b, c, pad, pad});
    CHECK(inst[0].gold == 0);
    CHECK(inst[1].gold == 4);
    CHECK(inst[1].doc == "doc");
    CHECK(inst[1].sentence == 0);
    CHECK(inst[1].token == 1);
}

TEST_CASE("build_instances lookup mode maps unseen tokens to UNK") {
    LabelSchema schema = LabelSchema::from_labels(six_labels());
    Vocabulary vocab;
    vocab.add_or_get("known");

    std::vector<Sentence> corpus;
    corpus.push_back({{{"known", "NIL", 0}, {"mystery", "NIL", 0}}});
    std::vector<Instance> inst =
        build_instances(corpus, schema, vocab, VocabMode::kLookup, 1, "d");

    CHECK(vocab.size() == 3);  // unchanged
    CHECK(inst[0].window == std::vector<int32_t>{Vocabulary::kPad, 2, Vocabulary::kUnk});
    CHECK(inst[1].window == std::vector<int32_t>{2, Vocabulary::kUnk, Vocabulary::kPad});
}

TEST_CASE("build_instances rejects unknown labels and bad windows") {
    LabelSchema schema = LabelSchema::from_labels(six_labels());
    Vocabulary vocab;
    std::vector<Sentence> corpus;
    corpus.push_back({{{"x", "Not:Real", 7}}});
    CHECK_THROWS_WITH_AS(
        build_instances(corpus, schema, vocab, VocabMode::kBuild, 2, "doc"),
        doctest::Contains("Not:Real"), ParseError);
    CHECK_THROWS_AS(
        build_instances(corpus, schema, vocab, VocabMode::kBuild, 0, "doc"),
        ContractError);
}

TEST_CASE("parse_corpus builds one instance per token") {
    const std::string path = temp_path("parse.tsv");
    write_file(path, "alpha\tNIL\nbeta\tContact:Meet\n\ngamma\tNIL\n");
    LabelSchema schema = LabelSchema::from_labels(six_labels());
    Vocabulary vocab;
    std::vector<Instance> inst = parse_corpus(path, schema, vocab, VocabMode::kBuild, 2);
    REQUIRE(inst.size() == 3);
    CHECK(inst[0].doc == path);
    CHECK(inst[2].sentence == 1);
    CHECK(vocab.size() == 5);
    std::remove(path.c_str());
}

TEST_CASE("undersample_nil keeps triggers, caps NIL, preserves order") {
    std::vector<Instance> pool;
    for (int i = 0; i < 40; ++i) {
        Instance ins;
        ins.window = {int32_t(i)};
        ins.gold = (i % 10 == 0) ? 4 : 0;  // 4 triggers, 36 NIL
        ins.token = i;
        pool.push_back(ins);
    }

    SeededRng rng(21);
    bool warned = false;
    std::vector<Instance> kept = undersample_nil(pool, 5.0, rng, &warned);
    CHECK_FALSE(warned);

    int trig = 0, nil = 0;
    int32_t prev = -1;
    bool ordered = true;
    for (const Instance& ins : kept) {
        (ins.gold == 0 ? nil : trig)++;
        ordered = ordered && ins.token > prev;
        prev = ins.token;
    }
    CHECK(trig == 4);
    CHECK(nil == 20);  // round(5.0 * 4)
    CHECK(ordered);

    // Ratio large enough to keep everything.
    std::vector<Instance> all = undersample_nil(pool, 100.0, rng, &warned);
    CHECK(all.size() == pool.size());

    // Determinism under a fixed seed.
    SeededRng r1(77), r2(77);
    CHECK(undersample_nil(pool, 2.0, r1) == undersample_nil(pool, 2.0, r2));

    CHECK_THROWS_AS(undersample_nil(pool, 0.0, rng), ContractError);
}

TEST_CASE("undersample_nil warns when there are no triggers") {
    std::vector<Instance> pool(5);
    for (auto& ins : pool) ins.gold = 0;
    SeededRng rng(1);
    bool warned = false;
    std::vector<Instance> kept = undersample_nil(pool, 3.0, rng, &warned);
    CHECK(warned);
    CHECK(kept.size() == pool.size());
}
