#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stratum/record.hpp"
#include "stratum/errors.hpp"

#include <string>

using namespace stratum;

TEST_CASE("writer produces the documented byte layout") {
    RecordWriter w;
    w.scalar("ev", "observed")
        .integer("count", -3)
        .unsigned_integer("seq", 12)
        .text("content", "hello world")
        .flag("archived", true);
    CHECK(w.str() == "ev=observed count=-3 seq=12 content=11:hello world archived=1");
}

TEST_CASE("text values round-trip arbitrary bytes") {
    const std::string nasty = "line\nbreak = equals 7:fake and spaces  \t tab";
    RecordWriter w;
    w.text("payload", nasty).scalar("tail", "x");
    const Record r = Record::parse(w.str());
    CHECK(r.text("payload") == nasty);
    CHECK(r.scalar("tail") == "x");
}

TEST_CASE("empty text round-trips") {
    RecordWriter w;
    w.text("t", "");
    const Record r = Record::parse(w.str());
    CHECK(r.text("t").empty());
}

TEST_CASE("optional fields use underscore for absent") {
    RecordWriter w;
    w.opt_text("a", std::nullopt)
        .opt_text("b", std::string("present"))
        .opt_time("c", std::nullopt)
        .opt_time("d", Timestamp{42})
        .opt_real("e", std::nullopt)
        .opt_real("f", 0.5);
    CHECK(w.str() == "a=_ b=7:present c=_ d=42 e=_ f=0.5");
    const Record r = Record::parse(w.str());
    CHECK(!r.opt_text("a").has_value());
    CHECK(r.opt_text("b") == "present");
    CHECK(!r.opt_time("c").has_value());
    CHECK(r.opt_time("d") == Timestamp{42});
    CHECK(!r.opt_real("e").has_value());
    CHECK(r.opt_real("f") == 0.5);
}

TEST_CASE("a text holding an underscore stays distinct from absent") {
    RecordWriter w;
    w.opt_text("v", std::string("_"));
    const Record r = Record::parse(w.str());
    CHECK(r.opt_text("v") == "_");
}

TEST_CASE("id lists round-trip and reject commas in members") {
    RecordWriter w;
    w.id_list("members", {"m-000001", "m-000002", "m-000003"});
    const Record r = Record::parse(w.str());
    CHECK(r.id_list("members") == std::vector<std::string>{"m-000001", "m-000002", "m-000003"});

    RecordWriter empty;
    empty.id_list("members", {});
    CHECK(Record::parse(empty.str()).id_list("members").empty());

    RecordWriter bad;
    CHECK_THROWS_AS(bad.id_list("members", {"a,b"}), StorageError);
}

TEST_CASE("numbers and timestamps round-trip") {
    RecordWriter w;
    w.integer("i", -9'007'199'254'740'993LL)
        .unsigned_integer("u", 18'446'744'073'709'551'615ULL)
        .real("r", 0.1)
        .time("t", Timestamp{-5});
    const Record r = Record::parse(w.str());
    CHECK(r.integer("i") == -9'007'199'254'740'993LL);
    CHECK(r.unsigned_integer("u") == 18'446'744'073'709'551'615ULL);
    CHECK(r.real("r") == 0.1);
    CHECK(r.time("t") == Timestamp{-5});
}

TEST_CASE("real formatting survives round trips exactly") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 1e300, -0.0, 123456.789}) {
        const std::string s = format_real(v);
        const Record r = Record::parse("v=" + s);
        CHECK(r.real("v") == v);
    }
}

TEST_CASE("malformed records throw StorageError") {
    CHECK_THROWS_AS(Record::parse("novalue"), StorageError);
    CHECK_THROWS_AS(Record::parse("KEY=1"), StorageError);       // uppercase key
    CHECK_THROWS_AS(Record::parse("k=5:ab"), StorageError);      // short text
    CHECK_THROWS_AS(Record::parse("k=1 k=2"), StorageError);     // duplicate key
    CHECK_THROWS_AS(Record::parse(""), StorageError);            // empty record
    CHECK_THROWS_AS(Record::parse("k=1  j=2"), StorageError);    // double space
}

TEST_CASE("typed accessors reject wrong shapes") {
    const Record r = Record::parse("word=hello num=42 t=3:abc");
    CHECK_THROWS_AS(r.integer("word"), StorageError);
    CHECK_THROWS_AS(r.text("num"), StorageError);   // scalar where text expected
    CHECK_THROWS_AS(r.scalar("t"), StorageError);   // text where scalar expected
    CHECK_THROWS_AS(r.raw("missing"), StorageError);
    CHECK(r.has("word"));
    CHECK(!r.has("missing"));
}

TEST_CASE("digests match known vectors") {
    // CRC-32 and SHA-256 of "123456789" / "abc" are published constants.
    CHECK(crc32_hex("123456789") == "cbf43926");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}
