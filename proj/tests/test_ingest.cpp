#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "pbc/errors.hpp"
#include "pbc/ingest.hpp"
#include "pbc/synth.hpp"

using namespace pbc;
namespace fs = std::filesystem;

namespace {

const char* kTei = R"(<?xml version="1.0" encoding="UTF-8"?>
<TEI xmlns="http://www.tei-c.org/ns/1.0">
  <teiHeader><fileDesc><titleStmt><title level="a">The citing paper</title></titleStmt></fileDesc></teiHeader>
  <text><back><div type="references"><listBibl>
    <biblStruct xml:id="b0">
      <analytic>
        <title level="a" type="main">Deep Learning for Graphs</title>
        <author><persName><forename type="first">Ada</forename><surname>Lovelace</surname></persName></author>
      </analytic>
      <monogr><title level="j">Journal of Things</title><imprint><date type="published" when="2019-05-01"/></imprint></monogr>
    </biblStruct>
    <biblStruct xml:id="b1">
      <monogr><title level="m">A Book &amp; Its Title</title><imprint><date when="2001"/></imprint></monogr>
    </biblStruct>
    <biblStruct xml:id="b2">
      <monogr><title level="j">Only A Journal</title></monogr>
    </biblStruct>
    <biblStruct xml:id="b3">
      <analytic><title>Untyped Title</title></analytic>
    </biblStruct>
  </listBibl></div></back></text>
</TEI>)";

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("parse_record accepts objects and plain strings") {
  const auto r = parse_record(R"({"id": "p1", "refs": [{"title": "A", "authors": ["X"], "year": 2001}, "B"]})");
  CHECK(r.id == "p1");
  REQUIRE(r.refs.size() == 2);
  CHECK(r.refs[0].authors == std::vector<std::string>{"X"});
  CHECK(r.refs[0].year == 2001);
  CHECK(r.refs[1].title == "B");
}

TEST_CASE("parse_record rejects schema violations with the line number") {
  CHECK_THROWS_AS(parse_record("not json", 3), MalformedRecordError);
  CHECK_THROWS_AS(parse_record(R"({"refs": []})"), MalformedRecordError);
  CHECK_THROWS_AS(parse_record(R"({"id": 5, "refs": []})"), MalformedRecordError);
  CHECK_THROWS_AS(parse_record(R"({"id": "x", "refs": [{"authors": []}]})"), MalformedRecordError);
  CHECK_THROWS_AS(parse_record(R"({"id": "x", "refs": [7]})"), MalformedRecordError);
  try {
    parse_record("{", 17);
    FAIL("expected MalformedRecordError");
  } catch (const MalformedRecordError& e) {
    CHECK(e.line() == 17);
  }
}

TEST_CASE("to_document normalizes, dedups and rejects empty titles") {
  const Document d = parse_document(R"({"id": "p", "refs": ["Graph Mining", "graph mining.", "Other"]})");
  CHECK(d.size() == 2);
  CHECK_THROWS_AS(parse_document(R"({"id": "p", "refs": ["ok", "???"]})"), EmptyKeyError);
}

TEST_CASE("load_corpus filters by eligibility and counts rejects") {
  std::stringstream in;
  in << R"({"id": "a", "refs": ["one", "two", "three"]})" << "\n"
     << "\n"
     << R"({"id": "b", "refs": ["one", "!!!"]})" << "\n"
     << R"({"id": "c", "refs": ["one", "two", "three", "four", "five"]})" << "\n";
  const auto [corpus, stats] = load_corpus(in, 2, 4);
  REQUIRE(corpus.documents.size() == 1);
  CHECK(corpus.documents[0].doc_id == "a");
  CHECK(stats.n_docs_loaded == 1);
  CHECK(stats.n_docs_excluded == 2);
  CHECK(stats.n_refs_rejected == 1);
  CHECK(stats.n_unique_refs == 3);
  CHECK(corpus.k == 2);
  CHECK(corpus.max_refs == 4);
}

TEST_CASE("load_corpus reports the failing line") {
  std::stringstream in;
  in << R"({"id": "a", "refs": ["one"]})" << "\n" << "{broken\n";
  try {
    load_corpus(in, 1);
    FAIL("expected MalformedRecordError");
  } catch (const MalformedRecordError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(load_corpus(fs::path("/nonexistent/corpus.jsonl"), 1), IoError);
}

TEST_CASE("load_corpus is thread-count independent") {
  GenSpec spec;
  spec.n_docs = 200;
  spec.seed = 12;
  std::stringstream text;
  write_records(text, generate_corpus(spec));
  std::stringstream a(text.str()), b(text.str());
  const auto one = load_corpus(a, 2, 150, 1);
  const auto many = load_corpus(b, 2, 150, 8);
  CHECK(one.first.documents == many.first.documents);
  CHECK(one.second == many.second);
}

TEST_CASE("records survive a write/read round trip") {
  GenSpec spec;
  spec.n_docs = 30;
  const auto recs = generate_corpus(spec);
  std::stringstream ss;
  write_records(ss, recs);
  CHECK(read_records(ss) == recs);
}

TEST_CASE("TEI bibliography extraction") {
  const TeiResult r = parse_tei(kTei, "paper-1");
  CHECK(r.record.id == "paper-1");
  CHECK(r.skipped_untitled == 1);
  REQUIRE(r.record.refs.size() == 3);
  CHECK(r.record.refs[0].title == "Deep Learning for Graphs");
  CHECK(r.record.refs[0].authors == std::vector<std::string>{"Ada Lovelace"});
  CHECK(r.record.refs[0].year == 2019);
  CHECK(r.record.refs[1].title == "A Book & Its Title");
  CHECK(r.record.refs[1].year == 2001);
  CHECK(r.record.refs[2].title == "Untyped Title");
  CHECK_THROWS_AS(parse_tei("<TEI><listBibl>", "x"), MalformedRecordError);
}

TEST_CASE("TEI directory reads files in name order with stems as ids") {
  const fs::path dir = fs::temp_directory_path() / ("pbc_tei_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::ofstream(dir / "b.xml") << kTei;
  std::ofstream(dir / "a.xml") << kTei;
  std::ofstream(dir / "notes.txt") << "ignored";
  const auto results = read_tei_directory(dir);
  REQUIRE(results.size() == 2);
  CHECK(results[0].record.id == "a");
  CHECK(results[1].record.id == "b");
  fs::remove_all(dir);
  CHECK_THROWS_AS(read_tei_file(dir / "missing.xml"), IoError);
}

}  // TEST_SUITE
