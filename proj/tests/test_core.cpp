#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "mmdb/catalog.hpp"
#include "mmdb/error.hpp"
#include "mmdb/jsonl.hpp"
#include "mmdb/linkmap.hpp"
#include "mmdb/tokenizer.hpp"
#include "mmdb/types.hpp"
#include "test_util.hpp"

using namespace mmdb;

namespace {

// Independent reference tokenizer used as an oracle.  It walks the byte
// string once, classifying each byte, and never shares code with the
// implementation under test.
struct RefTok {
  std::string surface;
  size_t begin = 0;
  size_t end = 0;
};

bool ref_is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

std::string ref_fold(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

std::vector<RefTok> ref_tokenize(const std::string& text) {
  std::vector<RefTok> out;
  size_t i = 0;
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
        c == '\v') {
      ++i;
      continue;
    }
    if (ref_is_word_byte(c)) {
      size_t j = i;
      while (j < text.size() &&
             ref_is_word_byte(static_cast<unsigned char>(text[j])))
        ++j;
      out.push_back({ref_fold(text.substr(i, j - i)), i, j});
      i = j;
    } else {
      out.push_back({ref_fold(text.substr(i, 1)), i, i + 1});
      ++i;
    }
  }
  return out;
}

std::filesystem::path temp_file(const std::string& name,
                                const std::string& content) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream f(p, std::ios::binary);
  f << content;
  f.close();
  return p;
}

}  // namespace

TEST_CASE("tokenizer splits words and punctuation with byte offsets") {
  auto toks = tokenize("Bob Jones was diagnosed.");
  REQUIRE(toks.size() == 5);
  CHECK(toks[0].surface == "bob");
  CHECK(toks[0].begin == 0);
  CHECK(toks[0].end == 3);
  CHECK(toks[1].surface == "jones");
  CHECK(toks[1].begin == 4);
  CHECK(toks[1].end == 9);
  CHECK(toks[2].surface == "was");
  CHECK(toks[3].surface == "diagnosed");
  CHECK(toks[3].begin == 14);
  CHECK(toks[3].end == 23);
  CHECK(toks[4].surface == ".");
  CHECK(toks[4].begin == 23);
  CHECK(toks[4].end == 24);
}

TEST_CASE("tokenizer splits dotted dates into digit and dot tokens") {
  auto toks = tokenize("8.3.1997");
  REQUIRE(toks.size() == 5);
  CHECK(toks[0].surface == "8");
  CHECK(toks[1].surface == ".");
  CHECK(toks[2].surface == "3");
  CHECK(toks[3].surface == ".");
  CHECK(toks[4].surface == "1997");
  CHECK(toks[4].begin == 4);
  CHECK(toks[4].end == 8);
}

TEST_CASE("tokenizer keeps offsets for multi word values") {
  auto toks = tokenize("sore throat");
  REQUIRE(toks.size() == 2);
  CHECK(toks[0].begin == 0);
  CHECK(toks[0].end == 4);
  CHECK(toks[1].begin == 5);
  CHECK(toks[1].end == 11);
}

TEST_CASE("tokenizer handles empty and whitespace only input") {
  CHECK(tokenize("").empty());
  CHECK(tokenize("   \t\n ").empty());
}

TEST_CASE("tokenizer agrees with an independent reference on random text") {
  std::mt19937_64 rng(42);
  const std::string alphabet = "abcXYZ019 .,-()\t\n;:/";
  for (int iter = 0; iter < 300; ++iter) {
    size_t len = rng() % 60;
    std::string text;
    for (size_t i = 0; i < len; ++i)
      text += alphabet[rng() % alphabet.size()];
    auto got = tokenize(text);
    auto want = ref_tokenize(text);
    REQUIRE(got.size() == want.size());
    for (size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].surface == want[i].surface);
      CHECK(got[i].begin == want[i].begin);
      CHECK(got[i].end == want[i].end);
    }
  }
}

TEST_CASE("token surfaces are folded slices of the original text") {
  std::string text = "Fever AND Chills, 8.3.1997!";
  for (const auto& t : tokenize(text)) {
    CHECK(t.surface == ref_fold(text.substr(t.begin, t.end - t.begin)));
    CHECK(t.begin < t.end);
  }
}

TEST_CASE("normalize_value folds case and collapses whitespace") {
  CHECK(normalize_value("  Sore   Throat ") == "sore throat");
  CHECK(normalize_value("FEVER") == "fever");
  CHECK(normalize_value("a\tb\n c") == "a b c");
  CHECK(normalize_value("") == "");
  CHECK(normalize_value("   ") == "");
}

TEST_CASE("token_range_for maps char ranges to token ranges") {
  auto doc = mmdb_test::make_doc("d1", "Bob Jones was diagnosed.");
  auto r = token_range_for(doc, CharRange{0, 9});
  CHECK(r.first == 0);
  CHECK(r.second == 2);
  r = token_range_for(doc, CharRange{14, 23});
  CHECK(r.first == 3);
  CHECK(r.second == 4);
  CHECK_THROWS_AS(token_range_for(doc, CharRange{1, 9}), InvalidArgument);
}

TEST_CASE("collection loads from jsonl and rejects bad input") {
  auto p = temp_file("mmdb_core_docs.jsonl",
                     "{\"id\": \"a\", \"text\": \"Fever.\"}\n"
                     "\n"
                     "{\"id\": \"b\", \"text\": \"Cough.\"}\n");
  auto coll = load_collection(p.string());
  CHECK(coll.name == "mmdb_core_docs");
  REQUIRE(coll.documents.size() == 2);
  CHECK(coll.documents[0].id == "a");
  CHECK(coll.documents[1].text == "Cough.");
  CHECK(coll.documents[0].tokens.size() == 2);
  CHECK(coll.find("b") != nullptr);
  CHECK(coll.find("missing") == nullptr);
  std::filesystem::remove(p);

  SUBCASE("invalid json reports the line number") {
    auto bad = temp_file("mmdb_core_bad.jsonl",
                         "{\"id\": \"a\", \"text\": \"x\"}\n"
                         "{not json}\n");
    try {
      load_collection(bad.string());
      FAIL("expected InvalidCorpus");
    } catch (const InvalidCorpus& e) {
      CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
    std::filesystem::remove(bad);
  }

  SUBCASE("duplicate ids are rejected by name") {
    auto bad = temp_file("mmdb_core_dup.jsonl",
                         "{\"id\": \"a\", \"text\": \"x\"}\n"
                         "{\"id\": \"a\", \"text\": \"y\"}\n");
    try {
      load_collection(bad.string());
      FAIL("expected InvalidCorpus");
    } catch (const InvalidCorpus& e) {
      CHECK(std::string(e.what()).find("\"a\"") != std::string::npos);
    }
    std::filesystem::remove(bad);
  }

  SUBCASE("missing text field is rejected") {
    auto bad = temp_file("mmdb_core_notext.jsonl", "{\"id\": \"a\"}\n");
    CHECK_THROWS_AS(load_collection(bad.string()), InvalidCorpus);
    std::filesystem::remove(bad);
  }
}

TEST_CASE("collection round trips through jsonl") {
  TextCollection coll;
  coll.name = "c";
  coll.documents.push_back(mmdb_test::make_doc("a", "Fever, chills."));
  coll.documents.push_back(mmdb_test::make_doc("b", "Nothing here"));
  auto text = collection_to_jsonl(coll);
  auto back = collection_from_jsonl(text, "c", "mem");
  REQUIRE(back.documents.size() == 2);
  CHECK(back.documents[0].text == coll.documents[0].text);
  CHECK(collection_content_hash(back) == collection_content_hash(coll));
  coll.documents[1].text += "!";
  CHECK(collection_content_hash(back) != collection_content_hash(coll));
}

TEST_CASE("gold annotations round trip and validate") {
  GoldAnnotation g;
  g.doc_id = "a";
  GoldRow row;
  row.cells["patient"] = "Bob Jones";
  row.cells["diagnosis"] = "fever";
  g.tables["visits"].push_back(row);
  g.spans["patient"] = {CharRange{0, 9}};
  g.spans["diagnosis"] = {CharRange{28, 33}};
  g.dup_groups.push_back({CharRange{0, 9}, CharRange{40, 43}});
  auto text = gold_to_jsonl({g});
  auto back = gold_from_jsonl(text, "mem");
  REQUIRE(back.size() == 1);
  CHECK(back[0].doc_id == "a");
  CHECK(back[0].tables.at("visits")[0].cells.at("patient") == "Bob Jones");
  REQUIRE(back[0].spans.at("patient").size() == 1);
  CHECK(back[0].spans.at("patient")[0] == CharRange{0, 9});
  REQUIRE(back[0].dup_groups.size() == 1);
  CHECK(back[0].dup_groups[0].size() == 2);

  SUBCASE("span with end before begin is rejected") {
    auto bad = "{\"doc_id\": \"a\", \"tables\": {}, "
               "\"spans\": {\"x\": [[5, 3]]}, \"dup_groups\": []}\n";
    CHECK_THROWS_AS(gold_from_jsonl(bad, "mem"), InvalidCorpus);
  }
  SUBCASE("dup group with one member is rejected") {
    auto bad = "{\"doc_id\": \"a\", \"tables\": {}, \"spans\": {}, "
               "\"dup_groups\": [[[0, 2]]]}\n";
    CHECK_THROWS_AS(gold_from_jsonl(bad, "mem"), InvalidCorpus);
  }
}

TEST_CASE("table def validation enforces kind constraints") {
  TextTableDef def;
  def.name = "reports";
  def.collection = "notes";
  def.kind = TableKind::MultiRow;
  def.columns = {{"patient", Dtype::Text, true, ""},
                 {"diagnosis", Dtype::Text, false, ""}};
  def.identifying_attrs = {"patient"};
  CHECK_NOTHROW(validate_def(def));

  SUBCASE("multi row without a key is rejected") {
    def.identifying_attrs.clear();
    def.columns[0].identifying = false;
    CHECK_THROWS_AS(validate_def(def), InvalidDef);
  }
  SUBCASE("single row must not declare keys") {
    def.kind = TableKind::SingleRow;
    CHECK_THROWS_AS(validate_def(def), InvalidDef);
    def.identifying_attrs.clear();
    def.columns[0].identifying = false;
    CHECK_NOTHROW(validate_def(def));
  }
  SUBCASE("duplicate column names are rejected") {
    def.columns.push_back({"patient", Dtype::Text, false, ""});
    CHECK_THROWS_AS(validate_def(def), InvalidDef);
  }
  SUBCASE("key flag must match identifying_attrs") {
    def.identifying_attrs = {"diagnosis"};
    CHECK_THROWS_AS(validate_def(def), InvalidDef);
  }
  SUBCASE("multi table requires member names on every column") {
    def.kind = TableKind::MultiTable;
    CHECK_THROWS_AS(validate_def(def), InvalidDef);
    for (auto& c : def.columns) c.table_name = "t1";
    CHECK_NOTHROW(validate_def(def));
    CHECK(member_tables(def) == std::vector<std::string>{"t1"});
    CHECK(span_key(def, def.columns[0]) == "t1.patient");
  }
  SUBCASE("non multi table must not set member names") {
    def.columns[0].table_name = "t1";
    CHECK_THROWS_AS(validate_def(def), InvalidDef);
  }
}

TEST_CASE("catalog registers and resolves objects") {
  Catalog cat;
  TextCollection coll;
  coll.name = "notes";
  coll.documents.push_back(mmdb_test::make_doc("a", "Fever."));
  cat.register_collection(coll);
  CHECK(cat.has_collection("notes"));
  CHECK_THROWS_AS(cat.collection("nope"), NotFound);

  TextTableDef def;
  def.name = "reports";
  def.collection = "notes";
  def.kind = TableKind::SingleRow;
  def.columns = {{"diagnosis", Dtype::Text, false, ""}};
  cat.register_text_table(def);
  CHECK(cat.has_text_table("reports"));
  CHECK(cat.text_table("reports").collection == "notes");

  SUBCASE("text table over a missing collection is rejected") {
    TextTableDef bad = def;
    bad.name = "other";
    bad.collection = "absent";
    CHECK_THROWS_AS(cat.register_text_table(bad), NotFound);
  }
  SUBCASE("name collisions are rejected") {
    TextTableDef again = def;
    CHECK_THROWS_AS(cat.register_text_table(again), InvalidArgument);
    TextCollection c2;
    c2.name = "notes";
    CHECK_THROWS_AS(cat.register_collection(c2), InvalidArgument);
    // Text and structured tables share one namespace.
    StructuredTable st;
    st.name = "reports";
    CHECK_THROWS_AS(cat.register_structured_table(st), InvalidArgument);
  }
}

TEST_CASE("link maps load and validate against table and collection") {
  TextCollection coll;
  coll.name = "notes";
  coll.documents.push_back(mmdb_test::make_doc("a", "Fever."));
  coll.documents.push_back(mmdb_test::make_doc("b", "Cough."));

  std::vector<ColumnDef> schema = {{"name", Dtype::Text, true, ""},
                                   {"age", Dtype::Number, false, ""}};
  Table t = structured_rows_from_jsonl(
      "{\"name\": \"Bob Jones\", \"age\": 44}\n", schema, "mem");
  REQUIRE(t.rows.size() == 1);
  CHECK(t.cell(0, "age")->surface == "44");

  auto lm = linkmap_from_jsonl(
      "{\"row_key\": [\"Bob Jones\"], \"doc_ids\": [\"a\", \"b\"]}\n",
      "links", "mem");
  REQUIRE(lm.entries.size() == 1);
  CHECK_NOTHROW(validate_link(lm, t, {"name"}, coll));
  const auto* e = lm.find({"bob jones"});
  REQUIRE(e != nullptr);
  CHECK(e->doc_ids.size() == 2);

  SUBCASE("unknown doc id is rejected") {
    lm.entries[0].doc_ids.push_back("ghost");
    try {
      validate_link(lm, t, {"name"}, coll);
      FAIL("expected InvalidArgument");
    } catch (const InvalidArgument& ex) {
      CHECK(std::string(ex.what()).find("ghost") != std::string::npos);
    }
  }
  SUBCASE("key not present in the table is rejected") {
    lm.entries[0].row_key = {"Nobody"};
    CHECK_THROWS_AS(validate_link(lm, t, {"name"}, coll), InvalidArgument);
  }
  SUBCASE("wrong key arity is rejected") {
    lm.entries[0].row_key = {"Bob Jones", "44"};
    CHECK_THROWS_AS(validate_link(lm, t, {"name"}, coll), InvalidArgument);
  }
}

TEST_CASE("parse error carries position info") {
  ParseError e(3, 14, "unexpected token");
  CHECK(e.line() == 3);
  CHECK(e.col() == 14);
  CHECK(std::string(e.what()).find("3:14") != std::string::npos);
}
