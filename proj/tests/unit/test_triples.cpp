#include <doctest.h>

#include <sstream>

#include "ontolink/errors.hpp"
#include "ontolink/triples.hpp"

using namespace ontolink;

namespace {

const char* kTwo =
    "<http://a.org/x> <http://a.org/p> <http://a.org/y> .\n"
    "# comment line\n"
    "\n"
    "_:b <http://a.org/p> <http://a.org/x> . # trailing comment\n";

std::size_t error_line(std::string_view text) {
  try {
    parse_document(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_SUITE("triples") {
  TEST_CASE("statements, comments and blank lines") {
    const auto store = parse_document(kTwo, {.base = {}, .blank_scope = "s"});
    REQUIRE(store.size() == 2);
    const auto& t = store.triples()[1];
    CHECK(store.term(t.s).is_blank());
    CHECK(store.term(t.s).name() == "_:sb0");
    CHECK(store.term(t.o).name() == "http://a.org/x");
  }

  TEST_CASE("interning is dense and stable") {
    const auto store = parse_document(kTwo, {.base = {}, .blank_scope = "s"});
    CHECK(store.terms().size() == 4);
    CHECK(store.triples()[0].s == 0);
    CHECK(store.triples()[0].p == 1);
    CHECK(store.triples()[1].o == 0);
    CHECK(store.terms().find(Term::iri("http://a.org/y")) == TermId{2});
    CHECK_FALSE(store.terms().find(Term::iri("http://a.org/none")).has_value());
  }

  TEST_CASE("duplicates collapse") {
    const auto store = parse_document("<a:x> <a:p> <a:y> .\n<a:x> <a:p> <a:y> .\n");
    CHECK(store.size() == 1);
    CHECK(store.duplicate_lines() == 1);
    CHECK(store.predicate_counts().at(store.triples()[0].p) == 1);
  }

  TEST_CASE("literal objects are counted and dropped") {
    const auto store = parse_document(
        "<a:x> <a:label> \"hi \\\"there\\\"\"@en-GB .\n"
        "<a:x> <a:age> \"3\"^^<http://www.w3.org/2001/XMLSchema#int> .\n"
        "<a:x> <a:p> <a:y> .\n");
    CHECK(store.size() == 1);
    CHECK(store.dropped_literals() == 2);
  }

  TEST_CASE("blank labels are scoped per document") {
    const auto a = parse_document("_:n <a:p> <a:x> .\n");
    const auto b = parse_document("_:n <a:p> <a:x> .\n");
    CHECK(a.term(a.triples()[0].s).value != b.term(b.triples()[0].s).value);
    const auto c = parse_document("_:n <a:p> _:m .\n_:m <a:p> _:n .\n", {.base = {}, .blank_scope = "k"});
    CHECK(c.term(c.triples()[0].s).value == "kb0");
    CHECK(c.term(c.triples()[0].o).value == "kb1");
    CHECK(c.triples()[1].s == c.triples()[0].o);
  }

  TEST_CASE("base resolves relative IRIs") {
    const auto store = parse_document("<x> <p> <http://a.org/y> .\n", {.base = "http://b.org/", .blank_scope = ""});
    CHECK(store.term(store.triples()[0].s).value == "http://b.org/x");
    CHECK(store.term(store.triples()[0].o).value == "http://a.org/y");
  }

  TEST_CASE("unicode escapes decode inside IRIs") {
    const auto store = parse_document("<http://a.org/caf\\u00E9> <a:p> <a:y> .\n");
    CHECK(store.term(store.triples()[0].s).value == "http://a.org/caf\xC3\xA9");
  }

  TEST_CASE("CRLF line endings") {
    const auto store = parse_document("<a:x> <a:p> <a:y> .\r\n<a:y> <a:p> <a:z> .\r\n");
    CHECK(store.size() == 2);
  }

  TEST_CASE("malformed input names the line") {
    CHECK(error_line("<a:x> <a:p> <a:y> .\n<a:x> <a:p> <a:y>\n") == 2);
    CHECK(error_line("<a:x> _:p <a:y> .\n") == 1);
    CHECK(error_line("<a:x <a:p> <a:y> .\n") == 1);
    CHECK(error_line("<a:x> <a:p> \"open .\n") == 1);
    CHECK(error_line("\n\n<a:x> <a:p> <a:y> . extra\n") == 3);
    CHECK(error_line("<a:x> <a:p> <> .\n") == 1);
    CHECK(error_line("\"lit\" <a:p> <a:y> .\n") == 1);
  }

  TEST_CASE("byte offset points into the document") {
    try {
      parse_document("<a:x> <a:p> <a:y> .\n<a:x> <a:p> bad .\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.offset() == 20 + 12);
    }
  }

  TEST_CASE("write then parse gives the same set of triples") {
    const auto store = parse_document(kTwo, {.base = {}, .blank_scope = "s"});
    std::ostringstream out;
    write_ntriples(out, store);
    const auto again = parse_document(out.str(), {.base = {}, .blank_scope = "t"});
    CHECK(again.size() == store.size());
    // Blank labels are renamed, so compare with the same scope.
    const auto same_scope = parse_document(out.str(), {.base = {}, .blank_scope = "s"});
    CHECK(store.same_triples(same_scope));
  }

  TEST_CASE("missing file is a data error") {
    CHECK_THROWS_AS(load_ntriples("/nonexistent/file.nt"), Error);
  }

  TEST_CASE("stats on the restriction fixture") {
    const auto store = load_ntriples(std::string(ONTOLINK_FIXTURES) + "/pecanpie.nt");
    const auto r = stats(store);
    CHECK(r.triples == 4);
    CHECK(r.blank_nodes == 1);
    CHECK(r.subsumption_axioms == 1);
    CHECK(r.restriction_nodes == 1);
    CHECK(r.predicates == 4);
    CHECK(to_json(r)["per_predicate"].size() == 4);
  }

  TEST_CASE("builtin namespaces") {
    CHECK(vocab::is_builtin(vocab::subclass_of));
    CHECK(vocab::is_builtin("http://www.w3.org/2001/XMLSchema#int"));
    CHECK_FALSE(vocab::is_builtin("http://example.org/food#sugar"));
  }
}
