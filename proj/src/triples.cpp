#include "ontolink/triples.hpp"

#include <atomic>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ontolink/errors.hpp"

namespace ontolink {

namespace vocab {
bool is_builtin(std::string_view iri) {
  return iri.starts_with(rdf) || iri.starts_with(rdfs) || iri.starts_with(owl) || iri.starts_with(xsd);
}
}  // namespace vocab

std::string Term::to_ntriples() const {
  if (is_blank()) return "_:" + value;
  std::string out;
  out.reserve(value.size() + 2);
  out.push_back('<');
  for (unsigned char c : value) {
    // Characters the grammar cannot carry raw are written as \u escapes.
    if (c <= 0x20 || c == '<' || c == '>' || c == '"' || c == '\\') {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\u%04X", c);
      out += buf;
    } else {
      out.push_back(static_cast<char>(c));
    }
  }
  out.push_back('>');
  return out;
}

std::string Term::name() const { return is_blank() ? "_:" + value : value; }

TermId Interner::intern(const Term& term) {
  auto it = index_.find(term);
  if (it != index_.end()) return it->second;
  const auto id = static_cast<TermId>(terms_.size());
  terms_.push_back(term);
  index_.emplace(term, id);
  return id;
}

std::optional<TermId> Interner::find(const Term& term) const {
  auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool TripleStore::insert(const Term& s, std::string_view predicate, const Term& o) {
  const Triple t{terms_.intern(s), terms_.intern(Term::iri(std::string(predicate))), terms_.intern(o)};
  if (!seen_.insert(t).second) {
    ++duplicate_lines_;
    return false;
  }
  triples_.push_back(t);
  ++predicate_counts_[t.p];
  return true;
}

bool TripleStore::same_triples(const TripleStore& other) const {
  if (size() != other.size()) return false;
  for (const auto& t : triples_) {
    auto s = other.terms_.find(term(t.s));
    auto p = other.terms_.find(term(t.p));
    auto o = other.terms_.find(term(t.o));
    if (!s || !p || !o || !other.seen_.contains(Triple{*s, *p, *o})) return false;
  }
  return true;
}

namespace {

std::atomic<unsigned> g_next_scope{0};

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_label_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '-' || c == '.' || static_cast<unsigned char>(c) >= 0x80;
}

// Recursive-descent reader over one statement line.
class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_no, std::size_t line_offset, const ParseOptions& options,
             std::unordered_map<std::string, std::string>& blank_labels, const std::string& scope)
      : line_(line),
        line_no_(line_no),
        line_offset_(line_offset),
        options_(options),
        blank_labels_(blank_labels),
        scope_(scope) {}

  // Returns false for blank or comment-only lines.
  bool parse(TripleStore& store) {
    skip_ws();
    if (at_end() || peek() == '#') return false;

    Term subject = subject_term();
    skip_ws();
    if (peek() != '<') fail("predicate must be an IRI");
    std::string predicate = iri();
    skip_ws();

    std::optional<Term> object;
    if (peek() == '"') {
      literal();
    } else {
      object = node_term("object");
    }
    skip_ws();
    if (peek() != '.') fail("expected ' .' terminating the statement");
    ++pos_;
    skip_ws();
    if (!at_end() && peek() != '#') fail("trailing characters after statement");

    if (object) {
      store.insert(subject, predicate, *object);
    } else {
      store.note_literal();
    }
    return true;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, line_no_, line_offset_ + pos_);
  }

  bool at_end() const { return pos_ >= line_.size(); }
  char peek() const { return at_end() ? '\0' : line_[pos_]; }
  void skip_ws() {
    while (!at_end() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
  }

  Term subject_term() { return node_term("subject"); }

  Term node_term(const char* role) {
    if (peek() == '<') return Term::iri(iri());
    if (peek() == '_') return Term::blank(blank());
    fail(std::string(role) + " must be an IRI or blank node");
  }

  std::string iri() {
    ++pos_;  // '<'
    std::string out;
    for (;;) {
      if (at_end()) fail("unterminated IRI");
      const char c = line_[pos_];
      if (c == '>') {
        ++pos_;
        break;
      }
      if (c == ' ' || c == '\t') fail("space inside IRI");
      if (static_cast<unsigned char>(c) < 0x20 || c == '<' || c == '"') fail("invalid character inside IRI");
      if (c == '\\') {
        out_escape(out);
        continue;
      }
      out.push_back(c);
      ++pos_;
    }
    if (out.empty()) fail("empty IRI");
    if (options_.base && out.find(':') == std::string::npos) out = *options_.base + out;
    return out;
  }

  void out_escape(std::string& out) {
    const char kind = pos_ + 1 < line_.size() ? line_[pos_ + 1] : '\0';
    const std::size_t digits = kind == 'u' ? 4 : kind == 'U' ? 8 : 0;
    if (digits == 0) fail("only \\u and \\U escapes are allowed in IRIs");
    if (pos_ + 2 + digits > line_.size()) fail("truncated unicode escape");
    char32_t cp = 0;
    for (std::size_t i = 0; i < digits; ++i) {
      const char h = line_[pos_ + 2 + i];
      cp <<= 4;
      if (h >= '0' && h <= '9') cp |= static_cast<char32_t>(h - '0');
      else if (h >= 'a' && h <= 'f') cp |= static_cast<char32_t>(h - 'a' + 10);
      else if (h >= 'A' && h <= 'F') cp |= static_cast<char32_t>(h - 'A' + 10);
      else fail("bad hex digit in unicode escape");
    }
    if (cp > 0x10FFFF) fail("unicode escape out of range");
    if (cp == ' ') fail("space inside IRI");
    append_utf8(out, cp);
    pos_ += 2 + digits;
  }

  std::string blank() {
    if (line_.substr(pos_, 2) != "_:") fail("expected '_:' blank node label");
    pos_ += 2;
    const std::size_t start = pos_;
    while (!at_end() && is_label_char(line_[pos_])) ++pos_;
    // A trailing '.' belongs to the statement terminator.
    while (pos_ > start && line_[pos_ - 1] == '.') --pos_;
    if (pos_ == start) fail("empty blank node label");
    const std::string label(line_.substr(start, pos_ - start));
    auto [it, inserted] = blank_labels_.try_emplace(label, "");
    if (inserted) it->second = scope_ + "b" + std::to_string(blank_labels_.size() - 1);
    return it->second;
  }

  void literal() {
    const std::size_t open = pos_;
    ++pos_;
    for (;;) {
      if (at_end()) {
        pos_ = open;
        fail("unterminated quoted literal");
      }
      const char c = line_[pos_];
      if (c == '\\') {
        if (pos_ + 1 >= line_.size()) {
          pos_ = open;
          fail("unterminated quoted literal");
        }
        pos_ += 2;
        continue;
      }
      ++pos_;
      if (c == '"') break;
    }
    if (line_.substr(pos_, 2) == "^^") {
      pos_ += 2;
      if (peek() != '<') fail("datatype must be an IRI");
      iri();
    } else if (peek() == '@') {
      ++pos_;
      const std::size_t start = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(line_[pos_])) || line_[pos_] == '-')) ++pos_;
      if (pos_ == start) fail("empty language tag");
    }
  }

  std::string_view line_;
  std::size_t pos_ = 0;
  std::size_t line_no_;
  std::size_t line_offset_;
  const ParseOptions& options_;
  std::unordered_map<std::string, std::string>& blank_labels_;
  const std::string& scope_;
};

}  // namespace

TripleStore parse_document(std::istream& input, const ParseOptions& options) {
  TripleStore store;
  std::unordered_map<std::string, std::string> blank_labels;
  const std::string scope =
      options.blank_scope.empty() ? "d" + std::to_string(g_next_scope.fetch_add(1)) : options.blank_scope;

  std::string line;
  std::size_t line_no = 0;
  std::size_t offset = 0;
  while (std::getline(input, line)) {
    ++line_no;
    const std::size_t raw_size = line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    LineParser(line, line_no, offset, options, blank_labels, scope).parse(store);
    offset += raw_size;
  }
  return store;
}

TripleStore parse_document(std::string_view text, const ParseOptions& options) {
  std::istringstream in{std::string(text)};
  return parse_document(in, options);
}

TripleStore load_ntriples(const std::filesystem::path& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return parse_document(in, options);
}

void write_ntriples(std::ostream& out, const TripleStore& store) {
  for (const auto& t : store.triples()) {
    out << store.term(t.s).to_ntriples() << ' ' << store.term(t.p).to_ntriples() << ' '
        << store.term(t.o).to_ntriples() << " .\n";
  }
}

StatsReport stats(const TripleStore& store) {
  StatsReport r;
  r.triples = store.size();
  r.distinct_terms = store.terms().size();
  r.predicates = store.predicate_counts().size();
  r.dropped_literals = store.dropped_literals();

  for (std::size_t i = 0; i < store.terms().size(); ++i) {
    if (store.terms().lookup(static_cast<TermId>(i)).is_blank()) ++r.blank_nodes;
  }
  for (const auto& [p, n] : store.predicate_counts()) {
    const auto& iri = store.term(p).value;
    r.per_predicate[iri] = n;
    if (iri == vocab::subclass_of) r.subsumption_axioms = n;
  }
  const auto type = store.terms().find(Term::iri(std::string(vocab::rdf_type)));
  const auto restriction = store.terms().find(Term::iri(std::string(vocab::restriction)));
  if (type && restriction) {
    for (const auto& t : store.triples()) {
      if (t.p == *type && t.o == *restriction) ++r.restriction_nodes;
    }
  }
  return r;
}

nlohmann::json to_json(const StatsReport& r) {
  return {
      {"triples", r.triples},
      {"distinct_terms", r.distinct_terms},
      {"predicates", r.predicates},
      {"blank_nodes", r.blank_nodes},
      {"subsumption_axioms", r.subsumption_axioms},
      {"restriction_nodes", r.restriction_nodes},
      {"dropped_literals", r.dropped_literals},
      {"per_predicate", r.per_predicate},
  };
}

}  // namespace ontolink
