#include "ltqp/rdf/turtle.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <tuple>

#include "ltqp/rdf/iri.hpp"
#include "ltqp/rdf/vocab.hpp"

namespace ltqp::rdf {

ParseError::ParseError(std::size_t line, std::size_t column, std::string message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + message),
      line_(line),
      column_(column),
      message_(std::move(message)) {}

namespace {

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool is_name_start(unsigned char c) noexcept { return std::isalpha(c) || c == '_' || c >= 0x80; }

bool is_name_char(unsigned char c) noexcept {
  return is_name_start(c) || std::isdigit(c) || c == '-';
}

class TurtleParser {
public:
  TurtleParser(std::string_view text, std::string_view base)
      : text_(text), document_iri_(base), base_(base) {}

  Document run() {
    Document doc;
    doc.iri = std::string(document_iri_);
    out_ = &doc.triples;
    skip_ws();
    while (!at_end()) {
      statement();
      skip_ws();
    }
    return doc;
  }

private:
  // -- character access -----------------------------------------------------

  bool at_end() const noexcept { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const noexcept {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  char advance() {
    const char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(line_, column_, at_end() ? message + " (unexpected end of input)" : message);
  }

  [[noreturn]] void unsupported(const std::string& message) const {
    throw UnsupportedFeature(line_, column_, message);
  }

  void skip_ws() {
    while (!at_end()) {
      const char c = peek();
      if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        break;
      }
    }
  }

  void expect(char c, const char* what) {
    skip_ws();
    if (at_end() || peek() != c) {
      fail(std::string("expected ") + what);
    }
    advance();
  }

  bool keyword_ahead(std::string_view kw, bool case_insensitive) const {
    if (text_.size() - pos_ < kw.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i) {
      const char a = text_[pos_ + i];
      const bool same = case_insensitive
                            ? std::tolower(static_cast<unsigned char>(a)) ==
                                  std::tolower(static_cast<unsigned char>(kw[i]))
                            : a == kw[i];
      if (!same) return false;
    }
    const auto after = static_cast<unsigned char>(peek(kw.size()));
    return !is_name_char(after) && after != ':' && after != '.';
  }

  void consume(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) advance();
  }

  // -- grammar ---------------------------------------------------------------

  void statement() {
    if (peek() == '@') {
      if (keyword_ahead("@prefix", false)) {
        consume(7);
        prefix_directive();
        expect('.', "'.' after @prefix");
        return;
      }
      if (keyword_ahead("@base", false)) {
        consume(5);
        base_directive();
        expect('.', "'.' after @base");
        return;
      }
      fail("unknown directive");
    }
    if (keyword_ahead("PREFIX", true)) {
      consume(6);
      prefix_directive();
      return;
    }
    if (keyword_ahead("BASE", true)) {
      consume(4);
      base_directive();
      return;
    }
    triples();
    expect('.', "'.' to end the statement");
  }

  void prefix_directive() {
    skip_ws();
    std::string name;
    while (!at_end() && peek() != ':') {
      const auto c = static_cast<unsigned char>(peek());
      if (!is_name_char(c) && c != '.') fail("invalid prefix name");
      name += advance();
    }
    if (at_end()) fail("expected ':' in prefix declaration");
    advance();
    skip_ws();
    prefixes_[name] = iriref();
  }

  void base_directive() {
    skip_ws();
    base_ = iriref();
  }

  void triples() {
    skip_ws();
    if (peek() == '[') {
      const Term subject = blank_node_property_list();
      skip_ws();
      if (peek() != '.') {
        predicate_object_list(subject);
      }
      return;
    }
    const Term subject = subject_term();
    predicate_object_list(subject);
  }

  Term subject_term() {
    skip_ws();
    const char c = peek();
    if (c == '(') unsupported("RDF collections are not supported");
    if (c == '<') return Term::iri(iriref());
    if (c == '_' && peek(1) == ':') return blank_label();
    if (c == '"' || c == '\'' || c == '[') fail("invalid subject");
    if (at_end()) fail("expected subject");
    return Term::iri(prefixed_name());
  }

  void predicate_object_list(const Term& subject) {
    for (;;) {
      const Term predicate = verb();
      object_list(subject, predicate);
      skip_ws();
      if (peek() != ';') return;
      while (peek() == ';') {
        advance();
        skip_ws();
      }
      // A trailing ';' may be followed directly by the terminator.
      if (at_end() || peek() == '.' || peek() == ']') return;
    }
  }

  Term verb() {
    skip_ws();
    if (at_end()) fail("expected predicate");
    if (peek() == 'a' && !is_name_char(static_cast<unsigned char>(peek(1))) && peek(1) != ':' &&
        peek(1) != '.') {
      advance();
      return Term::iri(std::string(vocab::kRdfType));
    }
    if (peek() == '<') return Term::iri(iriref());
    if (peek() == '_' || peek() == '"' || peek() == '\'' || peek() == '[' || peek() == '(') {
      fail("predicate must be an IRI");
    }
    return Term::iri(prefixed_name());
  }

  void object_list(const Term& subject, const Term& predicate) {
    for (;;) {
      const Term object = object_term();
      out_->push_back(SourcedTriple{subject, predicate, object, std::string(document_iri_), false});
      skip_ws();
      if (peek() != ',') return;
      advance();
    }
  }

  Term object_term() {
    skip_ws();
    if (at_end()) fail("expected object");
    const char c = peek();
    if (c == '(') unsupported("RDF collections are not supported");
    if (c == '<') return Term::iri(iriref());
    if (c == '_' && peek(1) == ':') return blank_label();
    if (c == '[') return blank_node_property_list();
    if (c == '"' || c == '\'') return rdf_literal();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      return numeric_literal();
    }
    if (keyword_ahead("true", false)) {
      consume(4);
      return Term::literal("true", std::string(vocab::kXsdBoolean));
    }
    if (keyword_ahead("false", false)) {
      consume(5);
      return Term::literal("false", std::string(vocab::kXsdBoolean));
    }
    return Term::iri(prefixed_name());
  }

  Term blank_node_property_list() {
    advance();  // '['
    const Term node = Term::blank("genid" + std::to_string(++anon_counter_));
    skip_ws();
    if (peek() == ']') {
      advance();
      return node;
    }
    predicate_object_list(node);
    expect(']', "']' to close blank node property list");
    return node;
  }

  Term blank_label() {
    consume(2);  // "_:"
    std::string label;
    while (!at_end()) {
      const auto c = static_cast<unsigned char>(peek());
      if (is_name_char(c) || (c == '.' && is_name_char(static_cast<unsigned char>(peek(1))))) {
        label += advance();
      } else {
        break;
      }
    }
    if (label.empty()) fail("empty blank node label");
    return Term::blank(std::move(label));
  }

  std::string resolve(const std::string& raw) {
    if (is_absolute_iri(raw)) return raw;
    return resolve_iri(base_, raw);
  }

  std::string iriref() {
    if (peek() != '<') fail("expected IRI");
    advance();
    std::string raw;
    for (;;) {
      if (at_end()) fail("unterminated IRI");
      const char c = advance();
      if (c == '>') break;
      if (c == '\\') {
        const char kind = at_end() ? '\0' : advance();
        if (kind != 'u' && kind != 'U') fail("invalid escape in IRI");
        append_utf8(raw, hex_codepoint(kind == 'u' ? 4 : 8));
        continue;
      }
      if (static_cast<unsigned char>(c) <= 0x20 || c == '<' || c == '"' || c == '{' || c == '}' ||
          c == '|' || c == '^' || c == '`') {
        fail("invalid character in IRI");
      }
      raw += c;
    }
    return resolve(raw);
  }

  std::string prefixed_name() {
    std::string prefix;
    while (!at_end() && peek() != ':') {
      const auto c = static_cast<unsigned char>(peek());
      if (is_name_char(c) || (c == '.' && !prefix.empty())) {
        prefix += advance();
      } else {
        fail("unexpected character '" + std::string(1, static_cast<char>(c)) + "'");
      }
    }
    if (at_end()) fail("expected ':' in prefixed name");
    advance();
    const auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) fail("undeclared prefix '" + prefix + ":'");
    std::string local;
    while (!at_end()) {
      const auto c = static_cast<unsigned char>(peek());
      if (is_name_char(c) || c == ':') {
        local += advance();
      } else if (c == '.') {
        const auto next = static_cast<unsigned char>(peek(1));
        if (is_name_char(next) || next == ':' || next == '%' || next == '\\') {
          local += advance();
        } else {
          break;
        }
      } else if (c == '%') {
        local += advance();
        for (int i = 0; i < 2; ++i) {
          if (!std::isxdigit(static_cast<unsigned char>(peek()))) fail("invalid percent escape");
          local += advance();
        }
      } else if (c == '\\') {
        advance();
        if (at_end()) fail("dangling escape in local name");
        local += advance();
      } else {
        break;
      }
    }
    return resolve(it->second + local);
  }

  char32_t hex_codepoint(int digits) {
    char32_t cp = 0;
    for (int i = 0; i < digits; ++i) {
      if (at_end() || !std::isxdigit(static_cast<unsigned char>(peek()))) {
        fail("invalid unicode escape");
      }
      const char h = advance();
      cp = cp * 16 + static_cast<char32_t>(std::isdigit(static_cast<unsigned char>(h))
                                               ? h - '0'
                                               : std::tolower(static_cast<unsigned char>(h)) - 'a' + 10);
    }
    return cp;
  }

  Term rdf_literal() {
    const char quote = peek();
    if (peek(1) == quote && peek(2) == quote) {
      unsupported("long (triple-quoted) strings are not supported");
    }
    advance();
    std::string lexical;
    for (;;) {
      if (at_end()) fail("unterminated string literal");
      const char c = advance();
      if (c == quote) break;
      if (c == '\n' || c == '\r') fail("line break in short string literal");
      if (c != '\\') {
        lexical += c;
        continue;
      }
      if (at_end()) fail("unterminated string literal");
      switch (const char e = advance(); e) {
        case 't': lexical += '\t'; break;
        case 'b': lexical += '\b'; break;
        case 'n': lexical += '\n'; break;
        case 'r': lexical += '\r'; break;
        case 'f': lexical += '\f'; break;
        case '"': lexical += '"'; break;
        case '\'': lexical += '\''; break;
        case '\\': lexical += '\\'; break;
        case 'u': append_utf8(lexical, hex_codepoint(4)); break;
        case 'U': append_utf8(lexical, hex_codepoint(8)); break;
        default: fail(std::string("invalid string escape '\\") + e + "'");
      }
    }
    if (peek() == '@') {
      advance();
      std::string lang;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) {
        lang += static_cast<char>(std::tolower(static_cast<unsigned char>(advance())));
      }
      if (lang.empty() || !std::isalpha(static_cast<unsigned char>(lang[0]))) {
        fail("invalid language tag");
      }
      return Term::lang_literal(std::move(lexical), std::move(lang));
    }
    if (peek() == '^' && peek(1) == '^') {
      consume(2);
      std::string datatype = peek() == '<' ? iriref() : prefixed_name();
      return Term::literal(std::move(lexical), std::move(datatype));
    }
    return Term::literal(std::move(lexical));
  }

  Term numeric_literal() {
    std::string lexical;
    if (peek() == '+' || peek() == '-') lexical += advance();
    auto digits = [&] {
      std::size_t n = 0;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        lexical += advance();
        ++n;
      }
      return n;
    };
    const std::size_t int_digits = digits();
    bool decimal = false;
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      lexical += advance();
      digits();
      decimal = true;
    }
    if (int_digits == 0 && !decimal) fail("invalid numeric literal");
    if (peek() == 'e' || peek() == 'E') {
      lexical += advance();
      if (peek() == '+' || peek() == '-') lexical += advance();
      if (digits() == 0) fail("invalid exponent");
      return Term::literal(std::move(lexical), std::string(vocab::kXsdDouble));
    }
    return Term::literal(std::move(lexical),
                         std::string(decimal ? vocab::kXsdDecimal : vocab::kXsdInteger));
  }

  std::string_view text_;
  std::string_view document_iri_;
  std::string base_;
  std::map<std::string, std::string> prefixes_;
  std::vector<SourcedTriple>* out_ = nullptr;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
  std::size_t anon_counter_ = 0;
};

}  // namespace

Document parse_turtle(std::string_view text, std::string_view base) {
  return TurtleParser(text, base).run();
}

std::string serialize_ntriples(std::span<const SourcedTriple> triples) {
  using Key = std::tuple<const Term*, const Term*, const Term*>;
  std::vector<Key> keys;
  keys.reserve(triples.size());
  for (const auto& t : triples) {
    keys.emplace_back(&t.subject, &t.predicate, &t.object);
  }
  auto less = [](const Key& a, const Key& b) {
    if (const auto c = *std::get<0>(a) <=> *std::get<0>(b); c != 0) return c < 0;
    if (const auto c = *std::get<1>(a) <=> *std::get<1>(b); c != 0) return c < 0;
    return *std::get<2>(a) < *std::get<2>(b);
  };
  auto equal = [](const Key& a, const Key& b) {
    return *std::get<0>(a) == *std::get<0>(b) && *std::get<1>(a) == *std::get<1>(b) &&
           *std::get<2>(a) == *std::get<2>(b);
  };
  std::sort(keys.begin(), keys.end(), less);
  keys.erase(std::unique(keys.begin(), keys.end(), equal), keys.end());

  std::string out;
  for (const auto& [s, p, o] : keys) {
    out += to_ntriples(*s);
    out += ' ';
    out += to_ntriples(*p);
    out += ' ';
    out += to_ntriples(*o);
    out += " .\n";
  }
  return out;
}

}  // namespace ltqp::rdf
