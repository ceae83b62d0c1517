#include "ltqp/rdf/term.hpp"

#include <cstdio>
#include <functional>

#include "ltqp/rdf/triple.hpp"
#include "ltqp/rdf/vocab.hpp"

namespace ltqp::rdf {

Term Term::iri(std::string value) {
  Term t;
  t.kind_ = TermKind::Iri;
  t.value_ = std::move(value);
  return t;
}

Term Term::blank(std::string label) {
  Term t;
  t.kind_ = TermKind::BlankNode;
  t.value_ = std::move(label);
  return t;
}

Term Term::literal(std::string lexical, std::string datatype) {
  Term t;
  t.kind_ = TermKind::Literal;
  t.value_ = std::move(lexical);
  t.datatype_ = datatype.empty() ? std::string(vocab::kXsdString) : std::move(datatype);
  return t;
}

Term Term::lang_literal(std::string lexical, std::string language) {
  Term t;
  t.kind_ = TermKind::Literal;
  t.value_ = std::move(lexical);
  t.datatype_ = std::string(vocab::kRdfLangString);
  t.language_ = std::move(language);
  return t;
}

namespace {

void append_uchar(std::string& out, unsigned char c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "\\u%04X", static_cast<unsigned>(c));
  out += buf;
}

void append_escaped_iri(std::string& out, const std::string& iri) {
  for (unsigned char c : iri) {
    if (c <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' || c == '|' ||
        c == '^' || c == '`' || c == '\\') {
      append_uchar(out, c);
    } else {
      out += static_cast<char>(c);
    }
  }
}

void append_escaped_string(std::string& out, const std::string& s) {
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20 || c == 0x7f) {
          append_uchar(out, c);
        } else {
          out += static_cast<char>(c);
        }
    }
  }
}

}  // namespace

std::string to_ntriples(const Term& term) {
  std::string out;
  switch (term.kind()) {
    case TermKind::Iri:
      out += '<';
      append_escaped_iri(out, term.value());
      out += '>';
      break;
    case TermKind::BlankNode:
      out += "_:";
      out += term.value();
      break;
    case TermKind::Literal:
      out += '"';
      append_escaped_string(out, term.value());
      out += '"';
      if (!term.language().empty()) {
        out += '@';
        out += term.language();
      } else if (term.datatype() != vocab::kXsdString) {
        out += "^^<";
        append_escaped_iri(out, term.datatype());
        out += '>';
      }
      break;
  }
  return out;
}

std::string to_display(const Term& term) {
  if (term.is_literal() && term.language().empty() && term.datatype() == vocab::kXsdString) {
    return term.value();
  }
  if (term.is_literal() && term.language().empty() &&
      (term.datatype() == vocab::kXsdInteger || term.datatype() == vocab::kXsdDecimal ||
       term.datatype() == vocab::kXsdBoolean || term.datatype() == vocab::kXsdDouble)) {
    return term.value();
  }
  return to_ntriples(term);
}

std::size_t hash_value(const Term& term) noexcept {
  std::size_t seed = static_cast<std::size_t>(term.kind());
  hash_combine(seed, std::hash<std::string>{}(term.value()));
  if (term.is_literal()) {
    hash_combine(seed, std::hash<std::string>{}(term.datatype()));
    hash_combine(seed, std::hash<std::string>{}(term.language()));
  }
  return seed;
}

std::size_t hash_value(const SourcedTriple& t) noexcept {
  std::size_t seed = hash_value(t.subject);
  hash_combine(seed, hash_value(t.predicate));
  hash_combine(seed, hash_value(t.object));
  hash_combine(seed, std::hash<std::string>{}(t.source));
  hash_combine(seed, t.aligned ? 1u : 0u);
  return seed;
}

bool same_statement(const SourcedTriple& a, const SourcedTriple& b) noexcept {
  return a.subject == b.subject && a.predicate == b.predicate && a.object == b.object;
}

bool StorePattern::matches(const SourcedTriple& t) const noexcept {
  return (!subject || *subject == t.subject) && (!predicate || *predicate == t.predicate) &&
         (!object || *object == t.object) && (!source || *source == t.source) &&
         (!aligned || *aligned == t.aligned);
}

}  // namespace ltqp::rdf
