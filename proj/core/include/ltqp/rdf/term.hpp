#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace ltqp::rdf {

enum class TermKind : std::uint8_t { Iri = 0, BlankNode = 1, Literal = 2 };

/// An RDF term. Ordering is canonical: kind first, then value, datatype and
/// language tag compared lexicographically.
class Term {
public:
  Term() = default;

  static Term iri(std::string value);
  static Term blank(std::string label);
  /// Plain literal; an empty datatype means xsd:string.
  static Term literal(std::string lexical, std::string datatype = {});
  static Term lang_literal(std::string lexical, std::string language);

  TermKind kind() const noexcept { return kind_; }
  bool is_iri() const noexcept { return kind_ == TermKind::Iri; }
  bool is_blank() const noexcept { return kind_ == TermKind::BlankNode; }
  bool is_literal() const noexcept { return kind_ == TermKind::Literal; }

  /// IRI string, blank node label, or literal lexical form.
  const std::string& value() const noexcept { return value_; }
  const std::string& datatype() const noexcept { return datatype_; }
  const std::string& language() const noexcept { return language_; }

  friend auto operator<=>(const Term&, const Term&) = default;
  friend bool operator==(const Term&, const Term&) = default;

private:
  TermKind kind_ = TermKind::Iri;
  std::string value_;
  std::string datatype_;
  std::string language_;
};

/// N-Triples rendering of a single term.
std::string to_ntriples(const Term& term);

/// Human-oriented short rendering (IRIs in angle brackets, literals quoted).
std::string to_display(const Term& term);

std::size_t hash_value(const Term& term) noexcept;

inline void hash_combine(std::size_t& seed, std::size_t h) noexcept {
  seed ^= h + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept { return hash_value(t); }
};

}  // namespace ltqp::rdf
