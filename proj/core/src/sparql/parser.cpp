#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "ltqp/rdf/iri.hpp"
#include "ltqp/rdf/vocab.hpp"
#include "ltqp/sparql/query.hpp"

namespace ltqp::sparql {

QueryParseError::QueryParseError(std::size_t position, std::string message)
    : std::runtime_error("at offset " + std::to_string(position) + ": " + message),
      position_(position),
      message_(std::move(message)) {}

std::vector<std::string> Query::columns() const {
  std::vector<std::string> cols = projection;
  if (count) cols.push_back(count->alias);
  return cols;
}

namespace {

void collect_variables(const GroupPattern& g, std::vector<std::string>& out) {
  auto add = [&](const PatternTerm& t) {
    if (const auto* v = std::get_if<Variable>(&t)) {
      if (std::find(out.begin(), out.end(), v->name) == out.end()) out.push_back(v->name);
    }
  };
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Bgp>) {
          for (const auto& tp : node.patterns) {
            add(tp.subject);
            add(tp.predicate);
            add(tp.object);
          }
        } else if constexpr (std::is_same_v<T, Union>) {
          collect_variables(*node.left, out);
          collect_variables(*node.right, out);
        } else if constexpr (std::is_same_v<T, Join>) {
          for (const auto& p : node.parts) collect_variables(*p, out);
        } else {
          collect_variables(*node.inner, out);
        }
      },
      g.node);
}

void collect_patterns(const GroupPattern& g, std::vector<TriplePattern>& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Bgp>) {
          out.insert(out.end(), node.patterns.begin(), node.patterns.end());
        } else if constexpr (std::is_same_v<T, Union>) {
          collect_patterns(*node.left, out);
          collect_patterns(*node.right, out);
        } else if constexpr (std::is_same_v<T, Join>) {
          for (const auto& p : node.parts) collect_patterns(*p, out);
        } else {
          collect_patterns(*node.inner, out);
        }
      },
      g.node);
}

bool is_pn_char(unsigned char c) noexcept {
  return std::isalnum(c) || c == '_' || c == '-' || c >= 0x80;
}

const std::set<std::string>& unsupported_keywords() {
  static const std::set<std::string> kw = {
      "OPTIONAL", "MINUS", "BIND", "VALUES", "SERVICE", "GRAPH", "ORDER", "OFFSET",
      "CONSTRUCT", "ASK", "DESCRIBE", "HAVING", "FROM", "REDUCED", "EXISTS", "NOT",
      "SELECT",  // subqueries
  };
  return kw;
}

class QueryParser {
public:
  explicit QueryParser(std::string_view text) : text_(text) {}

  Query run() {
    Query q;
    prologue();
    skip_ws();
    if (!keyword("SELECT")) {
      const std::string word = peek_word();
      if (unsupported_keywords().contains(word)) {
        unsupported(word + " queries are not supported");
      }
      fail("expected SELECT");
    }
    select_clause(q);
    skip_ws();
    keyword("WHERE");
    skip_ws();
    if (peek() != '{') fail("expected '{' to open the WHERE clause");
    q.pattern = group_graph_pattern();
    solution_modifiers(q);
    skip_ws();
    if (!at_end()) {
      const std::string word = peek_word();
      if (unsupported_keywords().contains(word)) unsupported(word + " is not supported");
      fail("unexpected trailing input");
    }
    validate(q);
    return q;
  }

private:
  bool at_end() const noexcept { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const noexcept {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  [[noreturn]] void fail(const std::string& message) const { throw QueryParseError(pos_, message); }
  [[noreturn]] void unsupported(const std::string& message) const {
    throw UnsupportedFeature(pos_, message);
  }

  void skip_ws() {
    while (!at_end()) {
      if (std::isspace(static_cast<unsigned char>(peek()))) {
        ++pos_;
      } else if (peek() == '#') {
        while (!at_end() && peek() != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string peek_word() const {
    std::string w;
    for (std::size_t i = pos_; i < text_.size() && std::isalpha(static_cast<unsigned char>(text_[i])); ++i) {
      w += static_cast<char>(std::toupper(static_cast<unsigned char>(text_[i])));
    }
    return w;
  }

  // Case-insensitive keyword followed by a non-name character.
  bool keyword(std::string_view kw) {
    skip_ws();
    if (text_.size() - pos_ < kw.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i) {
      if (std::toupper(static_cast<unsigned char>(text_[pos_ + i])) != kw[i]) return false;
    }
    const auto after = static_cast<unsigned char>(peek(kw.size()));
    if (is_pn_char(after) || after == ':') return false;
    pos_ += kw.size();
    return true;
  }

  void expect(char c, const char* what) {
    skip_ws();
    if (peek() != c) fail(std::string("expected ") + what);
    ++pos_;
  }

  void prologue() {
    for (;;) {
      skip_ws();
      if (keyword("PREFIX")) {
        skip_ws();
        std::string name;
        while (!at_end() && peek() != ':') {
          if (!is_pn_char(static_cast<unsigned char>(peek())) && peek() != '.') {
            fail("invalid prefix name");
          }
          name += text_[pos_++];
        }
        if (at_end()) fail("expected ':' in PREFIX declaration");
        ++pos_;
        skip_ws();
        prefixes_[name] = iriref();
      } else if (keyword("BASE")) {
        skip_ws();
        base_ = iriref();
      } else {
        return;
      }
    }
  }

  void select_clause(Query& q) {
    if (keyword("DISTINCT")) q.distinct = true;
    skip_ws();
    if (keyword("REDUCED")) unsupported("REDUCED is not supported");
    bool any = false;
    for (;;) {
      skip_ws();
      if (peek() == '?' || peek() == '$') {
        q.projection.push_back(variable_name());
        any = true;
      } else if (peek() == '*') {
        ++pos_;
        select_all_ = true;
        any = true;
      } else if (peek() == '(') {
        ++pos_;
        if (!keyword("COUNT")) unsupported("only COUNT aggregates are supported");
        if (q.count) unsupported("at most one aggregate is supported");
        expect('(', "'(' after COUNT");
        skip_ws();
        if (keyword("DISTINCT")) unsupported("COUNT(DISTINCT ...) is not supported");
        skip_ws();
        if (peek() != '?' && peek() != '$') unsupported("COUNT argument must be a variable");
        CountAggregate agg;
        agg.counted = variable_name();
        expect(')', "')' after COUNT argument");
        if (!keyword("AS")) fail("expected AS in aggregate projection");
        skip_ws();
        agg.alias = variable_name();
        expect(')', "')' to close aggregate projection");
        q.count = std::move(agg);
        any = true;
      } else {
        break;
      }
    }
    if (!any) fail("expected projection");
    if (select_all_ && (!q.projection.empty() || q.count)) {
      fail("'*' cannot be combined with other projections");
    }
  }

  void solution_modifiers(Query& q) {
    if (keyword("GROUP")) {
      if (!keyword("BY")) fail("expected BY after GROUP");
      skip_ws();
      if (peek() != '?' && peek() != '$') unsupported("GROUP BY supports a single variable");
      q.group_by = variable_name();
      skip_ws();
      if (peek() == '?' || peek() == '$') unsupported("GROUP BY supports a single variable");
    }
    if (keyword("LIMIT")) {
      skip_ws();
      const std::size_t start = pos_;
      std::size_t n = 0;
      while (std::isdigit(static_cast<unsigned char>(peek()))) n = n * 10 + (text_[pos_++] - '0');
      if (pos_ == start) fail("expected integer after LIMIT");
      if (n == 0) throw QueryParseError(start, "LIMIT must be a positive integer");
      q.limit = n;
    }
  }

  void validate(Query& q) {
    const auto vars = pattern_variables(*q.pattern);
    if (select_all_) q.projection = vars;
    for (const auto& v : q.projection) {
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) {
        throw QueryParseError(0, "projected variable ?" + v + " does not occur in the pattern");
      }
    }
    if (q.count) {
      if (std::find(vars.begin(), vars.end(), q.count->counted) == vars.end()) {
        throw QueryParseError(0, "counted variable ?" + q.count->counted +
                                     " does not occur in the pattern");
      }
      if (std::find(vars.begin(), vars.end(), q.count->alias) != vars.end()) {
        throw QueryParseError(0, "aggregate alias ?" + q.count->alias + " is already bound");
      }
    }
    if (q.group_by) {
      if (!q.count || q.projection.size() != 1 || q.projection[0] != *q.group_by) {
        throw QueryParseError(0, "GROUP BY queries must project the group variable and one COUNT");
      }
      if (std::find(vars.begin(), vars.end(), *q.group_by) == vars.end()) {
        throw QueryParseError(0, "group variable ?" + *q.group_by + " does not occur in the pattern");
      }
    } else if (q.count && !q.projection.empty()) {
      throw QueryParseError(0, "non-aggregated variables require GROUP BY");
    }
  }

  std::string variable_name() {
    ++pos_;  // '?' or '$'
    std::string name;
    while (!at_end() && is_pn_char(static_cast<unsigned char>(peek()))) name += text_[pos_++];
    if (name.empty()) fail("empty variable name");
    return name;
  }

  std::string resolve(std::string raw) {
    if (rdf::is_absolute_iri(raw) || base_.empty()) return raw;
    return rdf::resolve_iri(base_, raw);
  }

  std::string iriref() {
    if (peek() != '<') fail("expected IRI");
    ++pos_;
    std::string raw;
    while (!at_end() && peek() != '>') {
      const char c = text_[pos_++];
      if (static_cast<unsigned char>(c) <= 0x20) fail("invalid character in IRI");
      raw += c;
    }
    if (at_end()) fail("unterminated IRI");
    ++pos_;
    return resolve(std::move(raw));
  }

  std::string prefixed_name() {
    std::string prefix;
    while (!at_end() && peek() != ':') {
      const auto c = static_cast<unsigned char>(peek());
      if (!is_pn_char(c) && !(c == '.' && !prefix.empty())) {
        fail(std::string("unexpected character '") + static_cast<char>(c) + "'");
      }
      prefix += text_[pos_++];
    }
    if (at_end()) fail("expected ':' in prefixed name");
    ++pos_;
    const auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) fail("undeclared prefix '" + prefix + ":'");
    std::string local;
    while (!at_end()) {
      const auto c = static_cast<unsigned char>(peek());
      if (is_pn_char(c) || c == ':') {
        local += text_[pos_++];
      } else if (c == '.' && (is_pn_char(static_cast<unsigned char>(peek(1))) || peek(1) == ':')) {
        local += text_[pos_++];
      } else {
        break;
      }
    }
    return resolve(it->second + local);
  }

  rdf::Term literal() {
    const char quote = peek();
    if (peek(1) == quote && peek(2) == quote) unsupported("long strings are not supported");
    ++pos_;
    std::string lexical;
    for (;;) {
      if (at_end()) fail("unterminated string literal");
      const char c = text_[pos_++];
      if (c == quote) break;
      if (c == '\\') {
        if (at_end()) fail("unterminated string literal");
        switch (const char e = text_[pos_++]; e) {
          case 't': lexical += '\t'; break;
          case 'n': lexical += '\n'; break;
          case 'r': lexical += '\r'; break;
          case '"': lexical += '"'; break;
          case '\'': lexical += '\''; break;
          case '\\': lexical += '\\'; break;
          default: fail(std::string("unsupported string escape '\\") + e + "'");
        }
      } else {
        lexical += c;
      }
    }
    if (peek() == '@') {
      ++pos_;
      std::string lang;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) {
        lang += static_cast<char>(std::tolower(static_cast<unsigned char>(text_[pos_++])));
      }
      if (lang.empty()) fail("invalid language tag");
      return rdf::Term::lang_literal(std::move(lexical), std::move(lang));
    }
    if (peek() == '^' && peek(1) == '^') {
      pos_ += 2;
      std::string dt = peek() == '<' ? iriref() : prefixed_name();
      return rdf::Term::literal(std::move(lexical), std::move(dt));
    }
    return rdf::Term::literal(std::move(lexical));
  }

  rdf::Term numeric() {
    std::string lexical;
    if (peek() == '+' || peek() == '-') lexical += text_[pos_++];
    while (std::isdigit(static_cast<unsigned char>(peek()))) lexical += text_[pos_++];
    bool decimal = false;
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      decimal = true;
      lexical += text_[pos_++];
      while (std::isdigit(static_cast<unsigned char>(peek()))) lexical += text_[pos_++];
    }
    if (lexical.empty() || lexical == "+" || lexical == "-") fail("invalid numeric literal");
    return rdf::Term::literal(std::move(lexical),
                              std::string(decimal ? vocab::kXsdDecimal : vocab::kXsdInteger));
  }

  bool boolean_ahead(std::string_view word) const {
    if (text_.substr(pos_, word.size()) != word) return false;
    const auto after = static_cast<unsigned char>(peek(word.size()));
    return !is_pn_char(after) && after != ':';
  }

  // Constant term: IRI, prefixed name, literal, number or boolean.
  rdf::Term constant() {
    skip_ws();
    const char c = peek();
    if (c == '<') return rdf::Term::iri(iriref());
    if (c == '"' || c == '\'') return literal();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-') return numeric();
    if (boolean_ahead("true")) {
      pos_ += 4;
      return rdf::Term::literal("true", std::string(vocab::kXsdBoolean));
    }
    if (boolean_ahead("false")) {
      pos_ += 5;
      return rdf::Term::literal("false", std::string(vocab::kXsdBoolean));
    }
    if (c == '_' && peek(1) == ':') unsupported("blank nodes in queries are not supported");
    if (c == '[' || c == '(') unsupported("blank node or collection syntax is not supported");
    return rdf::Term::iri(prefixed_name());
  }

  void reject_keyword() const {
    const std::string word = peek_word();
    if (unsupported_keywords().contains(word) &&
        !is_pn_char(static_cast<unsigned char>(peek(word.size()))) && peek(word.size()) != ':') {
      unsupported(word + " is not supported");
    }
  }

  PatternTerm term_or_variable() {
    skip_ws();
    if (at_end()) fail("expected term or variable");
    reject_keyword();
    if (peek() == '?' || peek() == '$') return Variable{variable_name()};
    return constant();
  }

  PatternTerm verb() {
    skip_ws();
    if (at_end()) fail("expected predicate");
    reject_keyword();
    if (peek() == '^' || peek() == '(' || peek() == '!') unsupported("property paths are not supported");
    PatternTerm p;
    if (peek() == 'a' && !is_pn_char(static_cast<unsigned char>(peek(1))) && peek(1) != ':') {
      ++pos_;
      p = rdf::Term::iri(std::string(vocab::kRdfType));
    } else if (peek() == '?' || peek() == '$') {
      p = Variable{variable_name()};
    } else {
      rdf::Term t = constant();
      if (!t.is_iri()) fail("predicate must be an IRI or variable");
      p = std::move(t);
    }
    const char next = peek();
    if (next == '/' || next == '|' || next == '*' || next == '+' ||
        (next == '?' && !is_pn_char(static_cast<unsigned char>(peek(1))))) {
      unsupported("property paths are not supported");
    }
    return p;
  }

  void triples_same_subject(std::vector<TriplePattern>& out) {
    const PatternTerm subject = term_or_variable();
    if (const auto* t = std::get_if<rdf::Term>(&subject); t && t->is_literal()) {
      fail("literal in subject position");
    }
    for (;;) {
      const PatternTerm predicate = verb();
      for (;;) {
        out.push_back(TriplePattern{subject, predicate, term_or_variable()});
        skip_ws();
        if (peek() != ',') break;
        ++pos_;
      }
      skip_ws();
      if (peek() != ';') return;
      while (peek() == ';') {
        ++pos_;
        skip_ws();
      }
      if (peek() == '.' || peek() == '}') return;
    }
  }

  Constraint filter() {
    expect('(', "'(' after FILTER");
    skip_ws();
    if (peek() != '?' && peek() != '$') unsupported("FILTER supports only ?var = / != constant");
    Constraint c;
    c.variable = variable_name();
    skip_ws();
    if (peek() == '=') {
      ++pos_;
    } else if (peek() == '!' && peek(1) == '=') {
      pos_ += 2;
      c.equal = false;
    } else {
      unsupported("FILTER supports only ?var = / != constant");
    }
    skip_ws();
    if (peek() == '?' || peek() == '$') unsupported("FILTER comparisons must be against a constant");
    c.value = constant();
    expect(')', "')' to close FILTER");
    return c;
  }

  GroupPatternPtr group_graph_pattern() {
    expect('{', "'{'");
    std::vector<GroupPatternPtr> parts;
    std::vector<TriplePattern> current;
    std::vector<Constraint> filters;
    auto flush = [&] {
      if (!current.empty()) {
        parts.push_back(std::make_shared<GroupPattern>(GroupPattern{Bgp{std::move(current)}}));
        current.clear();
      }
    };
    for (;;) {
      skip_ws();
      if (at_end()) fail("expected '}'");
      const char c = peek();
      if (c == '}') {
        ++pos_;
        break;
      }
      if (c == '.') {
        ++pos_;
        continue;
      }
      if (c == '{') {
        flush();
        GroupPatternPtr block = group_graph_pattern();
        while (keyword("UNION")) {
          skip_ws();
          if (peek() != '{') fail("expected '{' after UNION");
          GroupPatternPtr right = group_graph_pattern();
          block = std::make_shared<GroupPattern>(GroupPattern{Union{block, right}});
        }
        parts.push_back(std::move(block));
        continue;
      }
      if (keyword("FILTER")) {
        filters.push_back(filter());
        continue;
      }
      reject_keyword();
      triples_same_subject(current);
      skip_ws();
      if (peek() != '.' && peek() != '}' && peek() != '{' && !keyword_ahead("FILTER")) {
        fail("expected '.' or '}' after triple pattern");
      }
    }
    flush();
    GroupPatternPtr result;
    if (parts.empty()) {
      result = std::make_shared<GroupPattern>(GroupPattern{Bgp{}});
    } else if (parts.size() == 1) {
      result = parts.front();
    } else {
      result = std::make_shared<GroupPattern>(GroupPattern{Join{std::move(parts)}});
    }
    for (auto& f : filters) {
      result = std::make_shared<GroupPattern>(GroupPattern{Filtered{result, std::move(f)}});
    }
    return result;
  }

  bool keyword_ahead(std::string_view kw) const {
    if (text_.size() - pos_ < kw.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i) {
      if (std::toupper(static_cast<unsigned char>(text_[pos_ + i])) != kw[i]) return false;
    }
    return true;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::map<std::string, std::string> prefixes_;
  std::string base_;
  bool select_all_ = false;
};

}  // namespace

std::vector<std::string> pattern_variables(const GroupPattern& pattern) {
  std::vector<std::string> out;
  collect_variables(pattern, out);
  return out;
}

std::vector<TriplePattern> all_triple_patterns(const GroupPattern& pattern) {
  std::vector<TriplePattern> out;
  collect_patterns(pattern, out);
  return out;
}

Query parse_query(std::string_view text) { return QueryParser(text).run(); }

}  // namespace ltqp::sparql
