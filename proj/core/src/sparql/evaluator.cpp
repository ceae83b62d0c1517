#include "ltqp/sparql/evaluator.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "ltqp/rdf/vocab.hpp"

namespace ltqp::sparql {

bool compatible(const BindingRow& a, const BindingRow& b) {
  const BindingRow& small = a.size() <= b.size() ? a : b;
  const BindingRow& large = a.size() <= b.size() ? b : a;
  for (const auto& [var, term] : small) {
    if (const auto it = large.find(var); it != large.end() && it->second != term) return false;
  }
  return true;
}

namespace {

int compare_rows(const BindingRow& a, const BindingRow& b, const std::vector<std::string>& vars) {
  for (const auto& v : vars) {
    const auto ia = a.find(v);
    const auto ib = b.find(v);
    const bool ba = ia != a.end();
    const bool bb = ib != b.end();
    if (ba != bb) return ba ? 1 : -1;
    if (!ba) continue;
    if (const auto c = ia->second <=> ib->second; c != 0) return c < 0 ? -1 : 1;
  }
  return 0;
}

struct StatementKey {
  const rdf::SourcedTriple* t;
  bool operator==(const StatementKey& o) const { return rdf::same_statement(*t, *o.t); }
};
struct StatementKeyHash {
  std::size_t operator()(const StatementKey& k) const noexcept {
    std::size_t seed = rdf::hash_value(k.t->subject);
    rdf::hash_combine(seed, rdf::hash_value(k.t->predicate));
    rdf::hash_combine(seed, rdf::hash_value(k.t->object));
    return seed;
  }
};

rdf::StorePattern to_store_pattern(const TriplePattern& tp) {
  rdf::StorePattern p;
  if (const auto* t = std::get_if<rdf::Term>(&tp.subject)) p.subject = *t;
  if (const auto* t = std::get_if<rdf::Term>(&tp.predicate)) p.predicate = *t;
  if (const auto* t = std::get_if<rdf::Term>(&tp.object)) p.object = *t;
  return p;
}

// Rows for one triple pattern; repeated variables must bind equal terms.
std::vector<BindingRow> pattern_rows(const TriplePattern& tp, const GraphView& view) {
  std::vector<BindingRow> rows;
  for (const auto& t : view.match(to_store_pattern(tp))) {
    BindingRow row;
    bool ok = true;
    auto bind = [&](const PatternTerm& pt, const rdf::Term& value) {
      if (const auto* v = std::get_if<Variable>(&pt)) {
        const auto [it, inserted] = row.emplace(v->name, value);
        if (!inserted && it->second != value) ok = false;
      }
    };
    bind(tp.subject, t.subject);
    bind(tp.predicate, t.predicate);
    bind(tp.object, t.object);
    if (ok) rows.push_back(std::move(row));
  }
  return rows;
}

std::set<std::string> always_bound(const std::vector<BindingRow>& rows) {
  std::set<std::string> out;
  if (rows.empty()) return out;
  for (const auto& [v, _] : rows.front()) out.insert(v);
  for (const auto& row : rows) {
    for (auto it = out.begin(); it != out.end();) {
      it = row.contains(*it) ? std::next(it) : out.erase(it);
    }
  }
  return out;
}

struct KeyHash {
  std::size_t operator()(const std::vector<rdf::Term>& key) const noexcept {
    std::size_t seed = key.size();
    for (const auto& t : key) rdf::hash_combine(seed, rdf::hash_value(t));
    return seed;
  }
};

// Hash join: builds on the left input, keyed on variables bound in every row
// of both inputs; remaining shared variables are checked per candidate.
std::vector<BindingRow> hash_join(const std::vector<BindingRow>& left,
                                  const std::vector<BindingRow>& right) {
  if (left.empty() || right.empty()) return {};
  const auto lb = always_bound(left);
  const auto rb = always_bound(right);
  std::vector<std::string> key_vars;
  std::set_intersection(lb.begin(), lb.end(), rb.begin(), rb.end(), std::back_inserter(key_vars));

  auto key_of = [&](const BindingRow& row) {
    std::vector<rdf::Term> key;
    key.reserve(key_vars.size());
    for (const auto& v : key_vars) key.push_back(row.at(v));
    return key;
  };

  std::unordered_map<std::vector<rdf::Term>, std::vector<std::size_t>, KeyHash> table;
  for (std::size_t i = 0; i < left.size(); ++i) table[key_of(left[i])].push_back(i);

  std::vector<BindingRow> out;
  for (const auto& r : right) {
    const auto it = table.find(key_of(r));
    if (it == table.end()) continue;
    for (const auto i : it->second) {
      const BindingRow& l = left[i];
      if (!compatible(l, r)) continue;
      BindingRow merged = l;
      merged.insert(r.begin(), r.end());
      out.push_back(std::move(merged));
    }
  }
  return out;
}

std::vector<BindingRow> evaluate_bgp(const Bgp& bgp, const GraphView& view) {
  if (bgp.patterns.empty()) return {BindingRow{}};
  std::vector<std::size_t> order(bgp.patterns.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> estimates(bgp.patterns.size());
  for (std::size_t i = 0; i < bgp.patterns.size(); ++i) {
    estimates[i] = view.estimate(to_store_pattern(bgp.patterns[i]));
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return estimates[a] < estimates[b]; });

  std::vector<BindingRow> rows = pattern_rows(bgp.patterns[order.front()], view);
  for (std::size_t k = 1; k < order.size() && !rows.empty(); ++k) {
    rows = hash_join(rows, pattern_rows(bgp.patterns[order[k]], view));
  }
  return rows;
}

bool satisfies(const BindingRow& row, const Constraint& c) {
  const auto it = row.find(c.variable);
  if (it == row.end()) return false;  // unbound: the comparison is an error
  return (it->second == c.value) == c.equal;
}

}  // namespace

void sort_canonically(ResultTable& table) {
  std::stable_sort(table.rows.begin(), table.rows.end(), [&](const BindingRow& a, const BindingRow& b) {
    return compare_rows(a, b, table.variables) < 0;
  });
}

std::vector<rdf::SourcedTriple> AlignedView::match(const rdf::StorePattern& pattern) const {
  rdf::StorePattern p = pattern;
  p.aligned = true;
  p.source.reset();
  auto all = snapshot_.match(p);
  std::unordered_set<StatementKey, StatementKeyHash> seen;
  std::vector<rdf::SourcedTriple> out;
  out.reserve(all.size());
  for (auto& t : all) {
    if (seen.insert(StatementKey{&t}).second) out.push_back(t);
  }
  return out;
}

std::size_t AlignedView::estimate(const rdf::StorePattern& pattern) const {
  rdf::StorePattern p = pattern;
  p.aligned = true;
  p.source.reset();
  return snapshot_.count(p);
}

std::vector<BindingRow> evaluate_pattern(const GroupPattern& pattern, const GraphView& view) {
  return std::visit(
      [&](const auto& node) -> std::vector<BindingRow> {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Bgp>) {
          return evaluate_bgp(node, view);
        } else if constexpr (std::is_same_v<T, Union>) {
          auto rows = evaluate_pattern(*node.left, view);
          auto right = evaluate_pattern(*node.right, view);
          rows.insert(rows.end(), std::make_move_iterator(right.begin()),
                      std::make_move_iterator(right.end()));
          return rows;
        } else if constexpr (std::is_same_v<T, Join>) {
          std::vector<BindingRow> rows{BindingRow{}};
          for (const auto& part : node.parts) {
            rows = hash_join(rows, evaluate_pattern(*part, view));
            if (rows.empty()) break;
          }
          return rows;
        } else {
          auto rows = evaluate_pattern(*node.inner, view);
          std::erase_if(rows, [&](const BindingRow& r) { return !satisfies(r, node.constraint); });
          return rows;
        }
      },
      pattern.node);
}

ResultTable evaluate(const Query& query, const GraphView& view) {
  ResultTable table;
  table.variables = query.columns();
  std::vector<BindingRow> rows = evaluate_pattern(*query.pattern, view);

  if (query.count) {
    // Groups keyed by the group variable's binding; an unbound key is its own group.
    std::map<std::optional<rdf::Term>, std::size_t> groups;
    if (!query.group_by) groups[std::nullopt] = 0;
    for (const auto& row : rows) {
      std::optional<rdf::Term> key;
      if (query.group_by) {
        if (const auto it = row.find(*query.group_by); it != row.end()) key = it->second;
      }
      auto& n = groups[key];
      if (row.contains(query.count->counted)) ++n;
    }
    for (const auto& [key, n] : groups) {
      BindingRow out;
      if (key && query.group_by) out.emplace(*query.group_by, *key);
      out.emplace(query.count->alias,
                  rdf::Term::literal(std::to_string(n), std::string(vocab::kXsdInteger)));
      table.rows.push_back(std::move(out));
    }
  } else {
    table.rows.reserve(rows.size());
    for (const auto& row : rows) {
      BindingRow out;
      for (const auto& v : query.projection) {
        if (const auto it = row.find(v); it != row.end()) out.emplace(v, it->second);
      }
      table.rows.push_back(std::move(out));
    }
  }

  sort_canonically(table);
  if (query.distinct) {
    table.rows.erase(std::unique(table.rows.begin(), table.rows.end()), table.rows.end());
  }
  if (query.limit && table.rows.size() > *query.limit) table.rows.resize(*query.limit);
  return table;
}

}  // namespace ltqp::sparql
