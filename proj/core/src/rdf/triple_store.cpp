#include "ltqp/rdf/triple_store.hpp"

#include <algorithm>
#include <cstdio>
#include <mutex>

namespace ltqp::rdf {

std::string blank_scope_prefix(std::string_view source) {
  // FNV-1a, 64 bit
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : source) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "b%016llx_", static_cast<unsigned long long>(h));
  return buf;
}

SourcedTriple scope_blank_nodes(SourcedTriple t) {
  if (!t.subject.is_blank() && !t.object.is_blank()) {
    return t;
  }
  const std::string prefix = blank_scope_prefix(t.source);
  auto scope = [&](Term& term) {
    if (term.is_blank() && !term.value().starts_with(prefix)) {
      term = Term::blank(prefix + term.value());
    }
  };
  scope(t.subject);
  scope(t.object);
  return t;
}

bool TripleStore::insert(SourcedTriple t) {
  t = scope_blank_nodes(std::move(t));
  std::unique_lock lock(mutex_);
  if (live_.contains(t)) {
    return false;
  }
  const auto index = static_cast<std::uint32_t>(entries_.size());
  by_subject_[t.subject].push_back(index);
  by_predicate_[t.predicate].push_back(index);
  by_object_[t.object].push_back(index);
  by_source_[t.source].push_back(index);
  live_.emplace(t, index);
  entries_.push_back(Entry{std::move(t), ++version_});
  return true;
}

bool TripleStore::retire(const SourcedTriple& t) {
  const SourcedTriple key = scope_blank_nodes(t);
  std::unique_lock lock(mutex_);
  const auto it = live_.find(key);
  if (it == live_.end()) {
    return false;
  }
  entries_[it->second].died = ++version_;
  live_.erase(it);
  return true;
}

bool TripleStore::contains(const SourcedTriple& t) const {
  const SourcedTriple key = scope_blank_nodes(t);
  std::shared_lock lock(mutex_);
  return live_.contains(key);
}

template <typename Fn>
void TripleStore::scan(const StorePattern& pattern, std::uint64_t version, Fn&& fn) const {
  // Walk the shortest posting list among the bound components.
  const std::vector<std::uint32_t>* best = nullptr;
  bool bound = false;
  auto consider = [&](const auto& index, const auto& key) {
    bound = true;
    const auto it = index.find(key);
    static const std::vector<std::uint32_t> empty;
    const auto* list = it == index.end() ? &empty : &it->second;
    if (best == nullptr || list->size() < best->size()) {
      best = list;
    }
  };
  if (pattern.subject) consider(by_subject_, *pattern.subject);
  if (pattern.predicate) consider(by_predicate_, *pattern.predicate);
  if (pattern.object) consider(by_object_, *pattern.object);
  if (pattern.source) consider(by_source_, *pattern.source);

  if (bound) {
    for (const auto i : *best) {
      const Entry& e = entries_[i];
      if (e.visible_at(version) && pattern.matches(e.triple)) {
        fn(e.triple);
      }
    }
    return;
  }
  for (const Entry& e : entries_) {
    if (e.visible_at(version) && pattern.matches(e.triple)) {
      fn(e.triple);
    }
  }
}

std::vector<SourcedTriple> TripleStore::match(const StorePattern& pattern) const {
  std::shared_lock lock(mutex_);
  std::vector<SourcedTriple> out;
  scan(pattern, version_, [&](const SourcedTriple& t) { out.push_back(t); });
  return out;
}

std::size_t TripleStore::count(const StorePattern& pattern) const {
  std::shared_lock lock(mutex_);
  std::size_t n = 0;
  scan(pattern, version_, [&](const SourcedTriple&) { ++n; });
  return n;
}

std::vector<std::string> TripleStore::sources() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [source, list] : by_source_) {
    const bool live = std::any_of(list.begin(), list.end(),
                                  [&](std::uint32_t i) { return entries_[i].died == kAlive; });
    if (live) out.push_back(source);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t TripleStore::size() const {
  std::shared_lock lock(mutex_);
  return live_.size();
}

std::size_t TripleStore::appended() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

TripleStore::Snapshot TripleStore::snapshot() const {
  std::shared_lock lock(mutex_);
  return Snapshot(this, version_);
}

std::vector<SourcedTriple> TripleStore::Snapshot::match(const StorePattern& pattern) const {
  std::shared_lock lock(store_->mutex_);
  std::vector<SourcedTriple> out;
  store_->scan(pattern, version_, [&](const SourcedTriple& t) { out.push_back(t); });
  return out;
}

std::size_t TripleStore::Snapshot::count(const StorePattern& pattern) const {
  std::shared_lock lock(store_->mutex_);
  std::size_t n = 0;
  store_->scan(pattern, version_, [&](const SourcedTriple&) { ++n; });
  return n;
}

std::size_t TripleStore::Snapshot::size() const { return count(StorePattern{}); }

}  // namespace ltqp::rdf
