#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace din {

using RuleIndex = std::int32_t;

inline constexpr int kAnyState = -1;
inline constexpr int kEmptySlot = -1;

struct SiteSignature {
  std::string name;
  std::vector<std::string> states;  // declaration order; the first is the default

  friend bool operator==(const SiteSignature&, const SiteSignature&) = default;
};

struct AgentSignature {
  std::string name;
  std::vector<SiteSignature> sites;

  std::optional<int> find_site(std::string_view site) const;

  friend bool operator==(const AgentSignature&, const AgentSignature&) = default;
};

enum class LinkKind : std::uint8_t { Any, Free, BoundAny, Bound };

/// Link constraint of one site. A `Bound` link names its partner by slot
/// position inside the same pattern, so bond labels never survive parsing.
struct LinkPattern {
  LinkKind kind = LinkKind::Any;
  int agent = -1;
  int site = -1;

  static LinkPattern any() { return {}; }
  static LinkPattern free() { return {LinkKind::Free, -1, -1}; }
  static LinkPattern bound_any() { return {LinkKind::BoundAny, -1, -1}; }
  static LinkPattern bound(int agent, int site) { return {LinkKind::Bound, agent, site}; }

  friend bool operator==(const LinkPattern&, const LinkPattern&) = default;
};

struct SitePattern {
  int site = 0;            // index into the agent signature
  int state = kAnyState;   // index into the site's state list
  LinkPattern link;

  bool unconstrained() const { return state == kAnyState && link.kind == LinkKind::Any; }

  friend bool operator==(const SitePattern&, const SitePattern&) = default;
};

/// One agent slot of a pattern. Sites are kept sorted by signature index and
/// fully unconstrained sites are dropped, so equal meaning implies equal value.
/// An empty slot (`type == kEmptySlot`) is the `.` placeholder of rule sides.
struct AgentPattern {
  int type = kEmptySlot;
  std::vector<SitePattern> sites;

  bool empty() const { return type == kEmptySlot; }
  const SitePattern* find(int site) const;

  friend bool operator==(const AgentPattern&, const AgentPattern&) = default;
};

struct Pattern {
  std::vector<AgentPattern> agents;

  /// Partition of the non-empty slots into bond-connected components. Each
  /// component lists slot indices in increasing order; components are ordered
  /// by their smallest slot.
  std::vector<std::vector<int>> components() const;

  std::size_t live_agent_count() const;

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

struct Rule {
  std::string name;
  Pattern lhs;
  Pattern rhs;  // same slot count as lhs
  double rate = 0.0;
  int symmetry = 1;

  friend bool operator==(const Rule&, const Rule&) = default;
};

struct InitEntry {
  std::int64_t count = 0;
  Pattern pattern;  // fully specified: every signature site has a state and a concrete link

  friend bool operator==(const InitEntry&, const InitEntry&) = default;
};

struct ObservableTerm {
  double coefficient = 1.0;
  Pattern pattern;

  friend bool operator==(const ObservableTerm&, const ObservableTerm&) = default;
};

/// Either a plain pattern count (`weighted == false`, one term with
/// coefficient 1), or a weighted sum of counts optionally divided by a second
/// weighted sum.
struct Observable {
  std::string name;
  bool weighted = false;
  std::vector<ObservableTerm> terms;
  std::vector<ObservableTerm> denominator;

  friend bool operator==(const Observable&, const Observable&) = default;
};

struct Model {
  std::vector<AgentSignature> signatures;
  std::vector<Rule> rules;
  std::vector<InitEntry> init;
  std::vector<Observable> observables;

  std::optional<int> find_agent(std::string_view name) const;
  std::optional<RuleIndex> find_rule(std::string_view name) const;
  RuleIndex rule_count() const { return static_cast<RuleIndex>(rules.size()); }

  friend bool operator==(const Model&, const Model&) = default;
};

}  // namespace din
