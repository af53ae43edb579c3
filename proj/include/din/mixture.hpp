#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "din/model.hpp"

namespace din {

using AgentIndex = std::uint32_t;

inline constexpr AgentIndex kNoAgent = static_cast<AgentIndex>(-1);

/// Index plus generation; a reference goes stale once its agent is deleted,
/// even if the index is later reused.
struct AgentRef {
  AgentIndex index = kNoAgent;
  std::uint32_t generation = 0;

  friend bool operator==(const AgentRef&, const AgentRef&) = default;
};

struct SiteRef {
  AgentIndex agent = kNoAgent;
  int site = -1;

  friend bool operator==(const SiteRef&, const SiteRef&) = default;
};

/// The runtime site graph: fully specified agents with internal states and
/// symmetric bonds.
class Mixture {
 public:
  explicit Mixture(const std::vector<AgentSignature>& signatures);

  AgentIndex add_agent(int type);
  /// Removes an agent, freeing its bonds. Returns the former partners.
  std::vector<AgentIndex> remove_agent(AgentIndex a);

  void set_state(AgentIndex a, int site, int state);
  void bind(AgentIndex a, int site, AgentIndex b, int other_site);
  /// Frees a site and its partner. Returns the former partner, if any.
  std::optional<SiteRef> unbind(AgentIndex a, int site);

  bool alive(AgentIndex a) const { return a < agents_.size() && agents_[a].alive; }
  bool valid(AgentRef ref) const { return alive(ref.index) && agents_[ref.index].generation == ref.generation; }
  AgentRef ref(AgentIndex a) const { return {a, agents_[a].generation}; }

  int type(AgentIndex a) const { return agents_[a].type; }
  int site_count(AgentIndex a) const { return static_cast<int>(agents_[a].sites.size()); }
  int state(AgentIndex a, int site) const { return agents_[a].sites[site].state; }
  std::optional<SiteRef> partner(AgentIndex a, int site) const {
    const Site& s = agents_[a].sites[site];
    if (s.partner == kNoAgent) return std::nullopt;
    return SiteRef{s.partner, s.partner_site};
  }
  bool is_free(AgentIndex a, int site) const { return agents_[a].sites[site].partner == kNoAgent; }

  /// Live agents of one type, in an order that depends only on the history of
  /// operations.
  std::span<const AgentIndex> agents_of_type(int type) const { return by_type_[type]; }
  std::size_t live_count() const { return live_; }
  /// One past the largest agent index ever handed out.
  std::size_t capacity() const { return agents_.size(); }
  int type_count() const { return static_cast<int>(by_type_.size()); }

  /// Order-sensitive digest of the full state, for cheap equality checks.
  std::uint64_t digest() const;

  /// Throws std::logic_error if bond symmetry or state legality is violated.
  void check_invariants() const;

 private:
  struct Site {
    std::int32_t state = kAnyState;
    AgentIndex partner = kNoAgent;
    std::int32_t partner_site = -1;
  };
  struct Agent {
    int type = -1;
    bool alive = false;
    std::uint32_t generation = 0;
    std::uint32_t type_slot = 0;
    std::vector<Site> sites;
  };

  std::vector<std::vector<int>> state_counts_;  // [type][site] -> number of legal states
  std::vector<Agent> agents_;
  std::vector<AgentIndex> free_list_;
  std::vector<std::vector<AgentIndex>> by_type_;
  std::size_t live_ = 0;
};

/// Instantiates the initial mixture declared by a model.
Mixture init_mixture(const Model& model);

}  // namespace din
