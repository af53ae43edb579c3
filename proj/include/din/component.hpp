#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "din/mixture.hpp"
#include "din/model.hpp"

namespace din {

/// A connected pattern component prepared for matching. Positions are
/// renumbered 0..k-1 (position 0 is the anchor) and bond partners refer to
/// positions. Because the component is connected, an embedding is fully
/// determined by the image of the anchor.
class Component {
 public:
  /// `slots` must be one entry of `pattern.components()`.
  Component(const Pattern& pattern, const std::vector<int>& slots);

  int size() const { return static_cast<int>(agents_.size()); }
  const AgentPattern& agent(int position) const { return agents_[position]; }
  int anchor_type() const { return agents_[0].type; }
  /// Pattern slot each position came from.
  const std::vector<int>& slots() const { return slots_; }
  /// Structural key; equal keys denote identical components.
  const std::string& key() const { return key_; }

  /// Tries the rigid extension from `anchor`; on success `image[p]` holds the
  /// mixture agent for position p.
  bool match_from(const Mixture& mixture, AgentIndex anchor, std::vector<AgentIndex>& image) const;

  /// Follows bonds from an agent assumed to sit at `position` back to the
  /// anchor. Returns kNoAgent if the walk leaves the pattern's shape.
  AgentIndex anchor_for(const Mixture& mixture, AgentIndex agent, int position) const;

 private:
  struct Step {
    int position;
    int from;       // already-placed position
    int from_site;  // site on `from`
    int site;       // site on `position`
  };
  struct Hop {
    int site;          // site on the current agent
    int partner_site;  // site expected on the next agent
    int partner_type;
  };

  std::vector<AgentPattern> agents_;
  std::vector<int> slots_;
  std::vector<Step> plan_;
  std::vector<std::vector<Hop>> to_anchor_;
  std::string key_;
};

/// Number of embeddings of the component into the mixture, by a scan over all
/// live agents of the anchor type.
std::uint64_t count_embeddings(const Component& component, const Mixture& mixture);

/// All embeddings as position->agent images, ordered by anchor index.
std::vector<std::vector<AgentIndex>> enumerate_embeddings(const Component& component, const Mixture& mixture);

/// Compiles every connected component of a pattern.
std::vector<Component> compile_components(const Pattern& pattern);

}  // namespace din
