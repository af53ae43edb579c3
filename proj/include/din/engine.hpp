#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "din/component.hpp"
#include "din/match_index.hpp"
#include "din/mixture.hpp"
#include "din/model.hpp"
#include "din/rng.hpp"

namespace din {

/// Left-hand-side slot -> mixture agent. Empty slots hold a default AgentRef.
struct Embedding {
  std::vector<AgentRef> agents;

  friend bool operator==(const Embedding&, const Embedding&) = default;
};

/// Two independently sampled components landed on a shared agent.
struct Clash {
  friend bool operator==(const Clash&, const Clash&) = default;
};

using Selection = std::variant<Embedding, Clash>;

struct RewriteEffect {
  std::vector<AgentIndex> touched;  // sorted; every agent whose state or bonds changed
  std::vector<AgentIndex> created;
  std::vector<AgentIndex> deleted;
  std::vector<RuleIndex> affected_rules;  // filled in by Engine::apply
};

struct ActivityVector {
  std::vector<double> alpha;
  double lambda = 0.0;

  /// alpha[s] / lambda; only meaningful when lambda > 0.
  double probability(RuleIndex s) const { return alpha[s] / lambda; }
};

/// Product of per-component embedding counts of a whole pattern.
double pattern_count(const Pattern& pattern, const Mixture& mixture);

/// rate * |embeddings of lhs| / symmetry, counted from scratch.
double activity(const Rule& rule, const Mixture& mixture);

double eval_observable(const Observable& observable, const Mixture& mixture);

/// Picks one embedding per lhs component uniformly and independently by
/// scanning the mixture. Draws one rng.index() per component, in lhs order.
Selection sample_embedding(const Rule& rule, const Mixture& mixture, Rng& rng);

/// Rewrites the mixture in place according to the rule's lhs -> rhs diff.
/// Created agents start from the signature defaults before rhs states apply.
RewriteEffect apply_rule(const Rule& rule, const Embedding& embedding, Mixture& mixture);

enum class MatchMode { Incremental, FullRecount };

/// Mixture plus cached rule activities. In Incremental mode embedding sets
/// are maintained by a MatchIndex; FullRecount rescans after every rewrite and
/// exists for differential testing.
class Engine {
 public:
  explicit Engine(Model model, MatchMode mode = MatchMode::Incremental);

  const Model& model() const { return model_; }
  const Mixture& mixture() const { return mixture_; }
  const ActivityVector& activities() const { return activities_; }
  MatchMode mode() const { return mode_; }

  /// Same draw order as sample_embedding; picks among the maintained sets.
  Selection sample(RuleIndex rule, Rng& rng) const;
  RewriteEffect apply(RuleIndex rule, const Embedding& embedding);

  double observable(std::size_t index) const;
  std::uint64_t lhs_component_count(RuleIndex rule, std::size_t component) const;

  /// Activities recounted from scratch, ignoring all caches.
  ActivityVector recompute_activities() const;

 private:
  struct RuleComponent {
    int id;
    std::vector<int> slots;
  };

  double compute_alpha(RuleIndex rule) const;
  double term_count(const std::vector<int>& ids) const;

  Model model_;
  MatchMode mode_;
  Mixture mixture_;
  MatchIndex index_;
  std::vector<std::vector<RuleComponent>> rule_components_;
  std::vector<std::vector<RuleIndex>> rules_of_component_;
  // [observable][term] -> component ids; denominators follow numerators.
  std::vector<std::vector<std::vector<int>>> observable_terms_;
  ActivityVector activities_;
};

}  // namespace din
