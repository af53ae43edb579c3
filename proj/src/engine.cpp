#include "din/engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace din {

namespace {

Selection assemble(const Rule& rule, const std::vector<std::pair<const std::vector<int>*, const std::vector<AgentIndex>*>>& picks,
                   const Mixture& mixture) {
  Embedding embedding;
  embedding.agents.resize(rule.lhs.agents.size());
  std::vector<AgentIndex> used;
  for (const auto& [slots, image] : picks) {
    for (std::size_t p = 0; p < slots->size(); ++p) {
      const AgentIndex a = (*image)[p];
      if (std::find(used.begin(), used.end(), a) != used.end()) return Clash{};
      used.push_back(a);
      embedding.agents[(*slots)[p]] = mixture.ref(a);
    }
  }
  return embedding;
}

double weighted_sum(const std::vector<ObservableTerm>& terms, const Mixture& mixture) {
  double sum = 0.0;
  for (const auto& t : terms) sum += t.coefficient * pattern_count(t.pattern, mixture);
  return sum;
}

}  // namespace

double pattern_count(const Pattern& pattern, const Mixture& mixture) {
  double product = 1.0;
  for (const auto& c : compile_components(pattern)) product *= static_cast<double>(count_embeddings(c, mixture));
  return product;
}

double activity(const Rule& rule, const Mixture& mixture) {
  return rule.rate * pattern_count(rule.lhs, mixture) / rule.symmetry;
}

double eval_observable(const Observable& observable, const Mixture& mixture) {
  const double numerator = weighted_sum(observable.terms, mixture);
  if (observable.denominator.empty()) return numerator;
  const double denominator = weighted_sum(observable.denominator, mixture);
  return denominator == 0.0 ? 0.0 : numerator / denominator;
}

Selection sample_embedding(const Rule& rule, const Mixture& mixture, Rng& rng) {
  std::vector<Component> components = compile_components(rule.lhs);
  std::vector<std::vector<AgentIndex>> chosen;
  chosen.reserve(components.size());
  for (const auto& c : components) {
    auto all = enumerate_embeddings(c, mixture);
    if (all.empty()) throw std::logic_error("sample_embedding: rule '" + rule.name + "' has no embedding");
    chosen.push_back(std::move(all[rng.index(all.size())]));
  }
  std::vector<std::pair<const std::vector<int>*, const std::vector<AgentIndex>*>> picks;
  for (std::size_t k = 0; k < components.size(); ++k) picks.emplace_back(&components[k].slots(), &chosen[k]);
  return assemble(rule, picks, mixture);
}

RewriteEffect apply_rule(const Rule& rule, const Embedding& embedding, Mixture& mixture) {
  const auto& lhs = rule.lhs.agents;
  const auto& rhs = rule.rhs.agents;
  const std::size_t n = lhs.size();
  if (embedding.agents.size() != n) throw std::logic_error("apply_rule: embedding arity mismatch");

  RewriteEffect effect;
  auto touch = [&effect](AgentIndex a) { effect.touched.push_back(a); };
  std::vector<AgentIndex> image(n, kNoAgent);
  for (std::size_t i = 0; i < n; ++i) {
    if (lhs[i].empty()) continue;
    if (!mixture.valid(embedding.agents[i])) throw std::logic_error("apply_rule: stale embedding");
    image[i] = embedding.agents[i].index;
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (lhs[i].empty() && !rhs[i].empty()) {
      image[i] = mixture.add_agent(rhs[i].type);
      effect.created.push_back(image[i]);
      touch(image[i]);
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (rhs[i].empty()) continue;
    for (const auto& s : rhs[i].sites) {
      if (s.state != kAnyState && mixture.state(image[i], s.site) != s.state) {
        mixture.set_state(image[i], s.site, s.state);
        touch(image[i]);
      }
    }
  }

  // Break every bond that differs from the rhs, then create the missing ones.
  for (std::size_t i = 0; i < n; ++i) {
    if (rhs[i].empty()) continue;
    for (const auto& s : rhs[i].sites) {
      if (s.link.kind != LinkKind::Free && s.link.kind != LinkKind::Bound) continue;
      auto current = mixture.partner(image[i], s.site);
      if (!current) continue;
      if (s.link.kind == LinkKind::Bound && *current == SiteRef{image[s.link.agent], s.link.site}) continue;
      mixture.unbind(image[i], s.site);
      touch(image[i]);
      touch(current->agent);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (rhs[i].empty()) continue;
    for (const auto& s : rhs[i].sites) {
      if (s.link.kind != LinkKind::Bound || !mixture.is_free(image[i], s.site)) continue;
      const AgentIndex other = image[s.link.agent];
      mixture.bind(image[i], s.site, other, s.link.site);
      touch(image[i]);
      touch(other);
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (lhs[i].empty() || !rhs[i].empty()) continue;
    for (AgentIndex p : mixture.remove_agent(image[i])) touch(p);
    effect.deleted.push_back(image[i]);
    touch(image[i]);
  }

  std::sort(effect.touched.begin(), effect.touched.end());
  effect.touched.erase(std::unique(effect.touched.begin(), effect.touched.end()), effect.touched.end());
  return effect;
}

Engine::Engine(Model model, MatchMode mode)
    : model_(std::move(model)), mode_(mode), mixture_(init_mixture(model_)) {
  for (const auto& rule : model_.rules) {
    std::vector<RuleComponent> comps;
    for (const auto& c : compile_components(rule.lhs)) comps.push_back({index_.add(c), c.slots()});
    rule_components_.push_back(std::move(comps));
  }
  for (const auto& obs : model_.observables) {
    std::vector<std::vector<int>> terms;
    for (const auto* list : {&obs.terms, &obs.denominator}) {
      for (const auto& term : *list) {
        std::vector<int> ids;
        for (const auto& c : compile_components(term.pattern)) ids.push_back(index_.add(c));
        terms.push_back(std::move(ids));
      }
    }
    observable_terms_.push_back(std::move(terms));
  }
  rules_of_component_.resize(index_.size());
  for (RuleIndex r = 0; r < model_.rule_count(); ++r) {
    for (const auto& c : rule_components_[r]) {
      auto& rules = rules_of_component_[c.id];
      if (rules.empty() || rules.back() != r) rules.push_back(r);
    }
  }
  if (mode_ == MatchMode::Incremental) {
    index_.rebuild(mixture_);
    activities_.alpha.resize(model_.rules.size());
    for (RuleIndex r = 0; r < model_.rule_count(); ++r) activities_.alpha[r] = compute_alpha(r);
    activities_.lambda = 0.0;
    for (double a : activities_.alpha) activities_.lambda += a;
  } else {
    activities_ = recompute_activities();
  }
}

double Engine::compute_alpha(RuleIndex r) const {
  const Rule& rule = model_.rules[r];
  double product = 1.0;
  for (const auto& c : rule_components_[r]) product *= static_cast<double>(index_.count(c.id));
  return rule.rate * product / rule.symmetry;
}

ActivityVector Engine::recompute_activities() const {
  ActivityVector out;
  out.alpha.resize(model_.rules.size());
  for (RuleIndex r = 0; r < model_.rule_count(); ++r) {
    const Rule& rule = model_.rules[r];
    double product = 1.0;
    for (const auto& c : rule_components_[r]) {
      product *= static_cast<double>(count_embeddings(index_.component(c.id), mixture_));
    }
    out.alpha[r] = rule.rate * product / rule.symmetry;
    out.lambda += out.alpha[r];
  }
  return out;
}

std::uint64_t Engine::lhs_component_count(RuleIndex rule, std::size_t component) const {
  const int id = rule_components_[rule][component].id;
  if (mode_ == MatchMode::Incremental) return index_.count(id);
  return count_embeddings(index_.component(id), mixture_);
}

Selection Engine::sample(RuleIndex r, Rng& rng) const {
  const Rule& rule = model_.rules[r];
  const auto& comps = rule_components_[r];
  std::vector<std::vector<AgentIndex>> scanned(comps.size());
  std::vector<std::pair<const std::vector<int>*, const std::vector<AgentIndex>*>> picks;
  for (std::size_t k = 0; k < comps.size(); ++k) {
    if (mode_ == MatchMode::Incremental) {
      const std::uint64_t count = index_.count(comps[k].id);
      if (count == 0) throw std::logic_error("sample: rule '" + rule.name + "' has no embedding");
      picks.emplace_back(&comps[k].slots, &index_.match(comps[k].id, rng.index(count)));
    } else {
      auto all = enumerate_embeddings(index_.component(comps[k].id), mixture_);
      if (all.empty()) throw std::logic_error("sample: rule '" + rule.name + "' has no embedding");
      scanned[k] = std::move(all[rng.index(all.size())]);
      picks.emplace_back(&comps[k].slots, &scanned[k]);
    }
  }
  return assemble(rule, picks, mixture_);
}

RewriteEffect Engine::apply(RuleIndex r, const Embedding& embedding) {
  RewriteEffect effect = apply_rule(model_.rules[r], embedding, mixture_);
  if (mode_ == MatchMode::Incremental) {
    for (int id : index_.update(mixture_, effect.touched)) {
      for (RuleIndex s : rules_of_component_[id]) effect.affected_rules.push_back(s);
    }
    std::sort(effect.affected_rules.begin(), effect.affected_rules.end());
    effect.affected_rules.erase(std::unique(effect.affected_rules.begin(), effect.affected_rules.end()),
                                effect.affected_rules.end());
    for (RuleIndex s : effect.affected_rules) activities_.alpha[s] = compute_alpha(s);
    activities_.lambda = 0.0;
    for (double a : activities_.alpha) activities_.lambda += a;
  } else {
    ActivityVector fresh = recompute_activities();
    for (RuleIndex s = 0; s < model_.rule_count(); ++s) {
      if (fresh.alpha[s] != activities_.alpha[s]) effect.affected_rules.push_back(s);
    }
    activities_ = std::move(fresh);
  }
  return effect;
}

double Engine::term_count(const std::vector<int>& ids) const {
  double product = 1.0;
  for (int id : ids) {
    product *= static_cast<double>(mode_ == MatchMode::Incremental ? index_.count(id)
                                                                   : count_embeddings(index_.component(id), mixture_));
  }
  return product;
}

double Engine::observable(std::size_t index) const {
  const Observable& obs = model_.observables[index];
  const auto& terms = observable_terms_[index];
  double numerator = 0.0, denominator = 0.0;
  for (std::size_t k = 0; k < obs.terms.size(); ++k) numerator += obs.terms[k].coefficient * term_count(terms[k]);
  if (obs.denominator.empty()) return numerator;
  for (std::size_t k = 0; k < obs.denominator.size(); ++k) {
    denominator += obs.denominator[k].coefficient * term_count(terms[obs.terms.size() + k]);
  }
  return denominator == 0.0 ? 0.0 : numerator / denominator;
}

}  // namespace din
