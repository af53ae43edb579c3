#include "din/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "din/symmetry.hpp"

namespace din {

std::string_view to_string(ParseErrorCategory category) {
  switch (category) {
    case ParseErrorCategory::Syntax: return "syntax";
    case ParseErrorCategory::UnknownAgent: return "unknown-agent";
    case ParseErrorCategory::UnknownSite: return "unknown-site";
    case ParseErrorCategory::UnknownState: return "unknown-state";
    case ParseErrorCategory::DanglingBond: return "dangling-bond";
    case ParseErrorCategory::DuplicateName: return "duplicate-name";
    case ParseErrorCategory::NegativeRate: return "negative-rate";
    case ParseErrorCategory::UnderspecifiedInit: return "underspecified-init";
  }
  return "unknown";
}

namespace {

std::string render_message(ParseErrorCategory category, int line, int column,
                           const std::string& token, const std::string& message) {
  std::ostringstream os;
  os << line << ':' << column << ": " << to_string(category) << " error: " << message;
  if (!token.empty()) os << " (at '" << token << "')";
  return os.str();
}

}  // namespace

ParseError::ParseError(ParseErrorCategory category, int line, int column, std::string token,
                       const std::string& message)
    : std::runtime_error(render_message(category, line, column, token, message)),
      category_(category),
      line_(line),
      column_(column),
      token_(std::move(token)) {}

namespace {

using Cat = ParseErrorCategory;

enum class Tok { Ident, Number, Quoted, Directive, Symbol, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

[[noreturn]] void fail(Cat cat, const Token& at, const std::string& message) {
  throw ParseError(cat, at.line, at.column, at.kind == Tok::End ? std::string{} : at.text, message);
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

/// Splits the source into statements (one per logical line) of tokens. Each
/// statement ends with an End token placed just past its last character.
std::vector<std::vector<Token>> tokenize(std::string_view src) {
  std::vector<std::vector<Token>> statements;
  std::vector<Token> current;
  int line = 1, col = 1;
  std::size_t i = 0;

  auto end_statement = [&] {
    if (!current.empty()) {
      current.push_back({Tok::End, "", line, col});
      statements.push_back(std::move(current));
      current.clear();
    }
  };
  auto advance = [&](std::size_t n) {
    i += n;
    col += static_cast<int>(n);
  };

  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      end_statement();
      ++i;
      ++line;
      col = 1;
      continue;
    }
    if (c == '\\' && i + 1 < src.size() && (src[i + 1] == '\n' || src[i + 1] == '\r')) {
      i += src[i + 1] == '\r' && i + 2 < src.size() && src[i + 2] == '\n' ? 3 : 2;
      ++line;
      col = 1;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    const int tl = line, tc = col;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      current.push_back({Tok::Ident, std::string(src.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
          j = k;
        }
      }
      current.push_back({Tok::Number, std::string(src.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    if (c == '\'') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != '\'' && src[j] != '\n') ++j;
      if (j >= src.size() || src[j] != '\'') {
        throw ParseError(Cat::Syntax, tl, tc, "'", "unterminated quoted name");
      }
      current.push_back({Tok::Quoted, std::string(src.substr(i + 1, j - i - 1)), tl, tc});
      advance(j + 1 - i);
      continue;
    }
    if (c == '%') {
      std::size_t j = i + 1;
      while (j < src.size() && ident_char(src[j])) ++j;
      if (j >= src.size() || src[j] != ':') {
        throw ParseError(Cat::Syntax, tl, tc, std::string(src.substr(i, j - i)),
                         "directive must be of the form %name:");
      }
      current.push_back({Tok::Directive, std::string(src.substr(i + 1, j - i - 1)), tl, tc});
      advance(j + 1 - i);
      continue;
    }
    if (src.substr(i, 3) == "<->") {
      current.push_back({Tok::Symbol, "<->", tl, tc});
      advance(3);
      continue;
    }
    if (src.substr(i, 2) == "->") {
      current.push_back({Tok::Symbol, "->", tl, tc});
      advance(2);
      continue;
    }
    static constexpr std::string_view kSingles = "(){}[],.@|+-*/#";
    if (kSingles.find(c) != std::string_view::npos) {
      current.push_back({Tok::Symbol, std::string(1, c), tl, tc});
      advance(1);
      continue;
    }
    throw ParseError(Cat::Syntax, tl, tc, std::string(1, c), "unexpected character");
  }
  end_statement();
  return statements;
}

class Cursor {
 public:
  explicit Cursor(const std::vector<Token>& tokens) : tokens_(tokens) {}

  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }
  bool at_symbol(std::string_view s) const { return peek().kind == Tok::Symbol && peek().text == s; }
  bool at_end() const { return peek().kind == Tok::End; }

  const Token& expect_symbol(std::string_view s) {
    if (!at_symbol(s)) fail(Cat::Syntax, peek(), "expected '" + std::string(s) + "'");
    return next();
  }
  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(Cat::Syntax, peek(), std::string("expected ") + what);
    return next();
  }
  void expect_end() {
    if (!at_end()) fail(Cat::Syntax, peek(), "unexpected token after end of statement");
  }

 private:
  const std::vector<Token>& tokens_;
  std::size_t pos_ = 0;
};

double parse_number(const Token& t) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
  if (ec != std::errc{} || ptr != t.text.data() + t.text.size() || !std::isfinite(v)) {
    fail(Cat::Syntax, t, "malformed number");
  }
  return v;
}

enum class Context { RuleSide, Init, Observable };

class ModelParser {
 public:
  Model parse(std::string_view source) {
    auto statements = tokenize(source);
    // Signatures first, so declarations may follow their use.
    for (const auto& st : statements) {
      if (st.front().kind == Tok::Directive && st.front().text == "agent") parse_agent(st);
    }
    for (const auto& st : statements) {
      const Token& head = st.front();
      if (head.kind == Tok::Directive) {
        if (head.text == "agent") continue;
        if (head.text == "init") {
          parse_init(st);
        } else if (head.text == "obs") {
          parse_observable(st);
        } else {
          fail(Cat::Syntax, head, "unsupported directive %" + head.text + ":");
        }
      } else if (head.kind == Tok::Quoted) {
        parse_rule(st);
      } else {
        fail(Cat::Syntax, head, "expected a directive or a quoted rule name");
      }
    }
    for (auto& rule : model_.rules) rule.symmetry = rule_symmetry(rule);
    return std::move(model_);
  }

 private:
  void parse_agent(const std::vector<Token>& st) {
    Cursor cur(st);
    cur.next();
    const Token& name = cur.expect(Tok::Ident, "agent name");
    if (model_.find_agent(name.text)) fail(Cat::DuplicateName, name, "agent declared twice");
    AgentSignature sig{name.text, {}};
    cur.expect_symbol("(");
    if (!cur.at_symbol(")")) {
      while (true) {
        const Token& site = cur.expect(Tok::Ident, "site name");
        if (sig.find_site(site.text)) fail(Cat::DuplicateName, site, "site declared twice in agent " + sig.name);
        SiteSignature ss{site.text, {}};
        if (cur.at_symbol("{")) {
          cur.next();
          while (!cur.at_symbol("}")) {
            const Token& st_tok = cur.expect(Tok::Ident, "internal state");
            if (std::find(ss.states.begin(), ss.states.end(), st_tok.text) != ss.states.end()) {
              fail(Cat::DuplicateName, st_tok, "internal state declared twice");
            }
            ss.states.push_back(st_tok.text);
          }
          cur.next();
        }
        if (cur.at_symbol("[")) fail(Cat::Syntax, cur.peek(), "link type declarations are not supported");
        sig.sites.push_back(std::move(ss));
        if (cur.at_symbol(",")) {
          cur.next();
          continue;
        }
        break;
      }
    }
    cur.expect_symbol(")");
    cur.expect_end();
    model_.signatures.push_back(std::move(sig));
  }

  struct LabelUse {
    int slot;
    int site;
    Token token;
  };

  /// Parses a comma-separated list of agent slots up to (not including) a
  /// token that is not `,`.
  Pattern parse_expression(Cursor& cur, Context ctx) {
    Pattern pattern;
    std::map<long, std::vector<LabelUse>> labels;
    while (true) {
      const int slot = static_cast<int>(pattern.agents.size());
      if (cur.at_symbol(".")) {
        if (ctx != Context::RuleSide) fail(Cat::Syntax, cur.peek(), "placeholder '.' is only allowed in rules");
        cur.next();
        pattern.agents.emplace_back();
      } else {
        pattern.agents.push_back(parse_agent_pattern(cur, ctx, slot, labels));
      }
      if (!cur.at_symbol(",")) break;
      cur.next();
    }
    for (const auto& [label, uses] : labels) {
      if (uses.size() != 2) {
        const Token& at = uses.size() == 1 ? uses[0].token : uses[2].token;
        fail(Cat::DanglingBond, at,
             uses.size() == 1 ? "bond label appears only once" : "bond label used more than twice");
      }
      auto set_link = [&](const LabelUse& from, const LabelUse& to) {
        auto& sites = pattern.agents[from.slot].sites;
        for (auto& s : sites) {
          if (s.site == from.site) s.link = LinkPattern::bound(to.slot, to.site);
        }
      };
      set_link(uses[0], uses[1]);
      set_link(uses[1], uses[0]);
    }
    return pattern;
  }

  AgentPattern parse_agent_pattern(Cursor& cur, Context ctx, int slot,
                                   std::map<long, std::vector<LabelUse>>& labels) {
    const Token& name = cur.expect(Tok::Ident, "agent name or '.'");
    auto type = model_.find_agent(name.text);
    if (!type) fail(Cat::UnknownAgent, name, "agent '" + name.text + "' is not declared");
    const AgentSignature& sig = model_.signatures[*type];
    AgentPattern agent{*type, {}};
    std::vector<bool> seen(sig.sites.size(), false);
    cur.expect_symbol("(");
    if (!cur.at_symbol(")")) {
      while (true) {
        const Token& site_tok = cur.expect(Tok::Ident, "site name");
        auto site = sig.find_site(site_tok.text);
        if (!site) fail(Cat::UnknownSite, site_tok, "agent " + sig.name + " has no site '" + site_tok.text + "'");
        if (seen[*site]) fail(Cat::DuplicateName, site_tok, "site mentioned twice");
        seen[*site] = true;
        SitePattern sp{*site, kAnyState, LinkPattern::any()};
        bool has_state = false, has_link = false;
        while (cur.at_symbol("{") || cur.at_symbol("[")) {
          if (cur.at_symbol("{")) {
            if (has_state) fail(Cat::Syntax, cur.peek(), "internal state given twice");
            has_state = true;
            cur.next();
            if (cur.at_symbol("#")) {
              if (ctx == Context::Init) fail(Cat::UnderspecifiedInit, cur.peek(), "initial agents need a concrete internal state");
              cur.next();
            } else {
              const Token& st_tok = cur.expect(Tok::Ident, "internal state");
              const auto& states = sig.sites[*site].states;
              auto it = std::find(states.begin(), states.end(), st_tok.text);
              if (it == states.end()) {
                fail(Cat::UnknownState, st_tok, "site " + sig.name + "." + site_tok.text + " has no state '" + st_tok.text + "'");
              }
              sp.state = static_cast<int>(it - states.begin());
            }
            cur.expect_symbol("}");
          } else {
            if (has_link) fail(Cat::Syntax, cur.peek(), "link state given twice");
            has_link = true;
            cur.next();
            const Token& lt = cur.peek();
            if (cur.at_symbol(".")) {
              sp.link = LinkPattern::free();
              cur.next();
            } else if (cur.at_symbol("#") || (lt.kind == Tok::Ident && lt.text == "_")) {
              if (ctx == Context::Init) fail(Cat::UnderspecifiedInit, lt, "initial agents need a concrete link state");
              sp.link = cur.at_symbol("#") ? LinkPattern::any() : LinkPattern::bound_any();
              cur.next();
            } else if (lt.kind == Tok::Number) {
              if (lt.text.find_first_not_of("0123456789") != std::string::npos) {
                fail(Cat::Syntax, lt, "bond label must be a non-negative integer");
              }
              long label = 0;
              auto [p, ec] = std::from_chars(lt.text.data(), lt.text.data() + lt.text.size(), label);
              if (ec != std::errc{}) fail(Cat::Syntax, lt, "bond label out of range");
              labels[label].push_back({slot, *site, lt});
              sp.link = LinkPattern::bound(-1, -1);
              cur.next();
            } else {
              fail(Cat::Syntax, lt, "expected '.', '_', '#' or a bond label");
            }
            cur.expect_symbol("]");
          }
        }
        agent.sites.push_back(sp);
        if (cur.at_symbol(",")) {
          cur.next();
          continue;
        }
        break;
      }
    }
    cur.expect_symbol(")");

    if (ctx == Context::Init) {
      // Kappa's convention: unmentioned sites start in their default state, free.
      for (std::size_t s = 0; s < sig.sites.size(); ++s) {
        SitePattern* existing = nullptr;
        for (auto& sp : agent.sites) {
          if (sp.site == static_cast<int>(s)) existing = &sp;
        }
        if (!existing) {
          agent.sites.push_back({static_cast<int>(s), kAnyState, LinkPattern::free()});
          existing = &agent.sites.back();
        }
        if (existing->state == kAnyState && !sig.sites[s].states.empty()) existing->state = 0;
        if (existing->link.kind == LinkKind::Any) existing->link = LinkPattern::free();
      }
    } else {
      std::erase_if(agent.sites, [](const SitePattern& s) { return s.unconstrained(); });
    }
    std::sort(agent.sites.begin(), agent.sites.end(),
              [](const SitePattern& a, const SitePattern& b) { return a.site < b.site; });
    return agent;
  }

  void parse_rule(const std::vector<Token>& st) {
    Cursor cur(st);
    const Token& name = cur.next();
    if (model_.find_rule(name.text)) fail(Cat::DuplicateName, name, "rule '" + name.text + "' declared twice");
    if (name.text.empty()) fail(Cat::Syntax, name, "rule name must not be empty");

    Rule rule;
    rule.name = name.text;
    if (!cur.at_symbol("->") && !cur.at_symbol("<->")) rule.lhs = parse_expression(cur, Context::RuleSide);
    if (cur.at_symbol("<->")) fail(Cat::Syntax, cur.peek(), "reversible rules are not supported; write two rules");
    const Token& arrow = cur.expect_symbol("->");
    if (!cur.at_symbol("@")) rule.rhs = parse_expression(cur, Context::RuleSide);
    cur.expect_symbol("@");
    if (cur.at_symbol("-")) fail(Cat::NegativeRate, cur.peek(), "rate constant must be non-negative");
    const Token& rate_tok = cur.expect(Tok::Number, "rate constant");
    rule.rate = parse_number(rate_tok);
    cur.expect_end();

    auto& lhs = rule.lhs.agents;
    auto& rhs = rule.rhs.agents;
    if (lhs.empty() && rhs.empty()) fail(Cat::Syntax, arrow, "rule has no agents");
    const std::size_t n = std::max(lhs.size(), rhs.size());
    lhs.resize(n);
    rhs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!lhs[i].empty() && !rhs[i].empty() && lhs[i].type != rhs[i].type) {
        fail(Cat::Syntax, arrow,
             "agent at position " + std::to_string(i + 1) + " changes type from " +
                 model_.signatures[lhs[i].type].name + " to " + model_.signatures[rhs[i].type].name);
      }
      if (rhs[i].empty()) continue;
      for (const auto& s : rhs[i].sites) {
        if (s.link.kind != LinkKind::BoundAny) continue;
        const SitePattern* l = lhs[i].empty() ? nullptr : lhs[i].find(s.site);
        if (!l || l->link.kind != LinkKind::BoundAny) {
          fail(Cat::Syntax, arrow,
               "site " + model_.signatures[rhs[i].type].sites[s.site].name +
                   " may only be '[_]' on the right-hand side if it is '[_]' on the left");
        }
      }
    }
    model_.rules.push_back(std::move(rule));
  }

  void parse_init(const std::vector<Token>& st) {
    Cursor cur(st);
    cur.next();
    if (cur.at_symbol("-")) fail(Cat::Syntax, cur.peek(), "initial count must be non-negative");
    const Token& count_tok = cur.expect(Tok::Number, "initial count");
    if (count_tok.text.find_first_not_of("0123456789") != std::string::npos) {
      fail(Cat::Syntax, count_tok, "initial count must be an integer");
    }
    InitEntry entry;
    auto [p, ec] = std::from_chars(count_tok.text.data(), count_tok.text.data() + count_tok.text.size(), entry.count);
    if (ec != std::errc{}) fail(Cat::Syntax, count_tok, "initial count out of range");
    entry.pattern = parse_expression(cur, Context::Init);
    cur.expect_end();
    model_.init.push_back(std::move(entry));
  }

  std::vector<ObservableTerm> parse_sum(Cursor& cur, bool& plain) {
    std::vector<ObservableTerm> terms;
    bool grouped = false;
    if (cur.at_symbol("(")) {
      cur.next();
      grouped = true;
      plain = false;
    }
    bool first = true;
    while (true) {
      double sign = 1.0;
      if (cur.at_symbol("-")) {
        sign = -1.0;
        plain = false;
        cur.next();
      } else if (!first) {
        if (!cur.at_symbol("+")) break;
        cur.next();
      } else if (cur.at_symbol("+")) {
        fail(Cat::Syntax, cur.peek(), "unexpected '+'");
      }
      ObservableTerm term;
      if (cur.peek().kind == Tok::Number) {
        term.coefficient = parse_number(cur.next());
        cur.expect_symbol("*");
        plain = false;
      }
      term.coefficient *= sign;
      cur.expect_symbol("|");
      term.pattern = parse_expression(cur, Context::Observable);
      cur.expect_symbol("|");
      terms.push_back(std::move(term));
      first = false;
      if (!cur.at_symbol("+") && !cur.at_symbol("-")) break;
    }
    if (grouped) cur.expect_symbol(")");
    return terms;
  }

  void parse_observable(const std::vector<Token>& st) {
    Cursor cur(st);
    cur.next();
    const Token& name = cur.expect(Tok::Quoted, "quoted observable name");
    for (const auto& o : model_.observables) {
      if (o.name == name.text) fail(Cat::DuplicateName, name, "observable '" + name.text + "' declared twice");
    }
    Observable obs;
    obs.name = name.text;
    bool plain = true;
    obs.terms = parse_sum(cur, plain);
    if (cur.at_symbol("/")) {
      cur.next();
      plain = false;
      obs.denominator = parse_sum(cur, plain);
    }
    cur.expect_end();
    obs.weighted = !plain || obs.terms.size() != 1;
    model_.observables.push_back(std::move(obs));
  }

  Model model_;
};

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void format_expression(std::ostringstream& os, const Model& model, const Pattern& pattern) {
  std::map<std::pair<std::pair<int, int>, std::pair<int, int>>, int> labels;
  int next_label = 1;
  for (std::size_t i = 0; i < pattern.agents.size(); ++i) {
    if (i) os << ", ";
    const AgentPattern& a = pattern.agents[i];
    if (a.empty()) {
      os << '.';
      continue;
    }
    const AgentSignature& sig = model.signatures[a.type];
    os << sig.name << '(';
    bool first = true;
    for (const auto& s : a.sites) {
      if (!first) os << ", ";
      first = false;
      os << sig.sites[s.site].name;
      if (s.state != kAnyState) os << '{' << sig.sites[s.site].states[s.state] << '}';
      switch (s.link.kind) {
        case LinkKind::Any: break;
        case LinkKind::Free: os << "[.]"; break;
        case LinkKind::BoundAny: os << "[_]"; break;
        case LinkKind::Bound: {
          const std::pair<int, int> here{static_cast<int>(i), s.site}, there{s.link.agent, s.link.site};
          const auto key = here < there ? std::pair{here, there} : std::pair{there, here};
          auto [it, inserted] = labels.try_emplace(key, next_label);
          if (inserted) ++next_label;
          os << '[' << it->second << ']';
          break;
        }
      }
    }
    os << ')';
  }
}

void format_terms(std::ostringstream& os, const Model& model, const std::vector<ObservableTerm>& terms) {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    double c = terms[i].coefficient;
    if (std::signbit(c)) {
      os << (i ? " - " : "-");
      c = -c;
    } else if (i) {
      os << " + ";
    }
    os << format_number(c) << "*|";
    format_expression(os, model, terms[i].pattern);
    os << '|';
  }
}

}  // namespace

Model parse_model(std::string_view source) { return ModelParser{}.parse(source); }

std::string format_pattern(const Model& model, const Pattern& pattern) {
  std::ostringstream os;
  format_expression(os, model, pattern);
  return os.str();
}

std::string format_model(const Model& model) {
  std::ostringstream os;
  for (const auto& sig : model.signatures) {
    os << "%agent: " << sig.name << '(';
    for (std::size_t i = 0; i < sig.sites.size(); ++i) {
      if (i) os << ", ";
      os << sig.sites[i].name;
      if (!sig.sites[i].states.empty()) {
        os << '{';
        for (std::size_t k = 0; k < sig.sites[i].states.size(); ++k) {
          if (k) os << ' ';
          os << sig.sites[i].states[k];
        }
        os << '}';
      }
    }
    os << ")\n";
  }
  for (const auto& rule : model.rules) {
    os << '\'' << rule.name << "' ";
    format_expression(os, model, rule.lhs);
    os << " -> ";
    format_expression(os, model, rule.rhs);
    os << " @ " << format_number(rule.rate) << '\n';
  }
  for (const auto& init : model.init) {
    os << "%init: " << init.count << ' ';
    format_expression(os, model, init.pattern);
    os << '\n';
  }
  for (const auto& obs : model.observables) {
    os << "%obs: '" << obs.name << "' ";
    if (!obs.weighted) {
      os << '|';
      format_expression(os, model, obs.terms.front().pattern);
      os << '|';
    } else if (obs.denominator.empty()) {
      format_terms(os, model, obs.terms);
    } else {
      os << '(';
      format_terms(os, model, obs.terms);
      os << ") / (";
      format_terms(os, model, obs.denominator);
      os << ')';
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace din
