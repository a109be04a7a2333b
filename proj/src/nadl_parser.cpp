#include <algorithm>
#include <cctype>
#include <optional>

#include "uplan/nadl.hpp"

namespace uplan::nadl {

int domain_desc::var_index(std::string_view name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i].name == name) return static_cast<int>(i);
  return -1;
}

arith_ptr arith::clone() const {
  auto out = std::make_unique<arith>();
  out->loc = loc;
  if (const auto* n = std::get_if<number>(&node)) {
    out->node = *n;
  } else if (const auto* v = std::get_if<var_ref>(&node)) {
    out->node = *v;
  } else {
    const auto& b = std::get<binary>(node);
    out->node = binary{b.op, b.lhs->clone(), b.rhs->clone()};
  }
  return out;
}

formula_ptr formula::clone() const {
  auto out = std::make_unique<formula>();
  out->loc = loc;
  if (const auto* c = std::get_if<constant>(&node)) {
    out->node = *c;
  } else if (const auto* p = std::get_if<prop_ref>(&node)) {
    out->node = *p;
  } else if (const auto* r = std::get_if<relation>(&node)) {
    out->node = relation{r->op, r->lhs->clone(), r->rhs->clone()};
  } else if (const auto* n = std::get_if<negation>(&node)) {
    out->node = negation{n->arg->clone()};
  } else if (const auto* b = std::get_if<binary>(&node)) {
    out->node = binary{b->op, b->lhs->clone(), b->rhs->clone()};
  } else {
    const auto& i = std::get<if_then_else>(node);
    out->node = if_then_else{i.cond->clone(), i.then_f->clone(), i.else_f->clone()};
  }
  return out;
}

namespace {

enum class tok {
  ident,
  number,
  kw_variables,
  kw_bool,
  kw_nat,
  kw_system,
  kw_environment,
  kw_agt,
  kw_con,
  kw_pre,
  kw_eff,
  kw_initially,
  kw_goal,
  kw_true,
  kw_false,
  kw_mod,
  lparen,
  rparen,
  comma,
  colon,
  tilde,
  and_op,    // /\ .
  or_op,     // \/ .
  implies,   // =>
  iff,       // <=>
  arrow,     // ->
  plus,
  minus,
  star,
  slash,
  lt,
  gt,
  le,
  ge,
  eq,
  ne,
  end
};

struct token {
  tok kind;
  std::string text;
  std::uint64_t value = 0;
  bool primed = false;
  source_loc loc;
};

const char* tok_name(tok t) {
  switch (t) {
    case tok::ident: return "identifier";
    case tok::number: return "number";
    case tok::kw_variables: return "'variables'";
    case tok::kw_bool: return "'bool'";
    case tok::kw_nat: return "'nat'";
    case tok::kw_system: return "'system'";
    case tok::kw_environment: return "'environment'";
    case tok::kw_agt: return "'agt'";
    case tok::kw_con: return "'con'";
    case tok::kw_pre: return "'pre'";
    case tok::kw_eff: return "'eff'";
    case tok::kw_initially: return "'initially'";
    case tok::kw_goal: return "'goal'";
    case tok::kw_true: return "'true'";
    case tok::kw_false: return "'false'";
    case tok::kw_mod: return "'mod'";
    case tok::lparen: return "'('";
    case tok::rparen: return "')'";
    case tok::comma: return "','";
    case tok::colon: return "':'";
    case tok::tilde: return "'~'";
    case tok::and_op: return "'/\\'";
    case tok::or_op: return "'\\/'";
    case tok::implies: return "'=>'";
    case tok::iff: return "'<=>'";
    case tok::arrow: return "'->'";
    case tok::plus: return "'+'";
    case tok::minus: return "'-'";
    case tok::star: return "'*'";
    case tok::slash: return "'/'";
    case tok::lt: return "'<'";
    case tok::gt: return "'>'";
    case tok::le: return "'<='";
    case tok::ge: return "'>='";
    case tok::eq: return "'='";
    case tok::ne: return "'!='";
    case tok::end: return "end of input";
  }
  return "?";
}

std::optional<tok> keyword(std::string_view word) {
  if (word == "variables") return tok::kw_variables;
  if (word == "bool") return tok::kw_bool;
  if (word == "nat") return tok::kw_nat;
  if (word == "system") return tok::kw_system;
  if (word == "environment") return tok::kw_environment;
  if (word == "agt") return tok::kw_agt;
  if (word == "con") return tok::kw_con;
  if (word == "pre") return tok::kw_pre;
  if (word == "eff") return tok::kw_eff;
  if (word == "initially") return tok::kw_initially;
  if (word == "goal") return tok::kw_goal;
  if (word == "true") return tok::kw_true;
  if (word == "false") return tok::kw_false;
  if (word == "mod") return tok::kw_mod;
  return std::nullopt;
}

class lexer {
public:
  explicit lexer(std::string_view text) : text_(text) {}

  std::vector<token> run() {
    std::vector<token> out;
    for (;;) {
      skip_space_and_comments();
      source_loc loc{line_, col_};
      if (pos_ >= text_.size()) {
        out.push_back({tok::end, "", 0, false, loc});
        return out;
      }
      char c = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        out.push_back(lex_word(loc));
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        out.push_back(lex_number(loc));
      } else {
        out.push_back(lex_symbol(loc));
      }
    }
  }

private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  static bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  token lex_word(source_loc loc) {
    std::string word;
    while (pos_ < text_.size() && word_char(text_[pos_])) {
      word.push_back(text_[pos_]);
      advance();
    }
    // A hyphen immediately followed by a letter continues the identifier
    // (action names like Lift-Block); `pos-1` still lexes as a subtraction.
    while (pos_ + 1 < text_.size() && text_[pos_] == '-' &&
           (std::isalpha(static_cast<unsigned char>(text_[pos_ + 1])) ||
            text_[pos_ + 1] == '_')) {
      word.push_back('-');
      advance();
      while (pos_ < text_.size() && word_char(text_[pos_])) {
        word.push_back(text_[pos_]);
        advance();
      }
    }
    if (auto kw = keyword(word)) return {*kw, word, 0, false, loc};
    bool primed = false;
    if (pos_ < text_.size() && text_[pos_] == '\'') {
      primed = true;
      advance();
    }
    return {tok::ident, word, 0, primed, loc};
  }

  token lex_number(source_loc loc) {
    std::uint64_t v = 0;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      std::uint64_t d = text_[pos_] - '0';
      if (v > (UINT64_MAX - d) / 10) throw parse_error(loc, "number literal too large");
      v = v * 10 + d;
      advance();
    }
    return {tok::number, "", v, false, loc};
  }

  token lex_symbol(source_loc loc) {
    auto two = [&](char a, char b) {
      return pos_ + 1 < text_.size() && text_[pos_] == a && text_[pos_ + 1] == b;
    };
    auto three = [&](char a, char b, char c) {
      return pos_ + 2 < text_.size() && text_[pos_] == a && text_[pos_ + 1] == b &&
             text_[pos_ + 2] == c;
    };
    auto make = [&](tok k, int len) {
      token t{k, std::string(text_.substr(pos_, len)), 0, false, loc};
      for (int i = 0; i < len; ++i) advance();
      return t;
    };
    if (three('<', '=', '>')) return make(tok::iff, 3);
    if (two('<', '=')) return make(tok::le, 2);
    if (two('>', '=')) return make(tok::ge, 2);
    if (two('=', '>')) return make(tok::implies, 2);
    if (two('!', '=')) return make(tok::ne, 2);
    if (two('-', '>')) return make(tok::arrow, 2);
    if (two('/', '\\')) return make(tok::and_op, 2);
    if (two('\\', '/')) return make(tok::or_op, 2);
    switch (text_[pos_]) {
      case '(': return make(tok::lparen, 1);
      case ')': return make(tok::rparen, 1);
      case ',': return make(tok::comma, 1);
      case ':': return make(tok::colon, 1);
      case '~': return make(tok::tilde, 1);
      case '+': return make(tok::plus, 1);
      case '-': return make(tok::minus, 1);
      case '*': return make(tok::star, 1);
      case '/': return make(tok::slash, 1);
      case '<': return make(tok::lt, 1);
      case '>': return make(tok::gt, 1);
      case '=': return make(tok::eq, 1);
    }
    throw parse_error(loc, std::string("unexpected character '") + text_[pos_] + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  unsigned line_ = 1;
  unsigned col_ = 1;
};

class parser {
public:
  explicit parser(std::string_view text) : tokens_(lexer(text).run()) {}

  domain_desc run() {
    domain_desc dd;
    expect(tok::kw_variables, "expected 'variables' section");
    while (at(tok::kw_bool) || at(tok::kw_nat)) parse_var_decl(dd);
    if (dd.vars.empty()) throw parse_error(peek().loc, "no state variables declared");
    dd_ = &dd;

    expect(tok::kw_system, "expected 'system' section");
    while (at(tok::kw_agt)) dd.system_agents.push_back(parse_agent());
    if (dd.system_agents.empty())
      throw parse_error(peek().loc, "expected at least one system agent ('agt:')");
    if (at(tok::kw_environment)) {
      next();
      while (at(tok::kw_agt)) dd.environment_agents.push_back(parse_agent());
    }
    expect(tok::kw_initially, "expected 'initially' section");
    dd.init = parse_formula();
    expect(tok::kw_goal, "expected 'goal' section");
    dd.goal = parse_formula();
    expect(tok::end, "expected end of input");
    return dd;
  }

private:
  const token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  bool at(tok k) const { return peek().kind == k; }
  const token& next() { return tokens_[pos_++]; }
  const token& expect(tok k, const std::string& msg) {
    if (!at(k))
      throw parse_error(peek().loc, msg + ", got " + tok_name(peek().kind));
    return next();
  }

  void parse_var_decl(domain_desc& dd) {
    bool numeric = at(tok::kw_nat);
    source_loc loc = peek().loc;
    next();
    unsigned range = 2;
    if (numeric) {
      expect(tok::lparen, "expected '(' after 'nat'");
      const token& n = expect(tok::number, "expected range size");
      if (n.value > (1u << 24))
        throw parse_error(n.loc, "numerical range too large");
      range = static_cast<unsigned>(n.value);
      expect(tok::rparen, "expected ')'");
    }
    for (;;) {
      const token& name = expect(tok::ident, "expected variable name");
      if (name.primed) throw parse_error(name.loc, "primed name in declaration");
      for (const auto& v : dd.vars)
        if (v.name == name.text)
          throw parse_error(name.loc, "duplicate variable name '" + name.text + "'");
      dd.vars.push_back(state_var{name.text, numeric, range, loc});
      if (!at(tok::comma)) break;
      next();
    }
  }

  agent_desc parse_agent() {
    source_loc loc = peek().loc;
    next();  // agt
    expect(tok::colon, "expected ':' after 'agt'");
    const token& name = expect(tok::ident, "expected agent name");
    agent_desc agent{name.text, {}, loc};
    while (at(tok::ident)) agent.actions.push_back(parse_action(agent));
    return agent;
  }

  action_desc parse_action(const agent_desc& agent) {
    const token& name = expect(tok::ident, "expected action name");
    if (name.primed) throw parse_error(name.loc, "primed name in declaration");
    for (const auto& a : agent.actions)
      if (a.name == name.text)
        throw parse_error(name.loc, "duplicate action name '" + name.text +
                                        "' in agent '" + agent.name + "'");
    action_desc act;
    act.name = name.text;
    act.loc = name.loc;
    expect(tok::kw_con, "expected 'con' in action description");
    expect(tok::colon, "expected ':' after 'con'");
    while (at(tok::ident)) {
      const token& v = next();
      if (v.primed) throw parse_error(v.loc, "primed name in constrained set");
      int idx = dd_->var_index(v.text);
      if (idx < 0) throw parse_error(v.loc, "unknown variable '" + v.text + "'");
      if (std::count(act.constrained_idx.begin(), act.constrained_idx.end(), idx))
        throw parse_error(v.loc, "duplicate constrained variable '" + v.text + "'");
      act.constrained.push_back(v.text);
      act.constrained_idx.push_back(idx);
      if (!at(tok::comma)) break;
      next();
    }
    std::sort(act.constrained_idx.begin(), act.constrained_idx.end());
    expect(tok::kw_pre, "expected 'pre' in action description");
    expect(tok::colon, "expected ':' after 'pre'");
    act.pre = parse_formula();
    expect(tok::kw_eff, "expected 'eff' in action description");
    expect(tok::colon, "expected ':' after 'eff'");
    act.eff = parse_formula();
    return act;
  }

  // formula := iff-chain [ '->' iff-chain ',' formula ]
  formula_ptr parse_formula() {
    source_loc loc = peek().loc;
    formula_ptr cond = parse_iff();
    if (!at(tok::arrow)) return cond;
    next();
    formula_ptr then_f = parse_iff();
    expect(tok::comma, "expected ',' separating if-then-else branches");
    formula_ptr else_f = parse_formula();
    auto out = std::make_unique<formula>();
    out->loc = loc;
    out->node = formula::if_then_else{std::move(cond), std::move(then_f),
                                      std::move(else_f)};
    return out;
  }

  formula_ptr parse_iff() {
    formula_ptr lhs = parse_implies();
    while (at(tok::iff)) {
      source_loc loc = next().loc;
      formula_ptr rhs = parse_implies();
      auto out = std::make_unique<formula>();
      out->loc = loc;
      out->node = formula::binary{connective::iff, std::move(lhs), std::move(rhs)};
      lhs = std::move(out);
    }
    return lhs;
  }

  formula_ptr parse_implies() {  // right associative
    formula_ptr lhs = parse_or();
    if (!at(tok::implies)) return lhs;
    source_loc loc = next().loc;
    formula_ptr rhs = parse_implies();
    auto out = std::make_unique<formula>();
    out->loc = loc;
    out->node = formula::binary{connective::implies, std::move(lhs), std::move(rhs)};
    return out;
  }

  formula_ptr parse_or() {
    formula_ptr lhs = parse_and();
    while (at(tok::or_op)) {
      source_loc loc = next().loc;
      formula_ptr rhs = parse_and();
      auto out = std::make_unique<formula>();
      out->loc = loc;
      out->node = formula::binary{connective::disj, std::move(lhs), std::move(rhs)};
      lhs = std::move(out);
    }
    return lhs;
  }

  formula_ptr parse_and() {
    formula_ptr lhs = parse_unary();
    while (at(tok::and_op)) {
      source_loc loc = next().loc;
      formula_ptr rhs = parse_unary();
      auto out = std::make_unique<formula>();
      out->loc = loc;
      out->node = formula::binary{connective::conj, std::move(lhs), std::move(rhs)};
      lhs = std::move(out);
    }
    return lhs;
  }

  formula_ptr parse_unary() {
    if (at(tok::tilde)) {
      source_loc loc = next().loc;
      auto out = std::make_unique<formula>();
      out->loc = loc;
      out->node = formula::negation{parse_unary()};
      return out;
    }
    return parse_atom();
  }

  formula_ptr parse_atom() {
    const token& t = peek();
    switch (t.kind) {
      case tok::kw_true:
      case tok::kw_false: {
        next();
        auto out = std::make_unique<formula>();
        out->loc = t.loc;
        out->node = formula::constant{t.kind == tok::kw_true};
        return out;
      }
      case tok::number:
        return parse_relation();
      case tok::ident: {
        int idx = dd_->var_index(t.text);
        if (idx < 0)
          throw parse_error(t.loc, "unknown variable '" + t.text + "'");
        if (dd_->vars[idx].numeric) return parse_relation();
        next();
        if (is_rel(peek().kind))
          throw parse_error(peek().loc,
                            "propositional variable '" + t.text +
                                "' cannot appear in an arithmetic relation");
        auto out = std::make_unique<formula>();
        out->loc = t.loc;
        out->node = formula::prop_ref{t.text, t.primed, idx};
        return out;
      }
      case tok::lparen: {
        // Both `(x + 1) = 2` and `(f)` start with '('; try the relation
        // reading first and fall back to a parenthesized formula.
        std::size_t saved = pos_;
        try {
          return parse_relation();
        } catch (const parse_error&) {
          pos_ = saved;
        }
        next();
        formula_ptr f = parse_formula();
        expect(tok::rparen, "expected ')'");
        return f;
      }
      default:
        throw parse_error(t.loc, std::string("expected a formula, got ") +
                                     tok_name(t.kind));
    }
  }

  static bool is_rel(tok k) {
    return k == tok::lt || k == tok::gt || k == tok::le || k == tok::ge ||
           k == tok::eq || k == tok::ne;
  }

  formula_ptr parse_relation() {
    source_loc loc = peek().loc;
    arith_ptr lhs = parse_arith();
    const token& op = peek();
    if (!is_rel(op.kind))
      throw parse_error(op.loc, std::string("expected a relation operator, got ") +
                                    tok_name(op.kind));
    next();
    arith_ptr rhs = parse_arith();
    rel_op r;
    switch (op.kind) {
      case tok::lt: r = rel_op::lt; break;
      case tok::gt: r = rel_op::gt; break;
      case tok::le: r = rel_op::le; break;
      case tok::ge: r = rel_op::ge; break;
      case tok::eq: r = rel_op::eq; break;
      default: r = rel_op::ne; break;
    }
    auto out = std::make_unique<formula>();
    out->loc = loc;
    out->node = formula::relation{r, std::move(lhs), std::move(rhs)};
    return out;
  }

  arith_ptr parse_arith() {
    arith_ptr lhs = parse_term();
    while (at(tok::plus) || at(tok::minus)) {
      arith_op op = at(tok::plus) ? arith_op::add : arith_op::sub;
      source_loc loc = next().loc;
      arith_ptr rhs = parse_term();
      auto out = std::make_unique<arith>();
      out->loc = loc;
      out->node = arith::binary{op, std::move(lhs), std::move(rhs)};
      lhs = std::move(out);
    }
    return lhs;
  }

  arith_ptr parse_term() {
    arith_ptr lhs = parse_factor();
    while (at(tok::star) || at(tok::slash) || at(tok::kw_mod)) {
      arith_op op = at(tok::star)    ? arith_op::mul
                    : at(tok::slash) ? arith_op::div
                                     : arith_op::mod;
      source_loc loc = next().loc;
      arith_ptr rhs = parse_factor();
      auto out = std::make_unique<arith>();
      out->loc = loc;
      out->node = arith::binary{op, std::move(lhs), std::move(rhs)};
      lhs = std::move(out);
    }
    return lhs;
  }

  arith_ptr parse_factor() {
    const token& t = peek();
    if (t.kind == tok::number) {
      next();
      auto out = std::make_unique<arith>();
      out->loc = t.loc;
      out->node = arith::number{t.value};
      return out;
    }
    if (t.kind == tok::ident) {
      int idx = dd_->var_index(t.text);
      if (idx < 0) throw parse_error(t.loc, "unknown variable '" + t.text + "'");
      if (!dd_->vars[idx].numeric)
        throw parse_error(t.loc, "propositional variable '" + t.text +
                                     "' used in an arithmetic expression");
      next();
      auto out = std::make_unique<arith>();
      out->loc = t.loc;
      out->node = arith::var_ref{t.text, t.primed, idx};
      return out;
    }
    if (t.kind == tok::lparen) {
      next();
      arith_ptr e = parse_arith();
      expect(tok::rparen, "expected ')' in arithmetic expression");
      return e;
    }
    throw parse_error(t.loc, std::string("expected an arithmetic expression, got ") +
                                 tok_name(t.kind));
  }

  std::vector<token> tokens_;
  std::size_t pos_ = 0;
  domain_desc* dd_ = nullptr;
};

}  // namespace

domain_desc parse(std::string_view text) { return parser(text).run(); }

}  // namespace uplan::nadl
