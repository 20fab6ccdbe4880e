#include "fomip/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "fomip/util.hpp"

namespace fomip {
namespace {

// ---------------------------------------------------------------- lexer

enum class Tok {
  Ident,     // lowercase identifier (may be a keyword)
  VarIdent,  // capitalized identifier: a logic variable
  Number,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Semi,
  Assign,   // =
  Neq,      // !=
  Lt,       // <
  Le,       // <=
  Star,
  Plus,
  Minus,
  Turnstile,  // :-
  End,
  Bad,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
  int length = 0;
};

const std::set<std::string> kKeywords = {
    "domain", "var",  "objective", "lb",  "ub",   "vartype",
    "constraint", "default", "not", "int", "cont", "inf"};

bool is_keyword(const std::string& s) { return kKeywords.count(s) > 0; }

class Lexer {
public:
  explicit Lexer(const std::string& text) : text_(text) {}

  std::vector<Token> run(std::vector<Diagnostic>& diags) {
    std::vector<Token> out;
    while (true) {
      Token t = next(diags);
      bool end = t.kind == Tok::End;
      if (t.kind != Tok::Bad) out.push_back(t);
      if (end) break;
    }
    return out;
  }

private:
  char peek(std::size_t off = 0) const {
    return pos_ + off < text_.size() ? text_[pos_ + off] : '\0';
  }

  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  Token make(Tok kind, int line, int col, std::size_t start) {
    Token t;
    t.kind = kind;
    t.line = line;
    t.column = col;
    t.length = static_cast<int>(pos_ - start);
    t.text = text_.substr(start, pos_ - start);
    return t;
  }

  Token next(std::vector<Diagnostic>& diags) {
    // skip whitespace and % comments
    while (pos_ < text_.size()) {
      char c = peek();
      if (c == '%') {
        while (pos_ < text_.size() && peek() != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        break;
      }
    }
    int line = line_, col = col_;
    std::size_t start = pos_;
    if (pos_ >= text_.size()) return make(Tok::End, line, col, start);

    char c = advance();
    switch (c) {
      case '(': return make(Tok::LParen, line, col, start);
      case ')': return make(Tok::RParen, line, col, start);
      case '{': return make(Tok::LBrace, line, col, start);
      case '}': return make(Tok::RBrace, line, col, start);
      case ',': return make(Tok::Comma, line, col, start);
      case ';': return make(Tok::Semi, line, col, start);
      case '*': return make(Tok::Star, line, col, start);
      case '+': return make(Tok::Plus, line, col, start);
      case '-': return make(Tok::Minus, line, col, start);
      case '=': return make(Tok::Assign, line, col, start);
      case '<':
        if (peek() == '=') {
          advance();
          return make(Tok::Le, line, col, start);
        }
        return make(Tok::Lt, line, col, start);
      case '!':
        if (peek() == '=') {
          advance();
          return make(Tok::Neq, line, col, start);
        }
        diags.push_back({Severity::Error, line, col, 1, "stray '!'"});
        return make(Tok::Bad, line, col, start);
      case ':':
        if (peek() == '-') {
          advance();
          return make(Tok::Turnstile, line, col, start);
        }
        diags.push_back({Severity::Error, line, col, 1, "stray ':'"});
        return make(Tok::Bad, line, col, start);
      default: break;
    }

    auto uc = static_cast<unsigned char>(c);
    if (std::isdigit(uc) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek())))) {
      while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') advance();
      if (peek() == 'e' || peek() == 'E') {
        std::size_t save = pos_;
        int sl = line_, sc = col_;
        advance();
        if (peek() == '+' || peek() == '-') advance();
        if (std::isdigit(static_cast<unsigned char>(peek()))) {
          while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
        } else {
          pos_ = save;
          line_ = sl;
          col_ = sc;
        }
      }
      return make(Tok::Number, line, col, start);
    }
    if (std::isalpha(uc) || c == '_') {
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      bool upper = std::isupper(uc) != 0;
      if (c == '_') upper = true;  // treat leading underscore as a variable
      return make(upper ? Tok::VarIdent : Tok::Ident, line, col, start);
    }
    diags.push_back({Severity::Error, line, col, 1, "invalid character"});
    return make(Tok::Bad, line, col, start);
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ---------------------------------------------------------------- spans

struct Span {
  int line = 1;
  int column = 1;
  int length = 0;
};

Span span_of(const Token& t) { return Span{t.line, t.column, t.length}; }

// Statement spans parallel to the Model's rule vectors, so semantic
// checks can point at the offending declaration.
struct SpanTable {
  std::vector<Span> domains;
  std::vector<Span> variable_rules;
  std::vector<Span> constraint_rules;
  std::vector<Span> objective_rules;
  std::vector<Span> lb_rules;
  std::vector<Span> ub_rules;
  std::vector<Span> vartype_rules;
};

// ---------------------------------------------------------------- parser

class Parser {
public:
  Parser(std::vector<Token> toks, std::vector<Diagnostic>& diags)
      : toks_(std::move(toks)), diags_(diags) {}

  void run(Model& m, SpanTable& spans) {
    while (cur().kind != Tok::End) {
      if (!statement(m, spans)) recover();
    }
  }

private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t off = 1) const {
    return toks_[std::min(pos_ + off, toks_.size() - 1)];
  }
  void advance() {
    if (pos_ + 1 < toks_.size()) ++pos_;
  }

  void error_at(const Token& t, const std::string& msg) {
    diags_.push_back({Severity::Error, t.line, t.column, t.length, msg});
  }

  bool expect(Tok kind, const std::string& what) {
    if (cur().kind == kind) {
      advance();
      return true;
    }
    error_at(cur(), "expected " + what);
    return false;
  }

  // Skip to just past the next ';' (or a '}') so one syntax error does
  // not ruin the rest of the file.
  void recover() {
    while (cur().kind != Tok::End) {
      if (cur().kind == Tok::Semi) {
        advance();
        return;
      }
      if (cur().kind == Tok::RBrace) {
        advance();
        if (cur().kind == Tok::Semi) advance();
        return;
      }
      advance();
    }
  }

  bool keyword(const char* kw) const {
    return cur().kind == Tok::Ident && cur().text == kw;
  }

  bool statement(Model& m, SpanTable& spans) {
    if (keyword("domain")) return domain_decl(m, spans);
    if (keyword("var")) return var_decl();
    if (keyword("objective")) return value_rule(m.objective_rules, spans.objective_rules);
    if (keyword("lb")) return value_rule(m.lb_rules, spans.lb_rules);
    if (keyword("ub")) return value_rule(m.ub_rules, spans.ub_rules);
    if (keyword("vartype")) return vartype_rule(m, spans);
    if (keyword("constraint")) return constraint_rule(m, spans);
    if (keyword("default")) return default_block(m);
    error_at(cur(), "expected a declaration (domain/var/objective/lb/ub/vartype/constraint/default)");
    return false;
  }

  bool plain_ident(std::string& out, const std::string& what) {
    if (cur().kind != Tok::Ident) {
      error_at(cur(), "expected " + what);
      return false;
    }
    if (is_keyword(cur().text)) {
      error_at(cur(), "'" + cur().text + "' is a reserved word");
      return false;
    }
    out = cur().text;
    advance();
    return true;
  }

  bool domain_decl(Model& m, SpanTable& spans) {
    Span sp = span_of(cur());
    advance();  // domain
    std::string name;
    if (!plain_ident(name, "domain name")) return false;
    if (!expect(Tok::Assign, "'='")) return false;
    if (!expect(Tok::LBrace, "'{'")) return false;
    std::vector<std::string> consts;
    if (cur().kind != Tok::RBrace) {
      while (true) {
        std::string c;
        if (!plain_ident(c, "domain constant")) return false;
        consts.push_back(std::move(c));
        if (cur().kind == Tok::Comma) {
          advance();
          continue;
        }
        break;
      }
    }
    if (!expect(Tok::RBrace, "'}'")) return false;
    if (!expect(Tok::Semi, "';'")) return false;
    m.domains.emplace_back(std::move(name), std::move(consts));
    spans.domains.push_back(sp);
    return true;
  }

  bool term(Term& out) {
    if (cur().kind == Tok::VarIdent) {
      out = Term::var(cur().text);
      advance();
      return true;
    }
    if (cur().kind == Tok::Ident && !is_keyword(cur().text)) {
      out = Term::constant(cur().text);
      advance();
      return true;
    }
    error_at(cur(), "expected a constant or logic variable");
    return false;
  }

  bool pattern(AtomPattern& out) {
    if (!plain_ident(out.functor, "functor name")) return false;
    if (!expect(Tok::LParen, "'('")) return false;
    while (true) {
      Term t;
      if (!term(t)) return false;
      out.args.push_back(std::move(t));
      if (cur().kind == Tok::Comma) {
        advance();
        continue;
      }
      break;
    }
    return expect(Tok::RParen, "')'");
  }

  bool signed_number(double& out) {
    double sign = 1.0;
    if (cur().kind == Tok::Minus) {
      sign = -1.0;
      advance();
    } else if (cur().kind == Tok::Plus) {
      advance();
    }
    if (cur().kind != Tok::Number) {
      error_at(cur(), "expected a number");
      return false;
    }
    const std::string& s = cur().text;
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
      error_at(cur(), "malformed number");
      return false;
    }
    advance();
    out = sign * v;
    return true;
  }

  bool bound(bool lower, Bound& out) {
    bool neg = false;
    if (cur().kind == Tok::Minus && peek().kind == Tok::Ident && peek().text == "inf") {
      neg = true;
      advance();
    } else if (cur().kind == Tok::Plus && peek().kind == Tok::Ident && peek().text == "inf") {
      advance();
    }
    if (keyword("inf")) {
      if (neg && !lower) {
        error_at(cur(), "-inf is not a legal upper bound");
        return false;
      }
      if (!neg && lower) {
        error_at(cur(), "inf is not a legal lower bound");
        return false;
      }
      advance();
      out = neg ? Bound::neg_inf() : Bound::pos_inf();
      return true;
    }
    double v;
    if (!signed_number(v)) return false;
    out = Bound::finite(v);
    return true;
  }

  // [sign] [number '*'] pattern; lead_sign folds in a preceding '-' separator
  bool lin_term(LinTermTemplate& out, double lead_sign) {
    double sign = lead_sign;
    if (cur().kind == Tok::Minus) {
      sign = -sign;
      advance();
    } else if (cur().kind == Tok::Plus) {
      advance();
    }
    out.coef = sign;
    if (cur().kind == Tok::Number) {
      double v;
      if (!signed_number(v)) return false;
      out.coef = sign * v;
      if (!expect(Tok::Star, "'*'")) return false;
    }
    return pattern(out.atom);
  }

  bool body_literal(Literal& out) {
    if (keyword("not")) {
      advance();
      if (keyword("not")) {
        error_at(cur(), "nested 'not' is not allowed");
        return false;
      }
      out.negated = true;
    }
    // domain literal: ident '(' ... ; otherwise a comparison
    if (cur().kind == Tok::Ident && !is_keyword(cur().text) && peek().kind == Tok::LParen) {
      out.kind = Literal::Kind::Domain;
      out.domain = cur().text;
      advance();
      advance();  // (
      if (!term(out.arg)) return false;
      return expect(Tok::RParen, "')'");
    }
    out.kind = Literal::Kind::Cmp;
    if (!term(out.lhs)) return false;
    switch (cur().kind) {
      case Tok::Assign: out.op = CmpOp::Eq; break;
      case Tok::Neq: out.op = CmpOp::Ne; break;
      case Tok::Lt: out.op = CmpOp::Lt; break;
      case Tok::Le: out.op = CmpOp::Le; break;
      default:
        error_at(cur(), "expected '=', '!=', '<' or '<='");
        return false;
    }
    advance();
    return term(out.rhs);
  }

  bool body(std::vector<Literal>& out) {
    while (true) {
      Literal lit;
      if (!body_literal(lit)) return false;
      out.push_back(std::move(lit));
      if (cur().kind == Tok::Comma) {
        advance();
        continue;
      }
      return true;
    }
  }

  bool var_decl() {
    Span sp = span_of(cur());
    advance();  // var
    AtomPattern head;
    if (!pattern(head)) return false;
    RawVarDecl decl;
    decl.head = std::move(head);
    decl.span = sp;
    if (cur().kind == Tok::Turnstile) {
      advance();
      decl.shorthand = false;
      if (!body(decl.body)) return false;
    } else {
      decl.shorthand = true;
    }
    if (!expect(Tok::Semi, "';'")) return false;
    raw_vars_.push_back(std::move(decl));
    return true;
  }

  bool value_rule(std::vector<ValueRule>& rules, std::vector<Span>& spans) {
    Span sp = span_of(cur());
    advance();
    ValueRule r;
    if (!pattern(r.pattern)) return false;
    if (!expect(Tok::Assign, "'='")) return false;
    if (!signed_number(r.value)) return false;
    if (!expect(Tok::Semi, "';'")) return false;
    rules.push_back(std::move(r));
    spans.push_back(sp);
    return true;
  }

  bool vartype_value(VarType& out) {
    if (keyword("int")) {
      out = VarType::Integer;
      advance();
      return true;
    }
    if (keyword("cont")) {
      out = VarType::Continuous;
      advance();
      return true;
    }
    error_at(cur(), "expected 'int' or 'cont'");
    return false;
  }

  bool vartype_rule(Model& m, SpanTable& spans) {
    Span sp = span_of(cur());
    advance();
    VartypeRule r;
    if (!pattern(r.pattern)) return false;
    if (!expect(Tok::Assign, "'='")) return false;
    if (!vartype_value(r.value)) return false;
    if (!expect(Tok::Semi, "';'")) return false;
    m.vartype_rules.push_back(std::move(r));
    spans.vartype_rules.push_back(sp);
    return true;
  }

  bool constraint_rule(Model& m, SpanTable& spans) {
    Span sp = span_of(cur());
    advance();
    ConstraintRule r;
    if (!bound(/*lower=*/true, r.lb)) return false;
    if (!expect(Tok::Le, "'<='")) return false;
    double lead = 1.0;
    while (true) {
      LinTermTemplate t;
      if (!lin_term(t, lead)) return false;
      r.terms.push_back(std::move(t));
      if (cur().kind == Tok::Plus) {
        lead = 1.0;
        advance();
        continue;
      }
      if (cur().kind == Tok::Minus) {
        lead = -1.0;
        advance();
        continue;
      }
      break;
    }
    if (!expect(Tok::Le, "'<='")) return false;
    if (!bound(/*lower=*/false, r.ub)) return false;
    if (cur().kind == Tok::Turnstile) {
      advance();
      if (!body(r.body)) return false;
    }
    if (!expect(Tok::Semi, "';'")) return false;
    m.constraint_rules.push_back(std::move(r));
    spans.constraint_rules.push_back(sp);
    return true;
  }

  bool default_block(Model& m) {
    advance();  // default
    if (!expect(Tok::LBrace, "'{'")) return false;
    while (cur().kind != Tok::RBrace && cur().kind != Tok::End) {
      if (keyword("objective") || keyword("lb") || keyword("ub")) {
        std::string which = cur().text;
        advance();
        if (!expect(Tok::Assign, "'='")) return false;
        double v;
        if (!signed_number(v)) return false;
        if (!expect(Tok::Semi, "';'")) return false;
        if (which == "objective")
          m.defaults.objective = v;
        else if (which == "lb")
          m.defaults.lb = v;
        else
          m.defaults.ub = v;
      } else if (keyword("vartype")) {
        advance();
        if (!expect(Tok::Assign, "'='")) return false;
        if (!vartype_value(m.defaults.vartype)) return false;
        if (!expect(Tok::Semi, "';'")) return false;
      } else {
        error_at(cur(), "expected objective/lb/ub/vartype default");
        return false;
      }
    }
    if (!expect(Tok::RBrace, "'}'")) return false;
    if (cur().kind == Tok::Semi) advance();
    return true;
  }

public:
  struct RawVarDecl {
    AtomPattern head;
    std::vector<Literal> body;
    bool shorthand = true;
    Span span;
  };

  std::vector<RawVarDecl> raw_vars_;

private:
  std::vector<Token> toks_;
  std::vector<Diagnostic>& diags_;
  std::size_t pos_ = 0;
};

// ----------------------------------------------------- semantic checks

using BinderMap = std::map<std::string, std::string>;  // var -> domain

// Domain of the first positive domain literal binding each variable.
BinderMap binder_domains(const std::vector<Literal>& body) {
  BinderMap out;
  for (const auto& lit : body) {
    if (lit.kind != Literal::Kind::Domain || lit.negated) continue;
    if (lit.arg.is_var()) out.emplace(lit.arg.text, lit.domain);
  }
  return out;
}

void collect_vars(const Term& t, std::set<std::string>& out) {
  if (t.is_var()) out.insert(t.text);
}

std::set<std::string> rule_vars(const std::vector<Term>& head_terms,
                                const std::vector<Literal>& body) {
  std::set<std::string> vars;
  for (const auto& t : head_terms) collect_vars(t, vars);
  for (const auto& lit : body) {
    if (lit.kind == Literal::Kind::Domain) {
      collect_vars(lit.arg, vars);
    } else {
      collect_vars(lit.lhs, vars);
      collect_vars(lit.rhs, vars);
    }
  }
  return vars;
}

class Checker {
public:
  Checker(const Model& m, const SpanTable* spans, std::vector<Diagnostic>& diags)
      : m_(m), spans_(spans), diags_(diags) {}

  void run() {
    check_domains();
    check_signatures();
    for (std::size_t i = 0; i < m_.variable_rules.size(); ++i)
      check_var_rule(m_.variable_rules[i], span(spans_ ? &spans_->variable_rules : nullptr, i));
    for (std::size_t i = 0; i < m_.constraint_rules.size(); ++i)
      check_constraint_rule(m_.constraint_rules[i],
                            span(spans_ ? &spans_->constraint_rules : nullptr, i));
    check_value_rules(m_.objective_rules, spans_ ? &spans_->objective_rules : nullptr);
    check_value_rules(m_.lb_rules, spans_ ? &spans_->lb_rules : nullptr);
    check_value_rules(m_.ub_rules, spans_ ? &spans_->ub_rules : nullptr);
    check_vartype_rules();
    check_defaults();
  }

private:
  static Span span(const std::vector<Span>* v, std::size_t i) {
    if (v && i < v->size()) return (*v)[i];
    return Span{};
  }

  void report(Severity sev, Span sp, const std::string& msg) {
    diags_.push_back({sev, sp.line, sp.column, sp.length, msg});
  }

  void check_domains() {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < m_.domains.size(); ++i) {
      const auto& [name, consts] = m_.domains[i];
      Span sp = span(spans_ ? &spans_->domains : nullptr, i);
      if (!seen.insert(name).second)
        report(Severity::Error, sp, "duplicate domain declaration '" + name + "'");
      std::set<std::string> cs;
      for (const auto& c : consts)
        if (!cs.insert(c).second)
          report(Severity::Error, sp, "duplicate constant '" + c + "' in domain '" + name + "'");
    }
  }

  void check_signatures() {
    for (const auto& [functor, sig] : m_.signatures) {
      if (m_.domain(functor))
        report(Severity::Error, Span{},
               "'" + functor + "' is used both as a domain and as a variable family");
      for (const auto& d : sig)
        if (!d.empty() && !m_.domain(d))
          report(Severity::Error, Span{},
                 "variable family '" + functor + "' uses unknown domain '" + d + "'");
    }
  }

  // Shared body checks; returns the binder map for later use.
  BinderMap check_body(const std::vector<Literal>& body, Span sp) {
    BinderMap binders = binder_domains(body);
    for (const auto& lit : body) {
      if (lit.kind == Literal::Kind::Domain) {
        if (!m_.domain(lit.domain)) {
          report(Severity::Error, sp, "unknown domain '" + lit.domain + "'");
          continue;
        }
        if (!lit.arg.is_var() && !m_.domain_has(lit.domain, lit.arg.text))
          report(Severity::Warning, sp,
                 "literal " + lit.domain + "(" + lit.arg.text + ") is always false");
      } else if (lit.op == CmpOp::Lt || lit.op == CmpOp::Le) {
        check_comparable(lit, binders, sp);
      }
    }
    return binders;
  }

  // < and <= need both sides in one declared domain, whose declaration
  // order supplies the ranking.
  void check_comparable(const Literal& lit, const BinderMap& binders, Span sp) {
    auto side_domains = [&](const Term& t) {
      std::vector<std::string> ds;
      if (t.is_var()) {
        auto it = binders.find(t.text);
        if (it != binders.end()) ds.push_back(it->second);
      } else {
        for (const auto& [name, consts] : m_.domains)
          if (std::find(consts.begin(), consts.end(), t.text) != consts.end())
            ds.push_back(name);
      }
      return ds;
    };
    auto lds = side_domains(lit.lhs);
    auto rds = side_domains(lit.rhs);
    if (lds.empty() || rds.empty()) return;  // unbound var: safety reports it
    for (const auto& d : lds)
      if (std::find(rds.begin(), rds.end(), d) != rds.end()) return;
    report(Severity::Error, sp, "operands of an order comparison are not from the same domain");
  }

  void check_safety(const std::set<std::string>& vars, const BinderMap& binders, Span sp) {
    for (const auto& v : vars)
      if (!binders.count(v))
        report(Severity::Error, sp,
               "unsafe rule: variable " + v + " is not bound by a positive domain literal");
  }

  // Pattern args must fit the functor's declared signature.
  void check_pattern_against_signature(const AtomPattern& pat, const BinderMap* binders,
                                       Span sp, bool check_var_domains) {
    auto it = m_.signatures.find(pat.functor);
    if (it == m_.signatures.end()) {
      report(Severity::Error, sp, "unknown functor '" + pat.functor + "'");
      return;
    }
    const auto& sig = it->second;
    if (sig.size() != pat.args.size()) {
      report(Severity::Error, sp,
             "functor '" + pat.functor + "' expects " + std::to_string(sig.size()) +
                 " argument(s), got " + std::to_string(pat.args.size()));
      return;
    }
    for (std::size_t i = 0; i < pat.args.size(); ++i) {
      if (sig[i].empty()) continue;  // signature inference already failed
      const Term& t = pat.args[i];
      if (t.is_var()) {
        if (check_var_domains && binders) {
          auto b = binders->find(t.text);
          if (b != binders->end() && b->second != sig[i])
            report(Severity::Error, sp,
                   "variable " + t.text + " ranges over '" + b->second +
                       "' but position " + std::to_string(i + 1) + " of '" + pat.functor +
                       "' is '" + sig[i] + "'");
        }
      } else if (!m_.domain_has(sig[i], t.text)) {
        report(Severity::Error, sp,
               "constant '" + t.text + "' is not in domain '" + sig[i] + "'");
      }
    }
  }

  void check_var_rule(const VarRule& r, Span sp) {
    BinderMap binders = check_body(r.body, sp);
    check_safety(rule_vars(r.head.args, r.body), binders, sp);
    check_pattern_against_signature(r.head, &binders, sp, true);
  }

  void check_constraint_rule(const ConstraintRule& r, Span sp) {
    if (!r.lb.is_finite() && !r.ub.is_finite())
      report(Severity::Error, sp, "constraint has no finite bound");
    if (r.lb.is_finite() && r.ub.is_finite() && r.lb.value > r.ub.value)
      report(Severity::Error, sp, "constraint lower bound exceeds its upper bound");
    BinderMap binders = check_body(r.body, sp);
    std::vector<Term> head_terms;
    for (const auto& t : r.terms) {
      head_terms.insert(head_terms.end(), t.atom.args.begin(), t.atom.args.end());
      check_pattern_against_signature(t.atom, &binders, sp, true);
    }
    check_safety(rule_vars(head_terms, r.body), binders, sp);
  }

  void check_value_rules(const std::vector<ValueRule>& rules, const std::vector<Span>* spans) {
    for (std::size_t i = 0; i < rules.size(); ++i)
      check_pattern_against_signature(rules[i].pattern, nullptr, span(spans, i), false);
  }

  void check_vartype_rules() {
    for (std::size_t i = 0; i < m_.vartype_rules.size(); ++i)
      check_pattern_against_signature(m_.vartype_rules[i].pattern, nullptr,
                                      span(spans_ ? &spans_->vartype_rules : nullptr, i), false);
  }

  void check_defaults() {
    if (m_.defaults.lb > m_.defaults.ub)
      report(Severity::Error, Span{}, "default lb exceeds default ub");
    else if (m_.defaults.vartype == VarType::Integer &&
             std::ceil(m_.defaults.lb - 1e-9) > std::floor(m_.defaults.ub + 1e-9))
      report(Severity::Error, Span{}, "default integer bounds contain no integer");
  }

  const Model& m_;
  const SpanTable* spans_;
  std::vector<Diagnostic>& diags_;
};

void install_signature(Model& m, const std::string& functor, const std::vector<std::string>& sig,
                       Span sp, std::vector<Diagnostic>& diags);

// Expand `var f(d1,...,dn);` shorthand and infer signatures.
void resolve_var_rules(Model& m, std::vector<Parser::RawVarDecl>& raw,
                       SpanTable& spans, std::vector<Diagnostic>& diags) {
  for (auto& decl : raw) {
    VarRule rule;
    if (decl.shorthand) {
      // args name domains; synthesize head variables A1..An
      std::vector<std::string> sig;
      for (std::size_t i = 0; i < decl.head.args.size(); ++i) {
        const Term& t = decl.head.args[i];
        if (t.is_var() || !m.domain(t.text)) {
          diags.push_back({Severity::Error, decl.span.line, decl.span.column, decl.span.length,
                           "argument " + std::to_string(i + 1) + " of 'var " + decl.head.functor +
                               "' must name a declared domain"});
          sig.push_back("");
          continue;
        }
        sig.push_back(t.text);
      }
      rule.head.functor = decl.head.functor;
      for (std::size_t i = 0; i < decl.head.args.size(); ++i) {
        std::string v = "A" + std::to_string(i + 1);
        rule.head.args.push_back(Term::var(v));
        if (!sig[i].empty()) {
          Literal lit;
          lit.kind = Literal::Kind::Domain;
          lit.domain = sig[i];
          lit.arg = Term::var(v);
          rule.body.push_back(std::move(lit));
        }
      }
      install_signature(m, rule.head.functor, sig, decl.span, diags);
    } else {
      rule.head = decl.head;
      rule.body = std::move(decl.body);
      BinderMap binders = binder_domains(rule.body);
      std::vector<std::string> sig;
      for (const Term& t : rule.head.args) {
        if (t.is_var()) {
          auto it = binders.find(t.text);
          sig.push_back(it != binders.end() ? it->second : "");
          // unbound head vars are reported by the safety check
        } else {
          std::vector<std::string> owners;
          for (const auto& [name, consts] : m.domains)
            if (std::find(consts.begin(), consts.end(), t.text) != consts.end())
              owners.push_back(name);
          if (owners.size() == 1) {
            sig.push_back(owners[0]);
          } else {
            diags.push_back({Severity::Error, decl.span.line, decl.span.column, decl.span.length,
                             owners.empty()
                                 ? "constant '" + t.text + "' is not in any declared domain"
                                 : "constant '" + t.text + "' is in several domains; cannot infer signature"});
            sig.push_back("");
          }
        }
      }
      install_signature(m, rule.head.functor, sig, decl.span, diags);
    }
    m.variable_rules.push_back(std::move(rule));
    spans.variable_rules.push_back(decl.span);
  }
}

void install_signature(Model& m, const std::string& functor, const std::vector<std::string>& sig,
                       Span sp, std::vector<Diagnostic>& diags) {
  auto [it, inserted] = m.signatures.emplace(functor, sig);
  if (inserted) return;
  if (it->second.size() != sig.size()) {
    diags.push_back({Severity::Error, sp.line, sp.column, sp.length,
                     "variable family '" + functor + "' redeclared with a different arity"});
    return;
  }
  for (std::size_t i = 0; i < sig.size(); ++i) {
    if (sig[i].empty() || it->second[i].empty()) continue;
    if (sig[i] != it->second[i])
      diags.push_back({Severity::Error, sp.line, sp.column, sp.length,
                       "variable family '" + functor + "' redeclared with a different signature"});
  }
  // fill holes left by earlier inference failures
  for (std::size_t i = 0; i < sig.size(); ++i)
    if (it->second[i].empty() && !sig[i].empty()) it->second[i] = sig[i];
}

}  // namespace

ParseResult parse_model(const SourceModel& src) {
  ParseResult result;
  Lexer lexer(src.text);
  std::vector<Token> toks = lexer.run(result.diagnostics);

  Model m;
  SpanTable spans;
  Parser parser(std::move(toks), result.diagnostics);
  parser.run(m, spans);
  resolve_var_rules(m, parser.raw_vars_, spans, result.diagnostics);

  Checker(m, &spans, result.diagnostics).run();

  if (!has_errors(result.diagnostics)) result.model = std::move(m);
  return result;
}

std::vector<Diagnostic> validate_model(const Model& m) {
  std::vector<Diagnostic> diags;
  Checker(m, nullptr, diags).run();
  return diags;
}

namespace {

std::string term_str(const Term& t) { return t.text; }

std::string pattern_str(const AtomPattern& p) {
  std::string s = p.functor + "(";
  for (std::size_t i = 0; i < p.args.size(); ++i) {
    if (i) s += ", ";
    s += term_str(p.args[i]);
  }
  return s + ")";
}

std::string literal_str(const Literal& lit) {
  std::string s = lit.negated ? "not " : "";
  if (lit.kind == Literal::Kind::Domain) return s + lit.domain + "(" + term_str(lit.arg) + ")";
  const char* op = lit.op == CmpOp::Eq ? " = "
                   : lit.op == CmpOp::Ne ? " != "
                   : lit.op == CmpOp::Lt ? " < "
                                         : " <= ";
  return s + term_str(lit.lhs) + op + term_str(lit.rhs);
}

std::string body_str(const std::vector<Literal>& body) {
  std::string s;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (i) s += ", ";
    s += literal_str(body[i]);
  }
  return s;
}

std::string bound_str(const Bound& b, bool lower) {
  if (!b.is_finite()) return lower ? "-inf" : "inf";
  return format_double(b.value);
}

}  // namespace

std::string print_model(const Model& m) {
  std::ostringstream os;
  for (const auto& [name, consts] : m.domains) {
    os << "domain " << name << " = {";
    for (std::size_t i = 0; i < consts.size(); ++i) {
      if (i) os << ", ";
      os << consts[i];
    }
    os << "};\n";
  }
  for (const auto& r : m.variable_rules) {
    os << "var " << pattern_str(r.head);
    if (!r.body.empty()) os << " :- " << body_str(r.body);
    os << ";\n";
  }
  for (const auto& r : m.objective_rules)
    os << "objective " << pattern_str(r.pattern) << " = " << format_double(r.value) << ";\n";
  for (const auto& r : m.lb_rules)
    os << "lb " << pattern_str(r.pattern) << " = " << format_double(r.value) << ";\n";
  for (const auto& r : m.ub_rules)
    os << "ub " << pattern_str(r.pattern) << " = " << format_double(r.value) << ";\n";
  for (const auto& r : m.vartype_rules)
    os << "vartype " << pattern_str(r.pattern) << " = "
       << (r.value == VarType::Integer ? "int" : "cont") << ";\n";
  for (const auto& r : m.constraint_rules) {
    os << "constraint " << bound_str(r.lb, true) << " <= ";
    for (std::size_t i = 0; i < r.terms.size(); ++i) {
      if (i) os << " + ";
      os << format_double(r.terms[i].coef) << "*" << pattern_str(r.terms[i].atom);
    }
    os << " <= " << bound_str(r.ub, false);
    if (!r.body.empty()) os << " :- " << body_str(r.body);
    os << ";\n";
  }
  os << "default { objective = " << format_double(m.defaults.objective)
     << "; lb = " << format_double(m.defaults.lb) << "; ub = " << format_double(m.defaults.ub)
     << "; vartype = " << (m.defaults.vartype == VarType::Integer ? "int" : "cont") << "; }\n";
  return os.str();
}

}  // namespace fomip
