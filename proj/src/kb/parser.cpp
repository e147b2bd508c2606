#include "lsos/kb/parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

namespace lsos::kb {

ParseError::ParseError(std::vector<Diagnostic> diags)
    : std::runtime_error(diags.empty() ? "parse error" : diags.front().to_string()), diags_(std::move(diags)) {}

namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class Tok {
  ident,
  number,
  slash,
  semi,
  comma,
  colon,
  lparen,
  rparen,
  star,
  caret,
  plus,
  minus,
  eq,
  neq,
  geq,
  leq,
  arrow,
  amp,
  bar,
  bang,
  end,
  bad,
};

struct Token {
  Tok kind = Tok::end;
  std::string text;
  double value = 0;
  SourceSpan span;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::end:
      return "end of input";
    case Tok::ident:
      return "'" + t.text + "'";
    default:
      return "'" + t.text + "'";
  }
}

std::vector<Token> tokenize(std::string_view src, std::vector<Diagnostic>& diags) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, line_start = 0;
  auto make_span = [&](std::size_t b, std::size_t e) { return SourceSpan{line, b - line_start + 1, b, e}; };

  while (i < src.size()) {
    char ch = src[i];
    if (ch == '\n') {
      ++line;
      line_start = ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
      continue;
    }
    if (ch == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    std::size_t b = i;
    Token t;
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
      t.kind = Tok::ident;
    } else if (std::isdigit(static_cast<unsigned char>(ch)) ||
               (ch == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      while (i < src.size() && (std::isdigit(static_cast<unsigned char>(src[i])) || src[i] == '.')) ++i;
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
        if (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
          i = j;
          while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
        }
      }
      t.kind = Tok::number;
      std::string lit(src.substr(b, i - b));
      if (lit.front() == '.') lit.insert(lit.begin(), '0');
      auto res = std::from_chars(lit.data(), lit.data() + lit.size(), t.value);
      if (res.ec != std::errc() || res.ptr != lit.data() + lit.size()) t.kind = Tok::bad;
    } else {
      auto two = [&](char next) { return i < src.size() && src[i] == next; };
      ++i;
      switch (ch) {
        case '/': t.kind = Tok::slash; break;
        case ';': t.kind = Tok::semi; break;
        case ',': t.kind = Tok::comma; break;
        case ':': t.kind = Tok::colon; break;
        case '(': t.kind = Tok::lparen; break;
        case ')': t.kind = Tok::rparen; break;
        case '*': t.kind = Tok::star; break;
        case '^': t.kind = Tok::caret; break;
        case '+': t.kind = Tok::plus; break;
        case '-': t.kind = Tok::minus; break;
        case '&': t.kind = Tok::amp; break;
        case '|': t.kind = Tok::bar; break;
        case '=':
          if (two('>')) { ++i; t.kind = Tok::arrow; } else { t.kind = Tok::eq; }
          break;
        case '!':
          if (two('=')) { ++i; t.kind = Tok::neq; } else { t.kind = Tok::bang; }
          break;
        case '>':
          if (two('=')) { ++i; t.kind = Tok::geq; } else { t.kind = Tok::bad; }
          break;
        case '<':
          if (two('=')) { ++i; t.kind = Tok::leq; } else { t.kind = Tok::bad; }
          break;
        default:
          t.kind = Tok::bad;
      }
    }
    t.text = std::string(src.substr(b, i - b));
    t.span = make_span(b, i);
    if (t.kind == Tok::bad)
      diags.push_back({Diagnostic::Severity::error, "unexpected character sequence '" + t.text + "'", t.span, {}});
    out.push_back(std::move(t));
  }
  Token eof;
  eof.kind = Tok::end;
  eof.span = make_span(src.size(), src.size());
  out.push_back(eof);
  return out;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Failure {};  // unwinds to statement-level recovery

// Polynomial expression tagged by what it may contain.
struct Expr {
  enum class Kind { constant, logical, moment };
  Kind kind = Kind::constant;
  Polynomial poly;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, std::vector<Diagnostic>& diags) : toks_(std::move(toks)), diags_(diags) {}

  // Declarations visible to constraints, collected before parsing so that a
  // constraint may precede the `constant` statement naming its constants.
  std::set<std::string> constants;
  std::set<std::string> relations;

  void prescan() {
    for (std::size_t i = 0; i < toks_.size(); ++i) {
      bool at_start = i == 0 || toks_[i - 1].kind == Tok::semi;
      if (!at_start || toks_[i].kind != Tok::ident) continue;
      if (toks_[i].text == "constant") {
        for (std::size_t j = i + 1; j < toks_.size() && toks_[j].kind != Tok::semi && toks_[j].kind != Tok::end; ++j)
          if (toks_[j].kind == Tok::ident) constants.insert(toks_[j].text);
      } else if (toks_[i].text == "relation" && i + 1 < toks_.size() && toks_[i + 1].kind == Tok::ident) {
        relations.insert(toks_[i + 1].text);
      }
    }
  }

  KnowledgeBase parse_all() {
    KnowledgeBase kb;
    while (peek().kind != Tok::end) {
      std::size_t start = pos_;
      try {
        parse_statement(kb);
      } catch (const Failure&) {
        recover();
      }
      if (pos_ == start) ++pos_;  // guarantee progress
    }
    return kb;
  }

  Constraint parse_single_constraint() {
    Constraint c = parse_constraint_body();
    if (peek().kind == Tok::semi) ++pos_;
    if (peek().kind != Tok::end) fail(peek(), "unexpected " + describe(peek()) + " after constraint");
    return c;
  }

  Expr parse_single_expression() {
    Expr e = parse_expr();
    if (peek().kind != Tok::end) fail(peek(), "unexpected " + describe(peek()) + " after expression");
    return e;
  }

  [[noreturn]] void fail(const Token& at, std::string msg) {
    diags_.push_back({Diagnostic::Severity::error, std::move(msg), at.span, {}});
    throw Failure{};
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic>& diags_;
  std::vector<std::string> scope_;  // quantified variables of current constraint

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    next();
    return true;
  }
  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) fail(peek(), std::string("expected ") + what + ", found " + describe(peek()));
    return next();
  }
  bool is_keyword(const char* kw) const { return peek().kind == Tok::ident && peek().text == kw; }

  void recover() {
    while (peek().kind != Tok::semi && peek().kind != Tok::end) next();
    accept(Tok::semi);
  }

  void parse_statement(KnowledgeBase& kb) {
    if (is_keyword("relation")) {
      next();
      RelationSymbol rel;
      rel.label = expect(Tok::ident, "relation name").text;
      expect(Tok::slash, "'/'");
      const Token& ar = expect(Tok::number, "arity");
      if (ar.value != std::floor(ar.value) || ar.value < 1 || ar.value > 64)
        fail(ar, "arity must be a positive integer");
      rel.arity = static_cast<int>(ar.value);
      if (is_keyword("boolean")) {
        next();
        rel.boolean_flag = true;
      }
      if (is_keyword("bounded")) {
        next();
        rel.bound = expect(Tok::number, "bound").value;
      }
      expect(Tok::semi, "';'");
      kb.add_relation(rel);
      return;
    }
    if (is_keyword("constant")) {
      next();
      do {
        kb.add_constant(expect(Tok::ident, "constant name").text);
      } while (accept(Tok::comma));
      expect(Tok::semi, "';'");
      return;
    }
    Constraint c = parse_constraint_body();
    expect(Tok::semi, "';'");
    kb.add_constraint(std::move(c));
  }

  bool arrow_ahead() const {
    for (std::size_t i = pos_; i < toks_.size(); ++i) {
      if (toks_[i].kind == Tok::arrow) return true;
      if (toks_[i].kind == Tok::semi || toks_[i].kind == Tok::end) return false;
    }
    return false;
  }

  Constraint parse_constraint_body() {
    const Token& first = peek();
    Constraint c;
    scope_.clear();
    if (is_keyword("forall")) {
      next();
      do {
        const Token& v = expect(Tok::ident, "variable name");
        if (constants.count(v.text)) fail(v, "variable '" + v.text + "' shadows a declared constant");
        if (parse_generic_label(v.text)) fail(v, "'" + v.text + "' is reserved for generic names");
        c.variables.push_back(v.text);
      } while (accept(Tok::comma));
      expect(Tok::colon, "':'");
      scope_ = c.variables;
    }
    if (arrow_ahead()) {
      c.guard = parse_guard_or();
      expect(Tok::arrow, "'=>'");
    }
    Expr body = parse_expr();
    const Token& rel = next();
    if (rel.kind != Tok::geq && rel.kind != Tok::eq && rel.kind != Tok::leq)
      fail(rel, "expected '>=', '<=' or '=', found " + describe(rel));
    double rhs = parse_signed_number();

    Polynomial p = body.poly;
    if (rel.kind == Tok::leq) {
      p = Polynomial::constant(rhs) - p;
    } else {
      p -= Polynomial::constant(rhs);
    }
    c.body = std::move(p);
    c.relation = rel.kind == Tok::eq ? Relation::eq : Relation::geq;
    c.kind = body.kind == Expr::Kind::moment ? ConstraintKind::expectation : ConstraintKind::logical;
    const Token& last = peek();
    c.span = SourceSpan{first.span.line, first.span.column, first.span.begin, last.span.begin};
    return c;
  }

  double parse_signed_number() {
    bool neg = false;
    if (accept(Tok::minus)) neg = true;
    else accept(Tok::plus);
    double v = expect(Tok::number, "number").value;
    return neg ? -v : v;
  }

  Arg resolve(const Token& t) {
    for (const auto& v : scope_)
      if (v == t.text) return Arg::var(t.text);
    if (constants.count(t.text)) return Arg::of(Name::constant(t.text));
    if (auto g = parse_generic_label(t.text)) return Arg::of(Name::generic(*g));
    // Left for validation to report as an unquantified variable.
    return Arg::var(t.text);
  }

  // guard := and ('|' and)* ; and := not ('&' not)* ; not := '!' not | '(' guard ')' | atom
  Guard parse_guard_or() {
    std::vector<Guard> parts{parse_guard_and()};
    while (accept(Tok::bar)) parts.push_back(parse_guard_and());
    return Guard::any_of(std::move(parts));
  }
  Guard parse_guard_and() {
    std::vector<Guard> parts{parse_guard_not()};
    while (accept(Tok::amp)) parts.push_back(parse_guard_not());
    return Guard::all_of(std::move(parts));
  }
  Guard parse_guard_not() {
    if (accept(Tok::bang)) return Guard::negate(parse_guard_not());
    if (accept(Tok::lparen)) {
      Guard g = parse_guard_or();
      expect(Tok::rparen, "')'");
      return g;
    }
    if (is_keyword("true")) {
      next();
      return Guard::tautology();
    }
    Arg lhs = resolve(expect(Tok::ident, "variable or constant in guard"));
    const Token& op = next();
    if (op.kind != Tok::eq && op.kind != Tok::neq) fail(op, "expected '=' or '!=' in guard, found " + describe(op));
    Arg rhs = resolve(expect(Tok::ident, "variable or constant in guard"));
    return op.kind == Tok::eq ? Guard::equal(lhs, rhs) : Guard::not_equal(lhs, rhs);
  }

  // expr := ['+'|'-'] product (('+'|'-') product)*
  Expr parse_expr() {
    Expr acc;
    bool neg = false;
    if (accept(Tok::minus)) neg = true;
    else accept(Tok::plus);
    acc = parse_product();
    if (neg) acc.poly *= -1.0;
    while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
      const Token& op = next();
      Expr rhs = parse_product();
      if (op.kind == Tok::minus) rhs.poly *= -1.0;
      acc = combine_sum(acc, rhs, op);
    }
    return acc;
  }

  Expr parse_product() {
    Expr acc = parse_power();
    while (peek().kind == Tok::star) {
      const Token& op = next();
      Expr rhs = parse_power();
      acc = combine_product(acc, rhs, op);
    }
    return acc;
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (peek().kind != Tok::caret) return base;
    const Token& op = next();
    const Token& ex = expect(Tok::number, "integer exponent");
    if (ex.value != std::floor(ex.value) || ex.value < 0 || ex.value > 64)
      fail(ex, "exponent must be a nonnegative integer");
    int n = static_cast<int>(ex.value);
    if (base.kind == Expr::Kind::moment && n >= 2) fail(op, "powers of moment terms are not linear in moments");
    Expr out;
    out.kind = n == 0 ? Expr::Kind::constant : base.kind;
    out.poly = Polynomial::constant(1.0);
    for (int i = 0; i < n; ++i) out.poly = out.poly * base.poly;
    return out;
  }

  Expr parse_primary() {
    const Token& t = peek();
    if (t.kind == Tok::number) {
      next();
      return {Expr::Kind::constant, Polynomial::constant(t.value)};
    }
    if (t.kind == Tok::minus) {
      next();
      Expr e = parse_power();
      e.poly *= -1.0;
      return e;
    }
    if (t.kind == Tok::lparen) {
      next();
      Expr e = parse_expr();
      expect(Tok::rparen, "')'");
      return e;
    }
    if (t.kind == Tok::ident && t.text == "e" && peek(1).kind == Tok::lparen) {
      next();
      next();
      Expr inner = parse_expr();
      expect(Tok::rparen, "')'");
      if (inner.kind == Expr::Kind::moment) fail(t, "nested moment terms e(e(...)) are not allowed");
      return {Expr::Kind::moment, inner.poly};
    }
    if (t.kind == Tok::ident && peek(1).kind == Tok::lparen) {
      const Token& rel = next();
      next();
      Term term;
      term.relation = rel.text;
      if (peek().kind != Tok::rparen) {
        do {
          term.args.push_back(resolve(expect(Tok::ident, "argument name")));
        } while (accept(Tok::comma));
      }
      expect(Tok::rparen, "')'");
      if (!relations.count(rel.text)) fail(rel, "relation '" + rel.text + "' is not declared");
      return {Expr::Kind::logical, Polynomial::of(Monomial(term))};
    }
    fail(t, "expected a number, relation application, e(...) or '(', found " + describe(t));
  }

  Expr combine_sum(const Expr& a, const Expr& b, const Token& at) {
    Expr out;
    out.poly = a.poly + b.poly;
    out.kind = merge_kinds(a.kind, b.kind, at);
    return out;
  }

  Expr combine_product(const Expr& a, const Expr& b, const Token& at) {
    if (a.kind == Expr::Kind::moment && b.kind == Expr::Kind::moment)
      fail(at, "product of moment terms is not linear in moments");
    Expr out;
    out.kind = merge_kinds(a.kind, b.kind, at);
    out.poly = a.poly * b.poly;
    return out;
  }

  Expr::Kind merge_kinds(Expr::Kind a, Expr::Kind b, const Token& at) {
    if (a == Expr::Kind::constant) return b;
    if (b == Expr::Kind::constant) return a;
    if (a != b) fail(at, "moment terms e(...) and raw relation terms cannot be mixed in one constraint");
    return a;
  }
};

}  // namespace

ParseResult parse_kb(std::string_view text) {
  ParseResult result;
  auto toks = tokenize(text, result.diagnostics);
  Parser parser(std::move(toks), result.diagnostics);
  parser.prescan();
  KnowledgeBase kb = parser.parse_all();

  bool syntax_ok = !has_errors(result.diagnostics);
  for (auto& d : validate_kb(kb)) {
    // Parse failures already explain themselves; an emptiness error on top of
    // a syntax error would only repeat it.
    if (!syntax_ok && d.message == "knowledge base must be non-empty") continue;
    if (!d.span && d.constraint_index && *d.constraint_index < kb.constraints().size())
      d.span = kb.constraints()[*d.constraint_index].span;
    result.diagnostics.push_back(std::move(d));
  }
  if (!has_errors(result.diagnostics)) result.kb = std::move(kb);
  return result;
}

std::string serialize_kb(const KnowledgeBase& kb) {
  std::ostringstream os;
  for (const auto& r : kb.relations()) os << "relation " << r.label << "/" << r.arity << ";\n";
  if (!kb.constants().empty()) {
    os << "constant ";
    for (std::size_t i = 0; i < kb.constants().size(); ++i) os << (i ? ", " : "") << kb.constants()[i];
    os << ";\n";
  }
  for (const auto& c : kb.constraints()) {
    // An expectation body without moments would otherwise re-parse as a
    // logical constant constraint.
    bool only_constant = true;
    for (const auto& [m, coef] : c.body.terms())
      if (!m.is_constant()) only_constant = false;
    if (c.kind == ConstraintKind::expectation && only_constant) {
      std::string body = c.body.is_zero() ? "e(0)" : "e(1)*" + c.body.to_string();
      std::string prefix;
      if (!c.variables.empty()) {
        prefix = "forall ";
        for (std::size_t i = 0; i < c.variables.size(); ++i) prefix += (i ? "," : "") + c.variables[i];
        prefix += " : ";
      }
      if (!c.guard.is_tautology()) prefix += c.guard.to_string() + " => ";
      os << prefix << body << (c.relation == Relation::geq ? " >= 0;" : " = 0;") << "\n";
      continue;
    }
    os << c.to_string() << "\n";
  }
  return os.str();
}

namespace {

Parser make_context_parser(std::string_view text, const KnowledgeBase& kb, std::vector<Diagnostic>& diags) {
  Parser p(tokenize(text, diags), diags);
  for (const auto& c : kb.constants()) p.constants.insert(c);
  for (const auto& r : kb.relations()) p.relations.insert(r.label);
  return p;
}

}  // namespace

Constraint parse_constraint(std::string_view text, const KnowledgeBase& kb) {
  std::vector<Diagnostic> diags;
  Parser p = make_context_parser(text, kb, diags);
  if (has_errors(diags)) throw ParseError(diags);
  Constraint c;
  try {
    c = p.parse_single_constraint();
  } catch (const Failure&) {
    throw ParseError(diags);
  }
  KnowledgeBase probe = kb;
  probe.add_constraint(c);
  std::vector<Diagnostic> errors;
  for (auto& d : validate_kb(probe))
    if (d.is_error() && d.constraint_index == probe.constraints().size() - 1) errors.push_back(d);
  if (!errors.empty()) throw ParseError(errors);
  return c;
}

Polynomial parse_objective(std::string_view text, const KnowledgeBase& kb) {
  std::vector<Diagnostic> diags;
  Parser p = make_context_parser(text, kb, diags);
  if (has_errors(diags)) throw ParseError(diags);
  Expr e;
  try {
    e = p.parse_single_expression();
  } catch (const Failure&) {
    throw ParseError(diags);
  }
  if (e.kind == Expr::Kind::logical)
    throw ParseError({{Diagnostic::Severity::error, "objective must be a combination of moment terms e(...)", {}, {}}});

  for (const auto& t : e.poly.terms_used()) {
    const RelationSymbol* rel = kb.find_relation(t.relation);
    if (!rel || rel->arity != static_cast<int>(t.args.size()))
      throw ParseError({{Diagnostic::Severity::error, "relation '" + t.relation + "' does not match a declaration", {}, {}}});
    for (const auto& a : t.args) {
      if (a.is_variable())
        throw ParseError({{Diagnostic::Severity::error,
                           "objective term " + t.to_string() + " is not ground: unknown name '" + a.variable +
                               "' (use a declared constant or a generic name g1, g2, ...)",
                           {}, {}}});
    }
  }
  return e.poly;
}

}  // namespace lsos::kb

namespace lsos::kb {

Monomial monomial_from_string(std::string_view text) {
  auto bad = [&]() { return std::invalid_argument("malformed monomial '" + std::string(text) + "'"); };
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  std::string_view s = trim(text);
  if (s == "1") return Monomial::one();
  Monomial out;
  while (!s.empty()) {
    std::size_t open = s.find('(');
    std::size_t close = s.find(')');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) throw bad();
    Term t;
    t.relation = std::string(trim(s.substr(0, open)));
    std::string_view args = s.substr(open + 1, close - open - 1);
    while (!args.empty()) {
      std::size_t comma = args.find(',');
      std::string label(trim(args.substr(0, comma)));
      if (label.empty()) throw bad();
      if (auto g = parse_generic_label(label)) t.args.push_back(Arg::of(Name::generic(*g)));
      else t.args.push_back(Arg::of(Name::constant(label)));
      if (comma == std::string_view::npos) break;
      args.remove_prefix(comma + 1);
    }
    if (t.relation.empty() || t.args.empty()) throw bad();
    s.remove_prefix(close + 1);
    int exponent = 1;
    if (!s.empty() && s.front() == '^') {
      s.remove_prefix(1);
      auto res = std::from_chars(s.data(), s.data() + s.size(), exponent);
      if (res.ec != std::errc() || exponent < 1) throw bad();
      s.remove_prefix(static_cast<std::size_t>(res.ptr - s.data()));
    }
    out = out * Monomial(t, exponent);
    s = trim(s);
    if (!s.empty()) {
      if (s.front() != '*') throw bad();
      s = trim(s.substr(1));
      if (s.empty()) throw bad();
    }
  }
  return out;
}

}  // namespace lsos::kb
