#include "qmc/dsl.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qmc/error.hpp"
#include "qmc/primes.hpp"

namespace qmc::dsl {

namespace {

constexpr std::array<std::string_view, 16> kReserved = {
    "model", "dim", "param", "trans", "for", "in", "sites", "where",
    "delta", "rate", "and", "or", "e", "x", "uniform", "level"};

bool is_reserved(std::string_view s) {
  return s == "prime" || std::find(kReserved.begin(), kReserved.end(), s) != kReserved.end();
}

// ---------------------------------------------------------------- lexer

enum class Tok { Ident, Number, Symbol, Newline, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double value = 0.0;
  bool is_int = false;
  std::size_t line = 1;
  std::size_t col = 1;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::Newline: return "end of line";
    case Tok::End: return "end of input";
    default: return "'" + t.text + "'";
  }
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto push = [&](Tok k, std::string text, std::size_t l, std::size_t c) {
    Token t;
    t.kind = k;
    t.text = std::move(text);
    t.line = l;
    t.col = c;
    out.push_back(std::move(t));
  };
  while (i < src.size()) {
    const char ch = src[i];
    if (ch == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (ch == '\n') {
      push(Tok::Newline, "\\n", line, col);
      ++i;
      ++line;
      col = 1;
      continue;
    }
    if (ch == ' ' || ch == '\t' || ch == '\r') {
      ++i;
      ++col;
      continue;
    }
    const std::size_t start = i, start_col = col;
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
      push(Tok::Ident, std::string(src.substr(start, i - start)), line, start_col);
      col += i - start;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) || (ch == '.' && i + 1 < src.size() &&
                                                         std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      bool is_int = true;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      if (i < src.size() && src[i] == '.') {
        is_int = false;
        ++i;
        while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      }
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
        if (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
          is_int = false;
          i = j;
          while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
        }
      }
      Token t;
      t.kind = Tok::Number;
      t.text = std::string(src.substr(start, i - start));
      t.value = std::strtod(t.text.c_str(), nullptr);
      t.is_int = is_int;
      t.line = line;
      t.col = start_col;
      out.push_back(std::move(t));
      col += i - start;
      continue;
    }
    std::string sym(1, ch);
    if (i + 1 < src.size()) {
      const std::string two{ch, src[i + 1]};
      if (two == "==" || two == "!=" || two == "<=" || two == ">=") sym = two;
    }
    if (sym.size() == 1 && std::string_view("()+-*/%^,:=<>").find(ch) == std::string_view::npos) {
      throw SyntaxError("unexpected character '" + sym + "'", line, start_col);
    }
    push(Tok::Symbol, sym, line, start_col);
    i += sym.size();
    col += sym.size();
  }
  push(Tok::End, "", line, col);
  return out;
}

// ---------------------------------------------------------------- parser

ExprPtr node(Op op, ExprPtr lhs = nullptr, ExprPtr rhs = nullptr) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  return e;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ModelSpec parse_model() {
    ModelSpec spec;
    skip_newlines();
    expect_word("model");
    spec.name = expect_ident("model name");
    end_statement();
    expect_word("dim");
    const Token& d = peek();
    if (d.kind != Tok::Number || !d.is_int) fail(d, "expected integer dimension", {"INT"});
    if (d.value < 1) fail(d, "dimension must be >= 1", {"INT >= 1"});
    spec.dimension = static_cast<std::int64_t>(d.value);
    dimension_ = spec.dimension;
    advance();
    end_statement();

    while (is_word("param")) {
      advance();
      const Token& name_tok = peek();
      std::string name = expect_ident("parameter name");
      check_name_free(name_tok, name);
      if (param_index(name) >= 0) fail(name_tok, "duplicate parameter '" + name + "'", {});
      expect_symbol("=");
      double sign = 1.0;
      if (is_symbol("-")) {
        sign = -1.0;
        advance();
      }
      const Token& v = peek();
      if (v.kind != Tok::Number) fail(v, "expected number", {"NUMBER"});
      params_.emplace_back(name, sign * v.value);
      advance();
      end_statement();
    }
    while (is_word("trans")) {
      spec.families.push_back(parse_family());
      end_statement();
    }
    if (peek().kind != Tok::End) {
      fail(peek(), "unexpected " + describe(peek()), spec.families.empty() && params_.empty()
                                                          ? std::vector<std::string>{"'param'", "'trans'", "end of input"}
                                                          : std::vector<std::string>{"'trans'", "end of input"});
    }
    spec.params = params_;
    return spec;
  }

  ExprPtr parse_standalone(const ExprContext& ctx) {
    dimension_ = ctx.dimension;
    params_ = ctx.params;
    allow_level_ = ctx.allow_level;
    skip_newlines();
    auto e = parse_expr();
    skip_newlines();
    if (peek().kind != Tok::End) fail(peek(), "unexpected " + describe(peek()), {"operator", "end of input"});
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  void advance() {
    if (toks_[pos_].kind != Tok::End) ++pos_;
  }
  bool is_word(std::string_view w) const { return peek().kind == Tok::Ident && peek().text == w; }
  bool is_symbol(std::string_view s) const { return peek().kind == Tok::Symbol && peek().text == s; }

  [[noreturn]] void fail(const Token& t, const std::string& msg, std::vector<std::string> expected) const {
    std::ostringstream os;
    os << "line " << t.line << ", column " << t.col << ": " << msg;
    if (!expected.empty()) {
      os << " (expected ";
      for (std::size_t k = 0; k < expected.size(); ++k) os << (k ? ", " : "") << expected[k];
      os << ")";
    }
    throw SyntaxError(os.str(), t.line, t.col, std::move(expected));
  }

  void skip_newlines() {
    while (peek().kind == Tok::Newline) advance();
  }
  void end_statement() {
    if (peek().kind == Tok::End) return;
    if (peek().kind != Tok::Newline) fail(peek(), "unexpected " + describe(peek()), {"end of line"});
    skip_newlines();
  }
  void expect_word(std::string_view w) {
    if (!is_word(w)) fail(peek(), "expected '" + std::string(w) + "', found " + describe(peek()), {"'" + std::string(w) + "'"});
    advance();
  }
  void expect_symbol(std::string_view s) {
    if (!is_symbol(s)) fail(peek(), "expected '" + std::string(s) + "', found " + describe(peek()), {"'" + std::string(s) + "'"});
    advance();
  }
  std::string expect_ident(const std::string& what) {
    const Token& t = peek();
    if (t.kind != Tok::Ident || is_reserved(t.text)) fail(t, "expected " + what + ", found " + describe(t), {"IDENT"});
    advance();
    return t.text;
  }
  void check_name_free(const Token& t, const std::string& name) {
    if (is_reserved(name)) fail(t, "'" + name + "' is a reserved word", {});
  }
  int param_index(const std::string& name) const {
    for (std::size_t k = 0; k < params_.size(); ++k)
      if (params_[k].first == name) return static_cast<int>(k);
    return -1;
  }
  int site_slot(const std::string& name) const {
    for (std::size_t k = 0; k < site_vars_.size(); ++k)
      if (site_vars_[k] == name) return static_cast<int>(k);
    return -1;
  }

  TransitionFamily parse_family() {
    TransitionFamily fam;
    fam.line = peek().line;
    expect_word("trans");
    site_vars_.clear();
    if (is_word("for")) {
      advance();
      while (true) {
        const Token& vt = peek();
        std::string v = expect_ident("site variable");
        if (param_index(v) >= 0) fail(vt, "site variable '" + v + "' shadows a parameter", {});
        if (site_slot(v) >= 0) fail(vt, "duplicate site variable '" + v + "'", {});
        expect_word("in");
        expect_word("sites");
        site_vars_.push_back(v);
        if (!is_symbol(",")) break;
        if (site_vars_.size() == 2) fail(peek(), "at most two site variables per family", {"'where'", "':'"});
        advance();
      }
    }
    fam.site_vars = site_vars_;
    if (is_word("where")) {
      advance();
      fam.guard = parse_bool();
    }
    if (!is_symbol(":")) {
      std::vector<std::string> exp{"':'"};
      if (!fam.guard) exp.insert(exp.begin(), "'where'");
      if (fam.site_vars.empty()) exp.insert(exp.begin(), "'for'");
      fail(peek(), "expected ':' in transition family, found " + describe(peek()), exp);
    }
    advance();
    if (!is_word("delta")) fail(peek(), "missing delta clause, found " + describe(peek()), {"'delta'"});
    advance();
    while (is_symbol("+") || is_symbol("-")) {
      DeltaTerm term;
      term.sign = peek().text == "+" ? +1 : -1;
      advance();
      expect_word("e");
      expect_symbol("(");
      term.site = parse_site();
      expect_symbol(")");
      fam.delta.push_back(term);
    }
    if (fam.delta.empty()) fail(peek(), "delta with no terms", {"'+'", "'-'"});
    if (!is_word("rate")) fail(peek(), "expected 'rate' after delta terms, found " + describe(peek()), {"'+'", "'-'", "'rate'"});
    advance();
    fam.rate = parse_expr();
    site_vars_.clear();
    return fam;
  }

  SiteRef parse_site() {
    const Token& t = peek();
    SiteRef s;
    if (t.kind == Tok::Number && t.is_int) {
      if (t.value >= static_cast<double>(dimension_))
        fail(t, "site index " + t.text + " out of range for dim " + std::to_string(dimension_), {});
      s.index = static_cast<std::int64_t>(t.value);
      advance();
      return s;
    }
    if (t.kind == Tok::Ident && site_slot(t.text) >= 0) {
      s.var_slot = site_slot(t.text);
      s.var_name = t.text;
      advance();
      return s;
    }
    if (t.kind == Tok::Ident && !is_reserved(t.text)) fail(t, "unknown identifier '" + t.text + "' (not a site variable)", {"site variable", "INT"});
    fail(t, "expected site variable or integer, found " + describe(t), {"site variable", "INT"});
  }

  ExprPtr parse_bool() {
    auto lhs = parse_and();
    while (is_word("or")) {
      advance();
      lhs = node(Op::Or, lhs, parse_and());
    }
    return lhs;
  }
  ExprPtr parse_and() {
    auto lhs = parse_cmp();
    while (is_word("and")) {
      advance();
      lhs = node(Op::And, lhs, parse_cmp());
    }
    return lhs;
  }
  ExprPtr parse_cmp() {
    auto lhs = parse_expr();
    static const std::array<std::pair<std::string_view, Op>, 6> ops = {{
        {"==", Op::Eq}, {"!=", Op::Ne}, {"<", Op::Lt}, {"<=", Op::Le}, {">", Op::Gt}, {">=", Op::Ge}}};
    for (auto [s, op] : ops) {
      if (is_symbol(s)) {
        advance();
        return node(op, lhs, parse_expr());
      }
    }
    fail(peek(), "expected comparison operator, found " + describe(peek()), {"'=='", "'!='", "'<'", "'<='", "'>'", "'>='"});
  }

  ExprPtr parse_expr() {
    auto lhs = parse_term();
    while (is_symbol("+") || is_symbol("-")) {
      const Op op = peek().text == "+" ? Op::Add : Op::Sub;
      advance();
      lhs = node(op, lhs, parse_term());
    }
    return lhs;
  }
  ExprPtr parse_term() {
    auto lhs = parse_unary();
    while (is_symbol("*") || is_symbol("/") || is_symbol("%")) {
      const Op op = peek().text == "*" ? Op::Mul : peek().text == "/" ? Op::Div : Op::Mod;
      advance();
      lhs = node(op, lhs, parse_unary());
    }
    return lhs;
  }
  ExprPtr parse_unary() {
    if (is_symbol("-")) {
      advance();
      return node(Op::Neg, parse_unary());
    }
    if (is_symbol("+")) {
      advance();
      return parse_unary();
    }
    return parse_power();
  }
  ExprPtr parse_power() {
    auto base = parse_primary();
    if (is_symbol("^")) {
      advance();
      return node(Op::Pow, base, parse_unary());
    }
    return base;
  }
  ExprPtr parse_primary() {
    const Token t = peek();
    if (t.kind == Tok::Number) {
      advance();
      auto e = node(Op::Number);
      std::const_pointer_cast<Expr>(e)->number = t.value;
      return e;
    }
    if (t.kind == Tok::Symbol && t.text == "(") {
      advance();
      auto e = parse_expr();
      expect_symbol(")");
      return e;
    }
    if (t.kind == Tok::Ident) {
      if (t.text == "x") {
        advance();
        expect_symbol("(");
        auto e = std::make_shared<Expr>();
        e->op = Op::Coord;
        e->site = parse_site();
        expect_symbol(")");
        return e;
      }
      if (t.text == "prime") {
        advance();
        expect_symbol("(");
        auto arg = parse_expr();
        expect_symbol(")");
        return node(Op::Prime, arg);
      }
      if (t.text == "dim") {
        advance();
        return node(Op::Dim);
      }
      if (t.text == "uniform") {
        advance();
        return node(Op::Uniform);
      }
      if (t.text == "level") {
        if (!allow_level_) fail(t, "'level' is only available in certificate expressions", {});
        advance();
        return node(Op::Level);
      }
      if (!is_reserved(t.text)) {
        if (int s = site_slot(t.text); s >= 0) {
          advance();
          auto e = std::make_shared<Expr>();
          e->op = Op::SiteVar;
          e->name = t.text;
          e->slot = s;
          return e;
        }
        if (int p = param_index(t.text); p >= 0) {
          advance();
          auto e = std::make_shared<Expr>();
          e->op = Op::Param;
          e->name = t.text;
          e->slot = p;
          return e;
        }
        fail(t, "unknown identifier '" + t.text + "'", {"parameter", "site variable"});
      }
    }
    fail(t, "expected expression, found " + describe(t),
         {"NUMBER", "IDENT", "'x'", "'dim'", "'uniform'", "'prime'", "'('", "'-'"});
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::int64_t dimension_ = 1;
  std::vector<std::pair<std::string, double>> params_;
  std::vector<std::string> site_vars_;
  bool allow_level_ = false;
};

// ---------------------------------------------------------------- printing

int precedence(Op op) {
  switch (op) {
    case Op::Or: return 1;
    case Op::And: return 2;
    case Op::Eq: case Op::Ne: case Op::Lt: case Op::Le: case Op::Gt: case Op::Ge: return 3;
    case Op::Add: case Op::Sub: return 4;
    case Op::Mul: case Op::Div: case Op::Mod: return 5;
    case Op::Neg: return 6;
    case Op::Pow: return 7;
    default: return 8;
  }
}

std::string_view symbol(Op op) {
  switch (op) {
    case Op::Add: return " + ";
    case Op::Sub: return " - ";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Mod: return " % ";
    case Op::Pow: return "^";
    case Op::Eq: return " == ";
    case Op::Ne: return " != ";
    case Op::Lt: return " < ";
    case Op::Le: return " <= ";
    case Op::Gt: return " > ";
    case Op::Ge: return " >= ";
    case Op::And: return " and ";
    case Op::Or: return " or ";
    default: return "?";
  }
}

std::string format_number(double v) {
  if (std::floor(v) == v && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f", v);
    return buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string site_str(const SiteRef& s) {
  return s.var_slot >= 0 ? s.var_name : std::to_string(s.index);
}

void print(const Expr& e, std::ostream& os) {
  auto child = [&](const ExprPtr& c, bool paren) {
    if (paren) os << '(';
    print(*c, os);
    if (paren) os << ')';
  };
  switch (e.op) {
    case Op::Number: os << format_number(e.number); return;
    case Op::Param:
    case Op::SiteVar: os << e.name; return;
    case Op::Coord: os << "x(" << site_str(e.site) << ')'; return;
    case Op::Dim: os << "dim"; return;
    case Op::Uniform: os << "uniform"; return;
    case Op::Level: os << "level"; return;
    case Op::Prime: os << "prime("; print(*e.lhs, os); os << ')'; return;
    case Op::Neg:
      os << '-';
      child(e.lhs, precedence(e.lhs->op) < precedence(Op::Pow));
      return;
    case Op::Pow:
      child(e.lhs, precedence(e.lhs->op) <= precedence(Op::Pow));
      os << '^';
      child(e.rhs, precedence(e.rhs->op) < precedence(Op::Neg));
      return;
    default: {
      const int p = precedence(e.op);
      // comparisons are non-associative; arithmetic and boolean ops left-associative
      const bool cmp = p == 3;
      child(e.lhs, cmp ? precedence(e.lhs->op) <= p : precedence(e.lhs->op) < p);
      os << symbol(e.op);
      child(e.rhs, precedence(e.rhs->op) <= p);
      return;
    }
  }
}

// ---------------------------------------------------------------- evaluation

bool is_integer(double v) { return std::isfinite(v) && std::floor(v) == v; }

}  // namespace

bool operator==(const Expr& a, const Expr& b) {
  if (a.op != b.op) return false;
  switch (a.op) {
    case Op::Number: return a.number == b.number;
    case Op::Param:
    case Op::SiteVar: return a.name == b.name && a.slot == b.slot;
    case Op::Coord: return a.site == b.site;
    default: break;
  }
  return structurally_equal(a.lhs, b.lhs) && structurally_equal(a.rhs, b.rhs);
}

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return *a == *b;
}

bool structurally_equal(const ModelSpec& a, const ModelSpec& b) {
  if (a.name != b.name || a.dimension != b.dimension || a.params != b.params ||
      a.families.size() != b.families.size())
    return false;
  for (std::size_t k = 0; k < a.families.size(); ++k) {
    const auto& fa = a.families[k];
    const auto& fb = b.families[k];
    if (fa.site_vars != fb.site_vars || fa.delta != fb.delta ||
        !structurally_equal(fa.guard, fb.guard) || !structurally_equal(fa.rate, fb.rate))
      return false;
  }
  return true;
}

ModelSpec parse_model(std::string_view text) { return Parser(lex(text)).parse_model(); }

ModelSpec parse_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open model file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_model(ss.str());
  } catch (const SyntaxError& e) {
    throw SyntaxError(path + ": " + e.what(), e.line(), e.column(), e.expected());
  }
}

ExprPtr parse_expression(std::string_view text, const ExprContext& ctx) {
  return Parser(lex(text)).parse_standalone(ctx);
}

std::string to_string(const Expr& e) {
  std::ostringstream os;
  print(e, os);
  return os.str();
}

std::string pretty_print(const ModelSpec& spec) {
  std::ostringstream os;
  os << "model " << spec.name << "\n";
  os << "dim " << spec.dimension << "\n";
  for (const auto& [name, value] : spec.params) {
    os << "param " << name << " = ";
    if (value < 0) os << '-';
    os << format_number(std::abs(value)) << "\n";
  }
  for (const auto& fam : spec.families) {
    os << "trans";
    for (std::size_t k = 0; k < fam.site_vars.size(); ++k)
      os << (k ? ", " : " for ") << fam.site_vars[k] << " in sites";
    if (fam.guard) os << " where " << to_string(*fam.guard);
    os << ": delta";
    for (const auto& t : fam.delta) os << ' ' << (t.sign > 0 ? '+' : '-') << "e(" << site_str(t.site) << ')';
    os << " rate " << to_string(*fam.rate) << "\n";
  }
  return os.str();
}

double evaluate(const Expr& e, const EvalEnv& env) {
  auto coord = [&](const SiteRef& s) -> double {
    const std::int64_t u = s.var_slot >= 0 ? env.site_values[s.var_slot] : s.index;
    if (u < 0 || u >= static_cast<std::int64_t>(env.state->dim()))
      throw ModelError("site index " + std::to_string(u) + " out of range");
    return static_cast<double>((*env.state)[static_cast<std::size_t>(u)]);
  };
  switch (e.op) {
    case Op::Number: return e.number;
    case Op::Param: return env.params[static_cast<std::size_t>(e.slot)];
    case Op::SiteVar: return static_cast<double>(env.site_values[e.slot]);
    case Op::Coord: return coord(e.site);
    case Op::Dim: return static_cast<double>(env.dimension);
    case Op::Uniform:
      if (env.dimension <= 1) throw ModelError("division by zero: uniform = 1/(dim-1) with dim = 1");
      return 1.0 / static_cast<double>(env.dimension - 1);
    case Op::Level: return static_cast<double>(env.state->level());
    case Op::Prime: {
      const double n = evaluate(*e.lhs, env);
      if (!is_integer(n)) throw ModelError("prime() needs an integer argument, got " + format_number(n));
      return static_cast<double>(nth_prime(static_cast<std::int64_t>(n)));
    }
    case Op::Neg: return -evaluate(*e.lhs, env);
    default: break;
  }
  const double a = evaluate(*e.lhs, env);
  if (e.op == Op::And) return (a != 0.0 && evaluate(*e.rhs, env) != 0.0) ? 1.0 : 0.0;
  if (e.op == Op::Or) return (a != 0.0 || evaluate(*e.rhs, env) != 0.0) ? 1.0 : 0.0;
  const double b = evaluate(*e.rhs, env);
  double r = 0.0;
  switch (e.op) {
    case Op::Add: r = a + b; break;
    case Op::Sub: r = a - b; break;
    case Op::Mul: r = a * b; break;
    case Op::Div:
      if (b == 0.0) throw ModelError("division by zero in '" + to_string(e) + "'");
      r = a / b;
      break;
    case Op::Mod:
      if (b == 0.0) throw ModelError("modulo by zero in '" + to_string(e) + "'");
      r = std::fmod(a, b);
      break;
    case Op::Pow:
      if (!is_integer(b)) throw ModelError("non-integer exponent " + format_number(b) + " in '" + to_string(e) + "'");
      if (a == 0.0 && b == 0.0) throw ModelError("0^0 in '" + to_string(e) + "'");
      if (a == 0.0 && b < 0.0) throw ModelError("division by zero (0 to a negative power) in '" + to_string(e) + "'");
      r = std::pow(a, b);
      break;
    case Op::Eq: return a == b;
    case Op::Ne: return a != b;
    case Op::Lt: return a < b;
    case Op::Le: return a <= b;
    case Op::Gt: return a > b;
    case Op::Ge: return a >= b;
    default: throw ModelError("internal: unknown operator");
  }
  if (std::isinf(r)) throw RateOverflowError("value overflows in '" + to_string(e) + "'");
  if (!std::isfinite(r)) throw ModelError("non-finite value in '" + to_string(e) + "'");
  return r;
}

GeneratorModel instantiate(const ModelSpec& spec_in) {
  auto spec = std::make_shared<const ModelSpec>(spec_in);
  auto values = std::make_shared<std::vector<double>>();
  ParamRecord record;
  for (const auto& [name, v] : spec->params) {
    values->push_back(v);
    record.emplace_back(name, v);
  }
  const auto d = spec->dimension;

  auto raw = [spec, values, d](const StateVec& from, std::vector<Transition>& out) {
    EvalEnv env;
    env.state = &from;
    env.params = *values;
    env.dimension = d;
    std::vector<std::int64_t> delta(static_cast<std::size_t>(d));
    for (std::size_t f = 0; f < spec->families.size(); ++f) {
      const auto& fam = spec->families[f];
      const std::size_t nvars = fam.site_vars.size();
      const std::int64_t combos = nvars == 0 ? 1 : nvars == 1 ? d : d * d;
      for (std::int64_t c = 0; c < combos; ++c) {
        env.site_values[0] = nvars >= 1 ? c % d : 0;
        env.site_values[1] = nvars == 2 ? c / d : 0;
        if (fam.guard && evaluate(*fam.guard, env) == 0.0) continue;
        std::fill(delta.begin(), delta.end(), 0);
        for (const auto& term : fam.delta) {
          const auto u = term.site.var_slot >= 0 ? env.site_values[term.site.var_slot] : term.site.index;
          delta[static_cast<std::size_t>(u)] += term.sign;
        }
        auto describe_family = [&] {
          std::ostringstream os;
          os << "family #" << (f + 1) << " (line " << fam.line << ")";
          for (std::size_t v = 0; v < nvars; ++v)
            os << (v ? ", " : " with ") << fam.site_vars[v] << " = " << env.site_values[v];
          return os.str();
        };
        if (std::all_of(delta.begin(), delta.end(), [](auto x) { return x == 0; }))
          throw ModelError("model '" + spec->name + "': " + describe_family() + " has a zero delta");
        auto target = from.shifted(delta);
        if (!target) continue;
        double rate = 0.0;
        try {
          rate = evaluate(*fam.rate, env);
        } catch (const RateOverflowError& e) {
          throw RateOverflowError("model '" + spec->name + "': " + describe_family() + " at state " +
                                  from.str() + ": " + e.what());
        } catch (const ModelError& e) {
          throw ModelError("model '" + spec->name + "': " + describe_family() + " at state " +
                           from.str() + ": " + e.what());
        }
        if (rate < 0.0) {
          std::ostringstream os;
          os << "model '" << spec->name << "': negative rate " << format_number(rate) << " from "
             << describe_family() << " at state " << from.str();
          throw ModelError(os.str());
        }
        if (rate == 0.0) continue;
        out.push_back({std::move(*target), rate});
      }
    }
  };
  return GeneratorModel(spec->name, static_cast<std::size_t>(d), std::move(raw), std::move(record));
}

StateFunction make_state_function(ExprPtr expr, const ExprContext& ctx) {
  auto values = std::make_shared<std::vector<double>>();
  for (const auto& p : ctx.params) values->push_back(p.second);
  const auto d = ctx.dimension;
  return [expr = std::move(expr), values, d](const StateVec& s) {
    EvalEnv env;
    env.state = &s;
    env.params = *values;
    env.dimension = d;
    return evaluate(*expr, env);
  };
}

}  // namespace qmc::dsl
