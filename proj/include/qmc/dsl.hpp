#pragma once

// Rate-expression language for Q-matrices on Z_+^d (.qm files).
//
//   model schlogl
//   dim 2
//   param beta0 = 1
//   trans for u in sites: delta +e(u) rate beta0 + beta2*x(u)*(x(u)-1)
//   trans for u in sites, v in sites where u != v: delta -e(u) +e(v) rate x(u)*uniform
//
// '#' starts a comment. Expressions support + - * / % ^ (integer exponents),
// parentheses, x(site), dim, uniform = 1/(dim-1) and prime(n), the n-th prime.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qmc/generator.hpp"
#include "qmc/state.hpp"

namespace qmc::dsl {

/// Site argument of x(.) and e(.): a site variable slot or a literal index.
struct SiteRef {
  int var_slot = -1;  // 0 or 1 when a site variable, -1 for a literal
  std::string var_name;
  std::int64_t index = 0;

  friend bool operator==(const SiteRef& a, const SiteRef& b) {
    return a.var_slot == b.var_slot && a.var_name == b.var_name && a.index == b.index;
  }
};

enum class Op {
  Number, Param, SiteVar, Coord, Dim, Uniform, Level, Prime,
  Neg, Add, Sub, Mul, Div, Mod, Pow,
  Eq, Ne, Lt, Le, Gt, Ge, And, Or,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  Op op = Op::Number;
  double number = 0.0;
  std::string name;        // Param / SiteVar
  int slot = -1;           // param index or site-variable slot
  SiteRef site;            // Coord
  ExprPtr lhs, rhs;        // unary operand in lhs

  friend bool operator==(const Expr& a, const Expr& b);
};

struct DeltaTerm {
  int sign = +1;
  SiteRef site;
  friend bool operator==(const DeltaTerm&, const DeltaTerm&) = default;
};

struct TransitionFamily {
  std::vector<std::string> site_vars;  // 0..2 names
  ExprPtr guard;                       // may be null
  std::vector<DeltaTerm> delta;
  ExprPtr rate;
  std::size_t line = 0;                // source line, not part of equality
};

struct ModelSpec {
  std::string name;
  std::int64_t dimension = 1;
  std::vector<std::pair<std::string, double>> params;
  std::vector<TransitionFamily> families;
};

bool structurally_equal(const ModelSpec& a, const ModelSpec& b);
bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

/// Throws SyntaxError (line/column/expected tokens) for every malformed input,
/// including duplicate parameters, unknown identifiers and empty deltas.
ModelSpec parse_model(std::string_view text);
ModelSpec parse_model_file(const std::string& path);

std::string pretty_print(const ModelSpec& spec);
std::string to_string(const Expr& e);

/// Name resolution context for standalone expressions (certificate phi).
struct ExprContext {
  std::int64_t dimension = 1;
  std::vector<std::pair<std::string, double>> params;
  bool allow_level = true;
};

ExprPtr parse_expression(std::string_view text, const ExprContext& ctx);

struct EvalEnv {
  const StateVec* state = nullptr;
  std::span<const double> params;
  std::int64_t site_values[2] = {0, 0};
  std::int64_t dimension = 1;
};

/// Evaluates an arithmetic or boolean expression (booleans yield 0/1).
/// Division by zero, 0^0, non-integer exponents and non-finite results raise
/// ModelError.
double evaluate(const Expr& e, const EvalEnv& env);

GeneratorModel instantiate(const ModelSpec& spec);

/// phi(i) from an expression parsed with parse_expression.
StateFunction make_state_function(ExprPtr expr, const ExprContext& ctx);

}  // namespace qmc::dsl
