#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hadamard {

// Expression language for candidate functions of x (1D) or x,y (2D).
//
// Grammar:
//   expr   = term { ("+"|"-") term } ;
//   term   = factor { ("*"|"/") factor } ;
//   factor = ["-"] power ;
//   power  = atom [ "^" factor ] ;            ("^" is right-associative)
//   atom   = NUMBER | "x" | "y" | "(" expr ")" | IDENT "(" expr {"," expr} ")" ;
//   IDENT  in {sin, cos, exp, log, sqrt, abs, min, max}
//
// min/max take exactly two arguments, every other call exactly one.

enum class Var : std::uint8_t { X, Y };
enum class BinOp : std::uint8_t { Add, Sub, Mul, Div, Pow };
enum class Func : std::uint8_t { Sin, Cos, Exp, Log, Sqrt, Abs, Min, Max };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct NumberNode {
  double value;  // always finite and >= 0; negation is an explicit Neg node
};
struct VarNode {
  Var var;
};
struct NegNode {
  ExprPtr operand;
};
struct BinaryNode {
  BinOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct CallNode {
  Func fn;
  std::vector<ExprPtr> args;
};

struct ExprNode {
  std::variant<NumberNode, VarNode, NegNode, BinaryNode, CallNode> v;
};

// Flat stack-machine form; built once per Expr so evaluation does not
// walk the tree.
struct Program {
  enum class Op : std::uint8_t {
    Const, LoadX, LoadY, Neg, Add, Sub, Mul, Div, Pow,
    Sin, Cos, Exp, Log, Sqrt, Abs, Min, Max,
  };
  struct Instr {
    Op op;
    double imm = 0.0;
  };
  std::vector<Instr> code;
  int max_stack = 0;
  bool uses_x = false;
  bool uses_y = false;
};

/// Immutable parsed expression. Safe to share and evaluate concurrently.
class Expr {
 public:
  Expr() = default;
  explicit Expr(ExprPtr root);

  bool valid() const { return root_ != nullptr; }
  const ExprNode& root() const { return *root_; }
  ExprPtr root_ptr() const { return root_; }
  const Program& program() const { return *prog_; }

 private:
  ExprPtr root_;
  std::shared_ptr<const Program> prog_;
};

struct EvalPoint {
  double x = 0.0;
  std::optional<double> y;
};

struct EvalError {
  enum class Kind {
    DivisionByZero,
    LogNonPositive,
    SqrtNegative,
    PowDomain,     // negative base with non-integer exponent, or 0^negative
    Overflow,      // non-finite intermediate
    MissingVariable,
  };
  Kind kind = Kind::Overflow;
  EvalPoint point;
};

std::string_view to_string(EvalError::Kind k);

/// Thrown by eval() on a domain fault; NaN/inf never escape into verdicts.
class EvalException : public std::runtime_error {
 public:
  explicit EvalException(EvalError err);
  const EvalError& error() const { return err_; }

 private:
  EvalError err_;
};

struct ParseError {
  enum class Kind { Syntax, UnknownFunction, Arity };
  Kind kind = Kind::Syntax;
  std::size_t position = 0;  // byte offset into the input
  std::string expected;      // what the parser was looking for
  std::string name;          // offending identifier, for UnknownFunction
  std::string message() const;
};

struct ParseResult {
  std::optional<Expr> expr;
  std::optional<ParseError> error;
  bool ok() const { return expr.has_value(); }
};

/// Total: any input yields either an Expr or a positioned ParseError.
ParseResult parse(std::string_view text);

/// Evaluates e at p. Throws EvalException on domain faults.
double eval(const Expr& e, const EvalPoint& p);

struct VarSet {
  bool x = false;
  bool y = false;
};

VarSet free_vars(const Expr& e);

/// Minimal-parenthesis rendering; output reparses to a structurally
/// equal tree.
std::string to_string(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

// AST construction helpers (used by the generator; numbers are
// normalized so negative constants become Neg(Number)).
ExprPtr make_number(double v);
ExprPtr make_var(Var v);
ExprPtr make_neg(ExprPtr e);
ExprPtr make_binary(BinOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr make_call(Func fn, std::vector<ExprPtr> args);

}  // namespace hadamard
