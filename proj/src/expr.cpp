#include "hadamard/expr.hpp"

#include <array>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>

namespace hadamard {

namespace {

constexpr int kMaxParseDepth = 600;  // ~5 frames per paren level
constexpr int kEvalStackMax = 256;

struct FuncInfo {
  std::string_view name;
  Func fn;
  int arity;
};

constexpr std::array<FuncInfo, 8> kFuncs = {{
    {"sin", Func::Sin, 1},
    {"cos", Func::Cos, 1},
    {"exp", Func::Exp, 1},
    {"log", Func::Log, 1},
    {"sqrt", Func::Sqrt, 1},
    {"abs", Func::Abs, 1},
    {"min", Func::Min, 2},
    {"max", Func::Max, 2},
}};

const FuncInfo* lookup_func(std::string_view name) {
  for (const auto& f : kFuncs) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Lexer

enum class Tok : std::uint8_t {
  Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End,
};

struct Token {
  Tok kind = Tok::End;
  std::size_t pos = 0;
  std::size_t len = 0;
  double number = 0.0;
  std::string_view text{};
};

struct LexOutput {
  std::vector<Token> tokens;
  std::optional<ParseError> error;
};

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

LexOutput lex(std::string_view s) {
  LexOutput out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++i;
      continue;
    }
    std::size_t start = i;
    switch (c) {
      case '+': out.tokens.push_back({Tok::Plus, start, 1}); ++i; continue;
      case '-': out.tokens.push_back({Tok::Minus, start, 1}); ++i; continue;
      case '*': out.tokens.push_back({Tok::Star, start, 1}); ++i; continue;
      case '/': out.tokens.push_back({Tok::Slash, start, 1}); ++i; continue;
      case '^': out.tokens.push_back({Tok::Caret, start, 1}); ++i; continue;
      case '(': out.tokens.push_back({Tok::LParen, start, 1}); ++i; continue;
      case ')': out.tokens.push_back({Tok::RParen, start, 1}); ++i; continue;
      case ',': out.tokens.push_back({Tok::Comma, start, 1}); ++i; continue;
      default: break;
    }
    if (is_digit(c)) {
      while (i < s.size() && is_digit(s[i])) ++i;
      if (i < s.size() && s[i] == '.' && i + 1 < s.size() && is_digit(s[i + 1])) {
        ++i;
        while (i < s.size() && is_digit(s[i])) ++i;
      }
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t save = i;
        ++i;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
        if (i < s.size() && is_digit(s[i])) {
          while (i < s.size() && is_digit(s[i])) ++i;
        } else {
          i = save;  // "2e" is the number 2 followed by an identifier
        }
      }
      double value = 0.0;
      auto res = std::from_chars(s.data() + start, s.data() + i, value);
      if (res.ec != std::errc() || !std::isfinite(value)) {
        out.error = ParseError{ParseError::Kind::Syntax, start,
                               "a representable number", {}};
        return out;
      }
      Token t{Tok::Number, start, i - start};
      t.number = value;
      t.text = s.substr(start, i - start);
      out.tokens.push_back(t);
      continue;
    }
    if (is_alpha(c)) {
      while (i < s.size() && (is_alpha(s[i]) || is_digit(s[i]))) ++i;
      Token t{Tok::Ident, start, i - start};
      t.text = s.substr(start, i - start);
      out.tokens.push_back(t);
      continue;
    }
    out.error = ParseError{ParseError::Kind::Syntax, start,
                           "a number, variable, function or operator", {}};
    return out;
  }
  out.tokens.push_back({Tok::End, s.size(), 0});
  return out;
}

// ---------------------------------------------------------------------------
// Parser (recursive descent, depth-capped so parsing stays total)

struct Parser {
  const std::vector<Token>& toks;
  std::size_t pos = 0;
  std::optional<ParseError> err;

  const Token& peek() const { return toks[pos]; }
  const Token& advance() { return toks[pos++]; }
  bool at(Tok k) const { return toks[pos].kind == k; }

  ExprPtr fail(ParseError e) {
    if (!err) err = std::move(e);
    return nullptr;
  }
  ExprPtr syntax(std::size_t position, std::string expected) {
    return fail({ParseError::Kind::Syntax, position, std::move(expected), {}});
  }

  ExprPtr parse_expr(int depth) {
    if (depth > kMaxParseDepth)
      return syntax(peek().pos, "a shallower expression (nesting too deep)");
    ExprPtr lhs = parse_term(depth + 1);
    if (!lhs) return nullptr;
    while (at(Tok::Plus) || at(Tok::Minus)) {
      BinOp op = at(Tok::Plus) ? BinOp::Add : BinOp::Sub;
      advance();
      ExprPtr rhs = parse_term(depth + 1);
      if (!rhs) return nullptr;
      lhs = make_binary(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  ExprPtr parse_term(int depth) {
    if (depth > kMaxParseDepth)
      return syntax(peek().pos, "a shallower expression (nesting too deep)");
    ExprPtr lhs = parse_factor(depth + 1);
    if (!lhs) return nullptr;
    while (at(Tok::Star) || at(Tok::Slash)) {
      BinOp op = at(Tok::Star) ? BinOp::Mul : BinOp::Div;
      advance();
      ExprPtr rhs = parse_factor(depth + 1);
      if (!rhs) return nullptr;
      lhs = make_binary(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  ExprPtr parse_factor(int depth) {
    if (depth > kMaxParseDepth)
      return syntax(peek().pos, "a shallower expression (nesting too deep)");
    if (at(Tok::Minus)) {
      advance();
      ExprPtr operand = parse_factor(depth + 1);  // allows --x
      if (!operand) return nullptr;
      return make_neg(std::move(operand));
    }
    return parse_power(depth + 1);
  }

  ExprPtr parse_power(int depth) {
    if (depth > kMaxParseDepth)
      return syntax(peek().pos, "a shallower expression (nesting too deep)");
    ExprPtr base = parse_atom(depth + 1);
    if (!base) return nullptr;
    if (at(Tok::Caret)) {
      advance();
      ExprPtr exponent = parse_factor(depth + 1);  // right-associative
      if (!exponent) return nullptr;
      return make_binary(BinOp::Pow, std::move(base), std::move(exponent));
    }
    return base;
  }

  ExprPtr parse_atom(int depth) {
    if (depth > kMaxParseDepth)
      return syntax(peek().pos, "a shallower expression (nesting too deep)");
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number:
        advance();
        return make_number(t.number);
      case Tok::LParen: {
        advance();
        ExprPtr inner = parse_expr(depth + 1);
        if (!inner) return nullptr;
        if (!at(Tok::RParen)) return syntax(peek().pos, "')'");
        advance();
        return inner;
      }
      case Tok::Ident: {
        if (t.text == "x") {
          advance();
          return make_var(Var::X);
        }
        if (t.text == "y") {
          advance();
          return make_var(Var::Y);
        }
        advance();
        if (!at(Tok::LParen)) {
          if (t.text.size() == 1)
            return syntax(t.pos, "a variable named x or y");
          return fail({ParseError::Kind::UnknownFunction, t.pos,
                       "a known function name", std::string(t.text)});
        }
        const FuncInfo* info = lookup_func(t.text);
        if (!info)
          return fail({ParseError::Kind::UnknownFunction, t.pos,
                       "one of sin, cos, exp, log, sqrt, abs, min, max",
                       std::string(t.text)});
        advance();  // '('
        std::vector<ExprPtr> args;
        ExprPtr first = parse_expr(depth + 1);
        if (!first) return nullptr;
        args.push_back(std::move(first));
        while (at(Tok::Comma)) {
          advance();
          ExprPtr next = parse_expr(depth + 1);
          if (!next) return nullptr;
          args.push_back(std::move(next));
        }
        if (!at(Tok::RParen)) return syntax(peek().pos, "')' or ','");
        advance();
        if (static_cast<int>(args.size()) != info->arity)
          return fail({ParseError::Kind::Arity, t.pos,
                       std::string(info->name) + " takes " +
                           std::to_string(info->arity) +
                           (info->arity == 1 ? " argument" : " arguments"),
                       std::string(t.text)});
        return make_call(info->fn, std::move(args));
      }
      default:
        return syntax(t.pos, "a number, variable, '(' or function call");
    }
  }
};

// ---------------------------------------------------------------------------
// Compilation to the flat program

void compile_node(const ExprNode& n, Program& prog, int& depth, int& max_depth) {
  auto push = [&](Program::Op op, double imm = 0.0) {
    prog.code.push_back({op, imm});
  };
  auto grew = [&](int delta) {
    depth += delta;
    if (depth > max_depth) max_depth = depth;
  };
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, NumberNode>) {
          push(Program::Op::Const, node.value);
          grew(1);
        } else if constexpr (std::is_same_v<T, VarNode>) {
          if (node.var == Var::X) {
            push(Program::Op::LoadX);
            prog.uses_x = true;
          } else {
            push(Program::Op::LoadY);
            prog.uses_y = true;
          }
          grew(1);
        } else if constexpr (std::is_same_v<T, NegNode>) {
          compile_node(*node.operand, prog, depth, max_depth);
          push(Program::Op::Neg);
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          compile_node(*node.lhs, prog, depth, max_depth);
          compile_node(*node.rhs, prog, depth, max_depth);
          switch (node.op) {
            case BinOp::Add: push(Program::Op::Add); break;
            case BinOp::Sub: push(Program::Op::Sub); break;
            case BinOp::Mul: push(Program::Op::Mul); break;
            case BinOp::Div: push(Program::Op::Div); break;
            case BinOp::Pow: push(Program::Op::Pow); break;
          }
          grew(-1);
        } else if constexpr (std::is_same_v<T, CallNode>) {
          for (const auto& a : node.args)
            compile_node(*a, prog, depth, max_depth);
          switch (node.fn) {
            case Func::Sin: push(Program::Op::Sin); break;
            case Func::Cos: push(Program::Op::Cos); break;
            case Func::Exp: push(Program::Op::Exp); break;
            case Func::Log: push(Program::Op::Log); break;
            case Func::Sqrt: push(Program::Op::Sqrt); break;
            case Func::Abs: push(Program::Op::Abs); break;
            case Func::Min: push(Program::Op::Min); grew(-1); break;
            case Func::Max: push(Program::Op::Max); grew(-1); break;
          }
        }
      },
      n.v);
}

std::shared_ptr<const Program> compile(const ExprNode& root) {
  auto prog = std::make_shared<Program>();
  int depth = 0;
  int max_depth = 0;
  compile_node(root, *prog, depth, max_depth);
  assert(depth == 1);
  prog->max_stack = max_depth;
  // The parse-depth cap keeps this well under the evaluation stack size.
  assert(max_depth <= kEvalStackMax);
  return prog;
}

[[noreturn]] void fault(EvalError::Kind kind, double x,
                        const std::optional<double>& y) {
  EvalPoint p;
  p.x = x;
  p.y = y;
  throw EvalException(EvalError{kind, p});
}

bool integral_exponent(double e) {
  return std::nearbyint(e) == e && std::abs(e) < 9.007199254740992e15;
}

}  // namespace

Expr::Expr(ExprPtr root) : root_(std::move(root)) {
  prog_ = compile(*root_);
}

ParseResult parse(std::string_view text) {
  ParseResult result;
  LexOutput lx = lex(text);
  if (lx.error) {
    result.error = std::move(lx.error);
    return result;
  }
  Parser p{lx.tokens, 0, std::nullopt};
  ExprPtr root = p.parse_expr(0);
  if (root && p.at(Tok::End)) {
    result.expr = Expr(std::move(root));
    return result;
  }
  if (!p.err) {
    // Trailing garbage after a complete expression.
    result.error = ParseError{ParseError::Kind::Syntax, p.peek().pos,
                              "end of input or an operator", {}};
  } else {
    result.error = std::move(p.err);
  }
  return result;
}

double eval(const Expr& e, const EvalPoint& p) {
  const Program& prog = e.program();
  if (prog.uses_y && !p.y.has_value())
    fault(EvalError::Kind::MissingVariable, p.x, p.y);
  double stack[kEvalStackMax];
  int sp = 0;
  const double x = p.x;
  const double y = p.y.value_or(0.0);
  for (const auto& in : prog.code) {
    switch (in.op) {
      case Program::Op::Const: stack[sp++] = in.imm; break;
      case Program::Op::LoadX: stack[sp++] = x; break;
      case Program::Op::LoadY: stack[sp++] = y; break;
      case Program::Op::Neg: stack[sp - 1] = -stack[sp - 1]; break;
      case Program::Op::Add: --sp; stack[sp - 1] += stack[sp]; break;
      case Program::Op::Sub: --sp; stack[sp - 1] -= stack[sp]; break;
      case Program::Op::Mul: --sp; stack[sp - 1] *= stack[sp]; break;
      case Program::Op::Div: {
        --sp;
        if (stack[sp] == 0.0) fault(EvalError::Kind::DivisionByZero, x, p.y);
        stack[sp - 1] /= stack[sp];
        break;
      }
      case Program::Op::Pow: {
        --sp;
        double base = stack[sp - 1], expo = stack[sp];
        if (base < 0.0 && !integral_exponent(expo))
          fault(EvalError::Kind::PowDomain, x, p.y);
        if (base == 0.0 && expo < 0.0)
          fault(EvalError::Kind::PowDomain, x, p.y);
        stack[sp - 1] = std::pow(base, expo);
        break;
      }
      case Program::Op::Sin: stack[sp - 1] = std::sin(stack[sp - 1]); break;
      case Program::Op::Cos: stack[sp - 1] = std::cos(stack[sp - 1]); break;
      case Program::Op::Exp: stack[sp - 1] = std::exp(stack[sp - 1]); break;
      case Program::Op::Log: {
        if (stack[sp - 1] <= 0.0) fault(EvalError::Kind::LogNonPositive, x, p.y);
        stack[sp - 1] = std::log(stack[sp - 1]);
        break;
      }
      case Program::Op::Sqrt: {
        if (stack[sp - 1] < 0.0) fault(EvalError::Kind::SqrtNegative, x, p.y);
        stack[sp - 1] = std::sqrt(stack[sp - 1]);
        break;
      }
      case Program::Op::Abs: stack[sp - 1] = std::abs(stack[sp - 1]); break;
      case Program::Op::Min: {
        --sp;
        stack[sp - 1] = stack[sp - 1] < stack[sp] ? stack[sp - 1] : stack[sp];
        break;
      }
      case Program::Op::Max: {
        --sp;
        stack[sp - 1] = stack[sp - 1] > stack[sp] ? stack[sp - 1] : stack[sp];
        break;
      }
    }
    if (!std::isfinite(stack[sp - 1])) fault(EvalError::Kind::Overflow, x, p.y);
  }
  return stack[0];
}

VarSet free_vars(const Expr& e) {
  const Program& prog = e.program();
  return VarSet{prog.uses_x, prog.uses_y};
}

namespace {

// Operator precedence used for printing: add/sub 1, mul/div 2, neg 3,
// pow 4, atoms 5.
int node_prec(const ExprNode& n) {
  return std::visit(
      [](const auto& node) -> int {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, BinaryNode>) {
          switch (node.op) {
            case BinOp::Add:
            case BinOp::Sub: return 1;
            case BinOp::Mul:
            case BinOp::Div: return 2;
            case BinOp::Pow: return 4;
          }
          return 1;
        } else if constexpr (std::is_same_v<T, NegNode>) {
          return 3;
        } else {
          return 5;
        }
      },
      n.v);
}

void format_number(double v, std::string& out) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

std::string_view func_name(Func fn) {
  for (const auto& f : kFuncs)
    if (f.fn == fn) return f.name;
  return "?";
}

void print_node(const ExprNode& n, std::string& out);

void print_child(const ExprNode& child, int min_prec, std::string& out) {
  if (node_prec(child) < min_prec) {
    out.push_back('(');
    print_node(child, out);
    out.push_back(')');
  } else {
    print_node(child, out);
  }
}

void print_node(const ExprNode& n, std::string& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, NumberNode>) {
          format_number(node.value, out);
        } else if constexpr (std::is_same_v<T, VarNode>) {
          out.push_back(node.var == Var::X ? 'x' : 'y');
        } else if constexpr (std::is_same_v<T, NegNode>) {
          out.push_back('-');
          print_child(*node.operand, 4, out);
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          switch (node.op) {
            case BinOp::Add:
              print_child(*node.lhs, 1, out);
              out.push_back('+');
              print_child(*node.rhs, 2, out);
              break;
            case BinOp::Sub:
              print_child(*node.lhs, 1, out);
              out.push_back('-');
              // parenthesize a leading unary minus: "a-(-b)", not "a--b"
              if (node_prec(*node.rhs) < 2 ||
                  std::holds_alternative<NegNode>(node.rhs->v)) {
                out.push_back('(');
                print_node(*node.rhs, out);
                out.push_back(')');
              } else {
                print_child(*node.rhs, 2, out);
              }
              break;
            case BinOp::Mul:
              print_child(*node.lhs, 2, out);
              out.push_back('*');
              print_child(*node.rhs, 3, out);
              break;
            case BinOp::Div:
              print_child(*node.lhs, 2, out);
              out.push_back('/');
              print_child(*node.rhs, 3, out);
              break;
            case BinOp::Pow:
              print_child(*node.lhs, 5, out);
              out.push_back('^');
              print_child(*node.rhs, 3, out);
              break;
          }
        } else if constexpr (std::is_same_v<T, CallNode>) {
          out.append(func_name(node.fn));
          out.push_back('(');
          for (std::size_t i = 0; i < node.args.size(); ++i) {
            if (i) out.push_back(',');
            print_node(*node.args[i], out);
          }
          out.push_back(')');
        }
      },
      n.v);
}

bool nodes_equal(const ExprNode& a, const ExprNode& b) {
  if (a.v.index() != b.v.index()) return false;
  if (const auto* na = std::get_if<NumberNode>(&a.v))
    return na->value == std::get<NumberNode>(b.v).value;
  if (const auto* va = std::get_if<VarNode>(&a.v))
    return va->var == std::get<VarNode>(b.v).var;
  if (const auto* ga = std::get_if<NegNode>(&a.v))
    return nodes_equal(*ga->operand, *std::get<NegNode>(b.v).operand);
  if (const auto* ba = std::get_if<BinaryNode>(&a.v)) {
    const auto& bb = std::get<BinaryNode>(b.v);
    return ba->op == bb.op && nodes_equal(*ba->lhs, *bb.lhs) &&
           nodes_equal(*ba->rhs, *bb.rhs);
  }
  const auto& ca = std::get<CallNode>(a.v);
  const auto& cb = std::get<CallNode>(b.v);
  if (ca.fn != cb.fn || ca.args.size() != cb.args.size()) return false;
  for (std::size_t i = 0; i < ca.args.size(); ++i)
    if (!nodes_equal(*ca.args[i], *cb.args[i])) return false;
  return true;
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print_node(e.root(), out);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  return nodes_equal(a.root(), b.root());
}

ExprPtr make_number(double v) {
  assert(std::isfinite(v));
  if (std::signbit(v))
    return make_neg(make_number(-v));
  auto n = std::make_shared<ExprNode>();
  n->v = NumberNode{v};
  return n;
}

ExprPtr make_var(Var v) {
  auto n = std::make_shared<ExprNode>();
  n->v = VarNode{v};
  return n;
}

ExprPtr make_neg(ExprPtr e) {
  auto n = std::make_shared<ExprNode>();
  n->v = NegNode{std::move(e)};
  return n;
}

ExprPtr make_binary(BinOp op, ExprPtr lhs, ExprPtr rhs) {
  auto n = std::make_shared<ExprNode>();
  n->v = BinaryNode{op, std::move(lhs), std::move(rhs)};
  return n;
}

ExprPtr make_call(Func fn, std::vector<ExprPtr> args) {
  assert(static_cast<int>(args.size()) == arity_of(fn));
  auto n = std::make_shared<ExprNode>();
  n->v = CallNode{fn, std::move(args)};
  return n;
}

std::string_view to_string(EvalError::Kind k) {
  switch (k) {
    case EvalError::Kind::DivisionByZero: return "division-by-zero";
    case EvalError::Kind::LogNonPositive: return "log-nonpositive";
    case EvalError::Kind::SqrtNegative: return "sqrt-negative";
    case EvalError::Kind::PowDomain: return "pow-domain";
    case EvalError::Kind::Overflow: return "overflow";
    case EvalError::Kind::MissingVariable: return "missing-variable";
  }
  return "unknown";
}

namespace {
std::string eval_error_message(const EvalError& e) {
  std::string msg = "evaluation fault: ";
  msg += to_string(e.kind);
  char buf[64];
  std::snprintf(buf, sizeof(buf), " at x=%.17g", e.point.x);
  msg += buf;
  if (e.point.y) {
    std::snprintf(buf, sizeof(buf), ", y=%.17g", *e.point.y);
    msg += buf;
  }
  return msg;
}
}  // namespace

EvalException::EvalException(EvalError err)
    : std::runtime_error(eval_error_message(err)), err_(err) {}

std::string ParseError::message() const {
  std::string msg;
  switch (kind) {
    case Kind::Syntax:
      msg = "syntax error at position " + std::to_string(position) +
            ": expected " + expected;
      break;
    case Kind::UnknownFunction:
      msg = "unknown function '" + name + "' at position " +
            std::to_string(position) + " (expected " + expected + ")";
      break;
    case Kind::Arity:
      msg = "wrong argument count for '" + name + "' at position " +
            std::to_string(position) + ": " + expected;
      break;
  }
  return msg;
}

}  // namespace hadamard
