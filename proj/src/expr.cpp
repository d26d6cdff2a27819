#include "fvk/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace fvk {
namespace detail {

enum class Kind : int {
  kConst,
  kX1,
  kX2,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
  kPow,
  kSin,
  kCos,
  kExp,
};

struct ExprNode {
  Kind kind;
  double value = 0.0;  // kConst payload
  int exponent = 0;    // kPow payload
  std::shared_ptr<const ExprNode> a, b;
};

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_const(double c) {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::kConst;
  n->value = c;
  return n;
}

bool is_const(const NodePtr& n, double c) { return n->kind == Kind::kConst && n->value == c; }
bool is_const(const NodePtr& n) { return n->kind == Kind::kConst; }

NodePtr make_unary(Kind k, NodePtr a) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->a = std::move(a);
  return n;
}

NodePtr make_binary(Kind k, NodePtr a, NodePtr b) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

// Builders with constant folding and identity pruning. Keeping derivative
// trees small matters: recovery coefficients differentiate these trees
// several levels deep.
NodePtr add(NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) return make_const(a->value + b->value);
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return make_binary(Kind::kAdd, std::move(a), std::move(b));
}

NodePtr neg(NodePtr a) {
  if (is_const(a)) return make_const(-a->value);
  if (a->kind == Kind::kNeg) return a->a;
  return make_unary(Kind::kNeg, std::move(a));
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) return make_const(a->value - b->value);
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return neg(std::move(b));
  return make_binary(Kind::kSub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) return make_const(a->value * b->value);
  if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  return make_binary(Kind::kMul, std::move(a), std::move(b));
}

NodePtr div(NodePtr a, NodePtr b) {
  if (is_const(b, 0.0)) throw std::invalid_argument("Expr: division by constant zero");
  if (is_const(a) && is_const(b)) return make_const(a->value / b->value);
  if (is_const(a, 0.0)) return make_const(0.0);
  if (is_const(b, 1.0)) return a;
  return make_binary(Kind::kDiv, std::move(a), std::move(b));
}

NodePtr powi(NodePtr a, int n) {
  if (n == 0) return make_const(1.0);
  if (n == 1) return a;
  if (is_const(a)) return make_const(std::pow(a->value, n));
  auto node = std::make_shared<ExprNode>();
  node->kind = Kind::kPow;
  node->exponent = n;
  node->a = std::move(a);
  return node;
}

NodePtr deriv(const NodePtr& n, int axis) {
  switch (n->kind) {
    case Kind::kConst:
      return make_const(0.0);
    case Kind::kX1:
      return make_const(axis == 0 ? 1.0 : 0.0);
    case Kind::kX2:
      return make_const(axis == 1 ? 1.0 : 0.0);
    case Kind::kAdd:
      return add(deriv(n->a, axis), deriv(n->b, axis));
    case Kind::kSub:
      return sub(deriv(n->a, axis), deriv(n->b, axis));
    case Kind::kMul:
      return add(mul(deriv(n->a, axis), n->b), mul(n->a, deriv(n->b, axis)));
    case Kind::kDiv:
      return div(sub(mul(deriv(n->a, axis), n->b), mul(n->a, deriv(n->b, axis))),
                 powi(n->b, 2));
    case Kind::kNeg:
      return neg(deriv(n->a, axis));
    case Kind::kPow:
      return mul(mul(make_const(double(n->exponent)), powi(n->a, n->exponent - 1)),
                 deriv(n->a, axis));
    case Kind::kSin:
      return mul(make_unary(Kind::kCos, n->a), deriv(n->a, axis));
    case Kind::kCos:
      return mul(neg(make_unary(Kind::kSin, n->a)), deriv(n->a, axis));
    case Kind::kExp:
      return mul(make_unary(Kind::kExp, n->a), deriv(n->a, axis));
  }
  throw std::logic_error("Expr: unknown node kind");
}

double eval_node(const ExprNode* n, double x1, double x2) {
  switch (n->kind) {
    case Kind::kConst:
      return n->value;
    case Kind::kX1:
      return x1;
    case Kind::kX2:
      return x2;
    case Kind::kAdd:
      return eval_node(n->a.get(), x1, x2) + eval_node(n->b.get(), x1, x2);
    case Kind::kSub:
      return eval_node(n->a.get(), x1, x2) - eval_node(n->b.get(), x1, x2);
    case Kind::kMul:
      return eval_node(n->a.get(), x1, x2) * eval_node(n->b.get(), x1, x2);
    case Kind::kDiv:
      return eval_node(n->a.get(), x1, x2) / eval_node(n->b.get(), x1, x2);
    case Kind::kNeg:
      return -eval_node(n->a.get(), x1, x2);
    case Kind::kPow:
      return std::pow(eval_node(n->a.get(), x1, x2), n->exponent);
    case Kind::kSin:
      return std::sin(eval_node(n->a.get(), x1, x2));
    case Kind::kCos:
      return std::cos(eval_node(n->a.get(), x1, x2));
    case Kind::kExp:
      return std::exp(eval_node(n->a.get(), x1, x2));
  }
  return 0.0;
}

bool same_node(const ExprNode* a, const ExprNode* b) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Kind::kConst:
      return a->value == b->value;
    case Kind::kX1:
    case Kind::kX2:
      return true;
    case Kind::kPow:
      return a->exponent == b->exponent && same_node(a->a.get(), b->a.get());
    case Kind::kNeg:
    case Kind::kSin:
    case Kind::kCos:
    case Kind::kExp:
      return same_node(a->a.get(), b->a.get());
    default:
      return same_node(a->a.get(), b->a.get()) && same_node(a->b.get(), b->b.get());
  }
}

std::string number_to_string(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void print_node(const ExprNode* n, std::ostringstream& os) {
  switch (n->kind) {
    case Kind::kConst:
      if (n->value < 0) {
        os << "(" << number_to_string(n->value) << ")";
      } else {
        os << number_to_string(n->value);
      }
      return;
    case Kind::kX1:
      os << "x1";
      return;
    case Kind::kX2:
      os << "x2";
      return;
    case Kind::kAdd:
      os << "(";
      print_node(n->a.get(), os);
      os << " + ";
      print_node(n->b.get(), os);
      os << ")";
      return;
    case Kind::kSub:
      os << "(";
      print_node(n->a.get(), os);
      os << " - ";
      print_node(n->b.get(), os);
      os << ")";
      return;
    case Kind::kMul:
      os << "(";
      print_node(n->a.get(), os);
      os << " * ";
      print_node(n->b.get(), os);
      os << ")";
      return;
    case Kind::kDiv:
      os << "(";
      print_node(n->a.get(), os);
      os << " / ";
      print_node(n->b.get(), os);
      os << ")";
      return;
    case Kind::kNeg:
      os << "(-";
      print_node(n->a.get(), os);
      os << ")";
      return;
    case Kind::kPow:
      os << "(";
      print_node(n->a.get(), os);
      os << " ^ " << n->exponent << ")";
      return;
    case Kind::kSin:
      os << "sin(";
      print_node(n->a.get(), os);
      os << ")";
      return;
    case Kind::kCos:
      os << "cos(";
      print_node(n->a.get(), os);
      os << ")";
      return;
    case Kind::kExp:
      os << "exp(";
      print_node(n->a.get(), os);
      os << ")";
      return;
  }
}

}  // namespace detail

struct ExprBuilder {
  static Expr wrap(detail::NodePtr n) { return Expr(std::move(n)); }
};

Expr::Expr() : node_(detail::make_const(0.0)) {}
Expr Expr::constant(double c) { return ExprBuilder::wrap(detail::make_const(c)); }
Expr Expr::x1() { return ExprBuilder::wrap(detail::make_unary(detail::Kind::kX1, nullptr)); }
Expr Expr::x2() { return ExprBuilder::wrap(detail::make_unary(detail::Kind::kX2, nullptr)); }

double Expr::eval(double x1, double x2) const { return detail::eval_node(node_.get(), x1, x2); }
Expr Expr::deriv(int axis) const { return ExprBuilder::wrap(detail::deriv(node_, axis)); }
bool Expr::is_constant(double c) const { return detail::is_const(node_, c); }
bool Expr::same_as(const Expr& other) const { return detail::same_node(node_.get(), other.node_.get()); }

std::string Expr::to_string() const {
  std::ostringstream os;
  detail::print_node(node_.get(), os);
  return os.str();
}

Expr operator+(const Expr& a, const Expr& b) { return ExprBuilder::wrap(detail::add(a.node_, b.node_)); }
Expr operator-(const Expr& a, const Expr& b) { return ExprBuilder::wrap(detail::sub(a.node_, b.node_)); }
Expr operator*(const Expr& a, const Expr& b) { return ExprBuilder::wrap(detail::mul(a.node_, b.node_)); }
Expr operator/(const Expr& a, const Expr& b) { return ExprBuilder::wrap(detail::div(a.node_, b.node_)); }
Expr operator-(const Expr& a) { return ExprBuilder::wrap(detail::neg(a.node_)); }
Expr pow(const Expr& a, int n) { return ExprBuilder::wrap(detail::powi(a.node_, n)); }
Expr sin(const Expr& a) { return ExprBuilder::wrap(detail::make_unary(detail::Kind::kSin, a.node_)); }
Expr cos(const Expr& a) { return ExprBuilder::wrap(detail::make_unary(detail::Kind::kCos, a.node_)); }
Expr exp(const Expr& a) { return ExprBuilder::wrap(detail::make_unary(detail::Kind::kExp, a.node_)); }

// ---------------------------------------------------------------------------
// Parser: recursive descent over
//   expr    := term (('+'|'-') term)*
//   term    := factor (('*'|'/') factor)*
//   factor  := ('-'|'+')* power
//   power   := atom ('^' integer)?
//   atom    := number | x1 | x2 | func '(' expr ')' | '(' expr ')'
// ---------------------------------------------------------------------------
namespace {

struct Parser {
  const std::string& text;
  std::size_t pos = 0;

  explicit Parser(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool peek(char c) {
    skip_ws();
    return pos < text.size() && text[pos] == c;
  }

  bool accept(char c) {
    if (peek(c)) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) throw ExprParseError(std::string("expected '") + c + "'", pos);
  }

  Expr parse_expr_rule() {
    Expr e = parse_term();
    for (;;) {
      if (accept('+')) {
        e = e + parse_term();
      } else if (accept('-')) {
        e = e - parse_term();
      } else {
        return e;
      }
    }
  }

  Expr parse_term() {
    Expr e = parse_factor();
    for (;;) {
      if (accept('*')) {
        e = e * parse_factor();
      } else if (accept('/')) {
        e = e / parse_factor();
      } else {
        return e;
      }
    }
  }

  Expr parse_factor() {
    if (accept('-')) return -parse_factor();
    if (accept('+')) return parse_factor();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (accept('^')) {
      skip_ws();
      bool negative = false;
      if (accept('-')) negative = true;
      skip_ws();
      std::size_t start = pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      if (pos == start) throw ExprParseError("expected integer exponent after '^'", pos);
      int n = std::stoi(text.substr(start, pos - start));
      return pow(base, negative ? -n : n);
    }
    return base;
  }

  Expr parse_atom() {
    skip_ws();
    if (pos >= text.size()) throw ExprParseError("unexpected end of expression", pos);
    char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    if (c == '(') {
      ++pos;
      Expr e = parse_expr_rule();
      expect(')');
      return e;
    }
    throw ExprParseError(std::string("unexpected character '") + c + "'", pos);
  }

  Expr parse_number() {
    std::size_t start = pos;
    while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.')) ++pos;
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
      std::size_t mark = pos;
      ++pos;
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
      if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      } else {
        pos = mark;  // 'e' was not an exponent
      }
    }
    try {
      return Expr::constant(std::stod(text.substr(start, pos - start)));
    } catch (const std::exception&) {
      throw ExprParseError("malformed number", start);
    }
  }

  Expr parse_identifier() {
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    const std::string name = text.substr(start, pos - start);
    if (name == "x1") return Expr::x1();
    if (name == "x2") return Expr::x2();
    if (name == "sin" || name == "cos" || name == "exp") {
      expect('(');
      Expr arg = parse_expr_rule();
      expect(')');
      if (name == "sin") return sin(arg);
      if (name == "cos") return cos(arg);
      return exp(arg);
    }
    throw ExprParseError("unknown identifier '" + name + "'", start);
  }
};

}  // namespace

Expr parse_expr(const std::string& text) {
  Parser p(text);
  Expr e = p.parse_expr_rule();
  p.skip_ws();
  if (p.pos != text.size()) throw ExprParseError("trailing input", p.pos);
  return e;
}

// ---------------------------------------------------------------------------
// Aggregate helpers
// ---------------------------------------------------------------------------

ExprVec2 grad(const Expr& e) { return {e.deriv(0), e.deriv(1)}; }

ExprMat2 hessian(const Expr& e) {
  const Expr d1 = e.deriv(0);
  const Expr d2 = e.deriv(1);
  return {d1.deriv(0), d1.deriv(1), d2.deriv(0), d2.deriv(1)};
}

Expr laplacian_expr(const Expr& e) { return e.deriv(0).deriv(0) + e.deriv(1).deriv(1); }

ExprMat2 sym(const ExprMat2& m) {
  const Expr off = Expr::constant(0.5) * (m[1] + m[2]);
  return {m[0], off, off, m[3]};
}

ExprMat3 sym3(const ExprMat3& m) {
  ExprMat3 out;
  const Expr half = Expr::constant(0.5);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[3 * i + j] = half * (m[3 * i + j] + m[3 * j + i]);
  return out;
}

ExprMat2 block_2x2(const ExprMat3& m) { return {m[0], m[1], m[3], m[4]}; }

Expr trace(const ExprMat2& m) { return m[0] + m[3]; }

ExprMat2 outer(const ExprVec2& a, const ExprVec2& b) {
  return {a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]};
}

ExprMat2 add(const ExprMat2& a, const ExprMat2& b) {
  ExprMat2 out;
  for (int k = 0; k < 4; ++k) out[k] = a[k] + b[k];
  return out;
}

ExprMat2 sub(const ExprMat2& a, const ExprMat2& b) {
  ExprMat2 out;
  for (int k = 0; k < 4; ++k) out[k] = a[k] - b[k];
  return out;
}

ExprMat2 scale(const Expr& s, const ExprMat2& m) {
  ExprMat2 out;
  for (int k = 0; k < 4; ++k) out[k] = s * m[k];
  return out;
}

ExprVec3 add3(const ExprVec3& a, const ExprVec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

ExprVec3 scale3(const Expr& s, const ExprVec3& v) { return {s * v[0], s * v[1], s * v[2]}; }

// ---------------------------------------------------------------------------
// Tape
// ---------------------------------------------------------------------------

ExprTape::ExprTape(std::span<const Expr> exprs) {
  std::unordered_map<const detail::ExprNode*, int> slot;

  // Post-order emission; shared subtrees get a single slot.
  auto emit = [&](auto&& self, const detail::ExprNode* n) -> int {
    if (auto it = slot.find(n); it != slot.end()) return it->second;
    Op op;
    op.kind = static_cast<int>(n->kind);
    switch (n->kind) {
      case detail::Kind::kConst:
        op.value = n->value;
        break;
      case detail::Kind::kX1:
      case detail::Kind::kX2:
        break;
      case detail::Kind::kPow:
        op.a = self(self, n->a.get());
        op.value = n->exponent;
        break;
      case detail::Kind::kNeg:
      case detail::Kind::kSin:
      case detail::Kind::kCos:
      case detail::Kind::kExp:
        op.a = self(self, n->a.get());
        break;
      default:
        op.a = self(self, n->a.get());
        op.b = self(self, n->b.get());
        break;
    }
    const int id = static_cast<int>(ops_.size());
    ops_.push_back(op);
    slot.emplace(n, id);
    return id;
  };

  out_slots_.reserve(exprs.size());
  for (const Expr& e : exprs) out_slots_.push_back(emit(emit, e.node()));
  scratch_.resize(ops_.size());
}

void ExprTape::eval(double x1, double x2, std::span<double> out) const {
  if (out.size() != out_slots_.size()) throw std::invalid_argument("ExprTape: bad output size");
  using detail::Kind;
  double* s = scratch_.data();
  for (std::size_t k = 0; k < ops_.size(); ++k) {
    const Op& op = ops_[k];
    switch (static_cast<Kind>(op.kind)) {
      case Kind::kConst:
        s[k] = op.value;
        break;
      case Kind::kX1:
        s[k] = x1;
        break;
      case Kind::kX2:
        s[k] = x2;
        break;
      case Kind::kAdd:
        s[k] = s[op.a] + s[op.b];
        break;
      case Kind::kSub:
        s[k] = s[op.a] - s[op.b];
        break;
      case Kind::kMul:
        s[k] = s[op.a] * s[op.b];
        break;
      case Kind::kDiv:
        s[k] = s[op.a] / s[op.b];
        break;
      case Kind::kNeg:
        s[k] = -s[op.a];
        break;
      case Kind::kPow:
        s[k] = std::pow(s[op.a], static_cast<int>(op.value));
        break;
      case Kind::kSin:
        s[k] = std::sin(s[op.a]);
        break;
      case Kind::kCos:
        s[k] = std::cos(s[op.a]);
        break;
      case Kind::kExp:
        s[k] = std::exp(s[op.a]);
        break;
    }
  }
  for (std::size_t k = 0; k < out_slots_.size(); ++k) out[k] = s[out_slots_[k]];
}

}  // namespace fvk
