// Closed-form scalar expressions over (x1, x2): constants, + - * /,
// integer powers, sin, cos, exp. Closed under differentiation, so every
// derivative an analytic input needs (thickness gradients, third
// derivatives of deflections, recovery coefficients) is exact.
#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fvk {

namespace detail {
struct ExprNode;
}

class Expr {
 public:
  // Default is the constant zero.
  Expr();

  static Expr constant(double c);
  static Expr x1();
  static Expr x2();

  double eval(double x1, double x2) const;

  // Exact partial derivative; axis is 0 for x1, 1 for x2.
  Expr deriv(int axis) const;

  // True if the node is literally the constant c (after simplification).
  bool is_constant(double c) const;

  // Structural equality of the simplified trees.
  bool same_as(const Expr& other) const;

  std::string to_string() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr pow(const Expr& a, int n);
  friend Expr sin(const Expr& a);
  friend Expr cos(const Expr& a);
  friend Expr exp(const Expr& a);

  Expr& operator+=(const Expr& b) { return *this = *this + b; }
  Expr& operator-=(const Expr& b) { return *this = *this - b; }
  Expr& operator*=(const Expr& b) { return *this = *this * b; }

  const detail::ExprNode* node() const { return node_.get(); }

 private:
  explicit Expr(std::shared_ptr<const detail::ExprNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const detail::ExprNode> node_;
  friend class ExprTape;
  friend struct ExprBuilder;
};

inline Expr operator+(const Expr& a, double b) { return a + Expr::constant(b); }
inline Expr operator+(double a, const Expr& b) { return Expr::constant(a) + b; }
inline Expr operator-(const Expr& a, double b) { return a - Expr::constant(b); }
inline Expr operator-(double a, const Expr& b) { return Expr::constant(a) - b; }
inline Expr operator*(const Expr& a, double b) { return a * Expr::constant(b); }
inline Expr operator*(double a, const Expr& b) { return Expr::constant(a) * b; }
inline Expr operator/(const Expr& a, double b) { return a / Expr::constant(b); }
inline Expr operator/(double a, const Expr& b) { return Expr::constant(a) / b; }

// Parses the documented grammar: identifiers x1 x2; + - * / ^ with integer
// exponents; functions sin, cos, exp; parentheses; decimal/scientific
// literals. Throws ExprParseError with a character position on failure.
Expr parse_expr(const std::string& text);

struct ExprParseError : std::runtime_error {
  ExprParseError(const std::string& msg, std::size_t position)
      : std::runtime_error(msg), pos(position) {}
  std::size_t pos;
};

// Small aggregates used throughout the analytic pipeline.
using ExprVec2 = std::array<Expr, 2>;
using ExprVec3 = std::array<Expr, 3>;
using ExprMat2 = std::array<Expr, 4>;  // row-major
using ExprMat3 = std::array<Expr, 9>;  // row-major

ExprVec2 grad(const Expr& e);
ExprMat2 hessian(const Expr& e);
Expr laplacian_expr(const Expr& e);

ExprMat2 sym(const ExprMat2& m);
ExprMat3 sym3(const ExprMat3& m);
ExprMat2 block_2x2(const ExprMat3& m);
Expr trace(const ExprMat2& m);
ExprMat2 outer(const ExprVec2& a, const ExprVec2& b);
ExprMat2 add(const ExprMat2& a, const ExprMat2& b);
ExprMat2 sub(const ExprMat2& a, const ExprMat2& b);
ExprMat2 scale(const Expr& s, const ExprMat2& m);
ExprVec3 add3(const ExprVec3& a, const ExprVec3& b);
ExprVec3 scale3(const Expr& s, const ExprVec3& v);

// Flattens a set of expressions into one shared evaluation tape with
// common subexpressions (by node identity) computed once. eval() writes
// one value per registered expression; a tape instance carries its own
// scratch buffer and is cheap to copy for concurrent use.
class ExprTape {
 public:
  explicit ExprTape(std::span<const Expr> exprs);

  std::size_t outputs() const { return out_slots_.size(); }
  void eval(double x1, double x2, std::span<double> out) const;

 private:
  struct Op {
    int kind;
    int a = -1;
    int b = -1;
    double value = 0.0;  // constants; integer exponent for pow
  };
  std::vector<Op> ops_;
  std::vector<int> out_slots_;
  mutable std::vector<double> scratch_;
};

}  // namespace fvk
