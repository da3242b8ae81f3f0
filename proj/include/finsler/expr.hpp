#pragma once

// Scalar expression language for the coefficient functions of a metric
// (phi(r,s), psi(t), c2(r), ...).
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := ('-')? atom ('^' exponent)?
//   atom   := number | symbol | '(' expr ')' | func '(' expr ')'
//   func   := 'sqrt' | 'exp' | 'ln'
//   exponent := number | '-' number | '(' ['-'] number ['/' number] ')'
//
// Exponents are always constants; `r^s` is rejected when parsing. A rational
// exponent must be parenthesised, `r^(3/2)`, so that `r^3/2` keeps its usual
// meaning (r^3)/2.

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "finsler/jet.hpp"

namespace finsler {

class Expr {
 public:
  enum class Kind { Constant, Variable, Negate, Sqrt, Exp, Ln, Add, Sub, Mul, Div, Pow };

  struct Node;

  /// Parses `source`; every identifier must be one of `symbols` or a function
  /// name. Throws ParseError.
  static Expr parse(std::string_view source, std::vector<std::string> symbols);

  // Builders, mainly for tests.
  static Expr constant(double v, std::vector<std::string> symbols);
  static Expr variable(int index, std::vector<std::string> symbols);
  static Expr unary(Kind k, const Expr& a);
  static Expr binary(Kind k, const Expr& a, const Expr& b);
  static Expr power(const Expr& a, double exponent);

  /// Symbolic partial derivative with respect to a declared symbol. Constant
  /// subterms are folded; no other simplification happens.
  Expr derivative(std::string_view symbol) const;

  /// The same tree over a different symbol list; every symbol used must also
  /// appear in `symbols`.
  Expr rebind(std::vector<std::string> symbols) const;

  /// True when the tree contains no variables; `value` receives the constant.
  bool is_constant(double* value = nullptr) const;

  Kind kind() const;
  /// Constant value, or exponent of a Pow node.
  double number() const;
  int variable_index() const;
  int arity() const;
  Expr operand(int i) const;

  const std::vector<std::string>& symbols() const { return *symbols_; }
  bool uses_symbol(std::string_view name) const;

  /// Canonical text; parsing it back yields a structurally identical tree.
  std::string to_string() const;

  friend bool operator==(const Expr& a, const Expr& b);

  /// Evaluates with one value per declared symbol. Throws DomainError naming
  /// the offending subexpression.
  double evaluate(std::span<const double> args) const;
  /// Jet evaluation. All argument jets share one base point; the result has
  /// the smallest argument degree.
  Jet evaluate(std::span<const Jet> args) const;

  /// Smallest distance to a singularity encountered while evaluating at
  /// `args`: radicands and logarithm arguments (signed), |denominators|, and
  /// bases of non-integer powers. `which` receives the offending
  /// subexpression. Returns +inf when the expression has no singular points.
  double domain_margin(std::span<const double> args, std::string* which = nullptr) const;
  /// The same quantities with their signs (radicands, logarithm arguments,
  /// denominators, bases of non-integer powers) in a fixed order. Used to
  /// detect a singular set crossed between two points.
  std::vector<double> singular_quantities(std::span<const double> args) const;

 private:
  friend class ExprAlgebra;

  struct Instr {
    Kind kind;
    double value;
    int var;
    const Node* node;
  };

  Expr(std::shared_ptr<const Node> root, std::shared_ptr<const std::vector<std::string>> symbols);
  void compile();
  template <class Note>
  void scan(std::span<const double> args, Note note) const;
  template <class T>
  T run(std::span<const T> args, const T& zero) const;

  std::shared_ptr<const Node> root_;
  std::shared_ptr<const std::vector<std::string>> symbols_;
  std::shared_ptr<const std::vector<Instr>> program_;
};

// Folding arithmetic on trees over the same symbol list.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator+(const Expr& a, double b);
Expr operator+(double a, const Expr& b);
Expr operator-(const Expr& a, double b);
Expr operator-(double a, const Expr& b);
Expr operator*(double a, const Expr& b);
Expr operator*(const Expr& a, double b);
Expr operator/(const Expr& a, double b);
Expr operator/(double a, const Expr& b);
Expr sqrt(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr pow(const Expr& a, double p);

/// Shortest text that parses back to `v`; negative values in parentheses.
std::string literal(double v);

}  // namespace finsler
