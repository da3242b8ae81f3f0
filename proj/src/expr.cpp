#include "finsler/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "finsler/error.hpp"

namespace finsler {

std::string literal(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, std::abs(v));
  std::string s(buf, res.ptr);
  return v < 0 ? "(-" + s + ")" : s;
}

struct Expr::Node {
  Kind kind = Kind::Constant;
  double value = 0.0;  // Constant value or Pow exponent
  int var = -1;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Kind = Expr::Kind;

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

bool is_integer(double v) { return v == std::floor(v) && std::abs(v) < 1e15; }

std::string print(const Expr::Node& n, const std::vector<std::string>& symbols) {
  switch (n.kind) {
    case Kind::Constant:
      if (n.value < 0) return "(-" + format_number(-n.value) + ")";
      return format_number(n.value);
    case Kind::Variable:
      return symbols[static_cast<std::size_t>(n.var)];
    case Kind::Negate:
      return "(-" + print(*n.a, symbols) + ")";
    case Kind::Sqrt:
      return "sqrt(" + print(*n.a, symbols) + ")";
    case Kind::Exp:
      return "exp(" + print(*n.a, symbols) + ")";
    case Kind::Ln:
      return "ln(" + print(*n.a, symbols) + ")";
    case Kind::Add:
      return "(" + print(*n.a, symbols) + " + " + print(*n.b, symbols) + ")";
    case Kind::Sub:
      return "(" + print(*n.a, symbols) + " - " + print(*n.b, symbols) + ")";
    case Kind::Mul:
      return "(" + print(*n.a, symbols) + " * " + print(*n.b, symbols) + ")";
    case Kind::Div:
      return "(" + print(*n.a, symbols) + " / " + print(*n.b, symbols) + ")";
    case Kind::Pow: {
      std::string base = print(*n.a, symbols);
      if (n.a->kind != Kind::Variable && !(n.a->kind == Kind::Constant && n.a->value >= 0))
        base = "(" + base + ")";
      std::string e;
      if (is_integer(n.value) && n.value >= 0)
        e = format_number(n.value);
      else if (n.value < 0)
        e = "(-" + format_number(-n.value) + ")";
      else
        e = "(" + format_number(n.value) + ")";
      return base + "^" + e;
    }
  }
  return {};
}

bool equal(const Expr::Node* x, const Expr::Node* y) {
  if (x == y) return true;
  if (!x || !y) return false;
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case Kind::Constant:
      return x->value == y->value;
    case Kind::Variable:
      return x->var == y->var;
    case Kind::Pow:
      return x->value == y->value && equal(x->a.get(), y->a.get());
    default:
      return equal(x->a.get(), y->a.get()) && equal(x->b.get(), y->b.get());
  }
}

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr, double value = 0.0, int var = -1) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  n->value = value;
  n->var = var;
  return n;
}

class Parser {
 public:
  Parser(std::string_view src, const std::vector<std::string>& symbols)
      : src_(src), symbols_(symbols) {}

  NodePtr parse() {
    skip();
    if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
    NodePtr e = expr();
    skip();
    if (pos_ < src_.size()) throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
    return e;
  }

 private:
  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= src_.size())
        throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  bool peek_number() {
    skip();
    return pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.');
  }

  double number() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
      ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
        pos_ = p;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    auto res = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != src_.data() + pos_ || pos_ == start)
      throw ParseError("malformed number", start);
    return v;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make(Kind::Add, lhs, term());
      else if (accept('-'))
        lhs = make(Kind::Sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (accept('*'))
        lhs = make(Kind::Mul, lhs, factor());
      else if (accept('/'))
        lhs = make(Kind::Div, lhs, factor());
      else
        return lhs;
    }
  }

  NodePtr factor() {
    const bool negate = accept('-');
    NodePtr a = atom();
    if (accept('^')) a = make(Kind::Pow, a, nullptr, exponent());
    return negate ? make(Kind::Negate, a) : a;
  }

  double exponent() {
    skip();
    const std::size_t start = pos_;
    if (accept('-')) {
      if (!peek_number()) throw ParseError("non-constant exponent", start);
      return -number();
    }
    if (peek_number()) return number();
    if (accept('(')) {
      const bool neg = accept('-');
      if (!peek_number()) throw ParseError("non-constant exponent", start);
      double v = number();
      if (accept('/')) {
        if (!peek_number()) throw ParseError("non-constant exponent", start);
        const double den = number();
        if (den == 0.0) throw ParseError("zero denominator in exponent", start);
        v /= den;
      }
      if (!accept(')')) throw ParseError("non-constant exponent", start);
      return neg ? -v : v;
    }
    throw ParseError("non-constant exponent", start);
  }

  NodePtr atom() {
    skip();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = src_[pos_];
    if (peek_number()) return make(Kind::Constant, nullptr, nullptr, number());
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      const std::string name(src_.substr(start, pos_ - start));
      Kind fn{};
      bool is_fn = true;
      if (name == "sqrt")
        fn = Kind::Sqrt;
      else if (name == "exp")
        fn = Kind::Exp;
      else if (name == "ln")
        fn = Kind::Ln;
      else
        is_fn = false;
      if (is_fn) {
        if (!accept('(')) throw ParseError("function '" + name + "' requires '('", pos_);
        NodePtr arg = expr();
        expect(')');
        return make(fn, arg);
      }
      auto it = std::find(symbols_.begin(), symbols_.end(), name);
      if (it == symbols_.end()) throw ParseError("unknown symbol '" + name + "'", start);
      return make(Kind::Variable, nullptr, nullptr, 0.0,
                  static_cast<int>(std::distance(symbols_.begin(), it)));
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  std::string_view src_;
  const std::vector<std::string>& symbols_;
  std::size_t pos_ = 0;
};

bool is_unary(Kind k) { return k == Kind::Negate || k == Kind::Sqrt || k == Kind::Exp || k == Kind::Ln; }

template <class T>
T make_constant(double v, const T& zero) {
  if constexpr (std::is_same_v<T, double>) {
    (void)zero;
    return v;
  } else {
    return Jet::constant(v, zero.degree(), zero.base());
  }
}

double margin_pow_base(double base, double e) {
  if (is_integer(e)) return e < 0 ? std::abs(base) : std::numeric_limits<double>::infinity();
  return base;
}

}  // namespace

Expr::Expr(std::shared_ptr<const Node> root, std::shared_ptr<const std::vector<std::string>> symbols)
    : root_(std::move(root)), symbols_(std::move(symbols)) {
  compile();
}

void Expr::compile() {
  auto prog = std::make_shared<std::vector<Instr>>();
  auto visit = [&](auto&& self, const Node* n) -> void {
    if (n->a) self(self, n->a.get());
    if (n->b) self(self, n->b.get());
    prog->push_back(Instr{n->kind, n->value, n->var, n});
  };
  visit(visit, root_.get());
  program_ = std::move(prog);
}

Expr Expr::parse(std::string_view source, std::vector<std::string> symbols) {
  auto syms = std::make_shared<const std::vector<std::string>>(std::move(symbols));
  Parser p(source, *syms);
  NodePtr root = p.parse();
  return Expr(root, syms);
}

Expr Expr::constant(double v, std::vector<std::string> symbols) {
  auto syms = std::make_shared<const std::vector<std::string>>(std::move(symbols));
  if (v < 0) return Expr(make(Kind::Negate, make(Kind::Constant, nullptr, nullptr, -v)), syms);
  return Expr(make(Kind::Constant, nullptr, nullptr, v), syms);
}

Expr Expr::variable(int index, std::vector<std::string> symbols) {
  if (index < 0 || index >= static_cast<int>(symbols.size()))
    throw std::out_of_range("variable index out of range");
  auto syms = std::make_shared<const std::vector<std::string>>(std::move(symbols));
  return Expr(make(Kind::Variable, nullptr, nullptr, 0.0, index), syms);
}

Expr Expr::unary(Kind k, const Expr& a) {
  if (!is_unary(k)) throw std::invalid_argument("not a unary operator");
  return Expr(make(k, a.root_), a.symbols_);
}

Expr Expr::binary(Kind k, const Expr& a, const Expr& b) {
  if (k != Kind::Add && k != Kind::Sub && k != Kind::Mul && k != Kind::Div)
    throw std::invalid_argument("not a binary operator");
  if (*a.symbols_ != *b.symbols_) throw std::invalid_argument("operands declare different symbols");
  return Expr(make(k, a.root_, b.root_), a.symbols_);
}

Expr Expr::power(const Expr& a, double exponent) {
  return Expr(make(Kind::Pow, a.root_, nullptr, exponent), a.symbols_);
}

Expr::Kind Expr::kind() const { return root_->kind; }
double Expr::number() const { return root_->value; }
int Expr::variable_index() const { return root_->var; }

int Expr::arity() const {
  if (root_->kind == Kind::Constant || root_->kind == Kind::Variable) return 0;
  if (is_unary(root_->kind) || root_->kind == Kind::Pow) return 1;
  return 2;
}

Expr Expr::operand(int i) const {
  if (i < 0 || i >= arity()) throw std::out_of_range("operand index");
  return Expr(i == 0 ? root_->a : root_->b, symbols_);
}

bool Expr::uses_symbol(std::string_view name) const {
  auto it = std::find(symbols_->begin(), symbols_->end(), name);
  if (it == symbols_->end()) return false;
  const int idx = static_cast<int>(std::distance(symbols_->begin(), it));
  return std::any_of(program_->begin(), program_->end(),
                     [&](const Instr& in) { return in.kind == Kind::Variable && in.var == idx; });
}

std::string Expr::to_string() const { return print(*root_, *symbols_); }

bool operator==(const Expr& a, const Expr& b) {
  return *a.symbols_ == *b.symbols_ && equal(a.root_.get(), b.root_.get());
}

template <class T>
T Expr::run(std::span<const T> args, const T& zero) const {
  if (args.size() != symbols_->size())
    throw std::invalid_argument("expected " + std::to_string(symbols_->size()) + " arguments");
  std::vector<T> stack;
  stack.reserve(16);
  for (const Instr& in : *program_) {
    try {
      switch (in.kind) {
        case Kind::Constant:
          stack.push_back(make_constant<T>(in.value, zero));
          break;
        case Kind::Variable:
          stack.push_back(args[static_cast<std::size_t>(in.var)]);
          break;
        case Kind::Negate:
          stack.back() = -stack.back();
          break;
        case Kind::Sqrt:
          if constexpr (std::is_same_v<T, double>) {
            if (!(stack.back() >= 0.0)) throw DomainError("square root of negative value");
            stack.back() = std::sqrt(stack.back());
          } else {
            stack.back() = sqrt(stack.back());
          }
          break;
        case Kind::Exp:
          if constexpr (std::is_same_v<T, double>)
            stack.back() = std::exp(stack.back());
          else
            stack.back() = exp(stack.back());
          break;
        case Kind::Ln:
          if constexpr (std::is_same_v<T, double>) {
            if (!(stack.back() > 0.0)) throw DomainError("logarithm of non-positive value");
            stack.back() = std::log(stack.back());
          } else {
            stack.back() = log(stack.back());
          }
          break;
        case Kind::Pow:
          if constexpr (std::is_same_v<T, double>) {
            if (!is_integer(in.value) && !(stack.back() > 0.0))
              throw DomainError("non-integer power of non-positive value");
            if (in.value < 0 && stack.back() == 0.0) throw DomainError("division by zero");
            stack.back() = std::pow(stack.back(), in.value);
          } else {
            stack.back() = pow(stack.back(), in.value);
          }
          break;
        default: {
          T rhs = std::move(stack.back());
          stack.pop_back();
          T& lhs = stack.back();
          switch (in.kind) {
            case Kind::Add:
              lhs += rhs;
              break;
            case Kind::Sub:
              lhs -= rhs;
              break;
            case Kind::Mul:
              lhs *= rhs;
              break;
            case Kind::Div:
              if constexpr (std::is_same_v<T, double>) {
                if (rhs == 0.0) throw DomainError("division by zero");
              }
              lhs /= rhs;
              break;
            default:
              break;
          }
        }
      }
    } catch (const DomainError& e) {
      throw DomainError(std::string(e.what()) + " in '" + print(*in.node, *symbols_) + "'");
    }
  }
  return stack.back();
}

double Expr::evaluate(std::span<const double> args) const { return run<double>(args, 0.0); }

Jet Expr::evaluate(std::span<const Jet> args) const {
  if (args.empty()) throw std::invalid_argument("jet evaluation needs at least one argument");
  const Jet* lowest = &args[0];
  for (const Jet& a : args) {
    if (!(a.base() == args[0].base())) throw std::invalid_argument("argument jets at different base points");
    if (a.degree() < lowest->degree()) lowest = &a;
  }
  const Jet zero(lowest->degree(), lowest->base());
  return run<Jet>(args, zero);
}

template <class Note>
void Expr::scan(std::span<const double> args, Note note) const {
  if (args.size() != symbols_->size())
    throw std::invalid_argument("expected " + std::to_string(symbols_->size()) + " arguments");
  std::vector<double> stack;
  for (const Instr& in : *program_) {
    switch (in.kind) {
      case Kind::Constant:
        stack.push_back(in.value);
        break;
      case Kind::Variable:
        stack.push_back(args[static_cast<std::size_t>(in.var)]);
        break;
      case Kind::Negate:
        stack.back() = -stack.back();
        break;
      case Kind::Sqrt:
        note(stack.back(), stack.back(), in.node);
        stack.back() = std::sqrt(std::max(stack.back(), 0.0));
        break;
      case Kind::Exp:
        stack.back() = std::exp(stack.back());
        break;
      case Kind::Ln:
        note(stack.back(), stack.back(), in.node);
        stack.back() = stack.back() > 0 ? std::log(stack.back()) : std::numeric_limits<double>::quiet_NaN();
        break;
      case Kind::Pow:
        note(stack.back(), margin_pow_base(stack.back(), in.value), in.node);
        stack.back() = std::pow(stack.back(), in.value);
        break;
      default: {
        const double rhs = stack.back();
        stack.pop_back();
        double& lhs = stack.back();
        switch (in.kind) {
          case Kind::Add:
            lhs += rhs;
            break;
          case Kind::Sub:
            lhs -= rhs;
            break;
          case Kind::Mul:
            lhs *= rhs;
            break;
          case Kind::Div:
            note(rhs, std::abs(rhs), in.node->b.get());
            lhs /= rhs;
            break;
          default:
            break;
        }
      }
    }
    if (std::isnan(stack.back()))
      note(std::numeric_limits<double>::quiet_NaN(), -std::numeric_limits<double>::infinity(), in.node);
  }
}

double Expr::domain_margin(std::span<const double> args, std::string* which) const {
  double margin = std::numeric_limits<double>::infinity();
  scan(args, [&](double, double m, const Node* n) {
    if (m < margin) {
      margin = m;
      if (which) *which = print(*n, *symbols_);
    }
  });
  return margin;
}

std::vector<double> Expr::singular_quantities(std::span<const double> args) const {
  std::vector<double> out;
  scan(args, [&](double v, double m, const Node*) {
    if (!std::isinf(m)) out.push_back(v);
  });
  return out;
}

}  // namespace finsler

namespace finsler {

namespace {

bool const_of(const NodePtr& n, double& v) {
  if (n->kind == Kind::Constant) {
    v = n->value;
    return true;
  }
  if (n->kind == Kind::Negate && n->a->kind == Kind::Constant) {
    v = -n->a->value;
    return true;
  }
  return false;
}

NodePtr num(double v) {
  if (v < 0 || (v == 0.0 && std::signbit(v)))
    return make(Kind::Negate, make(Kind::Constant, nullptr, nullptr, -v));
  return make(Kind::Constant, nullptr, nullptr, v);
}

NodePtr f_neg(const NodePtr& a) {
  double v;
  if (const_of(a, v)) return num(v == 0.0 ? 0.0 : -v);
  if (a->kind == Kind::Negate) return a->a;
  return make(Kind::Negate, a);
}

NodePtr fold_binary(Kind k, const NodePtr& a, const NodePtr& b) {
  double va = 0, vb = 0;
  const bool ca = const_of(a, va), cb = const_of(b, vb);
  if (ca && cb) {
    double v = 0;
    switch (k) {
      case Kind::Add: v = va + vb; break;
      case Kind::Sub: v = va - vb; break;
      case Kind::Mul: v = va * vb; break;
      case Kind::Div: v = vb == 0.0 ? std::numeric_limits<double>::quiet_NaN() : va / vb; break;
      default: break;
    }
    if (std::isfinite(v)) return num(v);
  }
  switch (k) {
    case Kind::Add:
      if (ca && va == 0.0) return b;
      if (cb && vb == 0.0) return a;
      break;
    case Kind::Sub:
      if (cb && vb == 0.0) return a;
      if (ca && va == 0.0) return f_neg(b);
      break;
    case Kind::Mul:
      if ((ca && va == 0.0) || (cb && vb == 0.0)) return num(0.0);
      if (ca && va == 1.0) return b;
      if (cb && vb == 1.0) return a;
      if (ca && va == -1.0) return f_neg(b);
      if (cb && vb == -1.0) return f_neg(a);
      break;
    case Kind::Div:
      if (ca && va == 0.0) return num(0.0);
      if (cb && vb == 1.0) return a;
      break;
    default:
      break;
  }
  return make(k, a, b);
}

NodePtr f_pow(const NodePtr& a, double p) {
  if (p == 0.0) return num(1.0);
  if (p == 1.0) return a;
  double v;
  if (const_of(a, v)) {
    const double r = std::pow(v, p);
    if (std::isfinite(r)) return num(r);
  }
  return make(Kind::Pow, a, nullptr, p);
}

NodePtr f_unary(Kind k, const NodePtr& a) {
  double v;
  if (const_of(a, v)) {
    double r = std::numeric_limits<double>::quiet_NaN();
    if (k == Kind::Exp) r = std::exp(v);
    if (k == Kind::Sqrt && v >= 0) r = std::sqrt(v);
    if (k == Kind::Ln && v > 0) r = std::log(v);
    if (std::isfinite(r) && (r == std::round(r) || k == Kind::Exp)) return num(r);
  }
  return make(k, a);
}

NodePtr differentiate(const NodePtr& n, int var) {
  switch (n->kind) {
    case Kind::Constant:
      return num(0.0);
    case Kind::Variable:
      return num(n->var == var ? 1.0 : 0.0);
    case Kind::Negate:
      return f_neg(differentiate(n->a, var));
    case Kind::Sqrt:
      return fold_binary(Kind::Div, differentiate(n->a, var), fold_binary(Kind::Mul, num(2.0), n));
    case Kind::Exp:
      return fold_binary(Kind::Mul, differentiate(n->a, var), n);
    case Kind::Ln:
      return fold_binary(Kind::Div, differentiate(n->a, var), n->a);
    case Kind::Add:
    case Kind::Sub:
      return fold_binary(n->kind, differentiate(n->a, var), differentiate(n->b, var));
    case Kind::Mul:
      return fold_binary(Kind::Add, fold_binary(Kind::Mul, differentiate(n->a, var), n->b),
                         fold_binary(Kind::Mul, n->a, differentiate(n->b, var)));
    case Kind::Div: {
      const NodePtr da = differentiate(n->a, var);
      const NodePtr db = differentiate(n->b, var);
      return fold_binary(Kind::Sub, fold_binary(Kind::Div, da, n->b),
                         fold_binary(Kind::Div, fold_binary(Kind::Mul, n->a, db), f_pow(n->b, 2.0)));
    }
    case Kind::Pow:
      return fold_binary(Kind::Mul, fold_binary(Kind::Mul, num(n->value), f_pow(n->a, n->value - 1.0)),
                         differentiate(n->a, var));
  }
  return num(0.0);
}

NodePtr remap(const NodePtr& n, const std::vector<int>& map) {
  if (n->kind == Kind::Variable) return make(Kind::Variable, nullptr, nullptr, 0.0, map[static_cast<std::size_t>(n->var)]);
  if (!n->a) return n;
  return make(n->kind, remap(n->a, map), n->b ? remap(n->b, map) : nullptr, n->value, n->var);
}

}  // namespace

class ExprAlgebra {
 public:
  static Expr binary(Kind k, const Expr& a, const Expr& b) {
    if (*a.symbols_ != *b.symbols_) throw std::invalid_argument("operands declare different symbols");
    return Expr(fold_binary(k, a.root_, b.root_), a.symbols_);
  }
  static Expr with_constant(Kind k, const Expr& a, double v, bool constant_first) {
    return constant_first ? Expr(fold_binary(k, num(v), a.root_), a.symbols_)
                          : Expr(fold_binary(k, a.root_, num(v)), a.symbols_);
  }
  static Expr negate(const Expr& a) { return Expr(f_neg(a.root_), a.symbols_); }
  static Expr unary(Kind k, const Expr& a) { return Expr(f_unary(k, a.root_), a.symbols_); }
  static Expr power(const Expr& a, double p) { return Expr(f_pow(a.root_, p), a.symbols_); }
  static Expr derivative(const Expr& e, int var) { return Expr(differentiate(e.root_, var), e.symbols_); }
  static Expr remapped(const Expr& e, const std::vector<int>& map,
                       std::shared_ptr<const std::vector<std::string>> syms) {
    return Expr(remap(e.root_, map), std::move(syms));
  }
};

Expr Expr::derivative(std::string_view symbol) const {
  auto it = std::find(symbols_->begin(), symbols_->end(), symbol);
  if (it == symbols_->end()) throw std::invalid_argument("unknown symbol '" + std::string(symbol) + "'");
  return ExprAlgebra::derivative(*this, static_cast<int>(std::distance(symbols_->begin(), it)));
}

Expr Expr::rebind(std::vector<std::string> symbols) const {
  std::vector<int> map(symbols_->size(), -1);
  for (std::size_t i = 0; i < symbols_->size(); ++i) {
    auto it = std::find(symbols.begin(), symbols.end(), (*symbols_)[i]);
    if (it != symbols.end()) map[i] = static_cast<int>(std::distance(symbols.begin(), it));
  }
  for (const Instr& in : *program_)
    if (in.kind == Kind::Variable && map[static_cast<std::size_t>(in.var)] < 0)
      throw std::invalid_argument("symbol '" + (*symbols_)[static_cast<std::size_t>(in.var)] +
                                  "' missing from the new symbol list");
  return ExprAlgebra::remapped(*this, map,
                               std::make_shared<const std::vector<std::string>>(std::move(symbols)));
}

bool Expr::is_constant(double* value) const {
  if (std::any_of(program_->begin(), program_->end(),
                  [](const Instr& in) { return in.kind == Kind::Variable; }))
    return false;
  std::vector<double> zeros(symbols_->size(), 0.0);
  try {
    const double v = evaluate(zeros);
    if (value) *value = v;
    return true;
  } catch (const DomainError&) {
    return false;
  }
}

Expr operator+(const Expr& a, const Expr& b) { return ExprAlgebra::binary(Kind::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return ExprAlgebra::binary(Kind::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return ExprAlgebra::binary(Kind::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return ExprAlgebra::binary(Kind::Div, a, b); }
Expr operator-(const Expr& a) { return ExprAlgebra::negate(a); }
Expr operator+(const Expr& a, double b) { return ExprAlgebra::with_constant(Kind::Add, a, b, false); }
Expr operator+(double a, const Expr& b) { return ExprAlgebra::with_constant(Kind::Add, b, a, true); }
Expr operator-(const Expr& a, double b) { return ExprAlgebra::with_constant(Kind::Sub, a, b, false); }
Expr operator-(double a, const Expr& b) { return ExprAlgebra::with_constant(Kind::Sub, b, a, true); }
Expr operator*(double a, const Expr& b) { return ExprAlgebra::with_constant(Kind::Mul, b, a, true); }
Expr operator*(const Expr& a, double b) { return ExprAlgebra::with_constant(Kind::Mul, a, b, false); }
Expr operator/(const Expr& a, double b) { return ExprAlgebra::with_constant(Kind::Div, a, b, false); }
Expr operator/(double a, const Expr& b) { return ExprAlgebra::with_constant(Kind::Div, b, a, true); }
Expr sqrt(const Expr& a) { return ExprAlgebra::unary(Kind::Sqrt, a); }
Expr exp(const Expr& a) { return ExprAlgebra::unary(Kind::Exp, a); }
Expr log(const Expr& a) { return ExprAlgebra::unary(Kind::Ln, a); }
Expr pow(const Expr& a, double p) { return ExprAlgebra::power(a, p); }

}  // namespace finsler
