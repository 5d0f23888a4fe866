#include "conullity/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <stdexcept>

#include "conullity/errors.hpp"
#include "conullity/jets.hpp"

namespace conullity {

namespace {

struct Node;
using NodeP = std::shared_ptr<const Node>;

struct Node {
  enum Kind { kNum, kVarX, kVarU, kAdd, kSub, kMul, kDiv, kPow, kNeg, kSin, kCos, kSinh, kCosh, kExp };
  Kind kind;
  double num = 0.0;  // kNum value, or the exponent for kPow
  NodeP a, b;
};

NodeP make(Node::Kind kind, NodeP a = nullptr, NodeP b = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodeP make_num(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::kNum;
  n->num = v;
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodeP parse() {
    NodeP e = sum();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing input");
    return e;
  }

 private:
  NodeP sum() {
    NodeP e = term();
    for (;;) {
      skip_ws();
      if (accept('+'))
        e = make(Node::kAdd, e, term());
      else if (accept('-'))
        e = make(Node::kSub, e, term());
      else
        return e;
    }
  }

  NodeP term() {
    NodeP e = unary();
    for (;;) {
      skip_ws();
      if (accept('*'))
        e = make(Node::kMul, e, unary());
      else if (accept('/'))
        e = make(Node::kDiv, e, unary());
      else
        return e;
    }
  }

  NodeP unary() {
    skip_ws();
    if (accept('-')) return make(Node::kNeg, unary());
    return power();
  }

  NodeP power() {
    NodeP base = atom();
    skip_ws();
    if (!accept('^')) return base;
    NodeP e = unary();  // right associative; -2 etc. allowed
    double p;
    if (!fold_constant(e, &p)) fail("exponent of ^ must be a constant");
    auto n = std::make_shared<Node>();
    n->kind = Node::kPow;
    n->num = p;
    n->a = base;
    return n;
  }

  NodeP atom() {
    skip_ws();
    if (accept('(')) {
      NodeP e = sum();
      skip_ws();
      if (!accept(')')) fail("expected )");
      return e;
    }
    if (pos_ < s_.size() && (std::isdigit((unsigned char)s_[pos_]) || s_[pos_] == '.')) {
      char* end = nullptr;
      const double v = std::strtod(s_.c_str() + pos_, &end);
      if (end == s_.c_str() + pos_) fail("bad number");
      pos_ = end - s_.c_str();
      return make_num(v);
    }
    if (pos_ < s_.size() && (std::isalpha((unsigned char)s_[pos_]) || s_[pos_] == '_')) {
      const size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum((unsigned char)s_[pos_]) || s_[pos_] == '_')) ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      if (id == "x") return make(Node::kVarX);
      if (id == "u") return make(Node::kVarU);
      if (id == "pi") return make_num(3.14159265358979323846);
      Node::Kind k;
      if (id == "sin")
        k = Node::kSin;
      else if (id == "cos")
        k = Node::kCos;
      else if (id == "sinh")
        k = Node::kSinh;
      else if (id == "cosh")
        k = Node::kCosh;
      else if (id == "exp")
        k = Node::kExp;
      else
        fail("unknown identifier '" + id + "'");
      skip_ws();
      if (!accept('(')) fail("expected ( after function name");
      NodeP arg = sum();
      skip_ws();
      if (!accept(')')) fail("expected )");
      return make(k, arg);
    }
    fail("unexpected character");
    return nullptr;
  }

  static bool fold_constant(const NodeP& n, double* out) {
    switch (n->kind) {
      case Node::kNum:
        *out = n->num;
        return true;
      case Node::kNeg: {
        double v;
        if (!fold_constant(n->a, &v)) return false;
        *out = -v;
        return true;
      }
      default:
        return false;
    }
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace((unsigned char)s_[pos_])) ++pos_;
  }
  bool accept(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) {
    throw ConfigError("expression error at offset " + std::to_string(pos_) + ": " + msg +
                      " in '" + s_ + "'");
  }

  const std::string& s_;
  size_t pos_ = 0;
};

bool mentions_u(const Node& n) {
  if (n.kind == Node::kVarU) return true;
  if (n.a && mentions_u(*n.a)) return true;
  if (n.b && mentions_u(*n.b)) return true;
  return false;
}

inline double pow_const(double a, double p) { return std::pow(a, p); }
template <class T, int N>
Jet<T, N> pow_const(const Jet<T, N>& a, double p) {
  return pow(a, p);
}

template <class T>
T eval(const Node& n, const T& x, const T& u) {
  using std::cos;
  using std::cosh;
  using std::exp;
  using std::sin;
  using std::sinh;
  switch (n.kind) {
    case Node::kNum:
      return T(n.num);
    case Node::kVarX:
      return x;
    case Node::kVarU:
      return u;
    case Node::kAdd:
      return eval(*n.a, x, u) + eval(*n.b, x, u);
    case Node::kSub:
      return eval(*n.a, x, u) - eval(*n.b, x, u);
    case Node::kMul:
      return eval(*n.a, x, u) * eval(*n.b, x, u);
    case Node::kDiv:
      return eval(*n.a, x, u) / eval(*n.b, x, u);
    case Node::kPow:
      return pow_const(eval(*n.a, x, u), n.num);
    case Node::kNeg:
      return -eval(*n.a, x, u);
    case Node::kSin:
      return sin(eval(*n.a, x, u));
    case Node::kCos:
      return cos(eval(*n.a, x, u));
    case Node::kSinh:
      return sinh(eval(*n.a, x, u));
    case Node::kCosh:
      return cosh(eval(*n.a, x, u));
    case Node::kExp:
      return exp(eval(*n.a, x, u));
  }
  throw Error("corrupt expression tree");
}

constexpr int kOrder1 = 6;
constexpr int kOrder2 = 4;

const double kFact[11] = {1, 1, 2, 6, 24, 120, 720, 5040, 40320, 362880, 3628800};

class ExprField1 final : public ScalarField1D {
 public:
  explicit ExprField1(NodeP root) : root_(std::move(root)) {}

  double deriv(int k, double x) const override {
    if (k < 0 || k > kOrder1) throw std::out_of_range("expression field: derivative order");
    using J = Jet<double, kOrder1>;
    const J r = eval(*root_, J::variable(x), J(0.0));
    return r.c[k] * kFact[k];
  }

  int max_order() const override { return kOrder1; }

 private:
  NodeP root_;
};

class ExprField2 final : public ScalarField2D {
 public:
  explicit ExprField2(NodeP root) : root_(std::move(root)) {}

  double partial(int a, int b, double x, double u) const override {
    if (a < 0 || b < 0 || a > kOrder2 || b > kOrder2)
      throw std::out_of_range("expression field: partial order");
    using J1 = Jet<double, kOrder2>;
    if (a == 0 && b == 0) return eval(*root_, x, u);
    if (a == 0) {
      const J1 r = eval(*root_, J1(x), J1::variable(u));
      return r.c[b] * kFact[b];
    }
    if (b == 0) {
      const J1 r = eval(*root_, J1::variable(x), J1(u));
      return r.c[a] * kFact[a];
    }
    using J2 = Jet<J1, kOrder2>;
    J2 xj;
    xj.c[0] = J1(x);
    xj.c[1] = J1(1.0);
    J2 uj;
    uj.c[0] = J1::variable(u);
    const J2 r = eval(*root_, xj, uj);
    return r.c[a].c[b] * (kFact[a] * kFact[b]);
  }

  int max_order() const override { return kOrder2; }

 private:
  NodeP root_;
};

}  // namespace

Field1 parse_field1(const std::string& text) {
  NodeP root = Parser(text).parse();
  if (mentions_u(*root)) throw ConfigError("expression for a 1D field mentions u: '" + text + "'");
  return std::make_shared<ExprField1>(std::move(root));
}

Field2 parse_field2(const std::string& text) {
  return std::make_shared<ExprField2>(Parser(text).parse());
}

}  // namespace conullity
