#include "riemann_kit/expr.hpp"

#include <cctype>
#include <cmath>

namespace riemann_kit {

namespace {
enum class Op { Num, Var, Add, Sub, Mul, Div, Pow, Neg, Fun };
}

struct Expr::Node {
  Op op = Op::Num;
  double value = 0.0;
  bool imaginary = false;  // the constant i
  std::string name;        // variable or function name
  NodePtr a, b;
};

namespace {

using Node = Expr::Node;
using NodePtr = Expr::NodePtr;

NodePtr num(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Num;
  n->value = v;
  return n;
}

NodePtr make(Op op, NodePtr a, NodePtr b = nullptr, const std::string& name = {}) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  n->name = name;
  return n;
}

bool is_zero(const NodePtr& n) { return n->op == Op::Num && n->value == 0.0 && !n->imaginary; }
bool is_one(const NodePtr& n) { return n->op == Op::Num && n->value == 1.0 && !n->imaginary; }

NodePtr add(NodePtr a, NodePtr b) {
  if (is_zero(a)) return b;
  if (is_zero(b)) return a;
  return make(Op::Add, a, b);
}
NodePtr sub(NodePtr a, NodePtr b) {
  if (is_zero(b)) return a;
  return make(Op::Sub, a, b);
}
NodePtr mul(NodePtr a, NodePtr b) {
  if (is_zero(a) || is_zero(b)) return num(0);
  if (is_one(a)) return b;
  if (is_one(b)) return a;
  return make(Op::Mul, a, b);
}
NodePtr div(NodePtr a, NodePtr b) {
  if (is_zero(a)) return num(0);
  if (is_one(b)) return a;
  return make(Op::Div, a, b);
}
NodePtr fun(const std::string& name, NodePtr a) { return make(Op::Fun, a, nullptr, name); }

const char* kFunctions[] = {"sqrt", "exp", "log",  "sin",  "cos",  "tan",  "sinh",
                            "cosh", "tanh", "asin", "acos", "atan", "sech", "abs"};

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}
  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError("expression parse error at position " + std::to_string(pos_) + ": " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  NodePtr expr() {
    NodePtr e = term();
    for (;;) {
      if (eat('+'))
        e = add(e, term());
      else if (eat('-'))
        e = sub(e, term());
      else
        return e;
    }
  }
  NodePtr term() {
    NodePtr e = unary();
    for (;;) {
      if (eat('*'))
        e = mul(e, unary());
      else if (eat('/'))
        e = div(e, unary());
      else
        return e;
    }
  }
  NodePtr unary() {
    if (eat('-')) return make(Op::Neg, unary());
    if (eat('+')) return unary();
    return power();
  }
  NodePtr power() {
    NodePtr base = atom();
    if (eat('^')) return make(Op::Pow, base, unary());  // right-associative
    return base;
  }
  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!eat(')')) fail("missing ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t end = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &end);
      } catch (...) {
        fail("bad number");
      }
      pos_ += end;
      return num(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string name = s_.substr(start, pos_ - start);
      skip();
      if (pos_ < s_.size() && s_[pos_] == '(') {
        bool known = false;
        for (const char* f : kFunctions) known |= name == f;
        if (!known) fail("unknown function '" + name + "'");
        ++pos_;
        NodePtr arg = expr();
        if (!eat(')')) fail("missing ')' after function argument");
        return fun(name, arg);
      }
      if (name == "pi") return num(M_PI);
      if (name == "e") return num(M_E);
      if (name == "i") {
        auto n = std::make_shared<Node>();
        n->op = Op::Num;
        n->value = 1.0;
        n->imaginary = true;
        return n;
      }
      auto n = std::make_shared<Node>();
      n->op = Op::Var;
      n->name = name;
      return n;
    }
    fail(std::string("unexpected character '") + c + "'");
  }
  const std::string& s_;
  size_t pos_ = 0;
};

template <typename S>
S apply_fun(const std::string& name, const S& x) {
  if (name == "sqrt") return std::sqrt(x);
  if (name == "exp") return std::exp(x);
  if (name == "log") return std::log(x);
  if (name == "sin") return std::sin(x);
  if (name == "cos") return std::cos(x);
  if (name == "tan") return std::tan(x);
  if (name == "sinh") return std::sinh(x);
  if (name == "cosh") return std::cosh(x);
  if (name == "tanh") return std::tanh(x);
  if (name == "asin") return std::asin(x);
  if (name == "acos") return std::acos(x);
  if (name == "atan") return std::atan(x);
  if (name == "sech") return S(1.0) / std::cosh(x);
  if (name == "abs") return S(std::abs(x));
  throw InputError("unknown function: " + name);
}

template <typename S, typename VarMap>
S eval_node(const Node& n, const VarMap& vars) {
  switch (n.op) {
    case Op::Num:
      if (n.imaginary) {
        if constexpr (std::is_same_v<S, Complex>)
          return Complex(0.0, n.value);
        else
          throw EvaluationError("imaginary constant in a real expression");
      }
      return S(n.value);
    case Op::Var: {
      auto it = vars.find(n.name);
      if (it == vars.end()) throw EvaluationError("unbound variable: " + n.name);
      return it->second;
    }
    case Op::Add:
      return eval_node<S>(*n.a, vars) + eval_node<S>(*n.b, vars);
    case Op::Sub:
      return eval_node<S>(*n.a, vars) - eval_node<S>(*n.b, vars);
    case Op::Mul:
      return eval_node<S>(*n.a, vars) * eval_node<S>(*n.b, vars);
    case Op::Div:
      return eval_node<S>(*n.a, vars) / eval_node<S>(*n.b, vars);
    case Op::Pow:
      return std::pow(eval_node<S>(*n.a, vars), eval_node<S>(*n.b, vars));
    case Op::Neg:
      return -eval_node<S>(*n.a, vars);
    case Op::Fun:
      return apply_fun<S>(n.name, eval_node<S>(*n.a, vars));
  }
  throw EvaluationError("corrupt expression node");
}

NodePtr diff_node(const NodePtr& n, const std::string& var);

NodePtr diff_fun(const Node& n, const std::string& var) {
  NodePtr a = n.a, da = diff_node(n.a, var);
  const std::string& f = n.name;
  if (f == "sqrt") return div(da, mul(num(2), fun("sqrt", a)));
  if (f == "exp") return mul(da, fun("exp", a));
  if (f == "log") return div(da, a);
  if (f == "sin") return mul(da, fun("cos", a));
  if (f == "cos") return make(Op::Neg, mul(da, fun("sin", a)));
  if (f == "tan") return div(da, make(Op::Pow, fun("cos", a), num(2)));
  if (f == "sinh") return mul(da, fun("cosh", a));
  if (f == "cosh") return mul(da, fun("sinh", a));
  if (f == "tanh") return div(da, make(Op::Pow, fun("cosh", a), num(2)));
  if (f == "asin") return div(da, fun("sqrt", sub(num(1), make(Op::Pow, a, num(2)))));
  if (f == "acos")
    return make(Op::Neg, div(da, fun("sqrt", sub(num(1), make(Op::Pow, a, num(2))))));
  if (f == "atan") return div(da, add(num(1), make(Op::Pow, a, num(2))));
  if (f == "sech") return make(Op::Neg, mul(da, mul(fun("sech", a), fun("tanh", a))));
  throw InputError("no derivative rule for function: " + f);
}

NodePtr diff_node(const NodePtr& n, const std::string& var) {
  switch (n->op) {
    case Op::Num:
      return num(0);
    case Op::Var:
      return num(n->name == var ? 1 : 0);
    case Op::Add:
      return add(diff_node(n->a, var), diff_node(n->b, var));
    case Op::Sub:
      return sub(diff_node(n->a, var), diff_node(n->b, var));
    case Op::Mul:
      return add(mul(diff_node(n->a, var), n->b), mul(n->a, diff_node(n->b, var)));
    case Op::Div:
      return div(sub(mul(diff_node(n->a, var), n->b), mul(n->a, diff_node(n->b, var))),
                 make(Op::Pow, n->b, num(2)));
    case Op::Pow: {
      // general rule via a^b = exp(b log a); constant exponent simplified
      if (n->b->op == Op::Num && !n->b->imaginary) {
        double k = n->b->value;
        return mul(mul(num(k), make(Op::Pow, n->a, num(k - 1))), diff_node(n->a, var));
      }
      NodePtr lhs = mul(diff_node(n->b, var), fun("log", n->a));
      NodePtr rhs = mul(n->b, div(diff_node(n->a, var), n->a));
      return mul(make(Op::Pow, n->a, n->b), add(lhs, rhs));
    }
    case Op::Neg:
      return make(Op::Neg, diff_node(n->a, var));
    case Op::Fun:
      return diff_fun(*n, var);
  }
  throw InputError("corrupt expression node");
}

std::string str_node(const Node& n) {
  switch (n.op) {
    case Op::Num:
      return n.imaginary ? "i" : std::to_string(n.value);
    case Op::Var:
      return n.name;
    case Op::Add:
      return "(" + str_node(*n.a) + "+" + str_node(*n.b) + ")";
    case Op::Sub:
      return "(" + str_node(*n.a) + "-" + str_node(*n.b) + ")";
    case Op::Mul:
      return "(" + str_node(*n.a) + "*" + str_node(*n.b) + ")";
    case Op::Div:
      return "(" + str_node(*n.a) + "/" + str_node(*n.b) + ")";
    case Op::Pow:
      return "(" + str_node(*n.a) + "^" + str_node(*n.b) + ")";
    case Op::Neg:
      return "(-" + str_node(*n.a) + ")";
    case Op::Fun:
      return n.name + "(" + str_node(*n.a) + ")";
  }
  return "?";
}

}  // namespace

Expr Expr::parse(const std::string& text) { return Expr(Parser(text).parse()); }

double Expr::eval(const std::map<std::string, double>& vars) const {
  if (!root_) throw EvaluationError("empty expression");
  return eval_node<double>(*root_, vars);
}

Complex Expr::eval_complex(const std::map<std::string, Complex>& vars) const {
  if (!root_) throw EvaluationError("empty expression");
  return eval_node<Complex>(*root_, vars);
}

Expr Expr::derivative(const std::string& var) const {
  if (!root_) throw EvaluationError("empty expression");
  return Expr(diff_node(root_, var));
}

std::string Expr::str() const { return root_ ? str_node(*root_) : ""; }

}  // namespace riemann_kit
