#include "bergdiag/function_expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "bergdiag/errors.hpp"

namespace bergdiag {

enum class NodeKind { Constant, Identity, Poly, Pole, Exponential, Sum, Product, Quotient, Power };

struct FunctionExpr::Node {
  NodeKind kind;
  Complex value{};                 // Constant: c; Pole: z0; Exponential: lambda
  int order = 0;                   // Pole order / Power exponent
  std::vector<Complex> poly;       // Poly coefficients, ascending
  std::vector<std::shared_ptr<const Node>> children;
};

namespace {

using Node = FunctionExpr::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_node(NodeKind kind) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  return n;
}

void collect_singularities(const Node& n, std::vector<Complex>& out) {
  if (n.kind == NodeKind::Pole) out.push_back(n.value);
  for (const auto& c : n.children) collect_singularities(*c, out);
}

Complex eval_value(const Node& n, Complex z, double tol) {
  switch (n.kind) {
    case NodeKind::Constant:
      return n.value;
    case NodeKind::Identity:
      return z;
    case NodeKind::Poly: {
      Complex acc{};
      for (size_t k = n.poly.size(); k-- > 0;) acc = acc * z + n.poly[k];
      return acc;
    }
    case NodeKind::Pole: {
      const Complex d = n.value - z;
      require(std::abs(d) > tol, errc::singularity_too_close,
              "evaluation point within tolerance of a pole");
      Complex p = 1.0;
      for (int k = 0; k < n.order; ++k) p *= d;
      return 1.0 / p;
    }
    case NodeKind::Exponential:
      return std::exp(n.value * z);
    case NodeKind::Sum: {
      Complex acc{};
      for (const auto& c : n.children) acc += eval_value(*c, z, tol);
      return acc;
    }
    case NodeKind::Product: {
      Complex acc = 1.0;
      for (const auto& c : n.children) acc *= eval_value(*c, z, tol);
      return acc;
    }
    case NodeKind::Quotient: {
      const Complex num = eval_value(*n.children[0], z, tol);
      const Complex den = eval_value(*n.children[1], z, tol);
      require(std::abs(den) > 1e-300, errc::division_by_zero_jet,
              "quotient denominator vanishes at evaluation point");
      return num / den;
    }
    case NodeKind::Power: {
      const Complex base = eval_value(*n.children[0], z, tol);
      Complex acc = 1.0;
      for (int k = 0; k < n.order; ++k) acc *= base;
      return acc;
    }
  }
  fail(errc::internal, "eval_value: unreachable");
}

Jet eval_jet(const Node& n, Complex center, int order, double scale, double tol) {
  Jet out(center, order);
  switch (n.kind) {
    case NodeKind::Constant:
      out.coeffs[0] = n.value;
      return out;
    case NodeKind::Identity:
      out.coeffs[0] = center;
      if (order >= 1) out.coeffs[1] = scale;
      return out;
    case NodeKind::Poly: {
      // Horner in jet arithmetic over the identity jet.
      Jet zjet(center, order);
      zjet.coeffs[0] = center;
      if (order >= 1) zjet.coeffs[1] = scale;
      Jet acc(center, order);
      for (size_t k = n.poly.size(); k-- > 0;) {
        acc = jets::multiply(acc, zjet);
        acc.coeffs[0] += n.poly[k];
      }
      return acc;
    }
    case NodeKind::Pole: {
      const Complex d = n.value - center;
      require(std::abs(d) > tol, errc::singularity_too_close,
              "jet center within tolerance of a pole");
      // 1/(z0-z)^m around center: coeffs[n] = C(m-1+n, n) / d^{m+n},
      // accumulated incrementally so scaled coefficients stay finite.
      Complex g = 1.0;
      for (int k = 0; k < n.order; ++k) g /= d;
      for (int k = 0; k <= order; ++k) {
        out.coeffs[static_cast<size_t>(k)] = g;
        g *= scale * static_cast<double>(n.order + k) / (static_cast<double>(k + 1) * d);
      }
      return out;
    }
    case NodeKind::Exponential: {
      Complex g = std::exp(n.value * center);
      for (int k = 0; k <= order; ++k) {
        out.coeffs[static_cast<size_t>(k)] = g;
        g *= n.value * scale / static_cast<double>(k + 1);
      }
      return out;
    }
    case NodeKind::Sum: {
      for (const auto& c : n.children) out = jets::add(out, eval_jet(*c, center, order, scale, tol));
      return out;
    }
    case NodeKind::Product: {
      out.coeffs[0] = 1.0;
      for (const auto& c : n.children) out = jets::multiply(out, eval_jet(*c, center, order, scale, tol));
      return out;
    }
    case NodeKind::Quotient:
      return jets::divide(eval_jet(*n.children[0], center, order, scale, tol),
                          eval_jet(*n.children[1], center, order, scale, tol));
    case NodeKind::Power:
      return jets::power(eval_jet(*n.children[0], center, order, scale, tol), n.order);
  }
  fail(errc::internal, "eval_jet: unreachable");
}

// ---------------------------------------------------------------- parsing

bool parse_complex_literal(const std::string& tok, Complex& out) {
  if (tok.empty()) return false;
  // Split an optional trailing imaginary part: find the sign that separates
  // real and imaginary terms (not leading, not an exponent sign).
  const bool has_i = tok.back() == 'i' || tok.back() == 'I';
  auto parse_real = [](const std::string& s, double& v) {
    if (s.empty()) return false;
    size_t pos = 0;
    try {
      v = std::stod(s, &pos);
    } catch (...) {
      return false;
    }
    return pos == s.size();
  };
  if (!has_i) {
    double re;
    if (!parse_real(tok, re)) return false;
    out = Complex(re, 0.0);
    return true;
  }
  std::string body = tok.substr(0, tok.size() - 1);
  // Locate split point of "re±im" scanning from the right.
  size_t split = std::string::npos;
  for (size_t k = body.size(); k-- > 1;) {
    const char c = body[k];
    if ((c == '+' || c == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto parse_imag_text = [&](std::string s, double& v) {
    if (s.empty() || s == "+") {
      v = 1.0;
      return true;
    }
    if (s == "-") {
      v = -1.0;
      return true;
    }
    return parse_real(s, v);
  };
  if (split == std::string::npos) {
    double im;
    if (!parse_imag_text(body, im)) return false;
    out = Complex(0.0, im);
    return true;
  }
  double re, im;
  if (!parse_real(body.substr(0, split), re)) return false;
  if (!parse_imag_text(body.substr(split), im)) return false;
  out = Complex(re, im);
  return true;
}

struct Tokenizer {
  std::vector<std::string> tokens;
  size_t pos = 0;

  explicit Tokenizer(const std::string& text) {
    std::string cur;
    auto flush = [&] {
      if (!cur.empty()) {
        tokens.push_back(cur);
        cur.clear();
      }
    };
    for (char c : text) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        flush();
      } else if (c == '(' || c == ')') {
        flush();
        tokens.push_back(std::string(1, c));
      } else {
        cur.push_back(c);
      }
    }
    flush();
  }

  bool done() const { return pos >= tokens.size(); }
  const std::string& peek() const {
    require(!done(), errc::parse_error, "function syntax: unexpected end of input");
    return tokens[pos];
  }
  std::string next() {
    require(!done(), errc::parse_error, "function syntax: unexpected end of input");
    return tokens[pos++];
  }
};

FunctionExpr parse_expr(Tokenizer& tz);

// An argument is either a parenthesized expression or an atom (z / literal).
FunctionExpr parse_arg(Tokenizer& tz) {
  const std::string& t = tz.peek();
  if (t == "(") {
    tz.next();
    FunctionExpr e = parse_expr(tz);
    require(!tz.done() && tz.peek() == ")", errc::parse_error,
            "function syntax: expected ')'");
    tz.next();
    return e;
  }
  std::string tok = tz.next();
  if (tok == "z") return FunctionExpr::identity();
  Complex c;
  require(parse_complex_literal(tok, c), errc::parse_error,
          "function syntax: expected atom, got '" + tok + "'");
  return FunctionExpr::constant(c);
}

Complex parse_complex_token(Tokenizer& tz) {
  std::string tok = tz.next();
  Complex c;
  require(parse_complex_literal(tok, c), errc::parse_error,
          "function syntax: expected complex literal, got '" + tok + "'");
  return c;
}

int parse_int_token(Tokenizer& tz) {
  std::string tok = tz.next();
  try {
    size_t pos = 0;
    int v = std::stoi(tok, &pos);
    require(pos == tok.size(), errc::parse_error, "function syntax: bad integer '" + tok + "'");
    return v;
  } catch (const Error&) {
    throw;
  } catch (...) {
    fail(errc::parse_error, "function syntax: bad integer '" + tok + "'");
  }
}

bool at_arg_end(const Tokenizer& tz) { return tz.done() || tz.tokens[tz.pos] == ")"; }

FunctionExpr parse_expr(Tokenizer& tz) {
  const std::string& t = tz.peek();
  if (t == "(") return parse_arg(tz);
  if (t == "z") {
    tz.next();
    return FunctionExpr::identity();
  }
  if (t == "const") {
    tz.next();
    return FunctionExpr::constant(parse_complex_token(tz));
  }
  if (t == "poly") {
    tz.next();
    std::vector<Complex> coeffs;
    while (!at_arg_end(tz)) coeffs.push_back(parse_complex_token(tz));
    require(!coeffs.empty(), errc::parse_error, "function syntax: poly needs coefficients");
    return FunctionExpr::poly(std::move(coeffs));
  }
  if (t == "pole") {
    tz.next();
    Complex z0 = parse_complex_token(tz);
    int order = parse_int_token(tz);
    return FunctionExpr::pole(z0, order);
  }
  if (t == "exp") {
    tz.next();
    return FunctionExpr::exponential(parse_complex_token(tz));
  }
  if (t == "sum" || t == "prod") {
    const bool is_sum = t == "sum";
    tz.next();
    std::vector<FunctionExpr> args;
    while (!at_arg_end(tz)) args.push_back(parse_arg(tz));
    require(args.size() >= 2, errc::parse_error,
            "function syntax: sum/prod need at least two arguments");
    return is_sum ? FunctionExpr::sum(std::move(args)) : FunctionExpr::product(std::move(args));
  }
  if (t == "quot") {
    tz.next();
    FunctionExpr num = parse_arg(tz);
    FunctionExpr den = parse_arg(tz);
    return FunctionExpr::quotient(std::move(num), std::move(den));
  }
  if (t == "pow") {
    tz.next();
    FunctionExpr base = parse_arg(tz);
    int e = parse_int_token(tz);
    return FunctionExpr::power(std::move(base), e);
  }
  // Bare complex literal.
  return parse_arg(tz);
}

std::string complex_to_string(Complex c) {
  std::ostringstream os;
  os.precision(17);
  if (c.imag() == 0.0) {
    os << c.real();
  } else if (c.real() == 0.0) {
    os << c.imag() << "i";
  } else {
    os << c.real();
    if (c.imag() >= 0.0) os << "+";
    os << c.imag() << "i";
  }
  return os.str();
}

void node_to_string(const Node& n, std::ostringstream& os, bool parenthesize) {
  auto open = [&] { if (parenthesize) os << "("; };
  auto close = [&] { if (parenthesize) os << ")"; };
  switch (n.kind) {
    case NodeKind::Constant:
      os << complex_to_string(n.value);
      return;
    case NodeKind::Identity:
      os << "z";
      return;
    case NodeKind::Poly:
      open();
      os << "poly";
      for (const auto& c : n.poly) os << " " << complex_to_string(c);
      close();
      return;
    case NodeKind::Pole:
      open();
      os << "pole " << complex_to_string(n.value) << " " << n.order;
      close();
      return;
    case NodeKind::Exponential:
      open();
      os << "exp " << complex_to_string(n.value);
      close();
      return;
    case NodeKind::Sum:
    case NodeKind::Product:
      open();
      os << (n.kind == NodeKind::Sum ? "sum" : "prod");
      for (const auto& c : n.children) {
        os << " ";
        node_to_string(*c, os, true);
      }
      close();
      return;
    case NodeKind::Quotient:
      open();
      os << "quot ";
      node_to_string(*n.children[0], os, true);
      os << " ";
      node_to_string(*n.children[1], os, true);
      close();
      return;
    case NodeKind::Power:
      open();
      os << "pow ";
      node_to_string(*n.children[0], os, true);
      os << " " << n.order;
      close();
      return;
  }
}

}  // namespace

FunctionExpr FunctionExpr::constant(Complex c) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Constant;
  n->value = c;
  return FunctionExpr(n);
}

FunctionExpr FunctionExpr::identity() { return FunctionExpr(make_node(NodeKind::Identity)); }

FunctionExpr FunctionExpr::poly(std::vector<Complex> coeffs) {
  require(!coeffs.empty(), errc::invalid_argument, "poly: empty coefficient list");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Poly;
  n->poly = std::move(coeffs);
  return FunctionExpr(n);
}

FunctionExpr FunctionExpr::pole(Complex z0, int order) {
  require(order >= 1, errc::invalid_argument, "pole: order must be >= 1");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Pole;
  n->value = z0;
  n->order = order;
  return FunctionExpr(n);
}

FunctionExpr FunctionExpr::exponential(Complex lambda) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Exponential;
  n->value = lambda;
  return FunctionExpr(n);
}

FunctionExpr FunctionExpr::sum(std::vector<FunctionExpr> terms) {
  require(terms.size() >= 2, errc::invalid_argument, "sum: needs at least two terms");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Sum;
  for (auto& t : terms) n->children.push_back(t.node_);
  return FunctionExpr(n);
}

FunctionExpr FunctionExpr::product(std::vector<FunctionExpr> factors) {
  require(factors.size() >= 2, errc::invalid_argument, "product: needs at least two factors");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Product;
  for (auto& t : factors) n->children.push_back(t.node_);
  return FunctionExpr(n);
}

FunctionExpr FunctionExpr::quotient(FunctionExpr num, FunctionExpr den) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Quotient;
  n->children = {num.node_, den.node_};
  return FunctionExpr(n);
}

FunctionExpr FunctionExpr::power(FunctionExpr base, int exponent) {
  require(exponent >= 0, errc::invalid_argument, "power: exponent must be >= 0");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Power;
  n->order = exponent;
  n->children = {base.node_};
  return FunctionExpr(n);
}

FunctionExpr FunctionExpr::parse(const std::string& text) {
  Tokenizer tz(text);
  require(!tz.done(), errc::parse_error, "function syntax: empty input");
  FunctionExpr e = parse_expr(tz);
  require(tz.done(), errc::parse_error, "function syntax: trailing tokens");
  return e;
}

std::string FunctionExpr::to_string() const {
  std::ostringstream os;
  node_to_string(*node_, os, false);
  return os.str();
}

Complex FunctionExpr::value(Complex z, double tol) const { return eval_value(*node_, z, tol); }

Jet FunctionExpr::jet(Complex center, int order, double scale, double tol) const {
  require(order >= 0, errc::invalid_argument, "jet: order must be >= 0");
  return eval_jet(*node_, center, order, scale, tol);
}

Complex FunctionExpr::derivative(Complex z, int n, double tol) const {
  require(n >= 0, errc::invalid_argument, "derivative: n must be >= 0");
  Jet j = jet(z, n, 1.0, tol);
  double fact = 1.0;
  for (int k = 2; k <= n; ++k) fact *= k;
  return j.coeffs[static_cast<size_t>(n)] * fact;
}

std::vector<Complex> FunctionExpr::singularities() const {
  std::vector<Complex> out;
  collect_singularities(*node_, out);
  return out;
}

}  // namespace bergdiag
