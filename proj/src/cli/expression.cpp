#include "pbsrdd/cli/expression.hpp"

#include <boost/fusion/include/adapt_struct.hpp>
#include <boost/spirit/home/x3.hpp>
#include <boost/spirit/home/x3/support/ast/variant.hpp>
#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include "pbsrdd/core/error.hpp"
#include "pbsrdd/core/mesh.hpp"

namespace pbsrdd::cli {

namespace ast {

namespace x3 = boost::spirit::x3;

struct signed_operand;
struct expression;
struct call;

struct operand : x3::variant<double, std::string, x3::forward_ast<signed_operand>, x3::forward_ast<expression>,
                             x3::forward_ast<call>> {
  using base_type::base_type;
  using base_type::operator=;
};

struct signed_operand {
  char sign = '+';
  operand value;
};

struct operation {
  char op = '+';
  operand value;
};

struct expression {
  operand first;
  std::vector<operation> rest;
};

struct call {
  std::string name;
  std::vector<expression> args;
};

}  // namespace ast

}  // namespace pbsrdd::cli

BOOST_FUSION_ADAPT_STRUCT(pbsrdd::cli::ast::signed_operand, sign, value)
BOOST_FUSION_ADAPT_STRUCT(pbsrdd::cli::ast::operation, op, value)
BOOST_FUSION_ADAPT_STRUCT(pbsrdd::cli::ast::expression, first, rest)
BOOST_FUSION_ADAPT_STRUCT(pbsrdd::cli::ast::call, name, args)

namespace pbsrdd::cli {

namespace grammar {

namespace x3 = boost::spirit::x3;

x3::rule<class expression_r, ast::expression> const expression = "expression";
x3::rule<class term_r, ast::expression> const term = "term";
x3::rule<class power_r, ast::expression> const power = "power";
x3::rule<class signed_r, ast::operand> const signed_factor = "signed_factor";
x3::rule<class negation_r, ast::signed_operand> const negation = "negation";
x3::rule<class primary_r, ast::operand> const primary = "primary";
x3::rule<class call_r, ast::call> const call = "call";
x3::rule<class name_r, std::string> const name = "name";

auto const name_def = x3::lexeme[(x3::alpha | x3::char_('_')) >> *(x3::alnum | x3::char_('_'))];
auto const call_def = name >> '(' >> (expression % ',') >> ')';
// real numbers only: a leading letter is always a name, so "inf" and "nan" stay names
auto const number = &(x3::digit | (x3::lit('.') >> x3::digit)) >> x3::double_;
auto const primary_def = number | call | name | ('(' >> expression >> ')');
auto const power_def = primary >> *(x3::char_('^') >> signed_factor);
auto const negation_def = x3::char_("-+") >> signed_factor;
auto const signed_factor_def = negation | power;
auto const term_def = signed_factor >> *(x3::char_("*/") >> signed_factor);
auto const expression_def = term >> *(x3::char_("+-") >> term);

BOOST_SPIRIT_DEFINE(expression, term, power, signed_factor, negation, primary, call, name)

}  // namespace grammar

namespace {

using Fn = std::function<double(double)>;

struct Compiler {
  double length;

  Fn operator()(double v) const {
    return [v](double) { return v; };
  }

  Fn operator()(const std::string& id) const {
    if (id == "x") return [](double x) { return x; };
    if (id == "pi") return (*this)(std::numbers::pi);
    if (id == "L") return (*this)(length);
    throw ModelError("unknown name '" + id + "' in expression");
  }

  Fn operator()(const ast::signed_operand& s) const {
    Fn f = boost::apply_visitor(*this, s.value);
    if (s.sign == '+') return f;
    return [f](double x) { return -f(x); };
  }

  Fn operator()(const ast::call& c) const {
    static const std::map<std::string, double (*)(double)> unary{
        {"exp", [](double v) { return std::exp(v); }},   {"log", [](double v) { return std::log(v); }},
        {"sqrt", [](double v) { return std::sqrt(v); }}, {"abs", [](double v) { return std::abs(v); }},
        {"sin", [](double v) { return std::sin(v); }},   {"cos", [](double v) { return std::cos(v); }},
        {"tanh", [](double v) { return std::tanh(v); }},
    };
    std::vector<Fn> args;
    for (const auto& a : c.args) args.push_back((*this)(a));
    auto arity = [&](std::size_t n) {
      if (args.size() != n)
        throw ModelError("function '" + c.name + "' takes " + std::to_string(n) + " argument(s)");
    };
    if (auto it = unary.find(c.name); it != unary.end()) {
      arity(1);
      auto g = it->second;
      return [g, f = args[0]](double x) { return g(f(x)); };
    }
    if (c.name == "min" || c.name == "max" || c.name == "dist") arity(2);
    if (c.name == "min") return [a = args[0], b = args[1]](double x) { return std::min(a(x), b(x)); };
    if (c.name == "max") return [a = args[0], b = args[1]](double x) { return std::max(a(x), b(x)); };
    if (c.name == "dist")
      return [a = args[0], b = args[1], l = length](double x) { return periodic_distance(a(x), b(x), l); };
    throw ModelError("unknown function '" + c.name + "' in expression");
  }

  Fn operator()(const ast::expression& e) const {
    // '^' is right associative; the grammar keeps it in its own level, so a
    // chain here is either all '^' or a mix of the other operators
    std::vector<Fn> parts{boost::apply_visitor(*this, e.first)};
    for (const auto& op : e.rest) parts.push_back(boost::apply_visitor(*this, op.value));
    if (!e.rest.empty() && e.rest.front().op == '^') {
      Fn acc = parts.back();
      for (std::size_t k = parts.size() - 1; k-- > 0;) acc = [a = parts[k], acc](double x) { return std::pow(a(x), acc(x)); };
      return acc;
    }
    Fn acc = parts.front();
    for (std::size_t k = 0; k < e.rest.size(); ++k) {
      Fn b = parts[k + 1];
      switch (e.rest[k].op) {
        case '+': acc = [acc, b](double x) { return acc(x) + b(x); }; break;
        case '-': acc = [acc, b](double x) { return acc(x) - b(x); }; break;
        case '*': acc = [acc, b](double x) { return acc(x) * b(x); }; break;
        default: acc = [acc, b](double x) { return acc(x) / b(x); }; break;
      }
    }
    return acc;
  }
};

}  // namespace

Expression::Expression(std::string_view text, double length) : text_(text) {
  ast::expression tree;
  auto first = text_.begin();
  bool ok = boost::spirit::x3::phrase_parse(first, text_.end(), grammar::expression, boost::spirit::x3::space, tree);
  if (!ok || first != text_.end())
    throw ModelError("cannot parse expression '" + text_ + "' near position " +
                     std::to_string(first - text_.begin()));
  eval_ = Compiler{length}(tree);
}

}  // namespace pbsrdd::cli
