#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace pbsrdd::cli {

/// A real function of one variable x written as text, e.g.
///   exp(-5 * dist(x, 0.75 * pi)^2)
/// Operators + - * / ^ (right associative, binds tighter than unary minus),
/// constants pi and L (domain length), functions exp log sqrt abs sin cos tanh
/// min max and dist(a, b), the periodic distance on [0, L).
/// Syntax errors and unknown names throw ModelError.
class Expression {
 public:
  Expression(std::string_view text, double length);

  double operator()(double x) const { return eval_(x); }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
  std::function<double(double)> eval_;
};

}  // namespace pbsrdd::cli
