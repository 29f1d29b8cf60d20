#pragma once

#include <cstddef>
#include <vector>

#include "cgn/lp_core.hpp"

namespace cgn {

// One monomial: coeff * prod_j x_j^powers[j].  powers has one entry per input
// variable; an exponent of zero means the variable does not appear.
struct Term {
  double coeff = 0.0;
  std::vector<unsigned> powers;
};

// A polynomial map F: R^n -> R^m given term-wise, with an exact Jacobian.
class PolynomialMap {
 public:
  PolynomialMap(std::size_t n, std::size_t m,
                std::vector<std::vector<Term>> components);

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  const std::vector<std::vector<Term>>& components() const {
    return components_;
  }

  Vector eval(const Vector& x) const;
  Matrix jacobian(const Vector& x) const;

 private:
  void check_point(const Vector& x) const;

  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::vector<std::vector<Term>> components_;  // components_[i] = terms of F_i
};

}  // namespace cgn
