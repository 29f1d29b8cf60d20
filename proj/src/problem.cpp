#include "cgn/problem.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cgn {

namespace {

// x^p by binary exponentiation; 0^0 == 1 (constant-term convention).
double ipow(double x, unsigned p) {
  double r = 1.0;
  while (p != 0) {
    if (p & 1u) r *= x;
    x *= x;
    p >>= 1u;
  }
  return r;
}

}  // namespace

PolynomialMap::PolynomialMap(std::size_t n, std::size_t m,
                             std::vector<std::vector<Term>> components)
    : n_(n), m_(m), components_(std::move(components)) {
  if (n_ == 0) throw std::invalid_argument("polynomial map: n must be >= 1");
  if (m_ == 0) throw std::invalid_argument("polynomial map: m must be >= 1");
  if (components_.size() != m_)
    throw std::invalid_argument("polynomial map: expected " +
                                std::to_string(m_) + " component term lists, got " +
                                std::to_string(components_.size()));
  for (const auto& comp : components_) {
    for (const Term& t : comp) {
      if (!std::isfinite(t.coeff))
        throw std::invalid_argument("polynomial map: non-finite coefficient");
      if (t.powers.size() != n_)
        throw std::invalid_argument(
            "polynomial map: term has " + std::to_string(t.powers.size()) +
            " exponents, expected " + std::to_string(n_));
    }
  }
}

void PolynomialMap::check_point(const Vector& x) const {
  if (x.size() != n_)
    throw std::invalid_argument("polynomial map: point has dimension " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(n_));
  for (double v : x)
    if (!std::isfinite(v))
      throw std::invalid_argument("polynomial map: non-finite point");
}

Vector PolynomialMap::eval(const Vector& x) const {
  check_point(x);
  Vector out(m_, 0.0);
  for (std::size_t i = 0; i < m_; ++i) {
    double acc = 0.0;
    for (const Term& t : components_[i]) {
      double prod = t.coeff;
      for (std::size_t j = 0; j < n_; ++j) prod *= ipow(x[j], t.powers[j]);
      acc += prod;
    }
    out[i] = acc;
  }
  return out;
}

Matrix PolynomialMap::jacobian(const Vector& x) const {
  check_point(x);
  Matrix J(m_, n_);
  for (std::size_t i = 0; i < m_; ++i) {
    for (const Term& t : components_[i]) {
      for (std::size_t j = 0; j < n_; ++j) {
        unsigned pj = t.powers[j];
        if (pj == 0) continue;
        double prod = t.coeff * static_cast<double>(pj) * ipow(x[j], pj - 1);
        for (std::size_t l = 0; l < n_; ++l) {
          if (l == j) continue;
          prod *= ipow(x[l], t.powers[l]);
        }
        J(i, j) += prod;
      }
    }
  }
  return J;
}

}  // namespace cgn
