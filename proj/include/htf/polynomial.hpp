#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace htf {

/// Exponent vector of a monomial x^alpha.
using Exponents = std::vector<std::uint8_t>;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sparse real polynomial in N variables with exact symbolic differentiation.
///
/// Terms are kept in canonical form: no zero coefficient is ever stored, and
/// iteration follows the lexicographic order of exponent vectors.
class Polynomial {
 public:
  using TermMap = std::map<Exponents, double>;

  explicit Polynomial(std::size_t dim = 0) : dim_(dim) {}

  static Polynomial constant(std::size_t dim, double c) {
    Polynomial p(dim);
    p.add_term(Exponents(dim, 0), c);
    return p;
  }

  static Polynomial variable(std::size_t dim, std::size_t i, double c = 1.0) {
    if (i >= dim) throw DimensionError("variable index out of range");
    Exponents e(dim, 0);
    e[i] = 1;
    Polynomial p(dim);
    p.add_term(std::move(e), c);
    return p;
  }

  static Polynomial monomial(Exponents e, double c = 1.0) {
    Polynomial p(e.size());
    p.add_term(std::move(e), c);
    return p;
  }

  std::size_t dim() const { return dim_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  int degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
    return d;
  }

  double coefficient(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? 0.0 : it->second;
  }

  void add_term(Exponents e, double c) {
    if (e.size() != dim_) throw DimensionError("monomial dimension mismatch");
    if (c == 0.0) return;
    auto [it, inserted] = terms_.emplace(std::move(e), c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  double operator()(std::span<const double> x) const {
    if (x.size() != dim_) throw DimensionError("evaluation point dimension mismatch");
    double sum = 0.0;
    for (const auto& [e, c] : terms_) {
      double t = c;
      for (std::size_t i = 0; i < dim_; ++i)
        for (int k = 0; k < e[i]; ++k) t *= x[i];
      sum += t;
    }
    return sum;
  }

  Polynomial derivative(std::size_t i) const {
    if (i >= dim_) throw DimensionError("derivative index out of range");
    Polynomial out(dim_);
    for (const auto& [e, c] : terms_) {
      if (e[i] == 0) continue;
      Exponents f = e;
      f[i] -= 1;
      out.add_term(std::move(f), c * e[i]);
    }
    return out;
  }

  /// Drops coefficients with magnitude not above `tol`.
  Polynomial pruned(double tol) const {
    Polynomial out(dim_);
    for (const auto& [e, c] : terms_)
      if (std::abs(c) > tol) out.terms_.emplace(e, c);
    return out;
  }

  double max_abs_coefficient() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
    return m;
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_dim(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check_dim(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  Polynomial& operator*=(double s) {
    if (s == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) { return a *= -1.0; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_dim(b);
    Polynomial out(a.dim_);
    Exponents e(a.dim_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        for (std::size_t i = 0; i < a.dim_; ++i) e[i] = static_cast<std::uint8_t>(ea[i] + eb[i]);
        out.add_term(e, ca * cb);
      }
    return out;
  }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.dim_ == b.dim_ && a.terms_ == b.terms_;
  }

  /// Canonical text form, highest total degree first, e.g. "2*x0^2 - x1 + 3".
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::vector<std::pair<Exponents, double>> order(terms_.begin(), terms_.end());
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
      const int da = total_degree(a.first), db = total_degree(b.first);
      if (da != db) return da > db;
      return a.first > b.first;
    });
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : order) {
      double mag = c;
      if (first) {
        if (c < 0) os << "-";
      } else {
        os << (c < 0 ? " - " : " + ");
      }
      mag = std::abs(c);
      first = false;
      const bool constant_term = total_degree(e) == 0;
      if (constant_term || mag != 1.0) {
        os << mag;
        if (!constant_term) os << "*";
      }
      bool first_var = true;
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (!first_var) os << "*";
        first_var = false;
        os << "x" << i;
        if (e[i] > 1) os << "^" << int(e[i]);
      }
    }
    return os.str();
  }

  static int total_degree(const Exponents& e) {
    int d = 0;
    for (auto v : e) d += v;
    return d;
  }

 private:
  void check_dim(const Polynomial& o) const {
    if (o.dim_ != dim_) throw DimensionError("polynomial dimension mismatch");
  }

  std::size_t dim_;
  TermMap terms_;
};

// Uniform scalar-algebra interface shared with Jet, used by the field templates.
inline Polynomial derivative(const Polynomial& p, std::size_t i) { return p.derivative(i); }
inline Polynomial zero_like(const Polynomial& p) { return Polynomial(p.dim()); }
inline Polynomial constant_like(const Polynomial& p, double c) { return Polynomial::constant(p.dim(), c); }
inline std::size_t ambient_dim(const Polynomial& p) { return p.dim(); }

/// All exponent vectors in `dim` variables with total degree <= max_degree,
/// ordered by degree, then reverse-lexicographically within a degree.
inline std::vector<Exponents> monomials_up_to(std::size_t dim, int max_degree) {
  std::vector<Exponents> out;
  Exponents cur(dim, 0);
  for (int d = 0; d <= max_degree; ++d) {
    // enumerate compositions of d into dim parts
    auto rec = [&](auto&& self, std::size_t pos, int remaining) -> void {
      if (pos + 1 == dim) {
        cur[pos] = static_cast<std::uint8_t>(remaining);
        out.push_back(cur);
        return;
      }
      for (int v = remaining; v >= 0; --v) {
        cur[pos] = static_cast<std::uint8_t>(v);
        self(self, pos + 1, remaining - v);
      }
      cur[pos] = 0;
    };
    if (dim == 0) {
      if (d == 0) out.push_back(cur);
      continue;
    }
    rec(rec, 0, d);
  }
  return out;
}

}  // namespace htf
