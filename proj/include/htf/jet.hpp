#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "htf/polynomial.hpp"

namespace htf {

/// Monomial bookkeeping for truncated Taylor expansions in N variables up to
/// total order K. Built once per (N, K) and shared; immutable afterwards.
class JetSpace {
 public:
  struct Product {
    int lhs, rhs, out;
  };
  struct DerivativeEntry {
    int src, dst;
    double factor;
  };

  JetSpace(std::size_t dim, int max_order) : dim_(dim), max_order_(max_order) {
    monomials_ = monomials_up_to(dim, max_order);
    offsets_.assign(max_order + 2, 0);
    for (const auto& e : monomials_) offsets_[Polynomial::total_degree(e) + 1]++;
    for (int d = 0; d <= max_order; ++d) offsets_[d + 1] += offsets_[d];
    for (std::size_t i = 0; i < monomials_.size(); ++i) index_.emplace(monomials_[i], static_cast<int>(i));

    // Products grouped by the degree of the result so truncation is a prefix.
    std::vector<std::vector<Product>> by_degree(max_order + 1);
    Exponents e(dim);
    for (std::size_t i = 0; i < monomials_.size(); ++i) {
      const int di = Polynomial::total_degree(monomials_[i]);
      for (std::size_t j = 0; j < monomials_.size(); ++j) {
        const int dj = Polynomial::total_degree(monomials_[j]);
        if (di + dj > max_order) continue;
        for (std::size_t v = 0; v < dim; ++v) e[v] = static_cast<std::uint8_t>(monomials_[i][v] + monomials_[j][v]);
        by_degree[di + dj].push_back({int(i), int(j), index_.at(e)});
      }
    }
    product_offsets_.assign(max_order + 2, 0);
    for (int d = 0; d <= max_order; ++d) {
      product_offsets_[d + 1] = product_offsets_[d] + by_degree[d].size();
      products_.insert(products_.end(), by_degree[d].begin(), by_degree[d].end());
    }

    derivatives_.resize(dim);
    for (std::size_t v = 0; v < dim; ++v) {
      for (std::size_t i = 0; i < monomials_.size(); ++i) {
        if (monomials_[i][v] == 0) continue;
        Exponents f = monomials_[i];
        f[v] -= 1;
        derivatives_[v].push_back({int(i), index_.at(f), double(monomials_[i][v])});
      }
    }
  }

  std::size_t dim() const { return dim_; }
  int max_order() const { return max_order_; }
  /// Number of coefficients of a jet valid to `order`.
  std::size_t size(int order) const { return offsets_[order + 1]; }
  const std::vector<Exponents>& monomials() const { return monomials_; }
  int index_of(const Exponents& e) const { return index_.at(e); }
  std::span<const Product> products(int order) const {
    return {products_.data(), product_offsets_[order + 1]};
  }
  const std::vector<DerivativeEntry>& derivative_table(std::size_t v) const { return derivatives_[v]; }

 private:
  std::size_t dim_;
  int max_order_;
  std::vector<Exponents> monomials_;
  std::vector<std::size_t> offsets_;
  std::map<Exponents, int> index_;
  std::vector<Product> products_;
  std::vector<std::size_t> product_offsets_;
  std::vector<std::vector<DerivativeEntry>> derivatives_;
};

inline std::shared_ptr<const JetSpace> jet_space(std::size_t dim, int max_order) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, int>, std::shared_ptr<const JetSpace>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{dim, max_order}];
  if (!slot) slot = std::make_shared<const JetSpace>(dim, max_order);
  return slot;
}

class JetOrderError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Truncated Taylor expansion of a function around a base point, in the local
/// variable u = x - p. A jet of order k carries exact derivatives up to order k;
/// arithmetic keeps the minimum order of its operands and differentiation
/// lowers the order by one, so every value read at order >= 0 is exact.
class Jet {
 public:
  Jet() = default;
  Jet(std::shared_ptr<const JetSpace> space, int order)
      : space_(std::move(space)), order_(order), c_(space_->size(order), 0.0) {}

  static Jet constant(std::shared_ptr<const JetSpace> space, double v) {
    Jet j(std::move(space), 0);
    j.order_ = j.space_->max_order();
    j.c_.assign(j.space_->size(j.order_), 0.0);
    j.c_[0] = v;
    return j;
  }

  /// Taylor jet of the coordinate function x_i around base point p.
  static Jet coordinate(std::shared_ptr<const JetSpace> space, std::size_t i, double base) {
    Jet j = constant(space, base);
    if (space->max_order() == 0) return j;
    Exponents e(space->dim(), 0);
    e[i] = 1;
    j.c_[space->index_of(e)] = 1.0;
    return j;
  }

  const JetSpace& space() const { return *space_; }
  const std::shared_ptr<const JetSpace>& space_ptr() const { return space_; }
  int order() const { return order_; }
  double value() const { return c_[0]; }
  const std::vector<double>& coefficients() const { return c_; }
  double coefficient(const Exponents& e) const {
    const int idx = space_->index_of(e);
    if (static_cast<std::size_t>(idx) >= c_.size()) throw JetOrderError("coefficient beyond jet order");
    return c_[idx];
  }

  Jet truncated(int order) const {
    if (order > order_) throw JetOrderError("cannot raise jet order");
    Jet out = *this;
    out.order_ = order;
    out.c_.resize(space_->size(order));
    return out;
  }

  Jet derivative(std::size_t v) const {
    if (order_ <= 0) throw JetOrderError("jet order exhausted by differentiation");
    Jet out(space_, order_ - 1);
    const std::size_t limit = out.c_.size();
    for (const auto& d : space_->derivative_table(v))
      if (static_cast<std::size_t>(d.dst) < limit) out.c_[d.dst] += d.factor * c_[d.src];
    return out;
  }

  Jet& operator+=(const Jet& o) {
    reduce_to(o.order_);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    reduce_to(o.order_);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Jet& operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) { return a *= -1.0; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    const int order = std::min(a.order_, b.order_);
    if (a.is_constant()) return b.truncated(order) *= a.c_[0];
    if (b.is_constant()) return a.truncated(order) *= b.c_[0];
    Jet out(a.space_, order);
    const double* ca = a.c_.data();
    const double* cb = b.c_.data();
    double* co = out.c_.data();
    for (const auto& p : a.space_->products(order)) co[p.out] += ca[p.lhs] * cb[p.rhs];
    return out;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }

  bool is_constant() const {
    for (std::size_t i = 1; i < c_.size(); ++i)
      if (c_[i] != 0.0) return false;
    return true;
  }

 private:
  void reduce_to(int order) {
    if (order < order_) {
      order_ = order;
      c_.resize(space_->size(order));
    }
  }

  std::shared_ptr<const JetSpace> space_;
  int order_ = 0;
  std::vector<double> c_;
};

inline Jet derivative(const Jet& j, std::size_t i) { return j.derivative(i); }

/// acc += a * b, skipping the product when a is a constant.
inline void add_product(Jet& acc, const Jet& a, const Jet& b) {
  if (a.is_constant()) {
    if (a.value() != 0.0) acc += a.value() * b;
    else acc = acc.truncated(std::min({acc.order(), a.order(), b.order()}));
    return;
  }
  acc += a * b;
}
inline void add_product(Polynomial& acc, const Polynomial& a, const Polynomial& b) { acc += a * b; }
inline Jet zero_like(const Jet& j) { return Jet::constant(j.space_ptr(), 0.0); }
inline Jet constant_like(const Jet& j, double c) { return Jet::constant(j.space_ptr(), c); }
inline std::size_t ambient_dim(const Jet& j) { return j.space().dim(); }

/// Exact Taylor jet of a polynomial around `base`, valid to the space's order.
inline Jet taylor_jet(const Polynomial& p, std::span<const double> base, const std::shared_ptr<const JetSpace>& space) {
  if (p.dim() != space->dim() || base.size() != space->dim()) throw DimensionError("taylor_jet dimension mismatch");
  const std::size_t n = space->dim();
  // powers[i][k] = (base_i + u_i)^k, built lazily
  std::vector<std::vector<Jet>> powers(n);
  auto power = [&](std::size_t i, int k) -> const Jet& {
    auto& pw = powers[i];
    if (pw.empty()) pw.push_back(Jet::constant(space, 1.0));
    while (static_cast<int>(pw.size()) <= k) pw.push_back(pw.back() * Jet::coordinate(space, i, base[i]));
    return pw[k];
  };
  Jet out = Jet::constant(space, 0.0);
  for (const auto& [e, c] : p.terms()) {
    Jet term = Jet::constant(space, c);
    for (std::size_t i = 0; i < n; ++i)
      if (e[i] > 0) term = term * power(i, e[i]);
    out += term;
  }
  return out;
}

}  // namespace htf
