#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "htf/jet.hpp"
#include "htf/polynomial.hpp"

namespace htf {

/// Vector field on an ambient chart R^N with components in a scalar algebra S
/// (Polynomial for symbolic work, Jet for evaluation around a point).
template <class S>
struct VectorField {
  std::vector<S> c;

  VectorField() = default;
  explicit VectorField(std::vector<S> components) : c(std::move(components)) {}

  std::size_t size() const { return c.size(); }
  S& operator[](std::size_t i) { return c[i]; }
  const S& operator[](std::size_t i) const { return c[i]; }

  VectorField& operator+=(const VectorField& o) {
    check(o);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
    return *this;
  }
  VectorField& operator-=(const VectorField& o) {
    check(o);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= o.c[i];
    return *this;
  }
  VectorField& operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
  }

  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
  friend VectorField operator*(VectorField a, double s) { return a *= s; }
  friend VectorField operator*(double s, VectorField a) { return a *= s; }
  friend VectorField operator*(const S& f, const VectorField& a) {
    VectorField out = a;
    for (auto& v : out.c) v = f * v;
    return out;
  }

 private:
  void check(const VectorField& o) const {
    if (o.c.size() != c.size()) throw DimensionError("vector field dimension mismatch");
  }
};

using PolyField = VectorField<Polynomial>;
using JetField = VectorField<Jet>;

template <class S>
VectorField<S> zero_field_like(const VectorField<S>& a) {
  std::vector<S> comps;
  comps.reserve(a.size());
  for (const auto& v : a.c) comps.push_back(zero_like(v));
  return VectorField<S>(std::move(comps));
}

/// Constant coordinate field d/dx_i.
inline PolyField coordinate_field(std::size_t dim, std::size_t i) {
  std::vector<Polynomial> comps(dim, Polynomial(dim));
  comps[i] = Polynomial::constant(dim, 1.0);
  return PolyField(std::move(comps));
}

/// Position field x -> x.
inline PolyField position_field(std::size_t dim) {
  std::vector<Polynomial> comps;
  for (std::size_t i = 0; i < dim; ++i) comps.push_back(Polynomial::variable(dim, i));
  return PolyField(std::move(comps));
}

/// Linear field x -> A x for a row-major N x N matrix A.
inline PolyField linear_field(std::size_t dim, std::span<const double> matrix) {
  if (matrix.size() != dim * dim) throw DimensionError("linear_field matrix size");
  std::vector<Polynomial> comps(dim, Polynomial(dim));
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t k = 0; k < dim; ++k)
      if (matrix[r * dim + k] != 0.0) comps[r] += Polynomial::variable(dim, k, matrix[r * dim + k]);
  return PolyField(std::move(comps));
}

/// Euclidean pairing sum_i a_i b_i.
template <class S>
S dot(const VectorField<S>& a, const VectorField<S>& b) {
  if (a.size() != b.size()) throw DimensionError("dot dimension mismatch");
  S out = a[0] * b[0];
  for (std::size_t i = 1; i < a.size(); ++i) out += a[i] * b[i];
  return out;
}

/// D_X f = sum_i X^i d_i f.
template <class S>
S directional_derivative(const VectorField<S>& x, const S& f) {
  if (x.size() != ambient_dim(f)) throw DimensionError("directional_derivative dimension mismatch");
  S out = x[0] * derivative(f, 0);
  for (std::size_t i = 1; i < x.size(); ++i) add_product(out, x[i], derivative(f, i));
  return out;
}

template <class S>
VectorField<S> directional_derivative(const VectorField<S>& x, const VectorField<S>& y) {
  if (x.size() != y.size()) throw DimensionError("directional_derivative dimension mismatch");
  std::vector<S> comps;
  comps.reserve(y.size());
  for (const auto& yi : y.c) comps.push_back(directional_derivative(x, yi));
  return VectorField<S>(std::move(comps));
}

/// Lie bracket [X, Y] = D_X Y - D_Y X.
template <class S>
VectorField<S> bracket(const VectorField<S>& x, const VectorField<S>& y) {
  return directional_derivative(x, y) - directional_derivative(y, x);
}

inline std::vector<double> evaluate(const PolyField& f, std::span<const double> p) {
  std::vector<double> out;
  out.reserve(f.size());
  for (const auto& comp : f.c) out.push_back(comp(p));
  return out;
}

inline std::vector<double> values(const JetField& f) {
  std::vector<double> out;
  out.reserve(f.size());
  for (const auto& comp : f.c) out.push_back(comp.value());
  return out;
}

inline JetField taylor_jet(const PolyField& f, std::span<const double> base, const std::shared_ptr<const JetSpace>& space) {
  std::vector<Jet> comps;
  comps.reserve(f.size());
  for (const auto& comp : f.c) comps.push_back(taylor_jet(comp, base, space));
  return JetField(std::move(comps));
}

inline std::string to_string(const PolyField& f) {
  std::string s = "(";
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) s += ", ";
    s += f[i].to_string();
  }
  return s + ")";
}

}  // namespace htf
