#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "htf/clifford.hpp"
#include "htf/field.hpp"
#include "htf/geometry.hpp"

namespace htf {

enum class Backend { group, sphere };

inline std::string to_string(Backend b) { return b == Backend::group ? "group" : "sphere"; }

class InvalidModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A totally geodesic foliation presented by polynomial fields on an ambient chart.
///
/// Metric: g = g_H + (1/epsilon) g0_V, where g0 is the backend base metric (round
/// metric on spheres, the metric making the defining frame orthonormal on groups).
/// vertical_fields are g0-unit.
struct FoliationModel {
  std::string name;
  std::string kind;
  Backend backend = Backend::group;
  std::size_t N = 0, n = 0, m = 0;
  double epsilon = 1.0;
  std::vector<PolyField> vertical_fields;
  /// Sphere: the N fields pi_H e_j (a Parseval frame of H). Group: X_1..X_n.
  std::vector<PolyField> horizontal_spanning_fields;

  // Group backend: global frame E = (X, Z), its coframe rows theta^k and the
  // Levi-Civita coefficients Gamma_ij^k of g0 in that frame (nonzero entries only).
  std::vector<std::vector<Polynomial>> coframe;
  struct GammaEntry {
    int i, j, k;
    Polynomial value;
  };
  std::vector<GammaEntry> gamma;
  std::optional<CliffordRepresentation> rep;
  int sphere_k = 0;

  AmbientChart chart() const {
    return backend == Backend::sphere ? AmbientChart(AmbientChart::Kind::unit_sphere, N)
                                      : AmbientChart(AmbientChart::Kind::euclidean, N);
  }
  std::size_t dim() const { return n + m; }
};

/// Same fields, vertical scale epsilon'.
inline FoliationModel canonical_variation(const FoliationModel& model, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("canonical_variation requires epsilon > 0");
  FoliationModel out = model;
  out.epsilon = eps;
  return out;
}

/// Group-type model from an arbitrary global frame and its coframe. The metric g0
/// makes the frame orthonormal; the first n frame fields span H.
inline FoliationModel make_frame_model(std::string name, std::string kind, std::vector<PolyField> frame,
                                       std::vector<std::vector<Polynomial>> coframe, std::size_t n, double epsilon = 1.0) {
  const std::size_t N = frame.size();
  if (N == 0 || n == 0 || n >= N) throw InvalidModelError("frame model needs 0 < n < N");
  if (coframe.size() != N) throw InvalidModelError("coframe must have N rows");
  for (const auto& f : frame)
    if (f.size() != N) throw DimensionError("frame field dimension mismatch");
  for (const auto& row : coframe)
    if (row.size() != N) throw DimensionError("coframe row dimension mismatch");
  if (!(epsilon > 0.0)) throw InvalidModelError("epsilon must be positive");

  FoliationModel model;
  model.name = std::move(name);
  model.kind = std::move(kind);
  model.backend = Backend::group;
  model.N = N;
  model.n = n;
  model.m = N - n;
  model.epsilon = epsilon;
  model.horizontal_spanning_fields.assign(frame.begin(), frame.begin() + n);
  model.vertical_fields.assign(frame.begin() + n, frame.end());
  model.coframe = std::move(coframe);

  auto theta = [&](std::size_t k, const PolyField& w) {
    Polynomial s(N);
    for (std::size_t l = 0; l < N; ++l) s += model.coframe[k][l] * w[l];
    return s;
  };
  // c[i][j][k] = theta^k([E_i, E_j])
  std::vector<Polynomial> c(N * N * N, Polynomial(N));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      const PolyField b = bracket(frame[i], frame[j]);
      for (std::size_t k = 0; k < N; ++k) {
        Polynomial v = theta(k, b).pruned(1e-14);
        c[(i * N + j) * N + k] = v;
        c[(j * N + i) * N + k] = -v;
      }
    }
  auto C = [&](std::size_t a, std::size_t b, std::size_t d) -> const Polynomial& { return c[(a * N + b) * N + d]; };
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      for (std::size_t k = 0; k < N; ++k) {
        Polynomial g = 0.5 * (C(i, j, k) - C(j, k, i) + C(k, i, j));
        g = g.pruned(1e-14);
        if (!g.is_zero()) model.gamma.push_back({int(i), int(j), int(k), std::move(g)});
      }
  return model;
}

/// The model's fields expressed in a scalar algebra S (Polynomial, or Jet around a point).
template <class S>
struct Realization {
  const FoliationModel* model = nullptr;
  S zero;
  VectorField<S> position;
  std::vector<VectorField<S>> vertical;
  std::vector<VectorField<S>> horizontal;
  std::vector<std::vector<S>> coframe;
  struct GammaEntry {
    int i, j, k;
    S value;
  };
  std::vector<GammaEntry> gamma;

  std::size_t N() const { return model->N; }
  std::size_t n() const { return model->n; }
  std::size_t m() const { return model->m; }
  double epsilon() const { return model->epsilon; }
  bool sphere() const { return model->backend == Backend::sphere; }
  /// Frame field E_k on the group backend.
  const VectorField<S>& frame(std::size_t k) const { return k < n() ? horizontal[k] : vertical[k - n()]; }
};

inline Realization<Polynomial> realize(const FoliationModel& model) {
  Realization<Polynomial> r;
  r.model = &model;
  r.zero = Polynomial(model.N);
  r.position = position_field(model.N);
  r.vertical = model.vertical_fields;
  r.horizontal = model.horizontal_spanning_fields;
  r.coframe = model.coframe;
  for (const auto& g : model.gamma) r.gamma.push_back({g.i, g.j, g.k, g.value});
  return r;
}

inline Realization<Jet> realize(const FoliationModel& model, std::span<const double> p, int order) {
  if (p.size() != model.N) throw DimensionError("point dimension mismatch");
  auto space = jet_space(model.N, order);
  Realization<Jet> r;
  r.model = &model;
  r.zero = Jet::constant(space, 0.0);
  r.position = taylor_jet(position_field(model.N), p, space);
  for (const auto& f : model.vertical_fields) r.vertical.push_back(taylor_jet(f, p, space));
  for (const auto& f : model.horizontal_spanning_fields) r.horizontal.push_back(taylor_jet(f, p, space));
  for (const auto& row : model.coframe) {
    std::vector<Jet> jr;
    for (const auto& c : row) jr.push_back(taylor_jet(c, p, space));
    r.coframe.push_back(std::move(jr));
  }
  for (const auto& g : model.gamma) r.gamma.push_back({g.i, g.j, g.k, taylor_jet(g.value, p, space)});
  return r;
}

template <class S>
S theta(const Realization<S>& r, std::size_t k, const VectorField<S>& w) {
  const auto& row = r.coframe[k];
  S s = row[0] * w[0];
  for (std::size_t l = 1; l < r.N(); ++l) add_product(s, row[l], w[l]);
  return s;
}

template <class S>
VectorField<S> pi_V(const Realization<S>& r, const VectorField<S>& w) {
  VectorField<S> out = zero_field_like(w);
  if (r.sphere()) {
    for (const auto& z : r.vertical) out += dot(z, w) * z;
  } else {
    for (std::size_t a = 0; a < r.m(); ++a) out += theta(r, r.n() + a, w) * r.vertical[a];
  }
  return out;
}

template <class S>
VectorField<S> pi_H(const Realization<S>& r, const VectorField<S>& w) {
  if (r.sphere()) return sphere_tangent_projection(r.position, w) - pi_V(r, w);
  VectorField<S> out = zero_field_like(w);
  for (std::size_t i = 0; i < r.n(); ++i) out += theta(r, i, w) * r.horizontal[i];
  return out;
}

/// Tangential projection: identity on the group backend.
template <class S>
VectorField<S> pi_T(const Realization<S>& r, const VectorField<S>& w) {
  return r.sphere() ? sphere_tangent_projection(r.position, w) : w;
}

/// g-inner product of two fields tangent to the chart.
template <class S>
S inner_g(const Realization<S>& r, const VectorField<S>& a, const VectorField<S>& b) {
  const double inv = 1.0 / r.epsilon();
  if (r.sphere()) {
    S s = dot(a, b) - dot(r.position, a) * dot(r.position, b);
    if (inv != 1.0)
      for (const auto& z : r.vertical) s += (inv - 1.0) * (dot(z, a) * dot(z, b));
    return s;
  }
  S s = theta(r, 0, a) * theta(r, 0, b);
  for (std::size_t k = 1; k < r.N(); ++k) {
    S t = theta(r, k, a) * theta(r, k, b);
    if (k >= r.n()) t *= inv;
    s += t;
  }
  return s;
}

/// Covector eta of b under g: inner_g(a, b) = sum_l a_l eta_l.
template <class S>
std::vector<S> metric_covector(const Realization<S>& r, const VectorField<S>& b) {
  const double inv = 1.0 / r.epsilon();
  std::vector<S> eta;
  if (r.sphere()) {
    const S xb = dot(r.position, b);
    for (std::size_t l = 0; l < r.N(); ++l) eta.push_back(b[l] - xb * r.position[l]);
    if (inv != 1.0)
      for (const auto& z : r.vertical) {
        const S zb = (inv - 1.0) * dot(z, b);
        for (std::size_t l = 0; l < r.N(); ++l) eta[l] += zb * z[l];
      }
    return eta;
  }
  eta.assign(r.N(), r.zero);
  for (std::size_t k = 0; k < r.N(); ++k) {
    S t = theta(r, k, b);
    if (k >= r.n()) t *= inv;
    for (std::size_t l = 0; l < r.N(); ++l) add_product(eta[l], r.coframe[k][l], t);
  }
  return eta;
}

/// Levi-Civita derivative of the base metric g0 (round on spheres).
template <class S>
VectorField<S> lc0(const Realization<S>& r, const VectorField<S>& a, const VectorField<S>& b) {
  if (r.sphere()) return sphere_tangent_projection(r.position, directional_derivative(a, b));
  const std::size_t N = r.N();
  std::vector<S> coef(N), ca(N), cb(N);
  for (std::size_t k = 0; k < N; ++k) {
    ca[k] = theta(r, k, a);
    cb[k] = theta(r, k, b);
  }
  for (std::size_t k = 0; k < N; ++k) coef[k] = directional_derivative(a, cb[k]);
  for (const auto& g : r.gamma) coef[g.k] += ca[g.i] * cb[g.j] * g.value;
  VectorField<S> out = coef[0] * r.frame(0);
  for (std::size_t k = 1; k < N; ++k) out += coef[k] * r.frame(k);
  return out;
}

/// Bott connection, assembled case by case after splitting both arguments.
template <class S>
VectorField<S> bott(const Realization<S>& r, const VectorField<S>& a, const VectorField<S>& b) {
  const VectorField<S> ah = pi_H(r, a), av = pi_V(r, a), bh = pi_H(r, b), bv = pi_V(r, b);
  VectorField<S> hh = lc0(r, ah, bh) + bracket(av, bh);
  VectorField<S> vv = bracket(ah, bv) + lc0(r, av, bv);
  return pi_H(r, hh) + pi_V(r, vv);
}

/// T(A, B) = -pi_V [pi_H A, pi_H B].
template <class S>
VectorField<S> torsion(const Realization<S>& r, const VectorField<S>& a, const VectorField<S>& b) {
  return -1.0 * pi_V(r, bracket(pi_H(r, a), pi_H(r, b)));
}

/// J_Z X for vertical Z, horizontal X, defined by <J_Z X, Y> = <Z, T(X, Y)>_g.
/// Expanded over the horizontal Parseval frame so it stays exact near the point.
template <class S>
VectorField<S> j_apply(const Realization<S>& r, const VectorField<S>& z, const VectorField<S>& x) {
  const VectorField<S> zv = pi_V(r, z), xh = pi_H(r, x);
  VectorField<S> out = zero_field_like(x);
  for (const auto& f : r.horizontal) out += inner_g(r, zv, torsion(r, xh, f)) * f;
  return out;
}

/// Levi-Civita connection of g_{eps'} = g_H + (1/eps') g_V (g_V taken from the model's g):
/// nabla_A B - T(A,B)/2 + (J_{A_V} B_H + J_{B_V} A_H) / (2 eps').
template <class S>
VectorField<S> variation_levi_civita(const Realization<S>& r, double eps_prime, const VectorField<S>& a,
                                     const VectorField<S>& b) {
  VectorField<S> out = bott(r, a, b) - 0.5 * torsion(r, a, b);
  out += (0.5 / eps_prime) * (j_apply(r, a, b) + j_apply(r, b, a));
  return out;
}

}  // namespace htf
