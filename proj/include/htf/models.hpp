#pragma once

#include <string>
#include <vector>

#include "htf/clifford.hpp"
#include "htf/model.hpp"

namespace htf {

/// Two-step nilpotent group on R^{n+m} = (x, z) from skew matrices A^a = J_a^T:
/// X_i = d/dx_i + 1/2 sum_a (A^a x)_i d/dz_a, Z_a = d/dz_a, so [X_i, X_j] = sum_a (J_a)_ij Z_a.
inline FoliationModel two_step_group(const std::vector<Eigen::MatrixXd>& gens, std::string name, std::string kind,
                                     double epsilon = 1.0) {
  if (gens.empty()) throw InvalidModelError("group model needs at least one generator");
  const std::size_t n = static_cast<std::size_t>(gens.front().rows()), m = gens.size(), N = n + m;
  for (const auto& g : gens) {
    if (static_cast<std::size_t>(g.rows()) != n || static_cast<std::size_t>(g.cols()) != n)
      throw InvalidModelError("generators must be square of equal size");
    if ((g + g.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw InvalidModelError("generators must be skew-symmetric");
  }
  // B[a][i] = 1/2 (A^a x)_i as a polynomial in x
  std::vector<std::vector<Polynomial>> B(m, std::vector<Polynomial>(n, Polynomial(N)));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l) {
        const double A_il = gens[a](l, i);  // A^a = J_a^T
        if (A_il != 0.0) B[a][i] += Polynomial::variable(N, l, 0.5 * A_il);
      }
  std::vector<PolyField> frame;
  for (std::size_t i = 0; i < n; ++i) {
    PolyField x = coordinate_field(N, i);
    for (std::size_t a = 0; a < m; ++a) x[n + a] = B[a][i];
    frame.push_back(std::move(x));
  }
  for (std::size_t a = 0; a < m; ++a) frame.push_back(coordinate_field(N, n + a));
  std::vector<std::vector<Polynomial>> coframe(N, std::vector<Polynomial>(N, Polynomial(N)));
  for (std::size_t k = 0; k < N; ++k) coframe[k][k] = Polynomial::constant(N, 1.0);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t i = 0; i < n; ++i) coframe[n + a][i] = -1.0 * B[a][i];
  return make_frame_model(std::move(name), std::move(kind), std::move(frame), std::move(coframe), n, epsilon);
}

inline FoliationModel htype_group(const CliffordRepresentation& rep, std::string name = "htype-group") {
  if (rep.relation_residual() > 1e-12) throw InvalidModelError("representation violates the Clifford relations");
  FoliationModel model = two_step_group(rep.generators, std::move(name), "htype-group");
  model.rep = rep;
  return model;
}

namespace detail {

inline FoliationModel sphere_model(std::size_t N, std::vector<PolyField> vertical, std::string name, std::string kind,
                                   double epsilon, int k) {
  if (!(epsilon > 0.0)) throw InvalidModelError("epsilon must be positive");
  FoliationModel model;
  model.name = std::move(name);
  model.kind = std::move(kind);
  model.backend = Backend::sphere;
  model.N = N;
  model.m = vertical.size();
  model.n = N - 1 - model.m;
  model.epsilon = epsilon;
  model.sphere_k = k;
  model.vertical_fields = std::move(vertical);
  const PolyField x = position_field(N);
  for (std::size_t j = 0; j < N; ++j) {
    PolyField h = coordinate_field(N, j) - x[j] * x;
    for (const auto& z : model.vertical_fields) h -= z[j] * z;
    model.horizontal_spanning_fields.push_back(std::move(h));
  }
  return model;
}

}  // namespace detail

/// S^{2k+1} in C^{k+1}, vertical field Z(p) = i p.
inline FoliationModel complex_hopf(int k, double epsilon, std::string name = "") {
  if (k < 1) throw InvalidModelError("complex_hopf requires k >= 1");
  const std::size_t N = 2 * k + 2;
  std::vector<double> A(N * N, 0.0);
  for (std::size_t l = 0; l < N / 2; ++l) {
    A[(2 * l) * N + 2 * l + 1] = -1.0;
    A[(2 * l + 1) * N + 2 * l] = 1.0;
  }
  if (name.empty()) name = "complex-hopf-s" + std::to_string(2 * k + 1);
  return detail::sphere_model(N, {linear_field(N, A)}, std::move(name), "complex-hopf", epsilon, k);
}

/// S^{4k+3} in H^{k+1}, coordinate blocks (1, i, j, k); vertical fields are right
/// multiplication p.i, p.j, p.k.
inline FoliationModel quaternionic_hopf(int k, double epsilon, std::string name = "") {
  if (k < 1) throw InvalidModelError("quaternionic_hopf requires k >= 1");
  const std::size_t N = 4 * k + 4;
  // per block, (q.u)_r = sum_c M[r][c] q_c
  static constexpr int right[3][4][4] = {
      {{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, -1, 0}},
      {{0, 0, -1, 0}, {0, 0, 0, -1}, {1, 0, 0, 0}, {0, 1, 0, 0}},
      {{0, 0, 0, -1}, {0, 0, 1, 0}, {0, -1, 0, 0}, {1, 0, 0, 0}},
  };
  std::vector<PolyField> vertical;
  for (int u = 0; u < 3; ++u) {
    std::vector<double> A(N * N, 0.0);
    for (std::size_t b = 0; b < N / 4; ++b)
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) A[(4 * b + r) * N + 4 * b + c] = right[u][r][c];
    vertical.push_back(linear_field(N, A));
  }
  if (name.empty()) name = "quaternionic-hopf-s" + std::to_string(4 * k + 3);
  return detail::sphere_model(N, std::move(vertical), std::move(name), "quaternionic-hopf", epsilon, k);
}

}  // namespace htf
